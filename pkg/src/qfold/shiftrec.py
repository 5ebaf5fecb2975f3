"""q-difference systems ``F(x) = M(x) F(x q^s)`` and scalar recurrences
``sum_j c_j(x, q) F(x q^{s j}) = 0``.

Series here are power series in ``x`` whose coefficients are power series
in ``q``; they are solved degree by degree in ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactalg import LaurentPoly, RationalFunction, lp_gcd, lp_exact_divide, primitive, ratfun_kernel
from .multisum import MultisumSpec, ShiftRule, evaluate, shift
from .qseries import CheckReport, TruncatedSeries, pochhammer, q_mono, series_invert

X = LaurentPoly.var("x")
Q = LaurentPoly.var("q")


def _x_parts(p: LaurentPoly) -> dict[int, list[tuple[int, int]]]:
    """Split a polynomial in x, q into ``x-degree -> [(q-exp, coef)]``."""
    if p.denom != 1:
        raise ValueError("fractional q-exponents are not supported here")
    out: dict[int, list[tuple[int, int]]] = {}
    for (ex, ey, eq), c in p.items():
        if ey:
            raise ValueError("y is not allowed in a shift system")
        out.setdefault(ex, []).append((eq, c))
    return out


def _mul_add(acc: np.ndarray, arr: np.ndarray, terms: Sequence[tuple[int, int]], extra: int = 0) -> None:
    """``acc += (sum c q^{e+extra}) * arr`` truncated to ``len(acc)``."""
    n = len(acc)
    for e, c in terms:
        sh = e + extra
        if sh < 0:
            raise ValueError("negative q-exponent in a coefficient")
        if sh < n:
            acc[sh:] += c * arr[: n - sh]


def _divide_poly(arr: np.ndarray, terms: Sequence[tuple[int, int]]) -> np.ndarray:
    """``arr / P`` where ``P`` has constant term ±1 and nonnegative q-powers."""
    const = dict((e, 0) for e, _ in terms)
    for e, c in terms:
        const[e] += c
    u = const.get(0, 0)
    if u not in (1, -1):
        raise ArithmeticError("pivot is not a unit power series")
    rest = [(e, c) for e, c in const.items() if e > 0 and c]
    out = np.zeros(len(arr), dtype=object)
    for k in range(len(arr)):
        v = arr[k]
        for e, c in rest:
            if e <= k:
                v -= c * out[k - e]
        out[k] = u * v
    return out


def _as_series(cols: dict[int, np.ndarray], order: int, xmax: int) -> TruncatedSeries:
    return TruncatedSeries({(n, 0): a for n, a in cols.items()}, 0, order, 1, xmax)


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class ShiftSystem:
    matrix: tuple[tuple[LaurentPoly, ...], ...]
    step: int = 1
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise ValueError("system matrix must be square")
        if self.step < 1:
            raise ValueError("shift step must be positive")
        for row in self.matrix:
            for e in row:
                for (ex, ey, eq), _ in e.items():
                    if ex < 0 or ey != 0:
                        raise ValueError("entries must be polynomials in x (and q)")

    @property
    def size(self) -> int:
        return len(self.matrix)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"F{i}"

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            return label
        if label not in self.labels:
            raise KeyError(f"unknown component {label!r}")
        return self.labels.index(label)

    def x0_part(self) -> list[list[LaurentPoly]]:
        return [[LaurentPoly({k: c for k, c in e.items() if k[0] == 0}) for e in row] for row in self.matrix]


def solve_system(system: ShiftSystem, init: Sequence[int], xdeg: int, qorder: int) -> list[TruncatedSeries]:
    """Unique solution with ``[x^0] F = init``, to x-degree ``xdeg`` and
    q-order ``qorder``."""
    n = system.size
    s = system.step
    parts = [[_x_parts(e) for e in row] for row in system.matrix]
    M0 = [[p.get(0, []) for p in row] for row in parts]
    # consistency at n = 0: M0(q) evaluated... must fix init exactly
    for i in range(n):
        val = {}
        for j in range(n):
            for e, c in M0[i][j]:
                val[e] = val.get(e, 0) + c * init[j]
        val = {e: c for e, c in val.items() if c}
        if val != ({0: init[i]} if init[i] else {}):
            raise ValueError(f"initial vector is inconsistent in row {system.label(i)}")
    f: list[dict[int, np.ndarray]] = [dict() for _ in range(n)]
    for i in range(n):
        a = np.zeros(qorder, dtype=object)
        if qorder:
            a[0] = init[i]
        f[i][0] = a
    for deg in range(1, xdeg + 1):
        rhs = [np.zeros(qorder, dtype=object) for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for a, terms in parts[i][j].items():
                    if a == 0 or a > deg:
                        continue
                    _mul_add(rhs[i], f[j][deg - a], terms, s * (deg - a))
        # fixed point of f = rhs + q^{s deg} M0 f; each pass gains s*deg
        cur = [r.copy() for r in rhs]
        passes = qorder // (s * deg) + 2
        for _ in range(passes):
            nxt = [r.copy() for r in rhs]
            for i in range(n):
                for j in range(n):
                    if M0[i][j]:
                        _mul_add(nxt[i], cur[j], M0[i][j], s * deg)
            if all(np.array_equal(a, b) for a, b in zip(nxt, cur)):
                break
            cur = nxt
        for i in range(n):
            f[i][deg] = cur[i]
    return [_as_series(f[i], qorder, xdeg) for i in range(n)]


def system_residual(system: ShiftSystem, sol: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """``F - M F(xq^s)`` summed over components (zero iff every row holds,
    barring cancellation; rows are also checked individually by callers)."""
    rows = system_residual_rows(system, sol)
    out = rows[0]
    for r in rows[1:]:
        out = out + r
    return out


def system_residual_rows(system: ShiftSystem, sol: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    step = LaurentPoly.monomial(1, x=1, q=system.step)
    shifted = [s.substitute("x", step) for s in sol]
    out = []
    for i, row in enumerate(system.matrix):
        acc = sol[i]
        for j, e in enumerate(row):
            if not e.is_zero():
                acc = acc - shifted[j].mul_poly(e)
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# scalar recurrences


@dataclass(frozen=True)
class ScalarRecurrence:
    """``sum_j coeffs[j](x, q) * F(x q^{step * j}) = 0``."""

    coeffs: tuple[LaurentPoly, ...]
    step: int = 1

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("a recurrence needs at least two coefficients")
        if self.coeffs[0].is_zero() or self.coeffs[-1].is_zero():
            raise ValueError("leading and trailing coefficients must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def normalized(self) -> "ScalarRecurrence":
        """Divide by the common monomial and polynomial content; make the
        constant term of ``c_0`` positive (when present)."""
        cs = [c for c in self.coeffs]
        out = primitive(cs)
        k0 = out[0].constant_term()
        if k0 < 0 or (k0 == 0 and out[0].items() and max(out[0].terms.items())[1] < 0):
            out = [-c for c in out]
        return ScalarRecurrence(tuple(out), self.step)

    def shift_x(self, t: int) -> "ScalarRecurrence":
        """Substitute ``x -> x q^t`` in every coefficient."""
        return ScalarRecurrence(tuple(c.shift_x(t) for c in self.coeffs), self.step)

    def equivalent(self, other: "ScalarRecurrence", max_shift: int = 40) -> tuple[bool, str]:
        """Equality up to a unit monomial and an argument shift ``x -> x q^t``."""
        if self.step != other.step or self.order != other.order:
            return False, "different step or order"
        target = other.normalized().coeffs
        for t in sorted(range(-max_shift, max_shift + 1), key=abs):
            cand = self.shift_x(t).normalized().coeffs
            if cand == target:
                return True, "identical" if t == 0 else f"after x -> x*q^{t}"
        return False, "no matching shift"

    def __str__(self):
        from .certify import _join

        pairs = [(c, "F(x)" if j == 0 else f"F(x*q^{self.step * j})") for j, c in enumerate(self.coeffs)]
        return _join(p for p in pairs if not p[0].is_zero()) + " = 0"


def uncouple(system: ShiftSystem, target: int | str, max_order: int = 8) -> ScalarRecurrence:
    """Scalar recurrence annihilating component ``target``.

    With ``r_0 = e_i`` and ``r_{t+1}(x) = (r_t M)(x q^{-s})`` one has
    ``F_i(x q^{-ts}) = r_t(x) . F(x)``; the first linear dependency
    ``sum d_t r_t = 0`` over Q(x, q) gives ``sum d_t F_i(x q^{-ts}) = 0``,
    which is then rewritten with forward shifts.
    """
    i = system.index(target)
    n = system.size
    s = system.step
    back = LaurentPoly.monomial(1, x=1, q=-s)
    rows = [[LaurentPoly.const(1 if j == i else 0) for j in range(n)]]
    for t in range(1, max_order + 1):
        prev = rows[-1]
        nxt = []
        for j in range(n):
            acc = LaurentPoly.const(0)
            for m in range(n):
                e = system.matrix[m][j]
                if not prev[m].is_zero() and not e.is_zero():
                    acc = acc + prev[m] * e
            nxt.append(acc.substitute("x", back))
        rows.append(nxt)
        # columns r_0..r_t; kernel gives the dependency
        mat = [[rows[c][j] for c in range(t + 1)] for j in range(n)]
        ker = ratfun_kernel(mat)
        if ker:
            d = ker[0]
            fwd = LaurentPoly.monomial(1, x=1, q=s * t)
            coeffs = [d[t - u].substitute("x", fwd) for u in range(t + 1)]
            # trim zero tails that can appear when lower-order dependency exists
            while coeffs and coeffs[-1].is_zero():
                coeffs.pop()
            return ScalarRecurrence(tuple(coeffs), s).normalized()
    raise ValueError(f"no dependency among {max_order + 1} functionals; raise max_order")


def _pivot_terms(rec: ScalarRecurrence, deg: int) -> list[tuple[int, int]]:
    terms = []
    for j, c in enumerate(rec.coeffs):
        for e, v in _x_parts(c).get(0, []):
            terms.append((e + rec.step * j * deg, v))
    return terms


def solve_scalar_unique(rec: ScalarRecurrence, xdeg: int, qorder: int, f0: int = 1) -> TruncatedSeries:
    """The solution with ``[x^0] F = f0``; the pivot ``sum_j [x^0]c_j q^{s j n}``
    is checked to be a unit power series at every degree ``n >= 1``."""
    parts = [_x_parts(c) for c in rec.coeffs]
    for p in parts:
        if any(a < 0 for a in p):
            raise ValueError("coefficients must be polynomials in x")
    s = rec.step
    p0 = {}
    for e, v in _pivot_terms(rec, 0):
        p0[e] = p0.get(e, 0) + v
    if any(p0.values()):
        raise ValueError("degree-0 equation does not vanish; f0 is not free")
    f: dict[int, np.ndarray] = {}
    a0 = np.zeros(qorder, dtype=object)
    if qorder:
        a0[0] = f0
    f[0] = a0
    for deg in range(1, xdeg + 1):
        rhs = np.zeros(qorder, dtype=object)
        for j, p in enumerate(parts):
            for a, terms in p.items():
                if a == 0 or a > deg:
                    continue
                _mul_add(rhs, f[deg - a], terms, s * j * (deg - a))
        try:
            f[deg] = _divide_poly(-rhs, _pivot_terms(rec, deg))
        except ArithmeticError as exc:
            raise ArithmeticError(f"pivot at x-degree {deg} is not a unit; solution not determined") from exc
    return _as_series(f, qorder, xdeg)


def recurrence_residual(rec: ScalarRecurrence, candidate, order: int) -> TruncatedSeries:
    """``sum_j c_j F(x q^{s j})`` for a series or a multisum spec (evaluated
    through the linear-shift rule)."""
    total = None
    for j, c in enumerate(rec.coeffs):
        if c.is_zero():
            continue
        qmin = int(min(Fraction(k[2], c.denom) for k, _ in c.items()))
        if isinstance(candidate, MultisumSpec):
            spec = shift(candidate, ShiftRule("x", rec.step * j))
            series = evaluate(spec, order - min(qmin, 0))
        else:
            series = candidate.substitute("x", LaurentPoly.monomial(1, x=1, q=rec.step * j))
        term = series.mul_poly(c)
        total = term if total is None else total + term
    return total.truncate(order * total.denom) if total.order > order * total.denom else total


def verify_recurrence(rec: ScalarRecurrence, candidate, order: int) -> CheckReport:
    res = recurrence_residual(rec, candidate, order)
    v = res.valuation()
    first = None if v is None else Fraction(v, res.denom)
    return CheckReport("recurrence", v is None, res.true_order, first)


# ---------------------------------------------------------------------------
# the two-variable uniqueness system


def rr_unary(var_power: int, base: int, order: int, deg: int) -> dict[int, list[int]]:
    """``sum_i z^i q^{base i^2} / (q^base; q^base)_i`` as ``i -> q-coefficients``."""
    out = {}
    for i in range(deg + 1):
        e = base * i * i
        arr = [0] * order
        if e < order:
            den = pochhammer(q_mono(base), q_mono(base), i, order - e)
            inv = series_invert(den).coefficients()
            for k, c in enumerate(inv):
                if e + k < order:
                    arr[e + k] = c
        out[i] = arr
    return out


def solve_xy_unique(qorder: int, xdeg: int, ydeg: int) -> TruncatedSeries:
    """Unique solution of ``F(x) = F(xq) + xq F(xq^2)`` with
    ``F(0, y, q) = sum y^i q^{2i^2}/(q^2;q^2)_i`` and ``F(x, y, 0) = 1``,
    via ``f_{i,j,k} = f_{i,j,k-i} + f_{i-1,j,k-2i+1}`` by induction on i + k.
    """
    yb = rr_unary(1, 2, qorder, ydeg)
    f: dict[tuple[int, int], list[int]] = {}
    for j in range(ydeg + 1):
        f[(0, j)] = list(yb[j])
    for N in range(qorder + xdeg + 1):
        for i in range(1, min(N, xdeg) + 1):
            k = N - i
            if k >= qorder:
                continue
            for j in range(ydeg + 1):
                row = f.setdefault((i, j), [0] * qorder)
                v = 0
                if k - i >= 0:
                    v += row[k - i]
                if k - 2 * i + 1 >= 0:
                    v += f[(i - 1, j)][k - 2 * i + 1]
                row[k] = v
    data = {key: np.array(v, dtype=object) for key, v in f.items()}
    return TruncatedSeries(data, 0, qorder, 1, xdeg, ydeg)


def rr_product_series(qorder: int, xdeg: int, ydeg: int) -> TruncatedSeries:
    """``(sum x^i q^{i^2}/(q)_i) (sum y^j q^{2j^2}/(q^2;q^2)_j)``."""
    xs = rr_unary(1, 1, qorder, xdeg)
    ys = rr_unary(1, 2, qorder, ydeg)
    a = TruncatedSeries({(i, 0): np.array(v, dtype=object) for i, v in xs.items()}, 0, qorder, 1, xdeg)
    b = TruncatedSeries({(0, j): np.array(v, dtype=object) for j, v in ys.items()}, 0, qorder, 1, None, ydeg)
    return a * b


# ---------------------------------------------------------------------------
# the Nandi system


def _p(text: str) -> LaurentPoly:
    from .certify import parse_laurent

    return parse_laurent(text)


NANDI_LABELS = ("F0", "F1", "F2", "F3", "F4", "F5", "F7")

NANDI_ROWS = (
    ("1", "x*q^2", "x^2*q^4", "x*q", "x^2*q^2", "0", "0"),
    ("0", "x*q^2", "0", "0", "0", "1", "0"),
    ("0", "0", "0", "0", "0", "0", "1"),
    ("0", "x*q^2", "0", "x*q", "0", "1", "0"),
    ("0", "0", "0", "0", "x*q^2", "0", "1"),
    ("1", "x*q^2", "x^2*q^4", "x*q", "0", "0", "0"),
    ("1", "x*q^2", "x^2*q^4", "0", "0", "0", "0"),
)

PRINTED_RECURRENCES = {
    "F1": (
        "1",
        "-q^5*x - q^4*x - q^2*x - 1",
        "q^3*x*(q^8*x + q^6*x + q^2 + q - 1)",
        "x^2*q^8*(q^8*x + q^6*x - q^3 + q - 1)",
        "-q^16*x^3*(q^11*x + q^9*x + q^8*x - q^3 - q - 1)",
        "x^3*q^19*(q^18*x^2 - q^10*x - q^8*x + 1)",
    ),
    "F5": (
        "1",
        "-q^4*x - q^3*x - q^2*x - 1",
        "x*q*(q^8*x + q^7*x + q^6*x - q^3*x + q^3 + q^2 - 1)",
        "-x^2*q^4*(q^11*x - q^8*x - q^7*x - q^6*x + q^5 - q^3 + 1)",
        "-q^11*x^3*(q^10*x + q^9*x + q^8*x - q^2 - q - 1)",
        "q^13*x^3*(q^18*x^2 - q^10*x - q^8*x + 1)",
    ),
    "F7": (
        "1",
        "-q^4*x - q^3*x - q^2*x - 1",
        "(q^5*x + q^4*x + q^3*x - x + 1)*q^4*x",
        "-x^2*q^6*(q^9*x - q^6*x - q^5*x - q^4*x + 1)",
        "-x^3*q^13*(q^8*x + q^7*x + q^6*x - q^2 - q - 1)",
        "x^3*q^17*(q^14*x^2 - q^8*x - q^6*x + 1)",
    ),
}


def nandi_system() -> ShiftSystem:
    return ShiftSystem(tuple(tuple(_p(e) for e in row) for row in NANDI_ROWS), 2, NANDI_LABELS)


def printed_recurrence(name: str) -> ScalarRecurrence:
    return ScalarRecurrence(tuple(_p(c) for c in PRINTED_RECURRENCES[name]), 2)
