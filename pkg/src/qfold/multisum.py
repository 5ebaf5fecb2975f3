"""Exact evaluation of lattice multisums

    sum_{m >= 0} x^{w_x . m} y^{w_y . m} q^{m^T B m / 2 + b . m} / prod_j prod_{(a, s)} (q^a; q^s)_{m_j}

by depth-first enumeration with exact convex lower bounds for pruning.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exactalg import LaurentPoly
from .folding import FoldedCartan, is_positive_definite, rational_inverse
from .qseries import CheckReport, TruncatedSeries

Poch = tuple[Fraction, Fraction]  # (q^a; q^s)


def _frac_matrix(B) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(e) for e in row) for row in B)


def _lcm(*vals: int) -> int:
    out = 1
    for v in vals:
        out = out * v // math.gcd(out, v)
    return out


@dataclass(frozen=True)
class MultisumSpec:
    """Data of a multisum; see the module docstring.

    ``denoms[j]`` is a tuple of ``(a, s)`` pairs, each contributing
    ``(q^a; q^s)_{m_j}`` to the denominator.
    """

    B: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    denoms: tuple[tuple[Poch, ...], ...]
    xweights: tuple[int, ...] | None = None
    yweights: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        d = len(self.B)
        if any(len(r) != d for r in self.B) or len(self.b) != d or len(self.denoms) != d:
            raise ValueError("dimension mismatch between form, linear term and denominators")
        for w in (self.xweights, self.yweights):
            if w is not None and len(w) != d:
                raise ValueError("weight vector has the wrong length")
        if any(self.B[i][j] != self.B[j][i] for i in range(d) for j in range(d)):
            raise ValueError("B must be symmetric")
        if not is_positive_definite(self.B):
            raise ValueError("quadratic form is not positive definite")
        for ps in self.denoms:
            for a, s in ps:
                if s <= 0 or a <= 0:
                    raise ValueError("Pochhammer factors need positive exponents")

    @classmethod
    def make(cls, B, b=None, bases: Sequence = (), xweights=None, yweights=None, denoms=None,
             name: str = "") -> "MultisumSpec":
        """Build a spec; ``bases[j] = s`` means ``(q^s; q^s)_{m_j}``."""
        B = _frac_matrix(B)
        d = len(B)
        b = tuple(Fraction(e) for e in (b if b is not None else [0] * d))
        if denoms is None:
            if len(bases) != d:
                raise ValueError("need one Pochhammer base per variable")
            denoms = tuple(((Fraction(s), Fraction(s)),) for s in bases)
        else:
            denoms = tuple(tuple((Fraction(a), Fraction(s)) for a, s in ps) for ps in denoms)
        xw = tuple(int(e) for e in xweights) if xweights is not None else None
        yw = tuple(int(e) for e in yweights) if yweights is not None else None
        return cls(B, b, denoms, xw, yw, name)

    @property
    def dim(self) -> int:
        return len(self.b)

    @cached_property
    def grid(self) -> int:
        """Least D putting every exponent of every term on the 1/D grid."""
        dens = []
        for i in range(self.dim):
            dens.append((self.B[i][i] / 2).denominator)
            dens.append(self.b[i].denominator)
            for j in range(i + 1, self.dim):
                dens.append(self.B[i][j].denominator)
            for a, s in self.denoms[i]:
                dens += [a.denominator, s.denominator]
        return _lcm(*dens)

    def exponent(self, m: Sequence[int]) -> Fraction:
        d = self.dim
        return (sum(self.B[i][j] * m[i] * m[j] for i in range(d) for j in range(d)) / 2
                + sum(self.b[i] * m[i] for i in range(d)))

    def term(self, m: Sequence[int]) -> tuple[LaurentPoly, list[tuple[Fraction, Fraction, int]]]:
        """Numerator monomial and the Pochhammer list ``(a, s, m_j)`` of one term."""
        ex = sum(w * v for w, v in zip(self.xweights, m)) if self.xweights else 0
        ey = sum(w * v for w, v in zip(self.yweights, m)) if self.yweights else 0
        mono = LaurentPoly.monomial(1, x=ex, y=ey, q=self.exponent(m))
        pochs = [(a, s, m[j]) for j in range(self.dim) for a, s in self.denoms[j]]
        return mono, pochs

    def with_linear(self, b: Sequence) -> "MultisumSpec":
        return replace(self, b=tuple(Fraction(e) for e in b))

    def __hash__(self):
        return hash((self.B, self.b, self.denoms, self.xweights, self.yweights))


# ---------------------------------------------------------------------------
# exact convex lower bound


class _Bounder:
    """Exact ``min_{y >= 0} E(prefix, y)`` over the real orthant of the
    remaining coordinates, by trying every support set of the minimiser."""

    def __init__(self, spec: MultisumSpec):
        self.B = spec.B
        self.b = spec.b
        d = spec.dim
        self.d = d
        # for each depth j (first j coordinates fixed), the list of
        # (support S, inverse of B_SS)
        self.tables = []
        for j in range(d + 1):
            rem = list(range(j, d))
            entries = []
            for r in range(1, len(rem) + 1):
                for S in itertools.combinations(rem, r):
                    sub = [[self.B[a][c] for c in S] for a in S]
                    entries.append((S, rational_inverse(sub)))
            self.tables.append(entries)

    def minimum(self, prefix: Sequence[int]) -> Fraction:
        j = len(prefix)
        d = self.d
        base = Fraction(0)
        for s in range(j):
            base += self.b[s] * prefix[s]
            for t in range(j):
                base += self.B[s][t] * prefix[s] * prefix[t] / 2
        # linear coefficients for the free coordinates
        g = {u: self.b[u] + sum(self.B[u][s] * prefix[s] for s in range(j)) for u in range(j, d)}
        best = base  # y = 0
        for S, inv in self.tables[j]:
            gS = [g[u] for u in S]
            y = [-sum(inv[a][c] * gS[c] for c in range(len(S))) for a in range(len(S))]
            if any(v < 0 for v in y):
                continue
            val = base + sum(gS[a] * y[a] for a in range(len(S))) / 2
            if val < best:
                best = val
        return best


# ---------------------------------------------------------------------------
# enumeration


def _divide_by_one_minus(arr: np.ndarray, e: int) -> np.ndarray:
    """``arr / (1 - q^e)`` for ``e > 0`` on a truncated dense array."""
    n = len(arr)
    if e >= n:
        return arr
    rows = -(-n // e)
    pad = np.concatenate([arr, np.zeros(rows * e - n, dtype=object)])
    return np.cumsum(pad.reshape(rows, e), axis=0).reshape(-1)[:n]


@dataclass
class GradedSum:
    """Raw enumeration output: weight key -> dense coefficients on the grid."""

    data: dict[tuple[int, ...], np.ndarray]
    lo: int  # scaled exponent of index 0
    order: int  # scaled exclusive bound
    denom: int
    points: int = 0

    def coefficients(self, key, start=None) -> list[int]:
        start = self.lo if start is None else start
        a = self.data.get(tuple(key))
        out = []
        for e in range(start, self.order):
            i = e - self.lo
            out.append(int(a[i]) if a is not None and 0 <= i < len(a) else 0)
        return out


def evaluate_graded(spec: MultisumSpec, order, weights: Sequence[Sequence[int]] | None = None,
                    max_degree: Sequence[int | None] | None = None, denom: int | None = None) -> GradedSum:
    """Enumerate every lattice point with exponent below ``order`` (a true
    exponent) and accumulate terms keyed by ``weights @ m``.

    ``max_degree[r]`` drops points whose ``r``-th weight exceeds the bound;
    weights must then be nonnegative in that row.
    """
    d = spec.dim
    D = spec.grid if denom is None else denom
    if denom is not None and denom % spec.grid:
        raise ValueError("requested grid is coarser than the spec needs")
    order_s = Fraction(order) * D
    if order_s.denominator != 1:
        raise ValueError("order is not on the exponent grid")
    order_s = int(order_s)
    W = [list(r) for r in weights] if weights is not None else []
    caps = list(max_degree) if max_degree is not None else [None] * len(W)
    for r, cap in enumerate(caps):
        if cap is not None and any(w < 0 for w in W[r]):
            raise ValueError("degree bounds need nonnegative weights")
    bounder = _Bounder(spec)
    gmin = bounder.minimum([])
    lo = min(0, math.ceil(gmin * D))
    n = max(order_s - lo, 0)
    pochs = [[(int(a * D), int(s * D)) for a, s in spec.denoms[j]] for j in range(d)]
    B2 = [[spec.B[i][j] * D for j in range(d)] for i in range(d)]
    bD = [spec.b[i] * D for i in range(d)]

    data: dict[tuple[int, ...], np.ndarray] = {}
    count = 0
    unit = np.zeros(n, dtype=object)
    if n:
        unit[0] = 1

    def leaf(m, e_s, G):
        nonlocal count
        count += 1
        key = tuple(sum(w * v for w, v in zip(row, m)) for row in W)
        off = e_s - lo
        length = n - off
        if length <= 0:
            return
        acc = data.get(key)
        if acc is None:
            acc = data[key] = np.zeros(n, dtype=object)
        acc[off:] += G[:length]

    def degree_ok(m):
        for r, cap in enumerate(caps):
            if cap is not None and sum(w * v for w, v in zip(W[r], m)) > cap:
                return False
        return True

    def walk(prefix: list[int], G: np.ndarray):
        j = len(prefix)
        if j == d:
            e = sum(B2[s][t] * prefix[s] * prefix[t] for s in range(d) for t in range(d)) / 2
            e += sum(bD[s] * prefix[s] for s in range(d))
            leaf(prefix, int(e), G)
            return
        prev = None
        t = 0
        Gt = G
        while True:
            cand = prefix + [t]
            bound = bounder.minimum(cand) * D
            if bound >= order_s and prev is not None and bound >= prev:
                break
            if t > 0 and not degree_ok(cand + [0] * (d - j - 1)):
                break
            if bound < order_s:
                walk(cand, Gt)
            prev = bound
            # advance m_j: divide by (1 - q^{a + t s}) for each Pochhammer
            for a, s in pochs[j]:
                Gt = _divide_by_one_minus(Gt, a + t * s)
            t += 1

    if n:
        walk([], unit)
    return GradedSum(data, lo, order_s, D, count)


def evaluate(spec: MultisumSpec, order, xmax: int | None = None, ymax: int | None = None,
             denom: int | None = None) -> TruncatedSeries:
    """Sum of all terms, exact for q-exponents below ``order``."""
    W = [spec.xweights or [0] * spec.dim, spec.yweights or [0] * spec.dim]
    caps = [xmax if spec.xweights else None, ymax if spec.yweights else None]
    g = evaluate_graded(spec, order, W, caps, denom)
    return TruncatedSeries(g.data, g.lo, g.order, g.denom,
                           xmax if spec.xweights else None, ymax if spec.yweights else None)


def naive_evaluate(spec: MultisumSpec, order, box: int, denom: int | None = None) -> TruncatedSeries:
    """Brute-force box enumeration ``0 <= m_i <= box`` (test oracle)."""
    from .qseries import pochhammer, series_invert

    D = spec.grid if denom is None else denom
    order_s = int(Fraction(order) * D)
    total = TruncatedSeries.zero(order_s, D)
    for m in itertools.product(range(box + 1), repeat=spec.dim):
        e = spec.exponent(m)
        if e * D >= order_s:
            continue
        mono, pl = spec.term(m)
        shift = int(e * D)
        den = TruncatedSeries.one(order_s - min(shift, 0), D)
        for a, s, cnt in pl:
            den = den * pochhammer(LaurentPoly.monomial(1, q=a), LaurentPoly.monomial(1, q=s), cnt,
                                   order_s - min(shift, 0), D)
        total = total + series_invert(den).mul_poly(mono)
    return total


# ---------------------------------------------------------------------------
# transforms


@dataclass(frozen=True)
class ShiftRule:
    """``var -> var * q^step``; ``delta`` optionally states the claimed
    change of the linear vector."""

    var: str
    step: Fraction | int
    delta: tuple | None = None


def shift(spec: MultisumSpec, rule: ShiftRule) -> MultisumSpec:
    """Absorb ``var -> var q^step`` into the linear term ``b``."""
    w = spec.xweights if rule.var == "x" else spec.yweights if rule.var == "y" else None
    if rule.var not in ("x", "y"):
        raise ValueError("shift variable must be x or y")
    if w is None:
        w = (0,) * spec.dim
    step = Fraction(rule.step)
    change = tuple(step * wi for wi in w)
    if rule.delta is not None:
        residual = tuple(Fraction(c) - s for c, s in zip(rule.delta, change))
        if len(rule.delta) != spec.dim or any(residual):
            raise ValueError(f"inconsistent shift rule: residual in linear term {tuple(map(str, residual))}")
    return spec.with_linear([bi + c for bi, c in zip(spec.b, change)])


def scale_form(spec: MultisumSpec, factor, max_grid: int = 4) -> MultisumSpec:
    """Multiply quadratic and linear parts by ``factor``; denominators stay."""
    f = Fraction(factor)
    if f <= 0:
        raise ValueError("factor must be positive")
    out = replace(spec, B=tuple(tuple(e * f for e in row) for row in spec.B), b=tuple(e * f for e in spec.b))
    out.__dict__.pop("grid", None)
    if max_grid % out.grid:
        raise ValueError(f"scaled exponents need grid 1/{out.grid}, beyond 1/{max_grid}")
    return out


def dilate(spec: MultisumSpec, factor) -> MultisumSpec:
    """``q -> q^factor`` applied to the whole sum."""
    f = Fraction(factor)
    return replace(spec,
                   B=tuple(tuple(e * f for e in row) for row in spec.B),
                   b=tuple(e * f for e in spec.b),
                   denoms=tuple(tuple((a * f, s * f) for a, s in ps) for ps in spec.denoms))


def twisted_spec(folded: FoldedCartan, track_x: bool = False) -> MultisumSpec:
    """Graded dimension ``sum q^{m^T A[nu] m / 2} / prod (q^{k/l_j}; q^{k/l_j})_{m_j}``."""
    return MultisumSpec.make(folded.folded, bases=folded.twisted_bases(),
                             xweights=[1] * folded.d if track_x else None)


def dual_spec(folded: FoldedCartan, c: int, dilation=1, linear=None) -> MultisumSpec:
    """``B = c * dilation * A[nu]^{-1}`` with bases ``l_j * dilation``."""
    inv = rational_inverse(folded.folded)
    f = Fraction(c) * Fraction(dilation)
    B = [[e * f for e in row] for row in inv]
    bases = [Fraction(l) * Fraction(dilation) for l in folded.orbit_lengths]
    return MultisumSpec.make(B, linear, bases)


# ---------------------------------------------------------------------------
# the folding recursion


def recursion_check(folded: FoldedCartan, i: int, order) -> CheckReport:
    """Check, for the twisted sum chi in variables x_1..x_d,

        chi(x) = chi(.., q^{k/l_i} x_i, ..) + x_i q^{A_ii / 2} chi(x_1 q^{A_1i}, ..., x_d q^{A_di})

    keyed by the full multidegree.  ``i`` is 1-based.
    """
    d = folded.d
    if not 1 <= i <= d:
        raise ValueError("index out of range")
    ii = i - 1
    spec = twisted_spec(folded)
    W = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    g = evaluate_graded(spec, order, W)
    D, lo, N = g.denom, g.lo, g.order
    A = folded.folded
    s_i = int(folded.twisted_bases()[ii] * D)
    half = Fraction(A[ii][ii], 2) * D
    if half.denominator != 1:
        raise ValueError("diagonal entry not on the grid")
    half = int(half)

    def val(key, e):
        a = g.data.get(key)
        if a is None or e < lo or e >= N:
            return 0
        return int(a[e - lo])

    keys = set(g.data)
    keys |= {tuple(k[c] + (1 if c == ii else 0) for c in range(d)) for k in g.data}
    compared = 0
    for key in sorted(keys):
        prec = N
        rhs1 = s_i * key[ii]
        prec = min(prec, N + rhs1)
        src = None
        if key[ii] >= 1:
            src = tuple(key[c] - (1 if c == ii else 0) for c in range(d))
            rhs2 = half + sum(A[c][ii] * src[c] for c in range(d)) * D
            prec = min(prec, N + rhs2)
        for e in range(lo, prec):
            lhs = val(key, e)
            rhs = val(key, e - rhs1)
            if src is not None:
                rhs += val(src, e - rhs2)
            compared += 1
            if lhs != rhs:
                return CheckReport(f"recursion(i={i})", False, Fraction(N, D),
                                   (key, Fraction(e, D)))
    return CheckReport(f"recursion(i={i})", True, Fraction(N, D), detail=f"{compared} coefficients")
