"""Truncated q-series and the classical q-function toolkit.

A :class:`TruncatedSeries` is known exactly for every q-exponent below its
``order``.  Coefficients of q-powers are Laurent polynomials in ``x`` and
``y``; internally each ``(x, y)`` monomial owns a dense array of integer
coefficients indexed by scaled q-exponent.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .exactalg import LaurentPoly

INF = math.inf

Key = tuple[int, int]


def _zeros(n: int) -> np.ndarray:
    return np.zeros(max(n, 0), dtype=object)


def _scaled(e, denom: int) -> int:
    f = Fraction(e) * denom
    if f.denominator != 1:
        raise ValueError(f"exponent {e} not on the 1/{denom} grid")
    return int(f)


class TruncatedSeries:
    """q-series truncated at ``order`` (exclusive), coefficients in Z[x^±, y^±].

    ``xmax``/``ymax`` optionally bound the x/y-degrees known exactly; ``None``
    means every x/y-degree is exact below ``order``.
    """

    __slots__ = ("denom", "order", "lo", "xmax", "ymax", "_c")

    def __init__(self, data: Mapping[Key, np.ndarray], lo: int, order: int, denom: int = 1,
                 xmax: int | None = None, ymax: int | None = None):
        # lo and order are scaled exponents
        self.denom = denom
        self.order = order
        self.lo = min(lo, order)
        self.xmax = xmax
        self.ymax = ymax
        n = order - self.lo
        clean = {}
        for k, arr in data.items():
            if xmax is not None and k[0] > xmax:
                continue
            if ymax is not None and k[1] > ymax:
                continue
            a = np.asarray(arr, dtype=object)
            if len(a) > n:
                a = a[:n]
            elif len(a) < n:
                a = np.concatenate([a, _zeros(n - len(a))])
            if any(a):
                clean[k] = a
        self._c = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, order: int, denom: int = 1, **kw) -> "TruncatedSeries":
        return cls({}, 0, order, denom, **kw)

    @classmethod
    def one(cls, order: int, denom: int = 1, **kw) -> "TruncatedSeries":
        return cls.from_poly(LaurentPoly.const(1, denom), order, denom, **kw)

    @classmethod
    def from_poly(cls, p: LaurentPoly, order: int, denom: int | None = None,
                  xmax: int | None = None, ymax: int | None = None) -> "TruncatedSeries":
        """Truncate a Laurent polynomial; ``order`` is a scaled exponent."""
        d = denom or p.denom
        if d % p.denom:
            d = d * p.denom // math.gcd(d, p.denom)
        p = p.rescale(d)
        if p.is_zero():
            return cls({}, 0, order, d, xmax, ymax)
        lo = min(0, min(k[2] for k, _ in p.items()))
        data: dict[Key, np.ndarray] = {}
        n = order - lo
        for (ex, ey, eq), c in p.items():
            if eq >= order:
                continue
            arr = data.setdefault((ex, ey), _zeros(n))
            arr[eq - lo] += c
        return cls(data, lo, order, d, xmax, ymax)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[int], denom: int = 1, order: int | None = None,
                          start: int = 0) -> "TruncatedSeries":
        """Univariate series from consecutive scaled-exponent coefficients."""
        order = start + len(coeffs) if order is None else order
        return cls({(0, 0): np.array(list(coeffs), dtype=object)}, start, order, denom)

    # -- introspection ----------------------------------------------------

    def keys(self) -> list[Key]:
        return sorted(self._c)

    def array(self, key: Key = (0, 0)) -> np.ndarray:
        """Dense coefficients of ``x^a y^b`` from scaled exponent ``lo`` to ``order``."""
        a = self._c.get(key)
        return a.copy() if a is not None else _zeros(self.order - self.lo)

    def coefficients(self, key: Key = (0, 0), start: int = 0) -> list[int]:
        """Coefficients at scaled exponents ``start, start+1, ..., order-1``."""
        a = self._c.get(key)
        out = []
        for e in range(start, self.order):
            i = e - self.lo
            out.append(int(a[i]) if a is not None and 0 <= i < len(a) else 0)
        return out

    def coeff(self, e, key: Key | None = None):
        """Coefficient of ``q^e`` (true exponent): a LaurentPoly in x, y, or an
        int when ``key`` is given."""
        s = _scaled(e, self.denom)
        if s >= self.order:
            raise ValueError(f"q^{e} is beyond the truncation order")
        i = s - self.lo
        if key is not None:
            a = self._c.get(key)
            return int(a[i]) if a is not None and 0 <= i < len(a) else 0
        terms = {}
        for k, a in self._c.items():
            if 0 <= i < len(a) and a[i]:
                terms[(k[0], k[1], 0)] = int(a[i])
        return LaurentPoly(terms)

    __getitem__ = coeff

    def is_zero(self) -> bool:
        return not self._c

    def valuation(self) -> int | None:
        """Least scaled q-exponent with nonzero coefficient (None for zero)."""
        best = None
        for a in self._c.values():
            nz = np.flatnonzero(a != 0)
            if len(nz):
                v = int(nz[0]) + self.lo
                best = v if best is None else min(best, v)
        return best

    def x_range(self) -> tuple[int, int] | None:
        if not self._c:
            return None
        xs = [k[0] for k in self._c]
        return min(xs), max(xs)

    def y_range(self) -> tuple[int, int] | None:
        if not self._c:
            return None
        ys = [k[1] for k in self._c]
        return min(ys), max(ys)

    @property
    def true_order(self) -> Fraction:
        return Fraction(self.order, self.denom)

    def to_poly(self) -> LaurentPoly:
        terms = {}
        for (ex, ey), a in self._c.items():
            for i in np.flatnonzero(a != 0):
                terms[(ex, ey, int(i) + self.lo)] = int(a[i])
        return LaurentPoly(terms, self.denom)

    # -- precision management ----------------------------------------------

    def rescale(self, denom: int) -> "TruncatedSeries":
        if denom == self.denom:
            return self
        if denom % self.denom:
            raise ValueError("incompatible denominators")
        f = denom // self.denom
        lo, order = self.lo * f, self.order * f
        data = {}
        for k, a in self._c.items():
            b = _zeros(order - lo)
            b[::f] = a
            data[k] = b
        return TruncatedSeries(data, lo, order, denom, self.xmax, self.ymax)

    def truncate(self, order: int | None = None, xmax: int | None = None,
                 ymax: int | None = None) -> "TruncatedSeries":
        """Drop precision to a scaled ``order`` and/or x/y-degree bounds."""
        order = self.order if order is None else min(order, self.order)
        xm = _min_opt(self.xmax, xmax)
        ym = _min_opt(self.ymax, ymax)
        return TruncatedSeries(self._c, self.lo, order, self.denom, xm, ym)

    @staticmethod
    def _align(a: "TruncatedSeries", b: "TruncatedSeries"):
        if a.denom != b.denom:
            d = a.denom * b.denom // math.gcd(a.denom, b.denom)
            a, b = a.rescale(d), b.rescale(d)
        return a, b

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, LaurentPoly)):
            p = other if isinstance(other, LaurentPoly) else LaurentPoly.const(other)
            # a polynomial is exact at any order
            d = self.denom * p.denom // math.gcd(self.denom, p.denom)
            return TruncatedSeries.from_poly(p, self.order * (d // self.denom), d)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        order = min(a.order, b.order)
        lo = min(a.lo, b.lo)
        n = order - lo
        data: dict[Key, np.ndarray] = {}
        for s in (a, b):
            off = s.lo - lo
            for k, arr in s._c.items():
                acc = data.get(k)
                if acc is None:
                    acc = data[k] = _zeros(n)
                m = min(len(arr), n - off)
                if m > 0:
                    acc[off:off + m] += arr[:m]
        return TruncatedSeries(data, lo, order, a.denom, _min_opt(a.xmax, b.xmax), _min_opt(a.ymax, b.ymax))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries({k: -a for k, a in self._c.items()}, self.lo, self.order, self.denom,
                               self.xmax, self.ymax)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return self.mul_poly(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._align(self, other)
        va = a.valuation()
        vb = b.valuation()
        va = a.order if va is None else va
        vb = b.order if vb is None else vb
        order = min(a.order + vb, b.order + va)
        lo = a.lo + b.lo
        if order <= lo:
            lo = order
        n = order - lo
        xmax = _product_degree_bound(a.xmax, b.xmax, a.x_range(), b.x_range())
        ymax = _product_degree_bound(a.ymax, b.ymax, a.y_range(), b.y_range())
        data: dict[Key, np.ndarray] = {}
        for ka, arr_a in a._c.items():
            for kb, arr_b in b._c.items():
                k = (ka[0] + kb[0], ka[1] + kb[1])
                if xmax is not None and k[0] > xmax:
                    continue
                if ymax is not None and k[1] > ymax:
                    continue
                # only the first n entries of each factor can contribute
                conv = np.convolve(arr_a[:n], arr_b[:n])[:n]
                acc = data.get(k)
                if acc is None:
                    acc = data[k] = _zeros(n)
                acc[:len(conv)] += conv
        return TruncatedSeries(data, lo, order, a.denom, xmax, ymax)

    __rmul__ = __mul__

    def mul_poly(self, p: LaurentPoly | int) -> "TruncatedSeries":
        """Multiply by an exact Laurent polynomial."""
        if isinstance(p, int):
            p = LaurentPoly.const(p)
        if p.is_zero():
            return TruncatedSeries.zero(self.order, self.denom, xmax=self.xmax, ymax=self.ymax)
        d = self.denom * p.denom // math.gcd(self.denom, p.denom)
        s = self.rescale(d)
        p = p.rescale(d)
        qmin = min(k[2] for k, _ in p.items())
        order = s.order + qmin
        lo = s.lo + qmin
        n = order - lo
        xmax = _shift_opt(s.xmax, p.min_exponent("x"))
        ymax = _shift_opt(s.ymax, p.min_exponent("y"))
        data: dict[Key, np.ndarray] = {}
        for (ex, ey, eq), c in p.items():
            off = eq - qmin
            for k, arr in s._c.items():
                kk = (k[0] + ex, k[1] + ey)
                acc = data.get(kk)
                if acc is None:
                    acc = data[kk] = _zeros(n)
                m = min(len(arr), n - off)
                if m > 0:
                    acc[off:off + m] += c * arr[:m]
        return TruncatedSeries(data, lo, order, d, xmax, ymax)

    def substitute(self, var: str, replacement: LaurentPoly) -> "TruncatedSeries":
        """Apply ``x -> ±x q^s`` or ``x -> ±q^s`` (likewise for ``y``).

        Degrees of ``var`` below ``min(0, lowest degree present)`` are assumed
        absent.  A downward shift keeping the variable needs a degree bound;
        eliminating a variable needs the series exact in every degree.
        """
        if var not in ("x", "y"):
            raise ValueError("only x or y may be substituted in a truncated series")
        if not replacement.is_monomial():
            raise ValueError("replacement must be a monomial")
        d = self.denom * replacement.denom // math.gcd(self.denom, replacement.denom)
        s = self.rescale(d)
        ((rk, rc),) = replacement.rescale(d).items()
        if rc not in (1, -1):
            raise ValueError("replacement must be a unit monomial")
        idx = 0 if var == "x" else 1
        other = 1 - idx
        if rk[other] != 0 or rk[idx] not in (0, 1):
            raise ValueError("replacement must be ±var*q^s or ±q^s")
        keep = rk[idx] == 1
        step = rk[2]
        bound = s.xmax if idx == 0 else s.ymax
        rng = s.x_range() if idx == 0 else s.y_range()
        emin = min(0, rng[0]) if rng else 0
        if keep:
            if step < 0 and bound is None:
                raise ValueError("downward q-shift needs a degree bound (xmax/ymax)")
            worst = emin * step if step >= 0 else bound * step
        else:
            if bound is not None:
                raise ValueError("cannot eliminate a variable with a degree bound")
            if step < 0:
                raise ValueError("eliminating a variable with a downward shift loses all precision")
            worst = emin * step
        order = s.order + worst
        shifts = [k[idx] * step for k in s._c] or [0]
        lo = min(s.lo + min(shifts), order)
        n = order - lo
        data: dict[Key, np.ndarray] = {}
        for k, arr in s._c.items():
            e = k[idx]
            nk = list(k)
            if not keep:
                nk[idx] = 0
            nk = tuple(nk)
            sign = rc ** abs(e)
            off = s.lo + e * step - lo
            if off >= n:
                continue
            acc = data.get(nk)
            if acc is None:
                acc = data[nk] = _zeros(n)
            m = min(len(arr), n - off)
            acc[off:off + m] += sign * arr[:m]
        xmax, ymax = s.xmax, s.ymax
        return TruncatedSeries(data, lo, order, d, xmax, ymax)

    def specialize(self, x: LaurentPoly | int | None = None, y: LaurentPoly | int | None = None) -> "TruncatedSeries":
        """Substitute x and/or y by ``±q^s`` (``1`` allowed)."""
        s = self
        for var, val in (("x", x), ("y", y)):
            if val is None:
                continue
            if isinstance(val, int):
                val = LaurentPoly.const(val)
            s = s.substitute(var, val)
        return s

    # -- comparison -------------------------------------------------------

    def first_mismatch(self, other: "TruncatedSeries") -> Fraction | None:
        """Least true q-exponent below the common precision where the two
        series differ, or ``None`` if they agree."""
        a, b = self._align(self, other)
        diff = (a - b)
        v = diff.valuation()
        return None if v is None else Fraction(v, diff.denom)

    def agrees_with(self, other: "TruncatedSeries") -> bool:
        return self.first_mismatch(other) is None

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._align(self, other)
        return (a.order == b.order and a.xmax == b.xmax and a.ymax == b.ymax
                and a.agrees_with(b))

    __hash__ = None

    # -- reports ------------------------------------------------------------

    def report_lines(self) -> list[str]:
        """One ``q^e : <poly in x,y>`` line per nonzero q-power, ascending."""
        exps = set()
        for a in self._c.values():
            exps.update(int(i) + self.lo for i in np.flatnonzero(a != 0))
        lines = []
        for e in sorted(exps):
            fe = Fraction(e, self.denom)
            es = str(fe.numerator) if fe.denominator == 1 else f"({fe.numerator}/{fe.denominator})"
            lines.append(f"q^{es} : {self.coeff(fe)}")
        return lines

    def digest(self) -> str:
        body = "\n".join(self.report_lines())
        h = hashlib.sha256(body.encode()).hexdigest()[:16]
        v = self.valuation()
        val = "none" if v is None else str(Fraction(v, self.denom))
        return f"order={self.true_order} valuation={val} sha256={h}"

    def report(self) -> str:
        return "\n".join(self.report_lines() + [self.digest()])

    def __repr__(self):
        head = self.report_lines()[:6]
        more = " + ..." if len(self.report_lines()) > 6 else ""
        return f"TruncatedSeries({'; '.join(head)}{more}; O(q^{self.true_order}))"


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _shift_opt(bound, shift):
    if bound is None or shift is None:
        return bound
    return bound + shift


def _product_degree_bound(ma, mb, ra, rb):
    """Degree bound of a product: a's unknown part starts above ``ma``."""
    cands = []
    if ma is not None:
        cands.append(ma + (rb[0] if rb else 0))
    if mb is not None:
        cands.append(mb + (ra[0] if ra else 0))
    return min(cands) if cands else None


# ---------------------------------------------------------------------------
# Products


@dataclass(frozen=True)
class ProductFactor:
    """``(a; b)_n ** power`` with ``n`` a count or ``math.inf``."""

    a: LaurentPoly
    base: LaurentPoly
    n: float | int = INF
    power: int = 1


@dataclass(frozen=True)
class ProductSpec:
    factors: tuple[ProductFactor, ...] = field(default_factory=tuple)

    def evaluate(self, order: int, denom: int = 1) -> TruncatedSeries:
        return product_series(self, order, denom)


def _monomial_parts(m: LaurentPoly):
    if not m.is_monomial():
        raise ValueError(f"{m} is not a monomial")
    ((k, c),) = m.items()
    return k, c


def pochhammer(a: LaurentPoly, base: LaurentPoly, n: float | int, order: int, denom: int | None = None) -> TruncatedSeries:
    """``(a; base)_n`` truncated below the scaled exponent ``order``.

    ``denom`` fixes the exponent grid of ``order`` (default: lcm of the
    arguments' denominators).  Factors with non-positive q-exponent are
    multiplied exactly, so ``a`` may have negative valuation.
    """
    d = denom or 1
    for m in (a, base):
        d = d * m.denom // math.gcd(d, m.denom)
    a, base = a.rescale(d), base.rescale(d)
    ak, ac = _monomial_parts(a)
    bk, bc = _monomial_parts(base)
    if n == INF:
        if bk[2] <= 0:
            raise ValueError("infinite product needs a base with positive q-valuation")
    elif n < 0:
        raise ValueError("negative count")

    def term(t):
        return (ak[0] + t * bk[0], ak[1] + t * bk[1], ak[2] + t * bk[2]), ac * bc**t

    prefix = LaurentPoly.const(1, d)
    positive = []
    t = 0
    while n == INF or t < n:
        k, c = term(t)
        if k[2] <= 0:
            prefix = prefix * (LaurentPoly.const(1, d) - LaurentPoly({k: c}, d))
        elif n == INF:
            break
        else:
            positive.append((k, c))
        t += 1
    if prefix.is_zero():
        return TruncatedSeries.zero(order, d)
    shift = min(k[2] for k, _ in prefix.items())
    target = order - shift
    s = TruncatedSeries.one(target, d)
    factors = iter(positive) if n != INF else (term(u) for u in itertools.count(t))
    for k, c in factors:
        if k[2] >= target:
            if n == INF:
                break
            continue
        s = s - s.mul_poly(LaurentPoly({k: c}, d))
    return s.mul_poly(prefix)


def theta(a: LaurentPoly, base: LaurentPoly, order: int, denom: int | None = None, strict: bool = True) -> TruncatedSeries:
    """Modified theta function ``(a; b)_inf (b/a; b)_inf``."""
    d = denom or 1
    for m in (a, base):
        d = d * m.denom // math.gcd(d, m.denom)
    a, base = a.rescale(d), base.rescale(d)
    (ak, _), (bk, _) = _monomial_parts(a), _monomial_parts(base)
    if strict and not (0 < ak[2] < bk[2]):
        raise ValueError("theta needs 0 < val(a) < val(base)")
    return pochhammer(a, base, INF, order, d) * pochhammer(base * a ** -1, base, INF, order, d)


def theta_product(args: Iterable[LaurentPoly], base: LaurentPoly, order: int, denom: int | None = None) -> TruncatedSeries:
    """``theta(a_1, ..., a_r; base)``."""
    out = None
    for a in args:
        t = theta(a, base, order, denom)
        out = t if out is None else out * t
    return out if out is not None else TruncatedSeries.one(order, denom or 1)


def series_invert(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a series with constant term ±1."""
    v = s.valuation()
    if v is None or v < 0:
        raise ValueError("series must have valuation 0")
    c0 = s.coeff(0)
    if not c0.is_constant() or c0.constant_term() not in (1, -1):
        raise ValueError("constant term must be +1 or -1 with no x/y dependence")
    u = c0.constant_term()
    order = s.order
    if s.keys() == [(0, 0)]:
        a = [int(c) for c in s.coefficients((0, 0), 0)]
        n = order
        inv = [0] * n
        inv[0] = u
        nz = [(i, c) for i, c in enumerate(a) if c and i > 0]
        for m in range(1, n):
            acc = 0
            for i, c in nz:
                if i > m:
                    break
                acc += c * inv[m - i]
            inv[m] = -u * acc
        return TruncatedSeries.from_coefficients(inv, s.denom, order)
    # multivariate: group by q-power, inv_m = -u * sum_{i>=1} P_i inv_{m-i}
    P = {}
    for e in range(1, order):
        c = s.coeff(Fraction(e, s.denom))
        if not c.is_zero():
            P[e] = c
    inv = {0: LaurentPoly.const(u)}
    for m in range(1, order):
        acc = LaurentPoly.const(0)
        for i, p in P.items():
            if i > m:
                continue
            prev = inv.get(m - i)
            if prev is not None and not prev.is_zero():
                acc = acc + p * prev
        if s.xmax is not None or s.ymax is not None:
            acc = LaurentPoly({k: c for k, c in acc.items()
                               if (s.xmax is None or k[0] <= s.xmax) and (s.ymax is None or k[1] <= s.ymax)})
        inv[m] = acc * (-u)
    poly = LaurentPoly({(k[0], k[1], m): c for m, p in inv.items() for k, c in p.items()}, s.denom)
    return TruncatedSeries.from_poly(poly, order, s.denom, s.xmax, s.ymax)


def product_series(spec: ProductSpec, order: int, denom: int = 1) -> TruncatedSeries:
    """Evaluate a product of Pochhammer factors with integer powers.

    ``order`` is on the ``denom`` grid; the result lives on the lcm grid of
    ``denom`` and every factor.
    """
    d = denom
    for f in spec.factors:
        for m in (f.a, f.base):
            d = d * m.denom // math.gcd(d, m.denom)
    order = order * (d // denom)
    num = TruncatedSeries.one(order, d)
    den = TruncatedSeries.one(order, d)
    for f in spec.factors:
        p = pochhammer(f.a, f.base, f.n, order, d)
        for _ in range(abs(f.power)):
            if f.power > 0:
                num = num * p
            else:
                den = den * p
    return num * series_invert(den)


def q_mono(e, coef: int = 1, x: int = 0, y: int = 0) -> LaurentPoly:
    """Shorthand for the monomial ``coef * x^x * y^y * q^e``."""
    return LaurentPoly.monomial(coef, x=x, y=y, q=e)


def product_from_residues(modulus: int, residues: Iterable[int], order: int) -> TruncatedSeries:
    """``prod_{r in residues, t >= 0} 1/(1 - q^(r + t m))`` to integer ``order``."""
    residues = sorted(set(residues))
    for r in residues:
        if not 0 < r < modulus:
            raise ValueError(f"residue {r} outside 1..{modulus - 1}")
    coeffs = [0] * order
    if order > 0:
        coeffs[0] = 1
    for r in residues:
        part = r
        while part < order:
            for i in range(part, order):
                coeffs[i] += coeffs[i - part]
            part += modulus
    return TruncatedSeries.from_coefficients(coeffs, 1, order)


# ---------------------------------------------------------------------------
# Bailey pairs and the Jacobi triple product


@dataclass
class CheckReport:
    name: str
    passed: bool
    order: Fraction | int
    first_failure: object = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else f" first failure at {self.first_failure}"
        return f"{status} {self.name} (order {self.order}){extra}{(' ' + self.detail) if self.detail else ''}"


SequenceTerm = Callable[[int, int], TruncatedSeries]


def _recip_poch(a: LaurentPoly, n: int, order: int, denom: int) -> TruncatedSeries:
    return series_invert(pochhammer(a, q_mono(1), n, order, denom))


def slater_f1(denom: int = 2):
    """Slater's pair F(1) relative to ``a = 1``: ``(alpha, beta, a)``."""

    def alpha(n: int, order: int) -> TruncatedSeries:
        if n == 0:
            return TruncatedSeries.one(order, denom)
        p = q_mono(Fraction(2 * n * n - n, 2)) + q_mono(Fraction(2 * n * n + n, 2))
        return TruncatedSeries.from_poly(p, order, denom)

    def beta(n: int, order: int) -> TruncatedSeries:
        return _recip_poch(q_mono(1), n, order, denom) * _recip_poch(q_mono(Fraction(1, 2)), n, order, denom)

    return alpha, beta, q_mono(0)


def slater_f2(denom: int = 2):
    """Slater's pair F(2) relative to ``a = q``."""

    def alpha(n: int, order: int) -> TruncatedSeries:
        num = q_mono(Fraction(2 * n * n + n, 2)) + q_mono(Fraction(2 * n * n + 3 * n + 1, 2))
        den = TruncatedSeries.from_poly(1 + q_mono(Fraction(1, 2)), order, denom)
        return TruncatedSeries.from_poly(num, order, denom) * series_invert(den)

    def beta(n: int, order: int) -> TruncatedSeries:
        return _recip_poch(q_mono(1), n, order, denom) * _recip_poch(q_mono(Fraction(3, 2)), n, order, denom)

    return alpha, beta, q_mono(1)


def bailey_pair_check(alpha: SequenceTerm, beta: SequenceTerm, a: LaurentPoly, max_n: int,
                      order: int = 60, denom: int = 2) -> CheckReport:
    """Check ``beta_n = sum_r alpha_r / ((q)_{n-r} (aq)_{n+r})`` for ``n <= max_n``.

    ``order`` is a scaled exponent on the ``denom`` grid.
    """
    aq = a * q_mono(1)
    inv_q = {m: _recip_poch(q_mono(1), m, order, denom) for m in range(max_n + 1)}
    inv_aq = {m: _recip_poch(aq, m, order, denom) for m in range(2 * max_n + 1)}
    alphas = [alpha(r, order) for r in range(max_n + 1)]
    for n in range(max_n + 1):
        rhs = TruncatedSeries.zero(order, denom)
        for r in range(n + 1):
            rhs = rhs + alphas[r] * inv_q[n - r] * inv_aq[n + r]
        lhs = beta(n, order)
        bad = lhs.first_mismatch(rhs)
        if bad is not None:
            return CheckReport("bailey-pair", False, Fraction(order, denom), (n, bad))
    return CheckReport("bailey-pair", True, Fraction(order, denom), detail=f"n <= {max_n}")


def bilateral_theta_sum(quad: int, lin: int, order: int) -> TruncatedSeries:
    """``sum_{n in Z} q^(quad n^2 + lin n)`` to integer ``order``.

    Terms are enumerated by increasing ``|n|``; the exponent is increasing in
    ``|n|`` on each side once past the vertex, so the loop stops exactly.
    """
    if quad <= 0:
        raise ValueError("quadratic coefficient must be positive")
    coeffs: dict[int, int] = {}
    for sign in (1, -1):
        n = 0 if sign == 1 else -1
        prev = None
        while True:
            e = quad * n * n + lin * n
            if e >= order and prev is not None and e >= prev:
                break
            if e < order:
                coeffs[e] = coeffs.get(e, 0) + 1
            prev = e
            n += sign
    lo = min(coeffs) if coeffs else 0
    if lo < 0:
        raise ValueError("bilateral sum has negative exponents")
    arr = [0] * order
    for e, c in coeffs.items():
        arr[e] += c
    return TruncatedSeries.from_coefficients(arr, 1, order)


def jtp_check(k: int, order: int) -> CheckReport:
    """Check ``sum_n q^((k+1)n^2+n) / (q^4;q^4)_inf`` against
    ``(-q^k, -q^(k+2), q^(2k+2); q^(2k+2))_inf / (q^4;q^4)_inf``."""
    inv = series_invert(pochhammer(q_mono(4), q_mono(4), INF, order))
    lhs = bilateral_theta_sum(k + 1, 1, order) * inv
    base = q_mono(2 * k + 2)
    prod = (pochhammer(q_mono(k, -1), base, INF, order)
            * pochhammer(q_mono(k + 2, -1), base, INF, order)
            * pochhammer(base, base, INF, order))
    rhs = prod * inv
    bad = lhs.first_mismatch(rhs)
    return CheckReport(f"jtp(k={k})", bad is None, order, bad)
