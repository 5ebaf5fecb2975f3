"""Exact Laurent polynomials in x, y, q and fraction-free linear algebra.

Polynomials carry integer coefficients and q-exponents scaled by a
denominator ``denom`` so that ``q^(3/4)`` is stored as exponent 3 with
``denom == 4``.  Values are immutable once built.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy

VARIABLES = ("x", "y", "q")

Exponent = tuple[int, int, int]


class LaurentPoly:
    """Sparse Laurent polynomial in ``x``, ``y`` and ``q``.

    ``terms`` maps ``(e_x, e_y, e_q_scaled)`` to a nonzero integer, where the
    true q-exponent is ``e_q_scaled / denom``.
    """

    __slots__ = ("_terms", "denom", "_hash")

    def __init__(self, terms: Mapping[Exponent, int] | None = None, denom: int = 1):
        if denom < 1:
            raise ValueError("denominator must be >= 1")
        clean: dict[Exponent, int] = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[(int(key[0]), int(key[1]), int(key[2]))] = int(c)
        self._terms = clean
        self.denom = denom
        self._hash = None

    # -- construction helpers -------------------------------------------

    @classmethod
    def const(cls, c: int, denom: int = 1) -> "LaurentPoly":
        return cls({(0, 0, 0): c}, denom)

    @classmethod
    def monomial(cls, coef: int = 1, x: int = 0, y: int = 0, q: int | Fraction = 0) -> "LaurentPoly":
        """Monomial ``coef * x^x * y^y * q^q``; ``q`` may be a fraction."""
        qf = Fraction(q)
        return cls({(x, y, qf.numerator): coef}, qf.denominator)

    @classmethod
    def var(cls, name: str) -> "LaurentPoly":
        idx = VARIABLES.index(name)
        e = [0, 0, 0]
        e[idx] = 1
        return cls({tuple(e): 1})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        from .certify import parse_laurent

        return parse_laurent(text)

    # -- basic accessors ------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return all(k == (0, 0, 0) for k in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((0, 0, 0), 0)

    def q_exponents(self) -> list[Fraction]:
        return sorted({Fraction(k[2], self.denom) for k in self._terms})

    def min_exponent(self, var: str) -> Fraction | int | None:
        if not self._terms:
            return None
        i = VARIABLES.index(var)
        m = min(k[i] for k in self._terms)
        return Fraction(m, self.denom) if var == "q" else m

    def max_exponent(self, var: str) -> Fraction | int | None:
        if not self._terms:
            return None
        i = VARIABLES.index(var)
        m = max(k[i] for k in self._terms)
        return Fraction(m, self.denom) if var == "q" else m

    # -- denominators ---------------------------------------------------

    def rescale(self, denom: int) -> "LaurentPoly":
        """Same polynomial stored with q-denominator ``denom``."""
        if denom == self.denom:
            return self
        if denom % self.denom:
            raise ValueError(f"cannot rescale denominator {self.denom} to {denom}")
        f = denom // self.denom
        return LaurentPoly({(a, b, c * f): v for (a, b, c), v in self._terms.items()}, denom)

    def reduced(self) -> "LaurentPoly":
        """Smallest denominator that still represents every q-exponent."""
        g = self.denom
        for k in self._terms:
            g = math.gcd(g, k[2])
            if g == 1:
                break
        if g in (0, 1) or not self._terms:
            return self if self._terms or self.denom == 1 else LaurentPoly()
        return LaurentPoly({(a, b, c // g): v for (a, b, c), v in self._terms.items()}, self.denom // g)

    @staticmethod
    def _common(a: "LaurentPoly", b: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        if a.denom == b.denom:
            return a, b
        d = a.denom * b.denom // math.gcd(a.denom, b.denom)
        return a.rescale(d), b.rescale(d)

    # -- ring operations ------------------------------------------------

    @staticmethod
    def _coerce(other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        out = dict(a._terms)
        for k, v in b._terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LaurentPoly(out, a.denom)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._terms.items()}, self.denom)

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
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return lp_multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            ((k, c),) = self._terms.items()
            if c not in (1, -1):
                raise ValueError("negative powers only for unit monomials")
            return LaurentPoly({(-k[0] * -n, -k[1] * -n, -k[2] * -n): c ** (-n)}, self.denom)
        result = LaurentPoly.const(1, self.denom)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._common(self, other)
        return a._terms == b._terms

    def __hash__(self):
        if self._hash is None:
            r = self.reduced()
            self._hash = hash((r.denom, frozenset(r._terms.items())))
        return self._hash

    def scale_monomial(self, coef: int, ex: int, ey: int, eq_scaled: int) -> "LaurentPoly":
        """Multiply by ``coef*x^ex*y^ey*q^(eq_scaled/denom)`` (same denominator)."""
        return LaurentPoly(
            {(a + ex, b + ey, c + eq_scaled): v * coef for (a, b, c), v in self._terms.items()},
            self.denom,
        )

    def monomial_content(self) -> "LaurentPoly":
        """The unit monomial ``x^a y^b q^c`` with the minimal exponents."""
        if not self._terms:
            return LaurentPoly.const(1, self.denom)
        mins = [min(k[i] for k in self._terms) for i in range(3)]
        return LaurentPoly({tuple(mins): 1}, self.denom)

    def integer_content(self) -> int:
        g = 0
        for v in self._terms.values():
            g = math.gcd(g, v)
        return g

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        return lp_exact_divide(self, other)

    def substitute(self, var: str, replacement: "LaurentPoly") -> "LaurentPoly":
        return lp_substitute(self, var, replacement)

    def specialize(self, **values) -> "LaurentPoly":
        """Substitute monomials for several variables, e.g. ``x=1``."""
        p = self
        for name, val in values.items():
            if isinstance(val, int):
                val = LaurentPoly.const(val)
            p = lp_substitute(p, name, val)
        return p

    def shift_x(self, s: int | Fraction) -> "LaurentPoly":
        """x -> x q^s."""
        return lp_substitute(self, "x", LaurentPoly.monomial(1, x=1, q=s))

    # -- printing -------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)!r})"


def _format_exp(e: int | Fraction) -> str:
    if isinstance(e, Fraction):
        if e.denominator == 1:
            e = e.numerator
        else:
            return f"({e.numerator}/{e.denominator})"
    return f"({e})" if e < 0 else str(e)


def format_poly(p: LaurentPoly) -> str:
    """Text form with terms in descending lexicographic (e_x, e_y, e_q) order."""
    if not p._terms:
        return "0"
    pieces = []
    for (ex, ey, eq), c in sorted(p._terms.items(), reverse=True):
        factors = []
        qe = Fraction(eq, p.denom)
        for name, e in (("q", qe), ("x", ex), ("y", ey)):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{_format_exp(e)}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def lp_multiply(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    a, b = LaurentPoly._common(a, b)
    if len(a._terms) < len(b._terms):
        a, b = b, a
    out: dict[Exponent, int] = {}
    for (bx, by, bq), bc in b._terms.items():
        for (ax, ay, aq), ac in a._terms.items():
            k = (ax + bx, ay + by, aq + bq)
            out[k] = out.get(k, 0) + ac * bc
    return LaurentPoly(out, a.denom)


def lp_substitute(p: LaurentPoly, var: str, replacement: LaurentPoly) -> LaurentPoly:
    """Replace ``var`` by a unit monomial ``±x^a y^b q^c``.

    Substituting into ``q`` with a fractional exponent raises the
    denominator; a q-exponent that would feed a non-integer power of x or y
    (or of the sign) is rejected.
    """
    if not isinstance(replacement, LaurentPoly) or not replacement.is_monomial():
        raise ValueError("replacement must be a single monomial")
    ((rk, rc),) = replacement._terms.items()
    if rc not in (1, -1):
        raise ValueError("replacement monomial must have coefficient +1 or -1")
    idx = VARIABLES.index(var)
    if var != "q":
        p2, r2 = LaurentPoly._common(p, replacement)
        ((rk, rc),) = r2._terms.items()
        out: dict[Exponent, int] = {}
        for key, c in p2._terms.items():
            e = key[idx]
            new = list(key)
            new[idx] = 0
            new = [new[i] + e * rk[i] for i in range(3)]
            k = tuple(new)
            out[k] = out.get(k, 0) + c * (rc**e if e >= 0 else rc ** (-e))
        return LaurentPoly(out, p2.denom)
    # q -> ±x^a y^b q^(c/rd); a term q^(e/pd) maps to x^(a e/pd) y^(b e/pd) q^(c e/(pd rd))
    pd, rd = p.denom, replacement.denom
    newd = pd * rd
    out = {}
    for (ex, ey, eq), c in p._terms.items():
        fx = Fraction(rk[0] * eq, pd)
        fy = Fraction(rk[1] * eq, pd)
        if fx.denominator != 1 or fy.denominator != 1:
            raise ValueError("substitution produces a fractional power of x or y")
        sign = 1
        if rc == -1:
            fe = Fraction(eq, pd)
            if fe.denominator != 1:
                raise ValueError("sign substitution with fractional exponent")
            sign = (-1) ** (int(fe) % 2)
        k = (ex + int(fx), ey + int(fy), rk[2] * eq)
        out[k] = out.get(k, 0) + sign * c
    return LaurentPoly(out, newd)


def lp_exact_divide(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact quotient ``a / b``; raises ``ArithmeticError`` if not divisible."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    a, b = LaurentPoly._common(a, b)
    if a.is_zero():
        return LaurentPoly({}, a.denom)
    if b.is_monomial():
        ((k, c),) = b._terms.items()
        out = {}
        for (ex, ey, eq), v in a._terms.items():
            qv, r = divmod(v, c)
            if r:
                raise ArithmeticError("not exactly divisible")
            out[(ex - k[0], ey - k[1], eq - k[2])] = qv
        return LaurentPoly(out, a.denom)
    rem = dict(a._terms)
    lb = max(b._terms)
    lc = b._terms[lb]
    bterms = list(b._terms.items())
    quot: dict[Exponent, int] = {}
    # lexicographic division; terminates because a Laurent quotient has bounded support
    min_b = tuple(min(k[i] for k in b._terms) for i in range(3))
    min_a = tuple(min(k[i] for k in a._terms) for i in range(3))
    floor = tuple(min_a[i] - min_b[i] for i in range(3))
    while rem:
        la = max(rem)
        c = rem[la]
        m = (la[0] - lb[0], la[1] - lb[1], la[2] - lb[2])
        qc, r = divmod(c, lc)
        if r or any(m[i] < floor[i] for i in range(3)):
            raise ArithmeticError("not exactly divisible")
        quot[m] = qc
        for (kx, ky, kq), v in bterms:
            k = (kx + m[0], ky + m[1], kq + m[2])
            s = rem.get(k, 0) - qc * v
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return LaurentPoly(quot, a.denom)


# -- sympy bridge (gcd only) ------------------------------------------------

_SX, _SY, _SQ = sympy.symbols("x y q")


def _to_sympy_poly(p: LaurentPoly) -> tuple[sympy.Poly, Exponent]:
    shift = tuple(min(k[i] for k in p._terms) for i in range(3))
    d = {(k[0] - shift[0], k[1] - shift[1], k[2] - shift[2]): v for k, v in p._terms.items()}
    return sympy.Poly.from_dict(d, _SX, _SY, _SQ), shift


def _from_sympy_poly(sp: sympy.Poly, denom: int) -> LaurentPoly:
    return LaurentPoly({tuple(int(e) for e in k): int(v) for k, v in sp.as_dict().items()}, denom)


def lp_gcd(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    """Polynomial gcd of nonzero Laurent polynomials, up to a unit monomial.

    The result is normalised to positive leading coefficient and no
    monomial content.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return LaurentPoly.const(0)
    d = 1
    for p in polys:
        d = d * p.denom // math.gcd(d, p.denom)
    g = None
    for p in polys:
        sp, _ = _to_sympy_poly(p.rescale(d))
        g = sp if g is None else sympy.gcd(g, sp)
        if g.is_ground:
            break
    out = _from_sympy_poly(g, d)
    out = lp_exact_divide(out, out.monomial_content())
    if out._terms[max(out._terms)] < 0:
        out = -out
    return out


class RationalFunction:
    """Quotient of Laurent polynomials kept in lowest terms.

    Canonical form: the gcd of numerator and denominator is a unit monomial,
    the denominator has no monomial content and a positive leading
    coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly | int, den: LaurentPoly | int = 1):
        num = LaurentPoly._coerce(num)
        den = LaurentPoly._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = LaurentPoly({}, num.denom), LaurentPoly.const(1)
            return
        g = lp_gcd([num, den])
        num, den = lp_exact_divide(num, g), lp_exact_divide(den, g)
        mono = den.monomial_content()
        num, den = lp_exact_divide(num, mono), lp_exact_divide(den, mono)
        lead = den._terms[max(den._terms)]
        if lead < 0:
            num, den = -num, -den
        self.num, self.den = num, den

    def __add__(self, other):
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return self + (-other)

    def __mul__(self, other):
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction(other)
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __repr__(self):
        if self.den == 1:
            return f"RationalFunction({self.num})"
        return f"RationalFunction(({self.num}) / ({self.den}))"


def ratfun_kernel(matrix: Sequence[Sequence[RationalFunction | LaurentPoly | int]]) -> list[list[LaurentPoly]]:
    """Nullspace basis of a matrix over the rational-function field.

    Rows are first cleared of denominators, then reduced with fraction-free
    Gauss-Jordan elimination (every division is exact).  Each returned
    vector has Laurent-polynomial entries with common polynomial content
    removed.
    """
    if not matrix or not matrix[0]:
        raise ValueError("empty matrix")
    ncols = len(matrix[0])
    rows: list[list[LaurentPoly]] = []
    for row in matrix:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        rf = [e if isinstance(e, RationalFunction) else RationalFunction(e) for e in row]
        den = LaurentPoly.const(1)
        for e in rf:
            if not e.den == den:
                g = lp_gcd([den, e.den])
                den = lp_exact_divide(den * e.den, g)
        rows.append([lp_exact_divide(e.num * den, e.den) for e in rf])
    a = [list(r) for r in rows]
    nrows = len(a)
    pivots: list[int] = []
    prev = LaurentPoly.const(1)
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if not a[i][c].is_zero()), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(nrows):
            if i == r:
                continue
            f = a[i][c]
            a[i] = [lp_exact_divide(p * a[i][j] - f * a[r][j], prev) for j in range(ncols)]
        prev = p
        pivots.append(c)
        r += 1
    # pivot rows now read d*x_pivot + sum_free a_ij x_j = 0 with a common d
    d = prev
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [LaurentPoly.const(0)] * ncols
        v[f] = d
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][f]
        basis.append(primitive(v))
    return basis


def primitive(vec: Sequence[LaurentPoly]) -> list[LaurentPoly]:
    """Divide a vector by the gcd of its entries and fix the sign of the first nonzero."""
    nz = [e for e in vec if not e.is_zero()]
    if not nz:
        return list(vec)
    g = lp_gcd(nz)
    d = max(e.denom for e in nz)
    mono = LaurentPoly({tuple(min(k[i] for e in nz for k in e.rescale(d)._terms) for i in range(3)): 1}, d)
    out = [lp_exact_divide(lp_exact_divide(e, g), mono) if not e.is_zero() else e for e in vec]
    first = next(e for e in out if not e.is_zero())
    if first._terms[max(first._terms)] < 0:
        out = [-e for e in out]
    return out


def mat_vec(matrix: Sequence[Sequence[LaurentPoly]], vec: Sequence[LaurentPoly]) -> list[LaurentPoly]:
    out = []
    for row in matrix:
        acc = LaurentPoly.const(0)
        for a, b in zip(row, vec):
            if not a.is_zero() and not b.is_zero():
                acc = acc + a * b
        out.append(acc)
    return out

