from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qfold.exactalg import (LaurentPoly, RationalFunction, lp_exact_divide, lp_gcd, primitive,
                            ratfun_kernel)
from qfold.certify import parse_laurent

x, y, q = (LaurentPoly.var(v) for v in "xyq")
X, Y, Q = sympy.symbols("x y q")


def to_sympy(p: LaurentPoly):
    return sum(c * X**k[0] * Y**k[1] * Q**sympy.Rational(k[2], p.denom) for k, c in p.items())


monos = st.tuples(st.integers(-3, 3), st.integers(-2, 2), st.integers(-4, 6), st.integers(-5, 5))


@st.composite
def polys(draw, max_terms=5):
    terms = draw(st.lists(monos, max_size=max_terms))
    out = LaurentPoly.const(0)
    for ex, ey, eq, c in terms:
        out = out + LaurentPoly({(ex, ey, eq): c})
    return out


def test_printing_matches_report_format():
    p = parse_laurent("-q^5*x - q^4*x - q^2*x - 1")
    assert str(p) == "-q^5*x - q^4*x - q^2*x - 1"
    assert str(LaurentPoly.monomial(1, q=Fraction(3, 4))) == "q^(3/4)"
    assert str(x ** -2) == "x^(-2)"


def test_fractional_exponents_share_a_grid():
    a = LaurentPoly.monomial(1, q=Fraction(1, 2))
    b = LaurentPoly.monomial(1, q=Fraction(1, 4))
    assert (a * b) == LaurentPoly.monomial(1, q=Fraction(3, 4))
    assert (a * a).reduced().denom == 1


def test_negative_powers_only_for_units():
    assert (x * q**3) ** -1 == LaurentPoly.monomial(1, x=-1, q=-3)
    with pytest.raises((ValueError, ArithmeticError)):
        (1 + q) ** -1


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentPoly.const(0)


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_multiplication_agrees_with_sympy(a, b):
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@given(polys(), polys(max_terms=3))
@settings(max_examples=60, deadline=None)
def test_exact_division_roundtrip(a, b):
    if b.is_zero():
        return
    assert lp_exact_divide(a * b, b) == a


def test_exact_division_rejects_non_multiples():
    with pytest.raises(ArithmeticError):
        lp_exact_divide(1 + q, 1 - q)


def test_gcd_against_sympy():
    a = (1 + x * q) * (1 - q**2) * x
    b = (1 + x * q) * (1 + q)
    g = lp_gcd([a, b])
    ratio = sympy.cancel(to_sympy(g) / to_sympy((1 + x * q) * (1 + q)))
    assert ratio in (1, -1)


def test_substitute_shift():
    p = 1 + x * q + x**2
    assert p.substitute("x", x * q**2) == 1 + x * q**3 + x**2 * q**4
    assert p.shift_x(2) == p.substitute("x", x * q**2)


def test_kernel_of_rational_matrix():
    # columns v, (1+q)v and w: one dependency
    v = [1 + x, q]
    w = [x, 1 - q]
    m = [[v[i], (1 + q) * v[i], w[i]] for i in range(2)]
    (k,) = ratfun_kernel(m)
    for i in range(2):
        assert (k[0] * m[i][0] + k[1] * m[i][1] + k[2] * m[i][2]).is_zero()


def test_primitive_strips_content():
    a, b = 2 * x * q * (1 + q), 4 * x * q**2
    pa, pb = primitive([a, b])
    assert pa == 1 + q and pb == 2 * q


def test_rational_function_arithmetic():
    r = RationalFunction(1 + q, 1 - q)
    s = RationalFunction(1 - q, 1 + q)
    assert (r * s) == RationalFunction(1)
    assert (r - r).is_zero()
