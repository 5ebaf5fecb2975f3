from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qfold.exactalg import LaurentPoly
from qfold.qseries import (INF, ProductFactor, ProductSpec, TruncatedSeries, bailey_pair_check,
                           bilateral_theta_sum, jtp_check, pochhammer, product_from_residues,
                           product_series, q_mono, series_invert, slater_f1, slater_f2, theta)

x, y = LaurentPoly.var("x"), LaurentPoly.var("y")
N = 40


def uni(coeffs):
    return TruncatedSeries.from_coefficients(coeffs, 1, len(coeffs))


def test_euler_product_gives_partition_numbers():
    e = pochhammer(q_mono(1), q_mono(1), INF, 60)
    assert series_invert(e).coefficients() == oracles.partition_counts(59)


def test_pentagonal_numbers():
    e = pochhammer(q_mono(1), q_mono(1), INF, 40).coefficients()
    nonzero = {k: c for k, c in enumerate(e) if c}
    assert nonzero == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1, 22: 1, 26: 1, 35: -1}


def test_rogers_ramanujan_product_start():
    s = product_from_residues(5, [1, 4], 20).coefficients()
    assert s[:12] == [1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6, 7]


@pytest.mark.parametrize("a,s,n", [(1, 1, 5), (2, 3, 4), (1, 2, None), (3, 5, None)])
def test_pochhammer_matches_oracle(a, s, n):
    got = pochhammer(q_mono(a), q_mono(s), INF if n is None else n, N).coefficients()
    assert got == oracles.poch(a, s, n, N)


def test_pochhammer_with_negative_valuation():
    # (q^-2; q)_4 = (1 - q^-2)(1 - q^-1)(1 - 1)(1 - q) = 0
    assert pochhammer(q_mono(-2), q_mono(1), 4, 20).is_zero()
    p = pochhammer(q_mono(-2), q_mono(1), 2, 20)
    expect = (1 - q_mono(-2)) * (1 - q_mono(-1))
    assert p.to_poly() == expect


@given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_pochhammer_recurrence(a, s, n):
    # (a; b)_{n+1} = (a; b)_n (1 - a b^n)
    lhs = pochhammer(q_mono(a), q_mono(s), n + 1, N)
    rhs = pochhammer(q_mono(a), q_mono(s), n, N).mul_poly(1 - q_mono(a + s * n))
    assert lhs == rhs


def test_fractional_pochhammer_on_quarter_grid():
    p = pochhammer(q_mono(Fraction(1, 2)), q_mono(1), 3, 40, denom=4)
    assert p.denom == 4
    expect = (1 - q_mono(Fraction(1, 2))) * (1 - q_mono(Fraction(3, 2))) * (1 - q_mono(Fraction(5, 2)))
    assert p.to_poly() == expect.rescale(4)


@given(st.integers(1, 4), st.integers(5, 9))
@settings(max_examples=20, deadline=None)
def test_theta_quasi_periodicity(a, m):
    # theta(z q^m; q^m) = -z^{-1} theta(z; q^m) with z = x q^a tracked by x
    order = 30
    z = x * q_mono(a)
    base = q_mono(m)
    lhs = pochhammer(z * base, base, INF, order) * pochhammer(x ** -1 * q_mono(-a), base, INF, order)
    rhs = (pochhammer(z, base, INF, order) * pochhammer(base * z ** -1, base, INF, order)).mul_poly(-(z ** -1))
    assert lhs.truncate(order - m - a, xmax=3) == rhs.truncate(order - m - a, xmax=3)


def test_theta_is_symmetric():
    assert theta(q_mono(2), q_mono(7), 50) == theta(q_mono(5), q_mono(7), 50)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=8), st.lists(st.integers(-5, 5), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_series_product_matches_oracle(a, b):
    n = 12
    a = (a + [0] * n)[:n]
    b = (b + [0] * n)[:n]
    assert (uni(a) * uni(b)).coefficients()[:n] == oracles.mul(a, b, n)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=10))
@settings(max_examples=60, deadline=None)
def test_inverse_roundtrip(tail):
    coeffs = ([1] + tail + [0] * 15)[:15]
    s = uni(coeffs)
    assert (s * series_invert(s)) == TruncatedSeries.one(15)
    assert series_invert(s).coefficients() == oracles.inv(coeffs, 15)


def test_multivariate_inverse():
    s = TruncatedSeries.from_poly(1 - x * q_mono(1) - y * q_mono(2), 25)
    prod = s * series_invert(s)
    assert prod == TruncatedSeries.one(25)


def test_series_ring_laws_bivariate():
    a = TruncatedSeries.from_poly(1 + x * q_mono(1) + q_mono(3), 20)
    b = series_invert(TruncatedSeries.from_poly(1 - x * q_mono(2), 20))
    c = pochhammer(q_mono(1), q_mono(2), INF, 20)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


def test_substitute_and_specialize():
    s = series_invert(TruncatedSeries.from_poly(1 - x * q_mono(1), 30))  # sum x^n q^n
    shifted = s.substitute("x", x * q_mono(1))  # sum x^n q^{2n}
    assert shifted.coeff(4, (2, 0)) == 1 and shifted.coeff(3, (2, 0)) == 0
    at1 = s.specialize(x=1)
    assert at1.coefficients() == [1] * 30


def test_first_mismatch_reports_true_exponent():
    a = TruncatedSeries.from_poly(1 + q_mono(Fraction(5, 2)), 20, 2)
    b = TruncatedSeries.one(20, 2)
    assert a.first_mismatch(b) == Fraction(5, 2)


def test_report_format():
    s = TruncatedSeries.from_poly(1 - x * q_mono(2) + q_mono(Fraction(1, 2)), 8, 2)
    lines = s.report_lines()
    assert lines == ["q^0 : 1", "q^(1/2) : 1", "q^2 : -x"]
    assert s.digest().startswith("order=4 valuation=0 sha256=")


def test_product_spec_mixed_grid():
    spec = ProductSpec((ProductFactor(q_mono(Fraction(1, 2)), q_mono(1)),
                        ProductFactor(q_mono(1), q_mono(1), power=-1)))
    s = product_series(spec, 40, 2)
    expect = pochhammer(q_mono(Fraction(1, 2)), q_mono(1), INF, 40, 2) * series_invert(
        pochhammer(q_mono(1), q_mono(1), INF, 40, 2))
    assert s == expect


def test_bailey_pairs_small():
    for pair in (slater_f1, slater_f2):
        alpha, beta, a = pair()
        assert bailey_pair_check(alpha, beta, a, 6, 40).passed


def test_bailey_pair_detects_a_wrong_alpha():
    alpha, beta, a = slater_f1()

    def bad(n, order):
        s = alpha(n, order)
        return s + TruncatedSeries.from_poly(q_mono(n + 3), order, 2) if n == 2 else s

    rep = bailey_pair_check(bad, beta, a, 4, 40)
    assert not rep.passed and rep.first_failure[0] == 2


def test_bilateral_sum_and_jtp():
    s = bilateral_theta_sum(1, 0, 30).coefficients()
    assert [k for k, c in enumerate(s) if c] == [0, 1, 4, 9, 16, 25]
    for k in (1, 2, 3):
        assert jtp_check(k, 80).passed
