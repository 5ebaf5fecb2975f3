from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qfold.certify import family_spec
from qfold.exactalg import LaurentPoly
from qfold.folding import fold_label
from qfold.multisum import (MultisumSpec, ShiftRule, dilate, dual_spec, evaluate, naive_evaluate,
                            recursion_check, scale_form, shift)
from qfold.qseries import product_from_residues, q_mono

x, y = LaurentPoly.var("x"), LaurentPoly.var("y")


def test_rogers_ramanujan_sum():
    s = evaluate(MultisumSpec.make([[2]], bases=[1]), 6)
    assert s.coefficients() == [1, 1, 1, 1, 2, 2]
    assert evaluate(MultisumSpec.make([[2]], bases=[1]), 80) == product_from_residues(5, [1, 4], 80)


def test_nandi_sum_start():
    s = evaluate(family_spec("S", (0, 0, 0, 0)), 30).specialize(x=1)
    assert s.coefficients()[:2] == [1, 0]


def test_zero_point_only():
    # every nonzero lattice point sits at q^5 or higher
    s = evaluate(MultisumSpec.make([[10]], bases=[1]), 5)
    assert s.coefficients() == [1, 0, 0, 0, 0]


def test_rejects_indefinite():
    with pytest.raises(ValueError):
        MultisumSpec.make([[2, 3], [3, 2]], bases=[1, 1])
    with pytest.raises(ValueError):
        MultisumSpec.make([[2, 1], [0, 2]], bases=[1, 1])


@st.composite
def dominant_forms(draw):
    d = draw(st.integers(1, 3))
    off = {}
    for i in range(d):
        for j in range(i + 1, d):
            off[i, j] = off[j, i] = draw(st.integers(-2, 2))
    B = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                radius = sum(abs(off[i, k]) for k in range(d) if k != i)
                row.append(2 * draw(st.integers(1, 3)) + 2 * radius)
            else:
                row.append(off[i, j])
        B.append(row)
    b = [draw(st.integers(0, 3)) for _ in range(d)]
    bases = [draw(st.integers(1, 3)) for _ in range(d)]
    return B, b, bases


@given(dominant_forms())
@settings(max_examples=25, deadline=None)
def test_enumeration_is_complete(data):
    # diagonal dominance gives E(m) >= |m|^2, so a box of side sqrt(order) is exhaustive
    B, b, bases = data
    n = 30
    got = evaluate(MultisumSpec.make(B, b, bases), n).coefficients()
    assert got == oracles.multisum(B, b, bases, n, 6)


@pytest.mark.parametrize("label,scale", [("E6^2", 2), ("D4^3", 3), ("D4^3", 6)])
def test_evaluate_matches_naive_box(label, scale):
    spec = dual_spec(fold_label(label), scale)
    assert evaluate(spec, 25) == naive_evaluate(spec, 25, 6)


def test_fractional_grid_matches_naive():
    spec = MultisumSpec.make([[Fraction(1, 2), 0], [0, 1]], [Fraction(1, 4), 0], [1, 1])
    assert spec.grid == 4
    assert evaluate(spec, 8) == naive_evaluate(spec, 8, 12)


def test_negative_linear_terms_reach_below_zero():
    s = evaluate(family_spec("S", (-8, -12, -8, -4)), 10)
    assert s.valuation() < 0
    assert s == naive_evaluate(family_spec("S", (-8, -12, -8, -4)), 10, 5)


def test_x_grading_is_finite():
    # x^n only sees lattice points with 2i+3j+2k+l = n, all inside the box of side n
    spec = family_spec("S", (0, 0, 0, 0))
    full = evaluate(spec, 60, xmax=3)
    box = naive_evaluate(spec, 60, 3).truncate(60, xmax=3)
    assert full == box


def test_shift_rules():
    S0 = family_spec("S", (0, 0, 0, 0))
    assert shift(S0, ShiftRule("x", 1)).b == family_spec("S", (2, 3, 2, 1)).b
    R0 = family_spec("R", (0, 0, 0, 0))
    assert shift(R0, ShiftRule("y", 1, (1, 1, 1, 0))).b == family_spec("R", (1, 1, 1, 0)).b
    assert shift(S0, ShiftRule("x", 0)) == S0
    with pytest.raises(ValueError, match="residual"):
        shift(S0, ShiftRule("x", 1, (2, 3, 2, 2)))


@pytest.mark.parametrize("family,var,t", [("S", "x", (0, 0, 0, 0)), ("S", "x", (2, -2, 1, 0)),
                                          ("R", "x", (0, 0, 0, 0)), ("R", "y", (1, 0, 2, 0))])
def test_shift_coherence(family, var, t):
    spec = family_spec(family, t)
    order, deg = 40, 6
    v = x if var == "x" else y
    lhs = evaluate(shift(spec, ShiftRule(var, 1)), order, xmax=deg, ymax=deg)
    rhs = evaluate(spec, order, xmax=deg, ymax=deg).substitute(var, v * q_mono(1))
    assert lhs == rhs.truncate(order, xmax=deg, ymax=deg if family == "R" else None)


def test_scale_form():
    e6 = fold_label("E6^2")
    assert scale_form(dual_spec(e6, 2), 2) == dual_spec(e6, 4)
    d4 = fold_label("D4^3")
    capp = scale_form(dual_spec(d4, 3), 2)
    assert capp.B == ((4, 6), (6, 12))  # 2m1^2 + 6m1m2 + 6m2^2
    assert scale_form(capp, 1) == capp
    with pytest.raises(ValueError):
        scale_form(dual_spec(d4, 3), Fraction(1, 5))


def test_dilate():
    rr = MultisumSpec.make([[2]], bases=[1])
    s = evaluate(dilate(rr, 2), 40).coefficients()
    assert s[::2] == evaluate(rr, 20).coefficients()
    assert not any(s[1::2])
    assert dilate(rr, 2).denoms == (((2, 2),),)
    half = evaluate(dilate(rr, Fraction(1, 2)), 10)
    assert half.denom == 2 and half.coeff(Fraction(1, 2), (0, 0)) == 1


@pytest.mark.parametrize("label,i,order", [("D4^3", 1, 40), ("D4^3", 2, 40), ("E6^2", 1, 30),
                                           ("E6^2", 2, 30), ("E6^2", 3, 30), ("E6^2", 4, 30),
                                           ("A2n^2(1)", 1, 40), ("A2n-1^2(3)", 3, 30)])
def test_folding_recursion(label, i, order):
    rep = recursion_check(fold_label(label), i, order)
    assert rep.passed, rep.line()


def test_folding_recursion_index_range():
    with pytest.raises(ValueError):
        recursion_check(fold_label("D4^3"), 3, 10)
