import random

import pytest
from hypothesis import given, settings, strategies as st

from qfold.certify import (BUILTINS, FUNDAMENTAL, RELATIONS, Certificate, CertificateSyntaxError,
                           SymbolicCombination, builtin, compare, expand, numeric_check, parse_certificate,
                           parse_combination, parse_document, parse_laurent, recurrence_combination, relation,
                           three_copy)
from qfold.exactalg import LaurentPoly

P = parse_laurent


def sym(fam, t, c="1"):
    return SymbolicCombination.symbol(fam, t, P(c))


def test_relation_examples():
    assert relation("nh1", 0, 0, 0, 0) == (sym("S", (0, 0, 0, 0)) - sym("S", (2, 0, 0, 0))
                                           - sym("S", (8, 12, 8, 4), "x^2*q^4"))
    assert relation("m2", 0, 0, 0, 0) == (sym("R", (0, 0, 0, 0)) - sym("R", (0, 2, 0, 0))
                                          - sym("R", (6, 12, 8, 4), "x^2*y*q^6"))
    A, B, C, D = 1, -2, 3, 5
    n4 = relation("n4", A, B, C, D)
    assert n4.terms[("S", (A + 8, B + 16, C + 12, D + 8))] == P(f"x^2*q^{9 + 2 * D}")
    with pytest.raises(KeyError):
        relation("n5", 0, 0, 0, 0)


def test_printing():
    assert str(relation("nh1", 0, 0, 0, 0)) == "S(0,0,0,0) - S(2,0,0,0) - q^4*x^2*S(8,12,8,4)"
    assert str(SymbolicCombination()) == "0"


def test_parse_terms():
    cert = parse_certificate("-m1(-2,0,0,0)+m1(-2,0,0,1)")
    assert [(c, n, a) for c, n, a in cert.terms] == [(P("-1"), "m1", (-2, 0, 0, 0)), (P("1"), "m1", (-2, 0, 0, 1))]
    (c, n, a), = parse_certificate("-x*q*m1(0,4,2,2)").terms
    assert c == P("-x*q") and n == "m1"


def test_parse_formatting_variants():
    a = parse_certificate("x^2*q^6 * nh1(8,12,8,4) - nh1(0,0,0,0)")
    b = parse_certificate("  x**2 *q**6*nh1( 8, 12,8 ,4 )\n   -nh1(0,0,0,0)  # comment\n")
    c = parse_certificate("(q^6*x^2)*n̂1(8,12,8,4) - n̂1(0,0,0,0)")
    assert a == b == c


def test_round_trip():
    for name in BUILTINS:
        cert, _ = builtin(name, (3, -2, 5, 1))
        assert parse_certificate(str(cert)) == cert


def test_syntax_errors_have_positions():
    with pytest.raises(CertificateSyntaxError) as info:
        parse_certificate("n1(0,0,0,0)\n + q*m1(0,0,0)")
    assert (info.value.line, info.value.col) == (2, 14)
    assert str(info.value).startswith("line 2, column 14:")
    with pytest.raises(CertificateSyntaxError):
        parse_certificate("x^(1/2)*n1(0,0,0,0)")
    with pytest.raises(KeyError):
        parse_certificate("n7(0,0,0,0)")


def test_empty_certificate():
    assert expand(parse_certificate("# nothing here\n")).is_zero()
    assert expand(Certificate()).is_zero()


def test_nine_term():
    cert, target = builtin("nine-term")
    assert len(cert.terms) == 9
    cmp = compare(expand(cert), target)
    assert cmp.equal and cmp.note == "identical"
    assert target == parse_combination("R(0,0,0,0) - R(0,2,1,1) - x*q*R(0,4,2,2)")


@pytest.mark.parametrize("t", [(0, 0, 0, 0), (3, -2, 5, 1), (-4, 7, 0, -1)])
@pytest.mark.parametrize("name", ["n1", "n3", "n4"])
def test_three_copy(name, t):
    assert expand(three_copy(name, t)) == relation(name, t)


def test_document_with_target():
    cert, target = parse_document("nh1(0,0,0,0) + nh1(2,0,0,0) - x^2*q^6*nh1(8,12,8,4) = "
                                  "S(0,0,0,0) - S(4,0,0,0) - x^2*(q^4+q^6)*S(8,12,8,4) + x^4*q^18*S(16,24,16,8)")
    assert compare(expand(cert), target).equal


def test_compare_up_to_unit():
    a = relation("m1", 0, 0, 0, 0)
    cmp = compare(a.scale(P("-x*q^3")), a)
    assert cmp.equal and cmp.note != "identical"
    assert not compare(a, relation("m1", 1, 0, 0, 0)).equal


def test_numeric_zero_and_injected_fault():
    assert numeric_check(relation("n1", 0, 0, 0, 0), 60).passed
    bad = relation("nh1", 0, 0, 0, 0) + sym("S", (2, 0, 0, 0), "2")  # flips the sign of S(2,0,0,0)
    rep = numeric_check(bad, 40)
    assert not rep.passed and rep.first_failure == 0


@pytest.mark.parametrize("name", sorted(RELATIONS))
def test_every_template_vanishes(name):
    rng = random.Random(name)
    t = tuple(rng.randint(-4, 4) for _ in range(4))
    assert numeric_check(relation(name, t), 30).passed, t


@pytest.mark.parametrize("name", ["F1", "F5", "F7"])
def test_printed_recurrences_as_combinations(name):
    assert numeric_check(recurrence_combination(name), 60).passed


def test_symbolic_and_numeric_agree():
    a = relation("n2", 0, 1, 0, 0) + relation("m3", 1, 1, 1, 1).scale(P("y"))
    b = a + relation("nh4", 2, 0, 0, 0)
    assert compare(a, b).equal is False
    # both vanish numerically, so their difference does too
    assert numeric_check(a - b, 30).passed


_cert_terms = st.lists(st.tuples(st.integers(-3, 3).filter(bool), st.sampled_from(FUNDAMENTAL),
                                 st.tuples(*[st.integers(-8, 8)] * 4)), max_size=4)


@given(_cert_terms, _cert_terms)
@settings(max_examples=40, deadline=None)
def test_expand_is_linear(t1, t2):
    c1 = Certificate(tuple((LaurentPoly.const(c), n, a) for c, n, a in t1))
    c2 = Certificate(tuple((LaurentPoly.const(c), n, a) for c, n, a in t2))
    assert expand(c1 + c2) == expand(c1) + expand(c2)
