"""Relation algebra over the formal symbols ``S(A,B,C,D)`` and ``R(A,B,C,D)``.

Certificate grammar (UTF-8, ``#`` starts a line comment)::

    expr := term (('+' | '-') term)*
    term := [coef '*'] name '(' int ',' int ',' int ',' int ')'
    coef := Laurent polynomial literal over x, y, q

A document may carry a target after ``=``; the same grammar with the
family names ``S``/``R`` describes plain combinations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactalg import LaurentPoly, format_poly
from .multisum import MultisumSpec, evaluate
from .qseries import CheckReport, TruncatedSeries

Tuple4 = tuple[int, int, int, int]


class CertificateSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9̂]*)|(\*\*|[-+*^(),/=]))")


@dataclass
class _Tok:
    kind: str  # int, name, op, end
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    for lineno, line in enumerate(text.splitlines() or [""], 1):
        line = line.split("#", 1)[0]
        # n̂1 may arrive precomposed or as n + combining hat
        line = line.replace("n̂", "nh")
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _TOKEN.match(line, pos)
            if not m:
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                raise CertificateSyntaxError(f"unexpected character {line[col - 1]!r}", lineno, col)
            col = m.start(m.lastindex) + 1
            kind = ("int", "name", "op")[m.lastindex - 1]
            tok = m.group(m.lastindex)
            toks.append(_Tok(kind, "^" if tok == "**" else tok, lineno, col))
            pos = m.end()
    last = text.splitlines()[-1] if text.splitlines() else ""
    toks.append(_Tok("end", "", max(1, len(text.splitlines())), len(last) + 1))
    return toks


class _Parser:
    def __init__(self, text: str, calls: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.calls = calls

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise CertificateSyntaxError(f"{msg} (found {found})", t.line, t.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}")

    def integer(self) -> int:
        sign = -1 if self.accept("-") else (self.accept("+") and 1) or 1
        if self.tok.kind != "int":
            self.error("expected an integer")
        v = int(self.tok.text)
        self.i += 1
        return sign * v

    # polynomial level -------------------------------------------------

    def poly_expr(self) -> LaurentPoly:
        neg = False
        if self.accept("-"):
            neg = True
        else:
            self.accept("+")
        acc = self.poly_term()
        if neg:
            acc = -acc
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            t = self.poly_term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def poly_term(self) -> LaurentPoly:
        acc = self.poly_factor()
        while self.accept("*"):
            acc = acc * self.poly_factor()
        return acc

    def poly_factor(self) -> LaurentPoly:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            base = LaurentPoly.const(int(t.text))
        elif t.kind == "name" and t.text in ("x", "y", "q"):
            self.i += 1
            base = LaurentPoly.var(t.text)
        elif t.kind == "op" and t.text == "(":
            self.i += 1
            base = self.poly_expr()
            self.expect(")")
        else:
            self.error("expected a number, x, y, q or '('")
        if self.accept("^"):
            e = self.exponent()
            if isinstance(e, Fraction) and e.denominator != 1:
                if not (t.kind == "name" and t.text == "q"):
                    self.error("fractional exponents are only allowed on q", t)
                return LaurentPoly.monomial(1, q=e)
            try:
                base = base ** int(e)
            except (ValueError, ArithmeticError) as exc:
                self.error(str(exc), t)
        return base

    def exponent(self) -> Fraction:
        if self.accept("("):
            num = self.integer()
            den = 1
            if self.accept("/"):
                den = self.integer()
                if den == 0:
                    self.error("zero denominator")
            self.expect(")")
            return Fraction(num, den)
        return Fraction(self.integer())

    # certificate level -------------------------------------------------

    def comb_expr(self, stop=("end",)) -> list[tuple[LaurentPoly, str, Tuple4]]:
        terms = []
        first = True
        while True:
            sign = 1
            if self.accept("-"):
                sign = -1
            elif not self.accept("+") and not first:
                break
            first = False
            coef, name, args = self.comb_term()
            terms.append((coef * sign, name, args))
            if self.tok.kind == "end" or (self.tok.kind == "op" and self.tok.text == "="):
                break
            if not (self.tok.kind == "op" and self.tok.text in "+-"):
                self.error("expected '+', '-' or end of expression")
        return terms

    def comb_term(self):
        coef = LaurentPoly.const(1)
        while True:
            t = self.tok
            if t.kind == "name" and t.text not in ("x", "y", "q"):
                self.i += 1
                self.expect("(")
                args = [self.integer()]
                for _ in range(3):
                    self.expect(",")
                    args.append(self.integer())
                self.expect(")")
                return coef, t.text, tuple(args)
            coef = coef * self.poly_factor()
            if not self.accept("*"):
                self.error("expected '*' followed by a relation or symbol")


def parse_laurent(text: str) -> LaurentPoly:
    """Parse a Laurent polynomial such as ``-q^5*x - q^(3/2)*y^2 + 1``."""
    p = _Parser(text, calls=False)
    if p.tok.kind == "end":
        p.error("empty polynomial")
    out = p.poly_expr()
    if p.tok.kind != "end":
        p.error("unexpected trailing input")
    return out


# ---------------------------------------------------------------------------
# combinations


@dataclass(frozen=True)
class SymbolicCombination:
    """Finite formal sum ``sum coef * family(tuple)``; zero terms are dropped."""

    terms: Mapping[tuple[str, Tuple4], LaurentPoly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: v for k, v in self.terms.items() if not v.is_zero()}
        for fam, t in clean:
            if fam not in FAMILIES or len(t) != 4:
                raise ValueError(f"bad symbol {fam}{t}")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def symbol(cls, family: str, t: Sequence[int], coef: LaurentPoly | int = 1) -> "SymbolicCombination":
        c = coef if isinstance(coef, LaurentPoly) else LaurentPoly.const(coef)
        return cls({(family, tuple(int(v) for v in t)): c})

    def __add__(self, other: "SymbolicCombination") -> "SymbolicCombination":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return SymbolicCombination(out)

    def __neg__(self):
        return SymbolicCombination({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: LaurentPoly) -> "SymbolicCombination":
        return SymbolicCombination({k: c * v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, SymbolicCombination) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        return _join((c, f"{fam}{_fmt_args(t)}") for (fam, t), c in self.terms.items())


def _fmt_args(t: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in t) + ")"


def _join(pairs: Iterable[tuple[LaurentPoly, str]]) -> str:
    out = []
    for coef, sym in pairs:
        neg = coef.is_monomial() and next(iter(coef.terms.values())) < 0
        c = -coef if neg else coef
        if c == LaurentPoly.const(1):
            body = sym
        elif c.is_monomial():
            body = f"{format_poly(c)}*{sym}"
        else:
            body = f"({format_poly(c)})*{sym}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def unit_ratio(a: SymbolicCombination, b: SymbolicCombination) -> LaurentPoly | None:
    """Monomial ``u`` (coefficient ±1) with ``a == u * b``, or None."""
    if a.terms.keys() != b.terms.keys() or not a.terms:
        return None
    for sign in (1, -1):
        k = next(iter(a.terms))
        ca, cb = a.terms[k], b.terms[k]
        d = max(ca.denom, cb.denom)
        ta, tb = ca.rescale(d).terms, cb.rescale(d).terms
        ka, kb = max(ta), max(tb)
        if ta[ka] != sign * tb[kb]:
            continue
        u = LaurentPoly({tuple(x - y for x, y in zip(ka, kb)): sign}, d).reduced()
        if b.scale(u) == a:
            return u
    return None


# ---------------------------------------------------------------------------
# families and relation templates


S_FORM = ((8, 12, 8, 4), (12, 24, 16, 8), (8, 16, 12, 6), (4, 8, 6, 4))
R_FORM = ((4, 6, 4, 2), (6, 12, 8, 4), (4, 8, 6, 3), (2, 4, 3, 2))

FAMILIES = {
    # name: (B, Pochhammer bases, x-weights, y-weights)
    "S": (S_FORM, (2, 2, 1, 1), (2, 3, 2, 1), None),
    "R": (R_FORM, (2, 2, 1, 1), (0, 2, 1, 1), (1, 1, 1, 0)),
}


def family_spec(family: str, t: Sequence[int]) -> MultisumSpec:
    """``family(A,B,C,D)`` as a multisum: the base form with linear term ``t``."""
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}")
    B, bases, xw, yw = FAMILIES[family]
    return MultisumSpec.make(B, t, bases, xweights=xw, yweights=yw, name=f"{family}{_fmt_args(t)}")


@dataclass(frozen=True)
class RelationTerm:
    coef: str  # constant part, parsed once
    affine: Tuple4  # extra q-exponent  affine . (A,B,C,D)
    offset: Tuple4


@dataclass(frozen=True)
class RelationTemplate:
    name: str
    family: str
    terms: tuple[RelationTerm, ...]

    def instantiate(self, t: Sequence[int]) -> SymbolicCombination:
        t = tuple(int(v) for v in t)
        if len(t) != 4:
            raise ValueError("relations take four integer arguments")
        out = SymbolicCombination()
        for term in self.terms:
            q_extra = sum(a * v for a, v in zip(term.affine, t))
            coef = _coef(term.coef) * LaurentPoly.monomial(1, q=q_extra)
            sym = tuple(a + b for a, b in zip(t, term.offset))
            out = out + SymbolicCombination.symbol(self.family, sym, coef)
        return out


_COEF_CACHE: dict[str, LaurentPoly] = {}


def _coef(text: str) -> LaurentPoly:
    if text not in _COEF_CACHE:
        _COEF_CACHE[text] = parse_laurent(text)
    return _COEF_CACHE[text]


def _tpl(name, family, *rows):
    return RelationTemplate(name, family, tuple(RelationTerm(c, tuple(a), tuple(o)) for c, a, o in rows))


_0 = (0, 0, 0, 0)
_A, _B, _C, _D = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
_2C, _2D, _2A = (0, 0, 2, 0), (0, 0, 0, 2), (2, 0, 0, 0)

RELATIONS: dict[str, RelationTemplate] = {t.name: t for t in (
    _tpl("nh1", "S", ("1", _0, _0), ("-1", _0, (2, 0, 0, 0)), ("-x^2*q^4", _A, (8, 12, 8, 4))),
    _tpl("nh3", "S", ("1", _0, _0), ("-1", _0, (0, 0, 1, 0)), ("-x^2*q^6", _C, (8, 16, 12, 6))),
    _tpl("nh4", "S", ("1", _0, _0), ("-1", _0, (0, 0, 0, 1)), ("-x*q^2", _D, (4, 8, 6, 4))),
    _tpl("n1", "S", ("1", _0, _0), ("-x^2*q^4*(1+q^2)", _A, (8, 12, 8, 4)), ("-1", _0, (4, 0, 0, 0)),
         ("x^4*q^18", _2A, (16, 24, 16, 8))),
    _tpl("n2", "S", ("1", _0, _0), ("-1", _0, (0, 2, 0, 0)), ("-x^3*q^12", _B, (12, 24, 16, 8))),
    _tpl("n3", "S", ("1", _0, _0), ("-x^2*q^6*(1+q)", _C, (8, 16, 12, 6)), ("-1", _0, (0, 0, 2, 0)),
         ("x^4*q^25", _2C, (16, 32, 24, 12))),
    _tpl("n4", "S", ("1", _0, _0), ("-x*q^2*(1+q)", _D, (4, 8, 6, 4)), ("-1", _0, (0, 0, 0, 2)),
         ("x^2*q^9", _2D, (8, 16, 12, 8))),
    _tpl("m1", "R", ("1", _0, _0), ("-1", _0, (2, 0, 0, 0)), ("-y*q^2", _A, (4, 6, 4, 2))),
    _tpl("m2", "R", ("1", _0, _0), ("-1", _0, (0, 2, 0, 0)), ("-x^2*y*q^6", _B, (6, 12, 8, 4))),
    _tpl("m3", "R", ("1", _0, _0), ("-1", _0, (0, 0, 1, 0)), ("-x*y*q^3", _C, (4, 8, 6, 3))),
    _tpl("m4", "R", ("1", _0, _0), ("-1", _0, (0, 0, 0, 1)), ("-x*q", _D, (2, 4, 3, 2))),
)}

# the n-relations and m-relations (the hatted ones are intermediate)
FUNDAMENTAL = ("n1", "n2", "n3", "n4", "m1", "m2", "m3", "m4")


def relation(name: str, *t: int) -> SymbolicCombination:
    if len(t) == 1:
        t = tuple(t[0])
    if name not in RELATIONS:
        raise KeyError(f"unknown relation {name!r}; known: {', '.join(sorted(RELATIONS))}")
    return RELATIONS[name].instantiate(t)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    terms: tuple[tuple[LaurentPoly, str, Tuple4], ...] = ()

    def __post_init__(self):
        for _, name, args in self.terms:
            if name not in RELATIONS:
                raise KeyError(f"unknown relation {name!r}")
            if len(args) != 4:
                raise ValueError("relations take four integer arguments")

    def __add__(self, other: "Certificate") -> "Certificate":
        return Certificate(self.terms + other.terms)

    def __str__(self):
        if not self.terms:
            return "0*n1(0,0,0,0)"
        return _join((c, f"{n}{_fmt_args(a)}") for c, n, a in self.terms)


def expand(cert: Certificate) -> SymbolicCombination:
    out = SymbolicCombination()
    for coef, name, args in cert.terms:
        out = out + relation(name, args).scale(coef)
    return out


def _split_doc(text: str):
    p = _Parser(text, calls=True)
    if p.tok.kind == "end":
        return p, [], None
    lhs = p.comb_expr()
    rhs = None
    if p.accept("="):
        rhs = p.comb_expr()
    if p.tok.kind != "end":
        p.error("unexpected trailing input")
    return p, lhs, rhs


def parse_certificate(text: str) -> Certificate:
    """Parse relation terms; an empty (or comment-only) text is the empty certificate."""
    return parse_document(text)[0]


def parse_document(text: str) -> tuple[Certificate, SymbolicCombination | None]:
    """Certificate with an optional ``= target`` part."""
    p, lhs, rhs = _split_doc(text)
    for _, name, _ in lhs:
        if name not in RELATIONS:
            raise KeyError(f"unknown relation {name!r}; known: {', '.join(sorted(RELATIONS))}")
    target = _to_comb(rhs) if rhs is not None else None
    return Certificate(tuple(lhs)), target


def _to_comb(terms) -> SymbolicCombination:
    out = SymbolicCombination()
    for coef, name, args in terms:
        if name not in FAMILIES:
            raise KeyError(f"unknown family {name!r}; expected S or R")
        out = out + SymbolicCombination.symbol(name, args, coef)
    return out


def parse_combination(text: str) -> SymbolicCombination:
    p, lhs, rhs = _split_doc(text)
    if rhs is not None:
        raise CertificateSyntaxError("a combination cannot contain '='", 1, 1)
    return _to_comb(lhs)


@dataclass
class Comparison:
    equal: bool
    unit: LaurentPoly | None
    note: str


def compare(expanded: SymbolicCombination, target: SymbolicCombination) -> Comparison:
    """Exact equality, else equality up to a ±monomial unit."""
    if expanded == target:
        return Comparison(True, LaurentPoly.const(1), "identical")
    u = unit_ratio(expanded, target)
    if u is not None:
        return Comparison(True, u, f"equal up to the unit {format_poly(u)}")
    diff = expanded - target
    return Comparison(False, None, f"{len(diff)} symbols differ, e.g. {next(iter(diff.terms.items()))[0]}")


# ---------------------------------------------------------------------------
# numeric checks


class _SeriesCache:
    def __init__(self):
        self.store: dict[tuple[str, Tuple4], TruncatedSeries] = {}

    def get(self, family: str, t: Tuple4, order: int) -> TruncatedSeries:
        key = (family, t)
        s = self.store.get(key)
        if s is None or s.true_order < order:
            s = evaluate(family_spec(family, t), order)
            self.store[key] = s
        return s


def combination_residual(comb: SymbolicCombination, order: int, cache: _SeriesCache | None = None) -> TruncatedSeries:
    cache = cache or _SeriesCache()
    total = TruncatedSeries.zero(order)
    for (fam, t), coef in comb.terms.items():
        qmin = min(Fraction(k[2], coef.denom) for k, _ in coef.items())
        need = order - min(int(qmin) if qmin == int(qmin) else int(qmin) - 1, 0)
        s = cache.get(fam, t, need)
        total = total + s.mul_poly(coef)
    if total.true_order > order:
        total = total.truncate(order * total.denom)
    return total


def numeric_check(comb: SymbolicCombination, order: int, name: str = "combination",
                  cache: _SeriesCache | None = None) -> CheckReport:
    res = combination_residual(comb, order, cache)
    v = res.valuation()
    first = None if v is None else Fraction(v, res.denom)
    detail = ""
    if first is not None:
        detail = "residual " + res.report_lines()[0]
    return CheckReport(name, v is None, order, first, detail)


# ---------------------------------------------------------------------------
# built-in certificates

NINE_TERM = ("-m1(-2,0,0,0) + m1(-2,0,0,1) - x*q*m1(0,4,2,2) + x*q*m1(0,4,3,2) + m2(0,0,0,1)"
             " + m3(0,2,0,1) - x*q*m3(2,4,2,2) + m4(-2,0,0,0) - y*m4(2,6,4,2)")
NINE_TERM_TARGET = "R(0,0,0,0) - R(0,2,1,1) - x*q*R(0,4,2,2)"

# hatted relation, offset of the second copy, coefficient of the third copy
# (without its affine part) and the third copy's offset
_THREE_COPY = {
    "n1": ("nh1", (2, 0, 0, 0), "x^2*q^6", _A, (8, 12, 8, 4)),
    "n3": ("nh3", (0, 0, 1, 0), "x^2*q^7", _C, (8, 16, 12, 6)),
    "n4": ("nh4", (0, 0, 0, 1), "x*q^3", _D, (4, 8, 6, 4)),
}


def three_copy(name: str, t: Sequence[int] = (0, 0, 0, 0)) -> Certificate:
    """``h(t) + h(t + e) - c q^{.} h(t + o)`` which collects to relation ``name``."""
    hat, step, coef, affine, off = _THREE_COPY[name]
    t = tuple(int(v) for v in t)
    extra = sum(a * v for a, v in zip(affine, t))
    c3 = -_coef(coef) * LaurentPoly.monomial(1, q=extra)
    one = LaurentPoly.const(1)
    return Certificate((
        (one, hat, t),
        (one, hat, tuple(a + b for a, b in zip(t, step))),
        (c3, hat, tuple(a + b for a, b in zip(t, off))),
    ))


def builtin(name: str, t: Sequence[int] = (0, 0, 0, 0)) -> tuple[Certificate, SymbolicCombination]:
    """Named certificate and its target."""
    if name == "nine-term":
        return parse_certificate(NINE_TERM), parse_combination(NINE_TERM_TARGET)
    if name.startswith("three-copy-") and name[11:] in _THREE_COPY:
        rel = name[11:]
        return three_copy(rel, t), relation(rel, t)
    raise KeyError(f"unknown built-in certificate {name!r}; known: {', '.join(BUILTINS)}")


BUILTINS = ("nine-term", "three-copy-n1", "three-copy-n3", "three-copy-n4")


# ---------------------------------------------------------------------------
# printed recurrences as combinations

REC_TUPLES = {
    "F1": ((2, 2, 1, 0), (6, 8, 5, 2), (10, 14, 9, 4), (14, 20, 13, 6), (18, 26, 17, 8), (22, 32, 21, 10)),
    "F5": ((0, -2, -2, -1), (4, 4, 2, 1), (8, 10, 6, 3), (12, 16, 10, 5), (16, 22, 14, 7), (20, 28, 18, 9)),
    "F7": ((0, 0, 0, 0), (4, 6, 4, 2), (8, 12, 8, 4), (12, 18, 12, 6), (16, 24, 16, 8), (20, 30, 20, 10)),
}


def recurrence_combination(name: str) -> SymbolicCombination:
    """A printed scalar recurrence written over S-symbols."""
    from .shiftrec import PRINTED_RECURRENCES

    out = SymbolicCombination()
    for c, t in zip(PRINTED_RECURRENCES[name], REC_TUPLES[name]):
        out = out + SymbolicCombination.symbol("S", t, parse_laurent(c))
    return out
