"""Cartan matrices, diagram automorphisms and folded matrices A[nu].

Node numbering (1-based in labels and docs, 0-based in code):

* ``A_n``: the path 1 - 2 - ... - n.
* ``D_n``: the path 1 - ... - (n-1) with node n attached to node n-2.
* ``E_n``: Bourbaki, i.e. the chain 1 - 3 - 4 - 5 - ... - n with node 2
  attached to node 4.

Folded rows are listed in an explicit orbit order per catalog label, chosen
so that the matrices agree with the printed forms (see :data:`FOLD_LABELS`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

Matrix = tuple[tuple[int, ...], ...]


def _freeze(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def cartan(kind: str, rank: int) -> "SimplyLacedCartan":
    """Cartan matrix of type A, D or E."""
    kind = kind.upper()
    edges: list[tuple[int, int]]
    if kind == "A":
        if rank < 1:
            raise ValueError("A_n needs n >= 1")
        edges = [(i, i + 1) for i in range(rank - 1)]
    elif kind == "D":
        # D_3 is A_3 drawn with node 1 in the middle
        if rank < 3:
            raise ValueError("D_n needs n >= 3")
        edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    elif kind == "E":
        if rank not in (6, 7, 8):
            raise ValueError("E_n needs n in {6, 7, 8}")
        edges = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, rank - 1)]
    else:
        raise ValueError(f"unknown Cartan type {kind!r}")
    m = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for i, j in edges:
        m[i][j] = m[j][i] = -1
    return SimplyLacedCartan(f"{kind}{rank}", _freeze(m))


@dataclass(frozen=True)
class SimplyLacedCartan:
    label: str
    matrix: Matrix

    def __post_init__(self):
        m = self.matrix
        n = len(m)
        for i in range(n):
            if m[i][i] != 2:
                raise ValueError("diagonal entries must be 2")
            for j in range(n):
                if m[i][j] != m[j][i] or (i != j and m[i][j] not in (0, -1)):
                    raise ValueError("not a simply-laced Cartan matrix")
        if not is_positive_definite(m):
            raise ValueError("Cartan matrix is not positive definite")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def determinant(self) -> int:
        return int(sympy.Matrix(self.matrix).det())


@dataclass(frozen=True)
class DiagramAutomorphism:
    """Permutation of nodes (0-based images) preserving the Cartan matrix."""

    perm: tuple[int, ...]

    @property
    def order(self) -> int:
        k, p = 1, list(self.perm)
        ident = list(range(len(p)))
        cur = p
        while cur != ident:
            cur = [p[c] for c in cur]
            k += 1
        return k

    def preserves(self, m: Matrix) -> bool:
        n = len(m)
        if sorted(self.perm) != list(range(n)):
            return False
        return all(m[self.perm[i]][self.perm[j]] == m[i][j] for i in range(n) for j in range(n))

    def orbits(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            orb, j = [], i
            while j not in orb:
                orb.append(j)
                j = self.perm[j]
            seen.update(orb)
            out.append(tuple(sorted(orb)))
        return out


def flip(n: int) -> DiagramAutomorphism:
    """The order-2 reflection of the A_n path."""
    return DiagramAutomorphism(tuple(n - 1 - i for i in range(n)))


def d_swap(n: int) -> DiagramAutomorphism:
    p = list(range(n))
    p[n - 2], p[n - 1] = n - 1, n - 2
    return DiagramAutomorphism(tuple(p))


def d4_triality() -> DiagramAutomorphism:
    # 1 -> 3 -> 4 -> 1, centre fixed
    return DiagramAutomorphism((2, 1, 3, 0))


def e6_flip() -> DiagramAutomorphism:
    # 1 <-> 6, 3 <-> 5; 2 and 4 fixed
    return DiagramAutomorphism((5, 1, 4, 3, 2, 0))


@dataclass(frozen=True)
class FoldedCartan:
    parent: SimplyLacedCartan
    nu: DiagramAutomorphism
    representatives: tuple[int, ...]  # 0-based node per folded row
    orbit_lengths: tuple[int, ...]
    folded: Matrix

    @property
    def k(self) -> int:
        return self.nu.order

    @property
    def d(self) -> int:
        return len(self.folded)

    def twisted_bases(self) -> tuple[Fraction, ...]:
        """Pochhammer base exponents k/l_j of the twisted sum."""
        return tuple(Fraction(self.k, l) for l in self.orbit_lengths)


def fold(c: SimplyLacedCartan, nu: DiagramAutomorphism, order: Sequence[int] | None = None) -> FoldedCartan:
    """Folded matrix ``A[nu]_{ij} = k <beta_i, beta_j>``.

    ``order`` lists one 1-based node from each orbit, giving the row order;
    by default rows follow the smallest node of each orbit.
    """
    m = c.matrix
    if not nu.preserves(m):
        raise ValueError("permutation does not preserve the Cartan matrix")
    k = nu.order
    orbits = nu.orbits()
    if order is None:
        reps = [orb[0] for orb in orbits]
    else:
        reps = [i - 1 for i in order]
        if sorted(next(o for o in orbits if r in o) for r in reps) != sorted(orbits):
            raise ValueError("order must pick exactly one node from each orbit")
    n = len(m)

    def beta(r):
        v = [Fraction(0)] * n
        j = r
        for _ in range(k):
            v[j] += Fraction(1, k)
            j = nu.perm[j]
        return v

    betas = [beta(r) for r in reps]
    out = []
    for bi in betas:
        row = []
        for bj in betas:
            val = k * sum(bi[s] * m[s][t] * bj[t] for s in range(n) for t in range(n) if bi[s] and bj[t])
            if val.denominator != 1:
                raise ArithmeticError("folded entry is not an integer")
            row.append(int(val))
        out.append(row)
    lengths = tuple(len(next(o for o in orbits if r in o)) for r in reps)
    f = FoldedCartan(c, nu, tuple(reps), lengths, _freeze(out))
    if not is_positive_definite(f.folded):
        raise ValueError("folded matrix is not positive definite")
    return f


def tadpole(n: int) -> Matrix:
    """Cartan-like matrix of the tadpole diagram: A_n path with last diagonal 1."""
    m = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    m[n - 1][n - 1] = 1
    return _freeze(m)


# label -> (type, rank(n), automorphism(n), explicit 1-based orbit order or None)
FOLD_LABELS = {
    "A2n^2": lambda n: (cartan("A", 2 * n), flip(2 * n), None),
    "A2n-1^2": lambda n: (cartan("A", 2 * n - 1), flip(2 * n - 1), None),
    "Dn^2": lambda n: (cartan("D", n), d_swap(n), None),
    "D4^3": lambda n: (cartan("D", 4), d4_triality(), [2, 1]),
    "E6^2": lambda n: (cartan("E", 6), e6_flip(), [1, 3, 4, 2]),
}

_LABEL_RE = re.compile(r"^\s*([A-Za-z0-9^\-]+?)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def parse_label(label: str, n: int | None = None) -> tuple[str, int | None]:
    m = _LABEL_RE.match(label)
    if not m or m.group(1) not in FOLD_LABELS:
        raise ValueError(f"unknown folding label {label!r}; known: {', '.join(FOLD_LABELS)}")
    name = m.group(1)
    if m.group(2) is not None:
        if n is not None and int(m.group(2)) != n:
            raise ValueError("conflicting n in label and argument")
        n = int(m.group(2))
    if name in ("D4^3", "E6^2"):
        return name, None
    if n is None:
        raise ValueError(f"label {name} needs a parameter n")
    minimum = {"A2n^2": 1, "A2n-1^2": 2, "Dn^2": 3}[name]
    if n < minimum:
        raise ValueError(f"{name} needs n >= {minimum}")
    return name, n


def fold_label(label: str, n: int | None = None) -> FoldedCartan:
    """Fold by catalog label, e.g. ``E6^2`` or ``A2n-1^2(3)``."""
    name, n = parse_label(label, n)
    c, nu, order = FOLD_LABELS[name](n)
    return fold(c, nu, order)


# ---------------------------------------------------------------------------
# exact matrix helpers


def is_positive_definite(m: Sequence[Sequence]) -> bool:
    """Sylvester's criterion on exact leading principal minors."""
    sm = sympy.Matrix(m)
    if sm != sm.T:
        return False
    return all(sm[:k, :k].det() > 0 for k in range(1, sm.rows + 1))


def rational_inverse(m: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    inv = sympy.Matrix(m).inv()
    return tuple(tuple(Fraction(int(e.p), int(e.q)) for e in inv.row(i)) for i in range(inv.rows))


def scaled_inverse(m: FoldedCartan | Sequence[Sequence], c: int) -> Matrix:
    """``c * A^{-1}`` as an integer matrix.

    Raises ``ValueError`` naming the least valid multiple when the result
    would not be integral.
    """
    a = m.folded if isinstance(m, FoldedCartan) else m
    inv = rational_inverse(a)
    least = 1
    for row in inv:
        for e in row:
            least = least * e.denominator // math.gcd(least, e.denominator)
    if c % least:
        raise ValueError(f"{c}*A^-1 is not integral; least valid multiple is {least}")
    return _freeze([[int(e * c) for e in row] for row in inv])


# ---------------------------------------------------------------------------
# quadratic forms


@dataclass(frozen=True)
class QuadraticForm:
    """``E(m) = m^T B m / 2 + b . m`` with rational entries."""

    B: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]

    @classmethod
    def make(cls, B, b=None) -> "QuadraticForm":
        B = tuple(tuple(Fraction(e) for e in row) for row in B)
        d = len(B)
        b = tuple(Fraction(e) for e in (b if b is not None else [0] * d))
        if any(len(r) != d for r in B) or len(b) != d:
            raise ValueError("dimension mismatch")
        if any(B[i][j] != B[j][i] for i in range(d) for j in range(d)):
            raise ValueError("B must be symmetric")
        return cls(B, b)

    @property
    def dim(self) -> int:
        return len(self.b)

    def __call__(self, m: Sequence[int]) -> Fraction:
        d = self.dim
        q = sum(self.B[i][j] * m[i] * m[j] for i in range(d) for j in range(d)) / 2
        return q + sum(self.b[i] * m[i] for i in range(d))

    def monomials(self) -> dict[tuple[int, ...], Fraction]:
        """Coefficients of the quadratic part keyed by exponent vectors."""
        d = self.dim
        out: dict[tuple[int, ...], Fraction] = {}
        for i in range(d):
            for j in range(i, d):
                e = [0] * d
                e[i] += 1
                e[j] += 1
                c = self.B[i][i] / 2 if i == j else self.B[i][j]
                if c:
                    out[tuple(e)] = c
        return out

    def polynomial_str(self, var: str = "m") -> str:
        syms = sympy.symbols(f"{var}1:{self.dim + 1}")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod(s**k for s, k in zip(syms, e))
                   for e, c in self.monomials().items())
        return str(sympy.expand(expr))


@dataclass
class RewriteReport:
    passed: bool
    residual: str

    def line(self) -> str:
        return "PASS rewrite residual 0" if self.passed else f"FAIL rewrite residual {self.residual}"


def rewrite_check(form: QuadraticForm, U: Sequence[Sequence[int]]) -> RewriteReport:
    """Check ``m^T B m / 2 == sum_i (U m)_i^2`` as a polynomial identity."""
    d = form.dim
    if len(U) == 0 or any(len(r) != d for r in U):
        raise ValueError("substitution matrix has the wrong shape")
    syms = sympy.symbols(f"m1:{d + 1}")
    mvec = sympy.Matrix(syms)
    B = sympy.Matrix([[sympy.Rational(e.numerator, e.denominator) for e in row] for row in form.B])
    lhs = (mvec.T * B * mvec)[0, 0] / 2
    Um = sympy.Matrix(U) * mvec
    rhs = sum(e**2 for e in Um)
    res = sympy.expand(lhs - rhs)
    return RewriteReport(res == 0, str(res))


def partial_sum_matrix(n: int) -> Matrix:
    """``M_i = m_i + ... + m_n`` as an upper-triangular all-ones matrix."""
    return _freeze([[1 if j >= i else 0 for j in range(n)] for i in range(n)])


def n_substitution(n: int) -> Matrix:
    """``N_i = 2m_i + ... + 2m_{n-1} + m_n`` (``i < n``) and ``N_n = m_n``."""
    rows = []
    for i in range(n):
        if i == n - 1:
            rows.append([1 if j == n - 1 else 0 for j in range(n)])
        else:
            rows.append([0] * i + [2] * (n - 1 - i) + [1])
    return _freeze(rows)


def format_matrix(m: Sequence[Sequence]) -> str:
    cells = [[str(e) for e in row] for row in m]
    w = max(len(c) for row in cells for c in row)
    return "\n".join("[" + ", ".join(c.rjust(w) for c in row) + "]" for row in cells)
