"""Identity catalog: TOML files under ``qfold/catalog`` describing sum and
product sides.

Each file holds ``[[identity]]`` tables::

    id      = "mod10-A"                 # unique; parametric entries get "-n<k>"
    title   = "..."
    status  = "theorem" | "conjecture-in-paper"
    note    = "where the identity comes from"
    n       = [1, 2, 3]                 # optional parameter range
    sum     = { kind = ..., ... }
    product = { ... }                   # absent for self-contained checks

Sum kinds: ``multisum`` (B, bases, linear), ``fold-dual`` (fold, scale,
dilation, linear), ``combination`` (text over S/R symbols, taken at
x = y = 1), ``chain`` (k), ``partitions`` (set), ``bailey`` (pair, max_n)
and ``jtp`` (k).  Products are ``theta_inverse = {modulus, args}``,
``residues = {modulus, parts}`` or a list ``factors`` of
``{a, base, sign, power}`` meaning ``(sign q^a; q^base)_inf ^ power``.
Numbers may be written as affine strings in ``n`` such as ``"2*n+4"`` or
``"(n+2)/4"``.
"""

from __future__ import annotations

import ast
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .certify import combination_residual, parse_combination
from .exactalg import LaurentPoly
from .folding import fold_label
from .multisum import MultisumSpec, dual_spec, evaluate
from .partitions import MAX_WEIGHT, counts
from .qseries import (ProductFactor, ProductSpec, TruncatedSeries, bailey_pair_check, jtp_check,
                      product_from_residues, product_series, q_mono, series_invert, slater_f1, slater_f2)

STATUSES = ("theorem", "conjecture-in-paper")
SUM_KINDS = ("multisum", "fold-dual", "combination", "chain", "partitions", "bailey", "jtp")


class CatalogError(ValueError):
    pass


def affine(value, n: int | None = None) -> Fraction:
    """Evaluate an int or a string like ``"2*n+4"`` or ``"(n+2)/4"``."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if not isinstance(value, str):
        raise CatalogError(f"expected a number or expression, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name) and node.id == "n":
            if n is None:
                raise CatalogError(f"expression {value!r} uses n but the entry has no parameter")
            return Fraction(n)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise CatalogError(f"unsupported expression {value!r}")

    try:
        tree = ast.parse(value, mode="eval")
    except SyntaxError as exc:
        raise CatalogError(f"bad expression {value!r}") from exc
    return ev(tree)


def _ints(values, n) -> list[Fraction]:
    return [affine(v, n) for v in values]


@dataclass
class VerifyResult:
    id: str
    status: str
    passed: bool
    order: Fraction | int
    first_mismatch: Fraction | None
    wall_time: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "result": "pass" if self.passed else "fail",
            "order": str(self.order),
            "first-mismatch": None if self.first_mismatch is None else str(self.first_mismatch),
            "wall-time": round(self.wall_time, 3),
            "detail": self.detail,
        }

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        s = f"{tag} {self.id} [{self.status}] to order {self.order}"
        if not self.passed:
            s += f"; first mismatch at q^{self.first_mismatch}" if self.first_mismatch is not None else ""
        if self.detail:
            s += f"; {self.detail}"
        return s


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    title: str
    status: str
    note: str
    sum: dict = field(hash=False)
    product: dict | None = field(default=None, hash=False)
    n: int | None = None
    source: str = ""

    # -- sides ---------------------------------------------------------

    def spec(self) -> MultisumSpec | None:
        """The multisum behind the sum side, when there is a single one."""
        s, n = self.sum, self.n
        kind = s["kind"]
        if kind == "multisum":
            linear = _ints(s["linear"], n) if "linear" in s else None
            return MultisumSpec.make([_ints(r, n) for r in s["B"]], linear, _ints(s["bases"], n), name=self.id)
        if kind == "fold-dual":
            folded = fold_label(s["fold"], n)
            linear = _ints(s["linear"], n) if "linear" in s else None
            spec = dual_spec(folded, int(affine(s.get("scale", 1), n)), affine(s.get("dilation", 1), n), linear)
            return spec
        return None

    def grid(self) -> int:
        spec = self.spec()
        d = spec.grid if spec is not None else 1
        if self.sum["kind"] == "chain":
            d = 4
        return d

    def sum_series(self, order: int) -> TruncatedSeries:
        """Sum side, exact below the true exponent ``order``."""
        s, n = self.sum, self.n
        kind = s["kind"]
        if kind in ("multisum", "fold-dual"):
            spec = self.spec()
            return evaluate(spec, order)
        if kind == "combination":
            comb = parse_combination(s["expr"])
            return combination_residual(comb, order).specialize(x=1, y=1)
        if kind == "chain":
            return chain_sum(int(affine(s["k"], n)), order)
        if kind == "partitions":
            if order - 1 > MAX_WEIGHT:
                raise CatalogError(f"partition enumeration is capped at weight {MAX_WEIGHT}")
            return TruncatedSeries.from_coefficients(counts(s["set"], order - 1), 1, order)
        raise CatalogError(f"{self.id}: sum kind {kind!r} has no series")

    def product_series(self, order: int, denom: int = 1) -> TruncatedSeries:
        p, n = self.product, self.n
        if p is None:
            raise CatalogError(f"{self.id} has no product side")
        if "theta_inverse" in p:
            t = p["theta_inverse"]
            m = affine(t["modulus"], n)
            res = []
            for a in _ints(t["args"], n):
                res += [a, m - a]
            return _residue_product(m, res, order)
        if "residues" in p:
            t = p["residues"]
            return _residue_product(affine(t["modulus"], n), _ints(t["parts"], n), order)
        if "factors" in p:
            facs = []
            for f in p["factors"]:
                a = q_mono(affine(f["a"], n), int(f.get("sign", 1)))
                facs.append(ProductFactor(a, q_mono(affine(f["base"], n)), power=int(f.get("power", 1))))
            spec = ProductSpec(tuple(facs))
            return product_series(spec, order * denom, denom)
        raise CatalogError(f"{self.id}: unknown product description {sorted(p)}")

    # -- checks --------------------------------------------------------

    def verify(self, order: int) -> VerifyResult:
        if order <= 0:
            raise CatalogError("order must be positive")
        t0 = time.perf_counter()
        kind = self.sum["kind"]
        detail = ""
        if kind == "bailey":
            pair = {"F1": slater_f1, "F2": slater_f2}[self.sum["pair"]]
            max_n = int(self.sum.get("max_n", 25))
            alpha, beta, a = pair()
            # n <= max_n only needs q-precision past the n = max_n terms' start
            rep = bailey_pair_check(alpha, beta, a, max_n, order * 2)
            ok, first, eff = rep.passed, rep.first_failure, Fraction(rep.order)
            detail = f"n <= {max_n}"
        elif kind == "jtp":
            rep = jtp_check(int(affine(self.sum["k"], self.n)), order)
            ok, first, eff = rep.passed, rep.first_failure, order
        else:
            eff = order
            if kind == "partitions" and order - 1 > MAX_WEIGHT:
                eff = MAX_WEIGHT + 1
                detail = f"capped at weight {MAX_WEIGHT}"
            lhs = self.sum_series(eff)
            rhs = self.product_series(eff, self.grid())
            first = lhs.first_mismatch(rhs)
            ok = first is None
        return VerifyResult(self.id, self.status, ok, eff, first, time.perf_counter() - t0, detail)


def _residue_product(modulus: Fraction, residues, order: int) -> TruncatedSeries:
    if modulus.denominator != 1 or any(r.denominator != 1 for r in residues):
        raise CatalogError("residue products need integer data")
    m = int(modulus)
    # repeated residues (e.g. theta(q^2, q^2, q^3; q^10)) multiply in again
    out = None
    seen: dict[int, int] = {}
    for r in residues:
        seen[int(r)] = seen.get(int(r), 0) + 1
    layers = max(seen.values())
    for layer in range(layers):
        part = [r for r, c in seen.items() if c > layer]
        s = product_from_residues(m, part, order)
        out = s if out is None else out * s
    return out


def chain_sum(k: int, order: int) -> TruncatedSeries:
    """Two-chain form on the 1/4 grid:

    sum q^{n_1^2+..+n_k^2} / ((q)_{n_1-n_2}..(q)_{n_k} (q^{1/2};q)_{n_k})
      + q^{k/4}/(1-q^{1/2}) sum q^{sum n_i^2 + n_i} / (.. (q^{3/2};q)_{n_k})

    written in the variables m_i = n_i - n_{i+1}.
    """
    B = [[2 * min(i, j) + 2 for j in range(k)] for i in range(k)]
    half = Fraction(1, 2)
    den1 = [((1, 1),)] * (k - 1) + [((1, 1), (half, 1))]
    den2 = [((1, 1),)] * (k - 1) + [((1, 1), (3 * half, 1))]
    s1 = MultisumSpec.make(B, None, denoms=den1, name=f"chain{k}a")
    s2 = MultisumSpec.make(B, [j + 1 for j in range(k)], denoms=den2, name=f"chain{k}b")
    a = evaluate(s1, order, denom=4)
    b = evaluate(s2, order, denom=4)
    lead = TruncatedSeries.from_poly(LaurentPoly.const(1) - q_mono(half), order * 4, 4)
    return a + (b * series_invert(lead)).mul_poly(q_mono(Fraction(k, 4)))


# ---------------------------------------------------------------------------
# loading


def _expand(raw: dict, source: str) -> list[IdentityEntry]:
    for key in ("id", "status", "sum"):
        if key not in raw:
            raise CatalogError(f"{source}: entry without {key!r}")
    if raw["status"] not in STATUSES:
        raise CatalogError(f"{source}: {raw['id']} has unknown status {raw['status']!r}")
    if raw["sum"].get("kind") not in SUM_KINDS:
        raise CatalogError(f"{source}: {raw['id']} has unknown sum kind {raw['sum'].get('kind')!r}")
    ns = raw.get("n")
    base = dict(title=raw.get("title", ""), status=raw["status"], note=raw.get("note", ""),
                sum=raw["sum"], product=raw.get("product"), source=source)
    if ns is None:
        return [IdentityEntry(raw["id"], n=None, **base)]
    return [IdentityEntry(f"{raw['id']}-n{n}", n=int(n), **base) for n in ns]


def load_text(text: str, source: str = "<string>") -> list[IdentityEntry]:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise CatalogError(f"{source}: {exc}") from exc
    out = []
    for raw in data.get("identity", []):
        out += _expand(raw, source)
    return out


def load_catalog() -> dict[str, IdentityEntry]:
    """Every bundled entry, keyed by id."""
    out: dict[str, IdentityEntry] = {}
    pkg = resources.files("qfold") / "catalog"
    for f in sorted(pkg.iterdir(), key=lambda p: p.name):
        if not f.name.endswith(".toml"):
            continue
        for e in load_text(f.read_text(encoding="utf-8"), f.name):
            if e.id in out:
                raise CatalogError(f"duplicate id {e.id} in {f.name} and {out[e.id].source}")
            out[e.id] = e
    return out


def verify_entry(args) -> VerifyResult:
    entry, order = args
    try:
        return entry.verify(order)
    except Exception as exc:  # reported, never swallowed silently
        return VerifyResult(entry.id, entry.status, False, order, None, 0.0, f"error: {exc}")
