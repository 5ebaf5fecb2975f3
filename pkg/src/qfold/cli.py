"""Command-line driver.

    qfold verify [ID ...] [--all] [--order N] [--jobs J] [--json]
    qfold fold LABEL [--n N] [--scale C]
    qfold certify [FILE | --builtin NAME] [--at A,B,C,D] [--target EXPR] [--numeric-order N] [--json]
    qfold partitions count SET [--max-weight N] [--x-degree D] [--jobs J]
    qfold partitions witness SET PARTS
    qfold series SYMBOL [--order N] [--x-degree D]

Exit status: 0 when every requested check passes, 1 on a mismatch, 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .catalog import CatalogError, load_catalog, verify_entry
from .certify import (BUILTINS, CertificateSyntaxError, builtin, compare, expand, numeric_check,
                      parse_certificate, parse_combination, parse_document, combination_residual)
from .folding import QuadraticForm, fold_label, format_matrix, rational_inverse
from .partitions import SETS, admits, genfun

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _tuple4(text: str) -> tuple[int, ...]:
    try:
        t = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A,B,C,D, got {text!r}")
    if len(t) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated integers")
    return t


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    catalog = load_catalog()
    if args.all:
        ids = list(catalog)
    elif args.ids:
        ids = args.ids
    else:
        raise UsageError("give identity ids or --all (see `qfold list`)")
    unknown = [i for i in ids if i not in catalog]
    if unknown:
        raise UsageError(f"unknown identity id(s): {', '.join(unknown)}")
    tasks = [(catalog[i], args.order) for i in ids]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(verify_entry, tasks))
    else:
        results = [verify_entry(t) for t in tasks]
    if args.json:
        print(json.dumps([r.as_dict() for r in results], indent=2))
    else:
        for r in results:
            print(r.line() + f"  ({r.wall_time:.2f}s)")
        npass = sum(r.passed for r in results)
        print(f"{npass}/{len(results)} passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_list(args) -> int:
    for e in load_catalog().values():
        print(f"{e.id:28s} {e.status:20s} {e.title}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fold


def _least_scale(inv, start: int) -> int:
    c = start
    while any((e * c).denominator != 1 for row in inv for e in row):
        c += start
    return c


def cmd_fold(args) -> int:
    try:
        f = fold_label(args.label, args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    inv = rational_inverse(f.folded)
    c = args.scale if args.scale else _least_scale(inv, f.k)
    scaled = [[e * c for e in row] for row in inv]
    print(f"{f.parent.label} folded by an automorphism of order {f.k}")
    print(f"orbit representatives (1-based): {[r + 1 for r in f.representatives]}")
    print(f"orbit lengths: {list(f.orbit_lengths)}")
    print(f"twisted bases k/l_j: {[str(b) for b in f.twisted_bases()]}")
    print("A[nu] =")
    print(format_matrix(f.folded))
    print(f"{c}*A[nu]^-1 =")
    print(format_matrix([[str(e) for e in row] for row in scaled]))
    form = QuadraticForm.make(scaled)
    print(f"m^T ({c}A^-1) m / 2 = {form.polynomial_str()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


def _parse_target(text: str):
    try:
        return parse_combination(text)
    except KeyError:
        return expand(parse_certificate(text))


def cmd_certify(args) -> int:
    if args.builtin and args.file:
        raise UsageError("give a file or --builtin, not both")
    target = None
    if args.builtin:
        try:
            cert, target = builtin(args.builtin, args.at)
        except KeyError as exc:
            raise UsageError(exc.args[0])
        source = f"built-in {args.builtin}"
    elif args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}")
        cert, target = parse_document(text)
        source = args.file
    else:
        raise UsageError("give a certificate file or --builtin NAME")
    if args.target:
        target = _parse_target(args.target)
    expanded = expand(cert)
    out = {"source": source, "terms": len(cert.terms), "expanded": str(expanded)}
    ok = True
    if target is not None:
        cmp = compare(expanded, target)
        out["target"] = str(target)
        out["match"] = cmp.equal
        out["match-note"] = cmp.note
        ok = ok and cmp.equal
    if args.numeric_order:
        t0 = time.perf_counter()
        rep = numeric_check(expanded, args.numeric_order, "expansion")
        out["numeric"] = {"order": args.numeric_order, "pass": rep.passed,
                          "first-mismatch": None if rep.first_failure is None else str(rep.first_failure),
                          "wall-time": round(time.perf_counter() - t0, 3)}
        ok = ok and rep.passed
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"certificate: {source} ({out['terms']} terms)")
        print(f"expands to: {out['expanded']}")
        if target is not None:
            print(f"target:     {out['target']}")
            print(f"{'MATCH' if out['match'] else 'NO MATCH'}: {out['match-note']}")
        if "numeric" in out:
            n = out["numeric"]
            status = "PASS" if n["pass"] else f"FAIL at q^{n['first-mismatch']}"
            print(f"numeric check through order {n['order']}: {status}")
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# partitions and series


def cmd_partitions(args) -> int:
    if args.action == "count":
        try:
            g = genfun(args.set, args.max_weight, args.jobs)
        except ValueError as exc:
            raise UsageError(str(exc))
        for w, row in g.items():
            total = sum(row.values())
            if args.x_degree is None:
                print(f"{w} {total}")
            else:
                graded = " ".join(f"x^{k}:{row.get(k, 0)}" for k in range(args.x_degree + 1) if row.get(k))
                print(f"{w} {total} {graded}".rstrip())
        return EXIT_OK
    try:
        parts = [int(p) for p in args.parts.replace(",", "+").split("+") if p.strip()]
        ok, why = admits(parts, args.set)
    except ValueError as exc:
        raise UsageError(str(exc))
    label = "+".join(map(str, parts)) or "(empty)"
    if ok:
        print(f"{label} is in {args.set}")
        return EXIT_OK
    print(f"{label} is not in {args.set}: {why}")
    return EXIT_MISMATCH


def cmd_series(args) -> int:
    try:
        comb = parse_combination(args.symbol)
    except (KeyError, CertificateSyntaxError) as exc:
        raise UsageError(str(exc))
    s = combination_residual(comb, args.order)
    if args.x_degree is not None:
        s = s.truncate(xmax=args.x_degree)
    print(s.report())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfold", description="Exact checks of q-series identities from twisted foldings.")
    p.add_argument("--version", action="version", version=f"qfold {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check catalog identities to a truncation order")
    v.add_argument("ids", nargs="*", help="identity ids (see `qfold list`)")
    v.add_argument("--all", action="store_true", help="every catalog entry")
    v.add_argument("--order", type=_positive, default=100, help="compare coefficients of q^e for e < ORDER")
    v.add_argument("--jobs", type=_positive, default=1)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    ls = sub.add_parser("list", help="list catalog ids")
    ls.set_defaults(func=cmd_list)

    f = sub.add_parser("fold", help="print a folded Cartan matrix and its scaled inverse")
    f.add_argument("label", help="A2n^2, A2n-1^2, Dn^2, D4^3 or E6^2; n may be given as A2n^2(3)")
    f.add_argument("--n", type=_positive)
    f.add_argument("--scale", type=_positive, help="multiple of the inverse (default: least integral multiple of k)")
    f.set_defaults(func=cmd_fold)

    c = sub.add_parser("certify", help="expand a relation certificate")
    c.add_argument("file", nargs="?")
    c.add_argument("--builtin", metavar="NAME", help=f"one of {', '.join(BUILTINS)}")
    c.add_argument("--at", type=_tuple4, default=(0, 0, 0, 0), help="base tuple for built-ins")
    c.add_argument("--target", help="S/R combination or relation expression to compare with")
    c.add_argument("--numeric-order", type=_positive, help="also check the expansion vanishes to this order")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_certify)

    pt = sub.add_parser("partitions", help="enumerate partition sets")
    psub = pt.add_subparsers(dest="action", required=True)
    pc = psub.add_parser("count", help="counts by weight (and length with --x-degree)")
    pc.add_argument("set", choices=SETS)
    pc.add_argument("--max-weight", type=int, default=40)
    pc.add_argument("--x-degree", type=int, help="also show counts by number of parts up to this")
    pc.add_argument("--jobs", type=_positive, default=1)
    pw = psub.add_parser("witness", help="membership test with the violated condition")
    pw.add_argument("set", choices=SETS)
    pw.add_argument("parts", help="parts joined by '+', e.g. 7+4+4")
    pt.set_defaults(func=cmd_partitions)

    s = sub.add_parser("series", help="expand S/R symbols, e.g. 'S(0,0,0,0)'")
    s.add_argument("symbol")
    s.add_argument("--order", type=_positive, default=20)
    s.add_argument("--x-degree", type=int)
    s.set_defaults(func=cmd_series)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qfold: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificateSyntaxError, CatalogError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"qfold: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
