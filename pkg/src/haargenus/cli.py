"""Command-line surface: Weingarten tables, expansions, moment and cumulant
evaluation, and verification suites, all with canonical JSON output.

Exit codes: 0 ok, 2 validation error, 3 cap exceeded, 4 pole, 5 verification
failure.  Reports are emitted with sorted keys and stable float formatting so
identical configurations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import CapExceededError, PoleError, ValidationError, VerificationFailure
from .expansion import (TraceExpression, asymptotic_moment, evaluate_moment,
                        expand_moment, trace_cumulant)
from .matrixlab import DenseMatrix, RNG_NAME
from .ratpoly import format_polyfrac
from .setpart import YoungDiagram
from .verify import mc_suite, noncross_suite, oracle_suite
from .weingarten import TableSet, WG_CAP, weingarten_table, write_golden

_FLOAT_FORMAT = ".17g"


def _canonical(obj):
    if isinstance(obj, float):
        return float(format(obj, _FLOAT_FORMAT))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


def emit(report: dict, out: str | None) -> None:
    text = json.dumps(_canonical(report), sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metadata(args) -> dict:
    # the worker count is an execution detail and must not change the report
    meta = {"version": __version__, "command": args.command, "generator": RNG_NAME}
    for key in ("seed", "samples", "N", "cap", "cap_terms", "mode"):
        if hasattr(args, key) and getattr(args, key) is not None:
            meta[key] = getattr(args, key)
    return meta


def _load_matrices(data: dict, extra_path: str | None) -> dict[int, DenseMatrix]:
    matrices = {int(k): DenseMatrix.from_json(v)
                for k, v in data.get("matrices", {}).items()}
    if extra_path:
        with open(extra_path) as fh:
            extra = json.load(fh)
        extra = extra.get("matrices", extra)
        matrices.update({int(k): DenseMatrix.from_json(v) for k, v in extra.items()})
    return matrices


def _load_expression(path: str, matrices_path: str | None = None):
    with open(path) as fh:
        data = json.load(fh)
    return TraceExpression.from_json(data), _load_matrices(data, matrices_path)


def _load_expressions(path: str, matrices_path: str | None = None):
    with open(path) as fh:
        data = json.load(fh)
    exprs = [TraceExpression.from_json(e) for e in data["exprs"]]
    return exprs, _load_matrices(data, matrices_path)


def cmd_wg(args) -> int:
    table = weingarten_table(args.n, cap=args.cap)
    if args.golden_out:
        path = write_golden(args.n, args.golden_out, cap=args.cap)
        emit({"meta": _metadata(args), "written": path}, args.out)
        return 0
    if args.lam:
        lam = YoungDiagram([int(x) for x in args.lam.split(",")])
        entry = {"lambda": list(lam.rows),
                 "Wg": format_polyfrac(table.wg_unnormalized(lam)),
                 "wg": format_polyfrac(table.wg(lam))}
        if args.eval is not None:
            entry["Wg_at_N"] = table.wg_unnormalized(lam).eval_at(args.eval)
            entry["wg_at_N"] = table.wg(lam).eval_at(args.eval)
        emit({"meta": _metadata(args), "n": args.n, "entry": entry}, args.out)
        return 0
    entries = {}
    for lam in sorted(table.entries, key=lambda d: d.rows, reverse=True):
        key = ",".join(map(str, lam.rows))
        entries[key] = {"Wg": format_polyfrac(table.wg_unnormalized(lam)),
                        "wg": format_polyfrac(table.wg(lam))}
        if args.eval is not None:
            entries[key]["Wg_at_N"] = table.wg_unnormalized(lam).eval_at(args.eval)
            entries[key]["wg_at_N"] = table.wg(lam).eval_at(args.eval)
    emit({"meta": _metadata(args), "n": args.n, "entries": entries}, args.out)
    return 0


def cmd_expand(args) -> int:
    expr, _ = _load_expression(args.expr, args.matrices)
    tables = TableSet(cap=args.cap)
    terms = []
    for t in expand_moment(expr, tables=tables, term_cap=args.cap_terms):
        terms.append({"chi": t.chi, "exponent": t.exponent,
                      "wg": format_polyfrac(t.wg_factor),
                      "lambdas": [list(l.rows) for l in t.lambdas],
                      "vertex": [list(c) for c in t.vertex_labels]})
    emit({"meta": _metadata(args), "expr": expr.to_json(), "term_count": len(terms),
          "terms": terms}, args.out)
    return 0


def cmd_moment(args) -> int:
    expr, matrices = _load_expression(args.expr, args.matrices)
    tables = TableSet(cap=args.cap)
    if args.asymptotic:
        limit = asymptotic_moment(expr, tables=tables, term_cap=args.cap_terms)
        report = {"meta": _metadata(args), "asymptotic": limit.to_json()}
        if matrices and args.N:
            report["evaluated"] = limit.evaluate(matrices, args.N, mode=args.mode)
        emit(report, args.out)
        return 0
    if args.N is None:
        raise ValidationError("--N is required unless --asymptotic is given")
    result = evaluate_moment(expr, matrices, args.N, mode=args.mode, tables=tables,
                             term_cap=args.cap_terms)
    emit({"meta": _metadata(args), "value": result.value,
          "term_count": result.term_count}, args.out)
    return 0


def cmd_cumulant(args) -> int:
    exprs, matrices = _load_expressions(args.exprs, args.matrices)
    tables = TableSet(cap=args.cap)
    value = trace_cumulant(exprs, matrices=matrices, n=args.N, mode=args.mode,
                           tables=tables, term_cap=args.cap_terms)
    emit({"meta": _metadata(args), "order": len(exprs), "value": value}, args.out)
    return 0


def cmd_verify(args) -> int:
    if args.suite == "noncross":
        report = noncross_suite(fast=not args.full)
        failed = bool(report["counterexamples"])
    elif args.suite == "oracle":
        report = oracle_suite(seed=args.seed, count=args.count)
        failed = bool(report["discrepancies"])
    elif args.suite == "mc":
        if not args.expr or args.N is None:
            raise ValidationError("mc suite needs --expr and --N")
        expr, matrices = _load_expression(args.expr, args.matrices)
        report = mc_suite(expr, matrices, args.N, args.samples, args.seed,
                          workers=args.workers)
        failed = abs(report["z_score"]) > 5.0
    else:
        raise ValidationError(f"unknown suite {args.suite!r}")
    report = {"meta": _metadata(args), **report}
    emit(report, args.out)
    if failed:
        raise VerificationFailure(f"suite {args.suite} reported failures")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haargenus",
        description="Exact and Monte Carlo moments of traces of Haar orthogonal matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON report to this path")
        p.add_argument("--matrices", help="JSON file of matrices overriding the expression file")
        p.add_argument("--cap", type=int, default=WG_CAP, help="Weingarten size cap")
        p.add_argument("--cap-terms", dest="cap_terms", type=int, default=500_000)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("wg", help="print Weingarten table entries")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", help="diagram rows, e.g. 3,1")
    p.add_argument("--eval", type=int, help="also evaluate at this N")
    p.add_argument("--golden-out", dest="golden_out", help="write the golden table file")
    common(p)
    p.set_defaults(func=cmd_wg)

    p = sub.add_parser("expand", help="list the gluing terms of an expression")
    p.add_argument("--expr", required=True)
    common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("moment", help="evaluate an expected product of traces")
    p.add_argument("--expr", required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--asymptotic", action="store_true")
    common(p)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("cumulant", help="joint cumulant of unnormalized traces")
    p.add_argument("--exprs", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    common(p)
    p.set_defaults(func=cmd_cumulant)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=("noncross", "oracle", "mc"))
    p.add_argument("--expr")
    p.add_argument("--N", type=int)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=60)
    p.add_argument("--full", action="store_true", help="full acceptance ranges")
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return exc.exit_code
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return exc.exit_code
    except PoleError as exc:
        print(f"pole: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
