"""``mahler-lab`` command line.

Every measuring subcommand prints JSON records ``{poly, value, method,
params, error_estimate}`` (or CSV with ``--csv``).  Library errors print a
one-line message on stderr and exit with status 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import areal as ar
from . import classical as cl
from . import operators as op
from .errors import MahlerLabError
from .polynomials import IntPolynomial
from .search import lehmer_search
from .suite import CLAIM_IDS, SuiteConfig, emit_report, exit_code, resolve_seed, run_suite
from .textformat import format_polynomial, matrix_from_json, parse_polynomial, vector_from_json

ERROR_EXIT = 3
RECORD_FIELDS = ["poly", "value", "method", "params", "error_estimate"]


def _record(poly_text, res: cl.MeasureResult) -> dict:
    return {"poly": poly_text, **res.to_dict()}


def _print_records(records, as_csv: bool, fields=RECORD_FIELDS):
    if as_csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow(
                [json.dumps(rec[f], sort_keys=True) if isinstance(rec[f], (dict, list)) else rec[f] for f in fields]
            )
        sys.stdout.write(buf.getvalue())
    else:
        out = records[0] if len(records) == 1 else records
        sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_mahler(args):
    p = parse_polynomial(args.poly)
    text = format_polynomial(p)
    methods = ["roots", "integral"] if args.method == "both" else [args.method]
    records = []
    for m in methods:
        res = cl.mahler_roots(p) if m == "roots" else cl.mahler_integral(p, args.nodes)
        records.append(_record(text, res))
    _print_records(records, args.csv)
    return 0


def cmd_pierce(args):
    p = parse_polynomial(args.poly)
    if not isinstance(p, IntPolynomial):
        raise MahlerLabError("pierce needs integer coefficients")
    seq = cl.pierce(p, args.n)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "delta", "ratio"])
        for n, v in enumerate(seq.values, start=1):
            ratio = seq.ratios[n - 2] if n >= 2 else None
            writer.writerow([n, v, "" if ratio is None else ratio])
        sys.stdout.write(buf.getvalue())
    else:
        # exact integers are written as decimal strings so no JSON reader rounds them
        out = {
            "poly": format_polynomial(p),
            "values": [str(v) for v in seq.values],
            "ratios": list(seq.ratios),
        }
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def cmd_search(args):
    report = lehmer_search(args.deg, args.height, args.threshold, jobs=args.jobs)
    if args.csv:
        records = [
            _record(format_polynomial(p), m) for p, m in report.candidates
        ]
        _print_records(records, True)
    else:
        d = report.to_dict()
        d["candidates"] = [_record(format_polynomial(p), m) for p, m in report.candidates]
        sys.stdout.write(json.dumps(d, sort_keys=True, indent=2) + "\n")
    return 0


def _shift_operator(rule: str, dim: int) -> op.FiniteOperator:
    if rule.startswith("file:"):
        data = _read_json(rule[5:])
        if isinstance(data, dict):
            data = data.get("weights", data)
        weights = vector_from_json(data)
        spec = op.WeightedShiftSpec("explicit", dim, explicit=tuple(weights.tolist()))
    else:
        spec = op.WeightedShiftSpec.parse(rule, dim)
    return spec.materialize()


def _start_vector(text: str, dim: int) -> op.VectorH:
    if text.startswith("unit:"):
        return op.VectorH.unit(dim, int(text[5:]))
    if text.startswith("file:"):
        return op.VectorH(vector_from_json(_read_json(text[5:])))
    raise MahlerLabError(f"--e must be unit:<k> or file:<path>, got {text!r}")


def cmd_opmahler(args):
    p = parse_polynomial(args.poly)
    if args.matrix:
        T = op.FiniteOperator(matrix_from_json(_read_json(args.matrix)))
    elif args.shift:
        if args.dim is None:
            raise MahlerLabError("--shift needs --dim")
        T = _shift_operator(args.shift, args.dim)
    else:
        raise MahlerLabError("give --shift or --matrix")
    K = args.K if args.K is not None else min(T.dim, 256)
    if args.sup:
        res = op.op_mahler_sup(T, p, restarts=args.restarts, K=K, seed=args.seed)
    else:
        res = op.op_mahler_on_vector(T, _start_vector(args.e, T.dim), p, K)
    _print_records([_record(format_polynomial(p), res)], args.csv)
    return 0


def cmd_areal(args):
    p = parse_polynomial(args.poly)
    if args.rho:
        with open(args.rho, encoding="utf-8") as fh:
            weight = ar.RadialWeight.from_json(fh.read())
        res = ar.weighted_areal(p, weight)
    elif args.method == "closed":
        res = ar.areal_mahler_closed(p)
    else:
        res = ar.areal_mahler_quadrature(p)
    _print_records([_record(format_polynomial(p), res)], args.csv)
    return 0


def cmd_chain(args):
    p = parse_polynomial(args.poly)
    rep = ar.chain_check(p, args.dim, args.K, args.tol)
    if args.csv:
        fields = ["poly", "areal", "bergman_op", "classical", "chain_ok", "slack_low", "slack_high"]
        rec = {
            "poly": format_polynomial(p),
            "areal": rep.areal.value,
            "bergman_op": rep.bergman_op.value,
            "classical": rep.classical.value,
            "chain_ok": rep.chain_ok,
            "slack_low": rep.slack[0],
            "slack_high": rep.slack[1],
        }
        _print_records([rec], True, fields)
    else:
        sys.stdout.write(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n")
    return 0 if rep.chain_ok else 1


def cmd_limit(args):
    rows = ar.lehmer_limit_table(args.n_from, args.n_to, args.dim, args.K)
    records = [
        {"n": r.n, "bergman": r.bergman, "areal": r.areal, "bergman_error": r.bergman_error} for r in rows
    ]
    fields = ["n", "bergman", "areal", "bergman_error"]
    if args.csv:
        _print_records(records, True, fields)
    else:
        sys.stdout.write(json.dumps(records, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_verify(args):
    overrides = {"seed": resolve_seed(args.seed)}
    if args.suite:
        overrides["suites"] = args.suite
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    fmt = None
    if args.out:
        fmt = "csv" if args.out.lower().endswith(".csv") else "json"
        overrides["output"] = args.out
        overrides["format"] = fmt
    if args.timing:
        overrides["timing"] = True
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        if args.seed is None:
            # a seed inside the config file wins over the environment fallback
            cfg_seed = json.loads(text).get("seed") if text.strip() else None
            if cfg_seed is not None:
                overrides["seed"] = cfg_seed
        config = SuiteConfig.from_json(text, **overrides)
    else:
        config = SuiteConfig(**overrides)
    results = run_suite(config)
    emit_report(results, config.format, config.output)
    return exit_code(results)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mahler-lab", description="Classical, areal and operator Mahler measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mahler", help="classical Mahler measure")
    p.add_argument("poly")
    p.add_argument("--method", choices=["roots", "integral", "both"], default="roots")
    p.add_argument("--nodes", type=int, default=2**20)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("pierce", help="exact Pierce sequence of a monic integer polynomial")
    p.add_argument("poly")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_pierce)

    p = sub.add_parser("search", help="small Mahler measures in a box of monic integer polynomials")
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1.3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("opmahler", help="operator Mahler measure on a vector, or its supremum")
    p.add_argument("--shift", help="hardy | bergman | const:c | file:<weights.json>")
    p.add_argument("--matrix", help="JSON matrix of [re, im] pairs, row-major")
    p.add_argument("--dim", type=int)
    p.add_argument("--e", default="unit:1", help="unit:<k> (1-based) or file:<vec.json>")
    p.add_argument("--poly", required=True)
    p.add_argument("--K", type=int)
    p.add_argument("--sup", action="store_true")
    p.add_argument("--restarts", type=int, default=op.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_opmahler)

    p = sub.add_parser("areal", help="areal Mahler measure")
    p.add_argument("poly")
    p.add_argument("--method", choices=["closed", "quad"], default="closed")
    p.add_argument("--rho", help='JSON {"r": [...], "rho": [...]} radial weight')
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_areal)

    p = sub.add_parser("chain", help="areal <= Bergman-shift <= classical measure")
    p.add_argument("poly")
    p.add_argument("--dim", type=int)
    p.add_argument("--K", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("limit", help="Bergman-shift and areal measures of z^n + z + 1")
    p.add_argument("--from", dest="n_from", type=int, default=3)
    p.add_argument("--to", dest="n_to", type=int, default=200)
    p.add_argument("--dim", type=int, default=1024)
    p.add_argument("--K", type=int, default=480)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("verify", help="run the claim verification suites")
    p.add_argument("--config")
    p.add_argument("--suite", nargs="+", choices=CLAIM_IDS, metavar="ID")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="record per-claim runtime (reports stop being byte-stable)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MahlerLabError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
