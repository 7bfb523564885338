"""Command line entry point: ``lexrouter gen|standardize|solve|bench|oracle``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .driver import METHODS, solve
from .instance_io import (GeneratorConfig, SchemaError, generate_random, load_instance,
                          make_category_instance, save_instance, standardize)
from .model import ModelError, validate_schedule
from .oracle import BudgetExceeded, brute_force_lex_optimum
from .report import (format_gap_table, gap_report, report_csv, report_json, run_bench,
                     solution_document)

log = logging.getLogger("lexrouter")

EXIT_OK, EXIT_FAIL = 0, 2


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def cmd_gen(args) -> int:
    if args.category:
        inst = make_category_instance(args.category, args.seed)
    else:
        cfg = {}
        if args.config:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        cfg["seed"] = args.seed
        inst = generate_random(GeneratorConfig.from_dict(cfg))
    save_instance(inst, args.out)
    return EXIT_OK


def cmd_standardize(args) -> int:
    inst = load_instance(args.inp)
    out = standardize(inst, args.vehicles, ratio=args.ratio, seed=args.seed)
    save_instance(out, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.inp)
    sol, stats = solve(inst, args.method, time_limit=args.time_limit, eta=args.eta,
                       relaxation=args.relax == "on", seed=args.seed,
                       initial_pool=args.initial_pool)
    bad = validate_schedule(sol, inst)
    if bad:
        log.error("solver returned an invalid schedule: %s", bad)
        return EXIT_FAIL
    doc = solution_document(sol, inst, args.method, stats.to_dict(args.timings))
    _write(_dump(doc), args.out)
    if sol.status in ("infeasible", "error"):
        return EXIT_FAIL
    return EXIT_OK


def cmd_bench(args) -> int:
    files = sorted(Path(args.dir).glob("*.json"))
    if not files:
        log.error("no instance files in %s", args.dir)
        return EXIT_FAIL
    instances = [load_instance(f) for f in files]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    records = run_bench(instances, methods, time_limit=args.time_limit, eta=args.eta)
    if args.report.endswith(".csv"):
        text = report_csv(records)
    else:
        text = report_json(records, args.timings)
    Path(args.report).write_text(text, encoding="utf-8")
    print(format_gap_table(gap_report(records)))
    return EXIT_OK if all(r.ok for r in records) else EXIT_FAIL


def cmd_oracle(args) -> int:
    inst = load_instance(args.inp)
    sol = brute_force_lex_optimum(inst)
    _write(_dump(solution_document(sol, inst, "oracle", {})), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lexrouter", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--config", help="generator config JSON")
    g.add_argument("--category", choices=["XS", "S", "M", "L"],
                   help="generate and standardise to a size category")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("standardize", help="reduce to a vehicle count at a fixed ratio")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--vehicles", type=int, required=True)
    s.add_argument("--ratio", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_standardize)

    v = sub.add_parser("solve", help="solve one instance")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--method", choices=METHODS, default="cg-w")
    v.add_argument("--time-limit", type=float, default=300.0)
    v.add_argument("--eta", type=int, default=20)
    v.add_argument("--relax", choices=["on", "off"], default="on")
    v.add_argument("--initial-pool", choices=["singletons", "empty"], default="singletons")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--timings", action="store_true", help="include wall times")
    v.add_argument("--out")
    v.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run methods over a directory of instances")
    b.add_argument("--dir", required=True)
    b.add_argument("--methods", default=",".join(METHODS))
    b.add_argument("--time-limit", type=float, default=300.0)
    b.add_argument("--eta", type=int, default=20)
    b.add_argument("--timings", action="store_true")
    b.add_argument("--report", required=True, help="report file, .json or .csv")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="brute-force optimum of a tiny instance")
    o.add_argument("--in", dest="inp", required=True)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SchemaError, ModelError, json.JSONDecodeError, OSError, ValueError,
            BudgetExceeded) as exc:
        print(f"lexrouter: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
