"""Command line: ``qcp solve``, ``qcp model`` and ``qcp bench``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ProblemError, dump_problem, parse_problem
from .engine import (
    SolveConfig,
    emit_report,
    minimize,
    parse_mode,
    parse_search,
    solve,
    tour_cost,
)
from .models import MODELS, build_model, random_costs
from .qsim import CostModel


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("classical", "qsim"), default="classical")
    p.add_argument("--mode", default="exact", help="exact | bounded:<k> | heuristic")
    p.add_argument("--search", default="dfs", help="dfs | qwalk | chunky:<chi> | depth:<L*>")
    p.add_argument("--alpha", choices=("L", "resistance"), default="L")
    p.add_argument("--fail-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", choices=("json", "csv"), default="json")
    p.add_argument("--limit-nodes", type=int, default=None)
    p.add_argument("--strategy", choices=("assign", "twoway", "split"), default="assign")


def config_from_args(args) -> SolveConfig:
    mode, k = parse_mode(args.mode)
    if args.seed < 0 or args.seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return SolveConfig(
        backend=args.backend, mode=mode, max_quantum_calls=k,
        alpha=args.alpha, strategy=args.strategy,
        cost=CostModel(fail_prob=args.fail_prob, seed=args.seed),
        limit_nodes=args.limit_nodes, **parse_search(args.search),
    )


def _run(doc: dict, text: str, config: SolveConfig):
    csp = parse_problem(text)
    objective = doc.get("objective")
    if objective:
        if objective.get("kind") != "tour":
            raise ProblemError(f"unknown objective {objective.get('kind')!r}")
        costs = objective["costs"]
        return minimize(csp, lambda a: tour_cost(costs, a), config)
    return solve(csp, config)


def cmd_solve(args) -> int:
    text = Path(args.problem).read_text() if args.problem != "-" else sys.stdin.read()
    report = _run(json.loads(text), text, config_from_args(args))
    print(emit_report(report, args.report, instance=args.problem), end="" if args.report == "csv" else "\n")
    return 0 if report.status != "unknown" else 2


def cmd_model(args) -> int:
    params = json.loads(args.params) if args.params else {}
    if args.name == "tsp" and "costs" not in params:
        params["costs"] = random_costs(int(params.get("n", 4)), int(params.get("seed", 0)))
    csp = build_model(args.name, params)
    doc = json.loads(dump_problem(csp))
    if args.name == "tsp":
        doc["objective"] = {"kind": "tour", "costs": params["costs"]}
    text = json.dumps(doc, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


BENCH_SUITE = {
    "sudoku-paper": ("sudoku", {}),
    "roundrobin-4": ("roundrobin", {"n": 4}),
    "roundrobin-6": ("roundrobin", {"n": 6}),
    "tsp-5": ("tsp", {"n": 5, "seed": 1}),
}


def cmd_bench(args) -> int:
    config = config_from_args(args)
    rows = []
    if args.problems:
        items = [(p, Path(p).read_text()) for p in args.problems]
    else:
        items = []
        for label, (name, params) in BENCH_SUITE.items():
            if name == "tsp":
                params = dict(params, costs=random_costs(params["n"], params["seed"]))
            doc = json.loads(dump_problem(build_model(name, params)))
            if name == "tsp":
                doc["objective"] = {"kind": "tour", "costs": params["costs"]}
            items.append((label, json.dumps(doc)))
    for k, (label, text) in enumerate(items):
        report = _run(json.loads(text), text, config)
        if args.report == "csv":
            rows.append(emit_report(report, "csv", instance=label, header=k == 0))
        else:
            rows.append(json.dumps(dict(report.to_dict(), instance=label), sort_keys=True) + "\n")
    print("".join(rows), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a JSON problem file")
    p.add_argument("problem", help="problem file, or - for stdin")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("model", help="emit a model as a JSON problem file")
    p.add_argument("name", choices=MODELS)
    p.add_argument("--params", help="JSON object of model parameters")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("bench", help="solve a suite and emit one report row per instance")
    p.add_argument("problems", nargs="*", help="problem files (default: built-in suite)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, ValueError, KeyError, OSError) as exc:
        print(f"qcp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
