"""Command-line front end.

Subcommands: trial, sweep, thresholds, selfcheck, count.
Exit codes: 0 ok, 1 usage error, 2 runtime failure, 3 selfcheck failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .engine import derive_seed, run_trial
from .errors import InvalidParameterError
from .graphs import load_graph_json
from .patterns import load_pattern_json
from .harness import (SweepConfig, pattern_for_family, parse_t_grid, run_selfcheck,
                      run_sweep, threshold_table, wilson_interval, write_threshold_csv)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="budgetrgp",
                     description="Budget-constrained random graph process toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trial = sub.add_parser("trial", help="run one (or --reps) seeded trials")
    p_trial.add_argument("--n", type=int, required=True)
    p_trial.add_argument("--t", type=int, required=True)
    p_trial.add_argument("--b", type=int, required=True)
    p_trial.add_argument("--family", required=True,
                         help="target, e.g. wheel:4, clique:5, k1t:path2, cycle:5, custom:f.json")
    p_trial.add_argument("--strategy", default="auto",
                         help="strategy spec or 'auto' (default)")
    p_trial.add_argument("--seed", type=int, default=0)
    p_trial.add_argument("--reps", type=int, default=1)
    p_trial.add_argument("--run-to-end", action="store_true",
                         help="do not stop at first containment")

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep over a (t, b) grid")
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--family", required=True)
    p_sweep.add_argument("--strategy", default="auto")
    p_sweep.add_argument("--t-grid", required=True,
                         help="e.g. '5000,20000' or 'n^1.8' or 'logn:1.5:1.9:5'")
    p_sweep.add_argument("--b-grid", required=True,
                         help="e.g. '4,16,64' or 'thr*0.25,thr*1,thr*4'")
    p_sweep.add_argument("--reps", type=int, default=100)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", required=True, help="trial rows CSV path")

    p_thr = sub.add_parser("thresholds", help="emit lower/upper budget envelopes as CSV")
    p_thr.add_argument("--family", required=True)
    p_thr.add_argument("--n", type=int, required=True)
    p_thr.add_argument("--t-grid", required=True)
    p_thr.add_argument("--out", required=True)

    p_check = sub.add_parser("selfcheck", help="run the oracle suites")
    p_check.add_argument("--quick", action="store_true", help="reduced sizes")

    p_count = sub.add_parser("count", help="copy-count a stored graph against a pattern")
    p_count.add_argument("--graph", required=True, help="graph JSON path")
    p_count.add_argument("--pattern", required=True,
                         help="family string or JSON path (custom:f.json)")
    return parser


def cmd_trial(args) -> int:
    target = pattern_for_family(args.family)
    strategy = args.strategy
    if strategy == "auto":
        from .strategies import default_strategy_for_family
        strategy = default_strategy_for_family(args.family)
    if args.reps == 1:
        res = run_trial(args.n, args.t, args.b, strategy, target, args.seed,
                        run_to_end=args.run_to_end)
        print(json.dumps({
            "n": res.n, "t": res.t, "b": res.b, "family": args.family,
            "strategy": strategy, "seed": res.seed, "success": res.success,
            "hit_step": res.hit_step, "budget_used": res.budget_used,
            "steps_used": res.steps_used, "degraded": res.degraded,
            "flags": list(res.flags), "runtime_ms": round(res.runtime_ms, 3),
        }))
        return 0
    wins = 0
    budgets = 0
    for rep in range(args.reps):
        seed = derive_seed(args.seed, args.t, args.b, rep)
        res = run_trial(args.n, args.t, args.b, strategy, target, seed,
                        run_to_end=args.run_to_end)
        wins += res.success
        budgets += res.budget_used
    lo, hi = wilson_interval(wins, args.reps)
    print(json.dumps({
        "n": args.n, "t": args.t, "b": args.b, "family": args.family,
        "strategy": strategy, "reps": args.reps, "successes": wins,
        "success_rate": wins / args.reps, "wilson95": [lo, hi],
        "mean_budget_used": budgets / args.reps,
    }))
    return 0


def cmd_sweep(args) -> int:
    config = SweepConfig(n=args.n, family=args.family, strategy=args.strategy,
                         t_grid=parse_t_grid(args.t_grid, args.n),
                         b_grid_spec=args.b_grid, reps=args.reps,
                         master_seed=args.seed, jobs=args.jobs, out=args.out)
    rows, summary = run_sweep(config)
    print(f"# {len(rows)} trials -> {args.out}")
    print("t,b,trials,successes,rate,wilson_lo,wilson_hi")
    for point in summary:
        print(f"{point['t']},{point['b']},{point['trials']},{point['successes']},"
              f"{point['rate']:.4f},{point['wilson_lo']:.4f},{point['wilson_hi']:.4f}")
    return 0


def cmd_thresholds(args) -> int:
    rows = threshold_table(args.family, args.n, parse_t_grid(args.t_grid, args.n))
    write_threshold_csv(args.out, rows)
    print(f"# {len(rows)} rows -> {args.out}")
    return 0


def cmd_selfcheck(args) -> int:
    results = run_selfcheck(quick=args.quick)
    failed = False
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"[{mark}] {res.name}: {res.detail}")
        failed |= not res.passed
    return 3 if failed else 0


def cmd_count(args) -> int:
    host = load_graph_json(args.graph)
    if args.pattern.startswith("custom:") or args.pattern.endswith(".json"):
        path = args.pattern.split(":", 1)[1] if ":" in args.pattern else args.pattern
        pattern = load_pattern_json(path)
    else:
        pattern = pattern_for_family(args.pattern)
    from .patterns import count_labelled
    labelled = count_labelled(host, pattern)
    print(json.dumps({
        "host_vertices": host.n, "host_edges": host.edge_count,
        "pattern": pattern.family_tag, "aut": pattern.aut,
        "labelled": labelled, "unlabelled": labelled // pattern.aut,
        "contains": labelled > 0,
    }))
    return 0


_COMMANDS = {
    "trial": cmd_trial,
    "sweep": cmd_sweep,
    "thresholds": cmd_thresholds,
    "selfcheck": cmd_selfcheck,
    "count": cmd_count,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidParameterError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"budgetrgp: error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, InvalidParameterError) else 2
    except Exception as exc:  # runtime failure
        print(f"budgetrgp: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
