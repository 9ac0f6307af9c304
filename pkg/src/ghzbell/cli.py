"""Command line interface for the toolkit.

Subcommands:
    bound      -- classical maximum, analytic bound, tensor identities, argmax
    thresholds -- per-N critical visibility/efficiency table (json/csv/human)
    simulate   -- one Monte Carlo experiment, summary with config echo
    sweep      -- experiments across a visibility grid
    verify     -- self-check suite; nonzero exit when any check fails

JSON is the default format; the human format is rendered from the same data
structure, never computed separately. Exit codes: 0 success, 1 failed check,
2 usage error. The environment variable GHZBELL_SEED overrides the default
seed (0) when --seed is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checks import run_checks
from .experiment import (
    ExperimentConfig,
    ROUND_ROBIN,
    SETTING_POLICIES,
    run_experiment,
    visibility_sweep,
)
from .lhv import (
    bound_attaining_strategy,
    lhv_bound,
    max_score_brute,
    max_score_factorized,
    violation_factor,
)
from .quantum import entry_sum_closed_form
from .thresholds import percent_string, render_table_csv, threshold_table

SEED_ENV_VAR = "GHZBELL_SEED"


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(data) -> None:
    _emit(json.dumps(data, indent=2))


def _default_seed(parser: argparse.ArgumentParser) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        parser.error(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzbell",
        description=(
            "Three-setting Bell test for N-party GHZ correlations: classical "
            "bounds, critical visibility and detection efficiency, Monte Carlo "
            "experiments."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="classical maximum and the analytic bound")
    p_bound.add_argument("--n", type=int, required=True, help="number of parties (>= 2)")
    p_bound.add_argument(
        "--method",
        choices=("brute", "factorized", "both"),
        default="both",
        help="exhaustive search (N <= 8), phase-class dynamic program, or both",
    )
    p_bound.add_argument("--format", choices=("json", "human"), default="json")

    p_thresh = sub.add_parser("thresholds", help="critical visibility/efficiency table")
    p_thresh.add_argument("--n-max", type=int, required=True, help="largest N (>= 2)")
    p_thresh.add_argument("--format", choices=("json", "csv", "human"), default="json")

    p_sim = sub.add_parser("simulate", help="run one Monte Carlo experiment")
    p_sim.add_argument("--n", type=int, required=True, help="number of parties (>= 2)")
    p_sim.add_argument("--v", type=float, required=True, help="visibility in [0, 1]")
    p_sim.add_argument("--eta", type=float, required=True, help="detection efficiency in [0, 1]")
    p_sim.add_argument("--trials", type=int, required=True, help="number of trials")
    p_sim.add_argument("--seed", type=int, default=None, help="64-bit seed (default 0)")
    p_sim.add_argument("--policy", choices=SETTING_POLICIES, default=ROUND_ROBIN)
    p_sim.add_argument("--workers", type=int, default=1, help="worker threads (no effect on output)")
    p_sim.add_argument("--format", choices=("json", "human"), default="json")

    p_sweep = sub.add_parser("sweep", help="experiments across a visibility grid")
    p_sweep.add_argument("--n", type=int, required=True, help="number of parties (>= 2)")
    p_sweep.add_argument("--eta", type=float, required=True, help="detection efficiency in [0, 1]")
    p_sweep.add_argument(
        "--v-grid", type=str, required=True, help="comma-separated visibilities, e.g. 0.4,0.5,0.6"
    )
    p_sweep.add_argument("--trials-per-point", type=int, required=True)
    p_sweep.add_argument("--seed", type=int, default=None, help="64-bit seed (default 0)")
    p_sweep.add_argument("--policy", choices=SETTING_POLICIES, default=ROUND_ROBIN)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--format", choices=("json", "csv", "human"), default="json")

    p_verify = sub.add_parser("verify", help="run the self-check suite")
    p_verify.add_argument(
        "--n-max", type=int, default=6, help="cap for exhaustive-search checks (2..8)"
    )
    p_verify.add_argument("--format", choices=("human", "json"), default="human")
    p_verify.add_argument(
        "--inject-fault",
        action="store_true",
        help="force the first check to fail (tests the failure path)",
    )
    return parser


def _cmd_bound(args, parser) -> int:
    if args.n < 2:
        parser.error(f"--n must be at least 2, got {args.n}")
    if args.method in ("brute", "both") and args.n > 8:
        parser.error(f"--method {args.method} needs --n <= 8 (exhaustive search), got {args.n}")
    try:
        data = {
            "n": args.n,
            "method": args.method,
            "bound": lhv_bound(args.n),
            "norm_sq": 3.0 ** args.n / 2.0,
            "q_entry_sum": entry_sum_closed_form(args.n),
            "violation_factor": violation_factor(args.n),
        }
    except OverflowError:
        parser.error(f"--n {args.n} overflows double precision")
    if args.method in ("brute", "both"):
        brute, strategy = max_score_brute(args.n)
        data["max_s"] = brute
        data["argmax"] = [list(t) for t in strategy.assignments]
        if args.method == "both":
            data["max_s_brute"] = brute
            data["max_s_factorized"] = max_score_factorized(args.n)
    else:
        data["max_s"] = max_score_factorized(args.n)
        data["argmax"] = [list(t) for t in bound_attaining_strategy(args.n).assignments]
    if args.format == "human":
        lines = [
            f"parties           : {data['n']}",
            f"method            : {data['method']}",
            f"max S             : {data['max_s']!r}",
            f"bound 2^(N-1)sqrt3: {data['bound']!r}",
            f"norm_sq (3^N/2)   : {data['norm_sq']!r}",
            f"entry sum q_N     : {data['q_entry_sum']!r}",
            f"violation factor  : {data['violation_factor']!r}",
        ]
        if "max_s_brute" in data:
            lines.append(f"max S (brute)     : {data['max_s_brute']!r}")
            lines.append(f"max S (factorized): {data['max_s_factorized']!r}")
        lines.append("argmax strategy   :")
        for k, triple in enumerate(data["argmax"]):
            lines.append(f"  party {k}: ({triple[0]:+d}, {triple[1]:+d}, {triple[2]:+d})")
        _emit("\n".join(lines))
    else:
        _emit_json(data)
    return 0


def _cmd_thresholds(args, parser) -> int:
    if args.n_max < 2:
        parser.error(f"--n-max must be at least 2, got {args.n_max}")
    rows = threshold_table(args.n_max)
    if args.format == "csv":
        sys.stdout.write(render_table_csv(rows))
    elif args.format == "human":
        data = [row.to_dict() for row in rows]
        lines = [f"{'N':>3}  {'v_cr_new':>9}  {'v_cr_old':>9}  {'eta_cr':>9}"]
        for row in data:
            lines.append(
                f"{row['n']:>3}  "
                f"{percent_string(row['v_cr_new']) + '%':>9}  "
                f"{percent_string(row['v_cr_old']) + '%':>9}  "
                f"{percent_string(row['eta_cr']) + '%':>9}"
            )
        _emit("\n".join(lines))
    else:
        _emit_json([row.to_dict() for row in rows])
    return 0


def _cmd_simulate(args, parser) -> int:
    if args.workers < 1:
        parser.error(f"--workers must be positive, got {args.workers}")
    seed = args.seed if args.seed is not None else _default_seed(parser)
    try:
        config = ExperimentConfig(
            n_parties=args.n,
            visibility=args.v,
            efficiency=args.eta,
            trials=args.trials,
            seed=seed,
            setting_policy=args.policy,
        )
    except ValueError as exc:
        parser.error(str(exc))
    summary = run_experiment(config, workers=args.workers)
    data = {"config": config.to_dict(), **summary.to_dict()}
    if args.format == "human":
        cfg = data["config"]
        _emit(
            "\n".join(
                [
                    f"parties        : {cfg['n_parties']}",
                    f"visibility     : {cfg['visibility']!r}",
                    f"efficiency     : {cfg['efficiency']!r}",
                    f"trials         : {cfg['trials']}",
                    f"seed           : {cfg['seed']}",
                    f"setting policy : {cfg['setting_policy']}",
                    f"p_all_zero     : {data['p_all_zero']!r}",
                    f"lhs |(Q,E)|    : {data['lhs']!r}",
                    f"rhs bound      : {data['rhs']!r}",
                    f"standard error : {data['standard_error_lhs']!r}",
                    f"violated       : {str(data['violated']).lower()}",
                ]
            )
        )
    else:
        _emit_json(data)
    return 0


def _cmd_sweep(args, parser) -> int:
    if args.workers < 1:
        parser.error(f"--workers must be positive, got {args.workers}")
    seed = args.seed if args.seed is not None else _default_seed(parser)
    try:
        grid = [float(tok) for tok in args.v_grid.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--v-grid must be comma-separated numbers, got {args.v_grid!r}")
    if not grid:
        parser.error("--v-grid must contain at least one visibility")
    try:
        points = visibility_sweep(
            n_parties=args.n,
            eta=args.eta,
            v_grid=grid,
            trials_per_point=args.trials_per_point,
            seed=seed,
            setting_policy=args.policy,
            workers=args.workers,
        )
    except ValueError as exc:
        parser.error(str(exc))
    data = {
        "n_parties": args.n,
        "efficiency": args.eta,
        "trials_per_point": args.trials_per_point,
        "seed": seed,
        "setting_policy": args.policy,
        "points": [p.to_dict() for p in points],
    }
    if args.format == "csv":
        lines = ["v,lhs,rhs,violated"]
        for p in data["points"]:
            lines.append(
                f"{p['visibility']!r},{p['lhs']!r},{p['rhs']!r},{str(p['violated']).lower()}"
            )
        _emit("\n".join(lines))
    elif args.format == "human":
        lines = [f"{'v':>6}  {'lhs':>12}  {'rhs':>12}  violated"]
        for p in data["points"]:
            lines.append(
                f"{p['visibility']:>6.3f}  {p['lhs']:>12.6f}  {p['rhs']:>12.6f}  "
                f"{str(p['violated']).lower()}"
            )
        _emit("\n".join(lines))
    else:
        _emit_json(data)
    return 0


def _cmd_verify(args, parser) -> int:
    if not 2 <= args.n_max <= 8:
        parser.error(f"--n-max must be in 2..8, got {args.n_max}")
    results = run_checks(n_max=args.n_max, inject_fault=args.inject_fault)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        _emit_json(
            {
                "checks": [r.to_dict() for r in results],
                "passed": len(results) - len(failed),
                "failed": len(failed),
            }
        )
    else:
        for r in results:
            _emit(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        _emit(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "bound": _cmd_bound,
        "thresholds": _cmd_thresholds,
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "verify": _cmd_verify,
    }
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
