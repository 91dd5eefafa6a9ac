"""Operator command line: tally, verify, mle, agreement, pairs, serve, gen.

Machine-readable JSON goes to stdout; human diagnostics go to stderr.
Exit codes: 0 success, 1 validation/usage error, 2 refusal because a
brute-force search space exceeds its limit. Identical inputs and flags
produce byte-identical output (all randomness is seed-flagged).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analytics, comparisons, mle, service, strategy, synth
from .model import (
    EnumerationLimitError,
    PBError,
    ValidationError,
    load_config,
    read_ballot_log,
    save_config,
    write_ballot_log,
)
from .tally import TALLY_METHODS, ballots_for_method, run_method


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_tally(args) -> int:
    config = load_config(args.config)
    ballots = ballots_for_method(read_ballot_log(args.ballots), args.method)
    outcome = run_method(args.method, ballots, config, k=args.k)
    _emit({"method": args.method, "ballots": len(ballots), "outcome": outcome.to_json_dict()})
    return 0


_SUITES = {
    "1": lambda trials, seed, limit, offset: strategy.verify_strategyproofness(
        trials, seed, mode="fixed", max_subprojects=limit, trial_offset=offset
    ),
    "2": lambda trials, seed, limit, offset: strategy.welfare_suite(
        trials, seed, max_subprojects=limit, trial_offset=offset
    ),
    "3": lambda trials, seed, limit, offset: strategy.verify_strategyproofness(
        trials, seed, mode="balanced", max_subprojects=limit, trial_offset=offset
    ),
    "4": lambda trials, seed, limit, offset: strategy.partial_strategyproofness_suite(
        trials, seed, max_subprojects=limit, trial_offset=offset
    ),
    "integral": lambda trials, seed, limit, offset: strategy.integral_approximation_suite(
        trials, seed, trial_offset=offset
    ),
}

_SUITE_LIMITS = {"1": 12, "2": 12, "3": 10, "4": 12, "integral": 12}


def _run_chunk(name: str, trials: int, seed: int, limit: int, offset: int) -> dict:
    return _SUITES[name](trials, seed, limit, offset)


def cmd_verify(args) -> int:
    if args.theorem == "group":
        report = strategy.group_manipulation_demo()
        _emit(report)
        return 0
    limit = args.limit or _SUITE_LIMITS[args.theorem]
    jobs = max(1, args.jobs)
    if jobs == 1:
        report = _run_chunk(args.theorem, args.trials, args.seed, limit, 0)
    else:
        # chunk by trial index; per-trial seeding keeps the merge exact
        bounds = [args.trials * i // jobs for i in range(jobs + 1)]
        chunks = [(lo, hi - lo) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(
                    _run_chunk,
                    [args.theorem] * len(chunks),
                    [n for _, n in chunks],
                    [args.seed] * len(chunks),
                    [limit] * len(chunks),
                    [lo for lo, _ in chunks],
                )
            )
        report = parts[0]
        for part in parts[1:]:
            report["violations"].extend(part["violations"])
            if "votes_checked" in report:
                report["votes_checked"] += part.get("votes_checked", 0)
        report["trials"] = args.trials
    report["ok"] = not report["violations"]
    _emit(report)
    _note(f"violations: {len(report['violations'])}")
    return 0


def cmd_mle(args) -> int:
    with open(args.ground_truth, encoding="utf-8") as fh:
        data = json.load(fh)
    from .model import Allocation, ElectionConfig

    config = ElectionConfig.from_json_dict(data["config"])
    truth = Allocation.of({str(k): int(v) for k, v in data["allocation"].items()})
    model = mle.NoiseModel(config=config, ground_truth=truth)
    votes = mle.sample_votes(model, args.samples, args.seed)
    estimate = mle.mle_estimate(votes, config)
    _emit(
        {
            "samples": args.samples,
            "seed": args.seed,
            "support_size": model.support_size(),
            "ground_truth": truth.as_dict(),
            "estimate": estimate.as_dict(),
            "recovered": estimate == truth,
        }
    )
    return 0


def cmd_agreement(args) -> int:
    config = load_config(args.config)
    ballots = read_ballot_log(args.ballots)
    if args.comparisons:
        with open(args.comparisons, encoding="utf-8") as fh:
            matrix = comparisons.ComparisonMatrix.from_json_dict(json.load(fh))
    else:
        matrix = comparisons.matrix_from_ballots(ballots, config)
    methods = args.methods.split(",")
    outcomes = {}
    winning = {}
    for method in methods:
        method_ballots = ballots_for_method(ballots, method)
        outcome = run_method(method, method_ballots, config, k=args.k)
        funded = analytics.winning_projects(outcome, config)
        outcomes[method] = outcome
        winning[method] = funded
    report = comparisons.agreement_report(matrix, winning, config.costs())
    report["matrix"] = matrix.to_json_dict()  # re-consumable via --comparisons
    for method in methods:
        avg = analytics.average_winning_cost(winning[method], config)
        report["methods"][method]["average_winning_cost_fraction"] = (
            None if avg is None else f"{avg.numerator}/{avg.denominator}"
        )
        report["methods"][method]["average_winning_cost_value"] = (
            None if avg is None else float(avg)
        )
    if args.curves_out:
        lines = []
        for method in methods:
            method_ballots = ballots_for_method(ballots, method)
            votes = analytics.votes_per_project(method_ballots, config, method)
            rows = analytics.cost_cumulative_rows(votes, config)
            for row in rows:
                lines.append(
                    f"{method}\t{row['project']}\t{row['cost']}\t{row['votes']}"
                    f"\t{row['cumulative_vote_fraction']:.6f}"
                )
        Path(args.curves_out).write_text(
            "method\tproject\tcost\tvotes\tcumulative_vote_fraction\n"
            + "\n".join(lines)
            + "\n",
            encoding="utf-8",
        )
        _note(f"wrote cost-cumulative table to {args.curves_out}")
    _emit(report)
    return 0


def cmd_pairs(args) -> int:
    config = load_config(args.config)
    pairs = comparisons.assign_pairs(config.project_ids(), args.voter, args.count, args.seed)
    _emit({"voter_id": args.voter, "seed": args.seed, "pairs": [list(p) for p in pairs]})
    return 0


def cmd_serve(args) -> int:
    service.serve(args.data_dir, args.bind)
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config, ballots, k = synth.cost_bias_election(
        args.seed, n_voters=args.voters, pairs_per_voter=args.pairs
    )
    save_config(config, out / "config.json")
    write_ballot_log(ballots, out / "ballots.jsonl")
    _emit(
        {
            "seed": args.seed,
            "voters": args.voters,
            "k": k,
            "config": str(out / "config.json"),
            "ballots": str(out / "ballots.jsonl"),
            "ballot_lines": len(ballots),
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbvote", description="participatory budgeting election toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tally", help="run an aggregation rule over a ballot log")
    p.add_argument("--config", required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--method", required=True, choices=TALLY_METHODS)
    p.add_argument("--k", type=int, default=None, help="approval cap for kapproval")
    p.set_defaults(fn=cmd_tally)

    p = sub.add_parser("verify", help="brute-force checks of the rule guarantees")
    p.add_argument(
        "--theorem",
        required=True,
        choices=["1", "2", "3", "4", "group", "integral"],
        help=(
            "1=truthful dominance, 2=welfare optimality, 3=balanced dominance, "
            "4=best-response domination closure, integral=one-project bound, "
            "group=coalition demo"
        ),
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=None, help="max subprojects per instance")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("mle", help="sample noisy votes and recover the ground truth")
    p.add_argument("--ground-truth", required=True, help="JSON file: {config, allocation}")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_mle)

    p = sub.add_parser("agreement", help="compare method outcomes against comparisons")
    p.add_argument("--config", required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--comparisons", default=None, help="JSON matrix export (optional)")
    p.add_argument("--methods", default="knapsack,kapproval")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--curves-out", default=None, help="write cost-cumulative TSV here")
    p.set_defaults(fn=cmd_agreement)

    p = sub.add_parser("pairs", help="deterministic comparison pairs for a voter")
    p.add_argument("--config", required=True)
    p.add_argument("--voter", required=True)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_pairs)

    p = sub.add_parser("serve", help="run the election HTTP service")
    p.add_argument("--data-dir", default=None, help="defaults to $PB_DATA_DIR or ./pb-data")
    p.add_argument("--bind", default=None, help="defaults to $PB_BIND_ADDR or 127.0.0.1:8080")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("gen", help="generate a seeded synthetic election and ballots")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--voters", type=int, default=40)
    p.add_argument("--pairs", type=int, default=6, help="comparison pairs per voter")
    p.set_defaults(fn=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except EnumerationLimitError as exc:
        _note(f"refused: {exc} (size {exc.estimate})")
        return 2
    except (ValidationError, PBError, FileNotFoundError) as exc:
        _note(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
