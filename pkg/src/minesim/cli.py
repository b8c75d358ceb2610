"""Command-line entry point: single runs, sweeps, and analysis reports.

Exit codes: 0 success, 2 usage or validation error, 3 output I/O error.
All commands are deterministic for fixed flags; seeds default to 0.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, experiments, results_io
from .engine import (CONCURRENT, CONVENTIONAL, InvalidPowerConfiguration,
                     PowerConfiguration, RunConfig, run)

REPORTS = ("thresholds", "nash", "safety", "table1", "interp", "all")


class _UsageError(Exception):
    pass


def _parse_powers(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise _UsageError(f"powers must be a comma-separated list: {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minesim",
        description="Proof-of-work mining simulator with concurrent "
                    "selfish miners")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded run, print JSON")
    p_run.add_argument("--model", choices=(CONCURRENT, CONVENTIONAL),
                       default=CONCURRENT)
    p_run.add_argument("--powers", required=True,
                       help="comma-separated relative powers, honest last")
    p_run.add_argument("--d", type=float, default=0.5,
                       help="difficulty scale in [0,1]")
    p_run.add_argument("--timesteps", type=int, default=200_000)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--no-flush", action="store_true",
                       help="skip the end-of-run publication of private "
                            "branches")
    p_run.add_argument("--selfish", type=int, default=None,
                       help="selfish miner count (default: all but the last)")

    p_sweep = sub.add_parser("sweep", help="sweep a power lattice to CSV")
    p_sweep.add_argument("--selfish", type=int, required=True)
    p_sweep.add_argument("--granularity", type=float, default=0.01)
    p_sweep.add_argument("--reps", type=int, default=100)
    p_sweep.add_argument("--timesteps", type=int, default=200_000)
    p_sweep.add_argument("--d", type=float, default=0.5)
    p_sweep.add_argument("--model", choices=(CONCURRENT, CONVENTIONAL),
                         default=CONCURRENT)
    p_sweep.add_argument("--seed", type=int,
                         default=experiments.DEFAULT_BASE_SEED)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--equal-power", action="store_true",
                         help="only configurations with equal selfish powers")
    p_sweep.add_argument("--resume", action="store_true",
                         help="skip grid points already in the output file")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--quiet", action="store_true")

    p_an = sub.add_parser("analyze", help="derive reports from a results CSV")
    p_an.add_argument("--in", dest="input", required=True)
    p_an.add_argument("--report", choices=REPORTS, required=True)
    p_an.add_argument("--out", required=True)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    powers = _parse_powers(args.powers)
    try:
        pc = PowerConfiguration(powers, args.d, args.selfish)
        config = RunConfig(model=args.model, timesteps=args.timesteps,
                           seed=args.seed, flush_at_end=not args.no_flush)
    except (InvalidPowerConfiguration, ValueError) as exc:
        raise _UsageError(str(exc))
    outcome = run(config, pc)
    doc = {
        "model": outcome.model,
        "powers": list(pc.powers),
        "difficulty": pc.difficulty,
        "selfish": pc.selfish_count,
        "timesteps": config.timesteps,
        "seed": config.seed,
        "flush": config.flush_at_end,
        "winning_tip": outcome.winning_tip,
        "chain_length": outcome.chain_length,
        "blocks_mined": outcome.blocks_mined,
        "blocks_per_miner": {str(i + 1): c
                             for i, c in enumerate(outcome.blocks_per_miner)},
        "rewards": {str(i + 1): r for i, r in enumerate(outcome.rewards)},
    }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    try:
        spec = experiments.GridSpec(
            selfish_count=args.selfish, granularity=args.granularity,
            timesteps=args.timesteps, repetitions=args.reps,
            difficulty=args.d, model=args.model)
    except ValueError as exc:
        raise _UsageError(str(exc))
    progress = None
    if not args.quiet:
        def progress(done: int, total: int) -> None:
            sys.stderr.write(f"\r{done}/{total} grid points")
            sys.stderr.flush()
    sweep = (experiments.equal_power_scan if args.equal_power
             else experiments.sweep_grid)
    try:
        sweep(spec, base_seed=args.seed, out_path=args.out,
              resume=args.resume, workers=args.workers, progress=progress)
    except experiments.EmptyGrid as exc:
        raise _UsageError(str(exc))
    except OSError as exc:
        sys.stderr.write(f"minesim: cannot write {args.out}: {exc}\n")
        return 3
    if not args.quiet:
        sys.stderr.write("\n")
    return 0


def _slice(stats, model=None, k=None):
    out = [s for s in stats
           if (model is None or s.model == model)
           and (k is None or s.selfish_count == k)]
    return out


def _equal_power_subset(stats):
    out = []
    for s in stats:
        selfish = {round(p, 6) for p in s.powers[:s.selfish_count]}
        if len(selfish) == 1:
            out.append(s)
    return out


def _summary_csv(stats) -> str:
    """Per-k summary of thresholds, equilibrium ranges, and safety levels."""
    lines = ["k,model,threshold_lower,threshold_upper,"
             "stable_lo,stable_hi,unstable_lo,unstable_hi,"
             "safety_lower,safety_upper"]

    def fmt(x):
        return "" if x is None else f"{x:.6f}"

    groups = sorted({(s.model, s.selfish_count) for s in stats})
    for model, k in groups:
        grid = _slice(stats, model, k)
        thresholds = analysis.threshold_bounds(grid)
        safety = analysis.safety_bounds(grid)
        stable = unstable = None
        if k >= 2:
            scan = _equal_power_subset(grid)
            if scan:
                nash = analysis.nash_classify(scan)
                stable, unstable = nash.stable_range, nash.unstable_range
        cells = [str(k), model,
                 fmt(thresholds.lower_bound), fmt(thresholds.upper_bound),
                 fmt(stable[0]) if stable else "",
                 fmt(stable[1]) if stable else "",
                 fmt(unstable[0]) if unstable else "",
                 fmt(unstable[1]) if unstable else "",
                 fmt(safety.lower_bound), fmt(safety.upper_bound)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        stats = results_io.read_stats(args.input)
    except FileNotFoundError:
        raise _UsageError(f"no such file: {args.input}")
    except results_io.MalformedResults as exc:
        raise _UsageError(f"{args.input}: {exc}")
    if not stats:
        raise _UsageError(f"{args.input}: no result rows")

    try:
        if args.report == "thresholds":
            payload = json.dumps(analysis.threshold_bounds(stats).to_dict(),
                                 indent=2)
        elif args.report == "safety":
            payload = json.dumps(analysis.safety_bounds(stats).to_dict(),
                                 indent=2)
        elif args.report == "nash":
            scan = _equal_power_subset(stats)
            if not scan:
                raise _UsageError("no equal-power rows in the input")
            payload = json.dumps(analysis.nash_classify(scan).to_dict(),
                                 indent=2)
        elif args.report == "interp":
            root = analysis.interpolate_threshold_stats(stats)
            payload = json.dumps({"interpolated_threshold": root}, indent=2)
        elif args.report == "table1":
            table = analysis.min_power_table(stats)
            lines = ["m1,m2,m3_lo,m3_hi"]
            for row in table.rows:
                lines.append(f"{table.m1:.6f},{row.m2:.6f},"
                             f"{row.m3_lo:.6f},{row.m3_hi:.6f}")
            payload = "\n".join(lines) + "\n"
        else:
            payload = _summary_csv(stats)
    except (analysis.EmptyGrid, analysis.NoSignChange, ValueError) as exc:
        raise _UsageError(str(exc))

    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload if payload.endswith("\n") else payload + "\n")
    except OSError as exc:
        sys.stderr.write(f"minesim: cannot write {args.out}: {exc}\n")
        return 3
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_analyze(args)
    except _UsageError as exc:
        sys.stderr.write(f"minesim: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
