"""Command-line entry point: ``run``, ``verify-registry`` and ``sweep``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .benchmarks import get_benchmark
from .core import DEFAULT_ACCURACY_LEVELS, ConfigError
from .harness import (
    ARCHIVE_DIR,
    ExperimentConfig,
    default_ratios,
    read_archive,
    run_experiment,
    sweep,
    write_sweep,
)
from .verify import GRID_ORACLE_IDS, check_registry, grid_oracle

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

log = logging.getLogger("mgpbbbc")


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, not the stdlib's exit status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _strings(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mgpbbbc", description="Multimodal optimisation runs and benchmark tooling.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every finished run")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    acc = ",".join(f"{a:g}" for a in DEFAULT_ACCURACY_LEVELS)

    p = sub.add_parser("run", help="seeded batch of runs on one problem")
    p.add_argument("--problem", required=True, help="F1..F10 or a custom-problem JSON file")
    p.add_argument("--pop", type=int, help="population size (default: the problem's recommended value)")
    p.add_argument("--bandwidth", help="h, vol:<ratio> or spread:<ratio>")
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--max-fes", type=int, help="evaluation budget per run")
    budget.add_argument("--generations", type=int, help="generation count instead of a budget")
    p.add_argument("--runs", type=int, default=1, help="number of runs (default: 1)")
    p.add_argument("--seed", type=int, default=0, help="base seed; run k uses seed + k")
    p.add_argument("--accuracy", type=_floats, default=DEFAULT_ACCURACY_LEVELS, help=f"default: {acc}")
    p.add_argument("--out", type=Path, help="output directory for CSV, summary, archives and figures")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--no-archives", action="store_true", help="skip the per-run archive dumps")
    p.add_argument("--no-plots", action="store_true", help="skip the figures")

    p = sub.add_parser("verify-registry", help="check a problem's peak table")
    p.add_argument("--problem", required=True, help="F1..F10 or a custom-problem JSON file")
    p.add_argument("--grid", action="store_true", help="also run the grid oracle (default for F2, F4-F7, F10)")

    p = sub.add_parser("sweep", help="PR/SR over a population size by bandwidth grid")
    p.add_argument("--problem", required=True)
    p.add_argument("--pops", type=_ints, default=(50, 100, 500, 1000), help="default: 50,100,500,1000")
    p.add_argument(
        "--bandwidths",
        type=_strings,
        help="comma-separated strategies (default: ten volume ratios from 2000 to 10)",
    )
    p.add_argument("--max-fes", type=int)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--accuracy", type=_floats, default=DEFAULT_ACCURACY_LEVELS, help=f"default: {acc}")
    p.add_argument("--level", type=float, default=1e-4, help="accuracy level of the heat map (default: 1e-4)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--no-plots", action="store_true")
    return parser


def _print_levels(accuracy, pr, sr):
    print("epsilon,pr,sr")
    for e, a, b in zip(accuracy, pr, sr):
        print(f"{e:g},{a!r},{b!r}")


def cmd_run(args) -> int:
    config = ExperimentConfig(
        problem=args.problem,
        n=args.pop,
        bandwidth=args.bandwidth,
        max_fes=args.max_fes,
        generations=args.generations,
        accuracy=args.accuracy,
        nr=args.runs,
        base_seed=args.seed,
        out=args.out,
        dump_archives=not args.no_archives,
        workers=args.workers,
    )
    spec = config.benchmark()
    config.run_config(0, spec)  # surface config errors before any work

    def progress(rec):
        log.info("run %d seed %d npf %s/%d fes %d %.1fs", rec.run_index, rec.seed, rec.npf, rec.tnp, rec.fes_used, rec.wall_time)

    report = run_experiment(config, progress=progress)
    _print_levels(report.accuracy, report.pr, report.sr)
    if args.out is not None and not args.no_plots:
        from .plotting import plot_accuracy, plot_archive

        plot_accuracy(report, args.out / "accuracy.png")
        dump = args.out / ARCHIVE_DIR / "run_000.txt"
        if dump.exists():
            plot_archive(spec, read_archive(dump), args.out / "archive_run_000.png")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = get_benchmark(args.problem)
    check = check_registry(spec)
    print(f"problem={spec.id} tnp={check.tnp} fstar={check.fstar!r}")
    print(f"max_value_gap={check.max_gap:.3e} tol={check.value_tol:g} {'pass' if check.max_gap <= check.value_tol else 'FAIL'}")
    print(f"max_climb_gain={check.max_climb:.3e} tol={check.climb_tol:g} {'pass' if check.max_climb <= check.climb_tol else 'FAIL'}")
    ok = check.passed
    if args.grid or spec.id in GRID_ORACLE_IDS:
        oracle = grid_oracle(spec)
        grid_ok = oracle.count == spec.registry.tnp
        cells = "x".join(map(str, oracle.cells))
        print(f"grid_regions={oracle.count} grid={cells} {'pass' if grid_ok else 'FAIL'}")
        ok = ok and grid_ok
    return EXIT_OK if ok else EXIT_CONFIG


def cmd_sweep(args) -> int:
    bandwidths = args.bandwidths or tuple(f"vol:{r:g}" for r in default_ratios())
    if args.level not in args.accuracy:
        raise ConfigError(f"--level {args.level:g} is not one of the accuracy levels")

    def progress(cell):
        log.info("n=%d bandwidth=%s pr=%s", cell.n, cell.bandwidth, cell.pr)

    cells = sweep(
        args.problem,
        pops=args.pops,
        bandwidths=bandwidths,
        nr=args.runs,
        base_seed=args.seed,
        max_fes=args.max_fes,
        accuracy=args.accuracy,
        progress=progress,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_sweep(args.out / "sweep.csv", cells, args.accuracy)
    level = list(args.accuracy).index(args.level)
    print("n,bandwidth,pr,sr")
    for c in cells:
        print(f"{c.n},{c.bandwidth},{c.pr[level]!r},{c.sr[level]!r}")
    if not args.no_plots:
        from .plotting import plot_sweep

        plot_sweep(cells, args.accuracy, level, args.out / "sweep_pr.png")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "verify-registry": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except ValueError as exc:
        # ConfigError derives from ValueError
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
