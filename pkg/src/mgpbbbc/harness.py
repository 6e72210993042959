"""Seeded batch experiments, result persistence and parameter sweeps."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import BenchmarkSpec, get_benchmark
from .core import DEFAULT_ACCURACY_LEVELS, BandwidthStrategy, ConfigError, Population, RunConfig
from .metrics import RunResult, count_peaks, peak_ratio, success_ratio
from .solver import run

__all__ = [
    "CSV_COLUMNS",
    "ExperimentConfig",
    "RunRecord",
    "ExperimentReport",
    "ReportIOError",
    "single_run",
    "run_experiment",
    "write_report",
    "read_report",
    "write_archive",
    "read_archive",
    "default_ratios",
    "SweepCell",
    "sweep",
    "write_sweep",
]

CSV_COLUMNS = ("problem", "run_index", "seed", "epsilon", "npf", "tnp", "success", "fes_used")
RUNS_FILE = "runs.csv"
SUMMARY_FILE = "summary.json"
ARCHIVE_DIR = "archives"


class ReportIOError(OSError):
    """Writing results failed; ``partial`` holds the runs finished so far."""

    def __init__(self, message: str, partial: "ExperimentReport"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ExperimentConfig:
    """A batch of ``nr`` runs of one problem.

    Run ``k`` is seeded with ``base_seed + k``, so any subset of a batch can
    be recomputed on its own.  ``problem`` is a built-in id or a path to a
    custom-problem JSON file; ``spec`` may be given instead to skip lookup.
    Unset ``n``, ``bandwidth`` and ``max_fes`` fall back to the problem's
    recommended values.
    """

    problem: str
    n: int | None = None
    bandwidth: BandwidthStrategy | str | float | None = None
    max_fes: int | None = None
    generations: int | None = None
    accuracy: tuple[float, ...] = DEFAULT_ACCURACY_LEVELS
    nr: int = 1
    base_seed: int = 0
    out: Path | None = None
    dump_archives: bool = True
    workers: int = 1
    spec: BenchmarkSpec | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if int(self.nr) != self.nr or self.nr < 1:
            raise ConfigError(f"number of runs must be >= 1, got {self.nr}")
        acc = tuple(float(a) for a in self.accuracy)
        if list(acc) != sorted(acc, reverse=True):
            raise ConfigError(f"accuracy levels must be sorted from coarse to fine, got {acc}")
        object.__setattr__(self, "accuracy", acc)
        if self.bandwidth is not None and not isinstance(self.bandwidth, BandwidthStrategy):
            object.__setattr__(self, "bandwidth", BandwidthStrategy.parse(str(self.bandwidth)))
        if self.out is not None:
            object.__setattr__(self, "out", Path(self.out))
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def benchmark(self) -> BenchmarkSpec:
        return self.spec if self.spec is not None else get_benchmark(self.problem)

    def run_config(self, k: int, spec: BenchmarkSpec | None = None) -> RunConfig:
        spec = spec or self.benchmark()
        budget = {}
        if self.generations is not None:
            budget["generations"] = self.generations
        else:
            budget["max_fes"] = self.max_fes if self.max_fes is not None else spec.max_fes
        return RunConfig(
            n=self.n if self.n is not None else spec.default_n,
            bandwidth=self.bandwidth if self.bandwidth is not None else spec.default_bandwidth,
            accuracy=self.accuracy,
            seed=self.base_seed + k,
            **budget,
        )


@dataclass(frozen=True)
class RunRecord:
    run_index: int
    seed: int
    npf: tuple[int, ...]
    tnp: int
    fes_used: int
    wall_time: float = 0.0

    def success(self, level: int) -> bool:
        return self.npf[level] == self.tnp


@dataclass
class ExperimentReport:
    """Per-run peak counts plus the settings that produced them.

    ``pr`` and ``sr`` are always derived from ``records``, never stored, so
    they cannot drift from the per-run data.
    """

    problem: str
    accuracy: tuple[float, ...]
    tnp: int
    settings: dict
    records: list[RunRecord] = field(default_factory=list)

    @property
    def nr(self) -> int:
        return len(self.records)

    @property
    def pr(self) -> tuple[float, ...]:
        return tuple(
            peak_ratio([r.npf[j] for r in self.records], self.tnp) for j in range(len(self.accuracy))
        )

    @property
    def sr(self) -> tuple[float, ...]:
        return tuple(
            success_ratio(RunResult(r.npf[j], r.tnp, ()) for r in self.records)
            for j in range(len(self.accuracy))
        )

    def levels(self) -> list[dict]:
        return [
            {"epsilon": eps, "pr": pr, "sr": sr} for eps, pr, sr in zip(self.accuracy, self.pr, self.sr)
        ]


def single_run(spec: BenchmarkSpec, config: RunConfig, run_index: int = 0):
    """Run once and score the archive at every accuracy level.

    Returns the record and the final archive.
    """
    start = time.perf_counter()
    outcome = run(config, spec)
    npf = tuple(count_peaks(outcome.archive, spec.registry, eps).npf for eps in config.accuracy)
    record = RunRecord(
        run_index=run_index,
        seed=config.seed,
        npf=npf,
        tnp=spec.registry.tnp,
        fes_used=outcome.fes,
        wall_time=time.perf_counter() - start,
    )
    return record, outcome.archive


def _worker(args):
    config, k = args
    spec = config.benchmark()
    return single_run(spec, config.run_config(k, spec), k)


def run_experiment(config: ExperimentConfig, progress=None) -> ExperimentReport:
    """Run the batch and, when ``config.out`` is set, persist it.

    Per-run CSV rows and archive dumps are written as each run finishes,
    so an interrupted batch leaves its completed runs on disk.  ``progress``
    is called with every finished :class:`RunRecord`.
    """
    spec = config.benchmark()
    first = config.run_config(0, spec)
    settings = {
        "n": first.n,
        "bandwidth": str(first.bandwidth),
        "max_fes": first.max_fes,
        "generations": first.g,
        "base_seed": config.base_seed,
    }
    report = ExperimentReport(spec.id, config.accuracy, spec.registry.tnp, settings)
    out = config.out
    if out is not None:
        _guard(report, _prepare_dir, out, config.dump_archives)

    def finish(record, archive):
        report.records.append(record)
        if out is not None:
            _guard(report, _append_rows, out / RUNS_FILE, report, record)
            if config.dump_archives:
                _guard(report, write_archive, out / ARCHIVE_DIR / f"run_{record.run_index:03d}.txt", archive)
        if progress is not None:
            progress(record)

    if config.workers == 1 or config.nr == 1:
        for k in range(config.nr):
            finish(*single_run(spec, config.run_config(k, spec), k))
    else:
        jobs = [(config, k) for k in range(config.nr)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for record, archive in pool.map(_worker, jobs):
                finish(record, archive)

    if out is not None:
        _guard(report, _write_summary, out / SUMMARY_FILE, report)
    return report


def _guard(report, func, *args):
    try:
        func(*args)
    except OSError as exc:
        raise ReportIOError(f"cannot write results: {exc}", report) from exc


def _prepare_dir(out: Path, archives: bool):
    out.mkdir(parents=True, exist_ok=True)
    if archives:
        (out / ARCHIVE_DIR).mkdir(exist_ok=True)
    with open(out / RUNS_FILE, "w", newline="") as fh:
        csv.writer(fh).writerow(CSV_COLUMNS)


def _rows(report: ExperimentReport, record: RunRecord):
    for j, eps in enumerate(report.accuracy):
        yield (
            report.problem,
            record.run_index,
            record.seed,
            repr(eps),
            record.npf[j],
            record.tnp,
            int(record.success(j)),
            record.fes_used,
        )


def _append_rows(path: Path, report: ExperimentReport, record: RunRecord):
    with open(path, "a", newline="") as fh:
        csv.writer(fh).writerows(_rows(report, record))


def _write_summary(path: Path, report: ExperimentReport):
    doc = {
        "problem": report.problem,
        "tnp": report.tnp,
        "nr": report.nr,
        "settings": report.settings,
        "levels": report.levels(),
        "wall_time": {str(r.run_index): r.wall_time for r in report.records},
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")


def write_report(report: ExperimentReport, out: str | Path) -> Path:
    """Write ``runs.csv`` and ``summary.json`` into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / RUNS_FILE, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for record in report.records:
            writer.writerows(_rows(report, record))
    _write_summary(out / SUMMARY_FILE, report)
    return out


def read_report(out: str | Path) -> ExperimentReport:
    """Rebuild a report from ``runs.csv`` (and ``summary.json`` if present).

    Aggregates come from the CSV alone; the summary only contributes the
    settings and wall times.
    """
    out = Path(out)
    with open(out / RUNS_FILE, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{out / RUNS_FILE} holds no runs")
    summary = {}
    if (out / SUMMARY_FILE).is_file():
        summary = json.loads((out / SUMMARY_FILE).read_text())
    walls = summary.get("wall_time", {})

    accuracy = []
    runs: dict[int, dict] = {}
    for row in rows:
        eps = float(row["epsilon"])
        if eps not in accuracy:
            accuracy.append(eps)
        k = int(row["run_index"])
        entry = runs.setdefault(k, {"seed": int(row["seed"]), "fes": int(row["fes_used"]), "npf": {}})
        entry["npf"][eps] = int(row["npf"])
    tnp = int(rows[0]["tnp"])
    records = [
        RunRecord(
            run_index=k,
            seed=v["seed"],
            npf=tuple(v["npf"][eps] for eps in accuracy),
            tnp=tnp,
            fes_used=v["fes"],
            wall_time=float(walls.get(str(k), 0.0)),
        )
        for k, v in runs.items()
    ]
    return ExperimentReport(rows[0]["problem"], tuple(accuracy), tnp, summary.get("settings", {}), records)


def write_archive(path: str | Path, archive: Population) -> None:
    """One line per elite: coordinates then fitness, shortest round-trip repr."""
    lines = [" ".join(repr(float(v)) for v in (*x, f)) for x, f in zip(archive.x, archive.fit)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_archive(path: str | Path) -> Population:
    data = np.loadtxt(path, dtype=float, ndmin=2)
    return Population(data[:, :-1].copy(), data[:, -1].copy())


# ---------------------------------------------------------------------------
# parameter sweep
# ---------------------------------------------------------------------------


def default_ratios(count: int = 10, first: float = 2000.0, last: float = 10.0) -> list[float]:
    """Equally spaced volume ratios from ``first`` down to ``last``."""
    return [float(r) for r in np.linspace(first, last, count)]


@dataclass(frozen=True)
class SweepCell:
    n: int
    bandwidth: str
    pr: tuple[float, ...]
    sr: tuple[float, ...]


def sweep(
    problem: str,
    pops=(50, 100, 500, 1000),
    bandwidths=None,
    nr: int = 1,
    base_seed: int = 0,
    max_fes: int | None = None,
    accuracy=DEFAULT_ACCURACY_LEVELS,
    progress=None,
) -> list[SweepCell]:
    """PR and SR for every (population size, bandwidth) pair.

    ``bandwidths`` are strategy strings; the default is ten volume ratios
    from 2000 to 10.
    """
    if bandwidths is None:
        bandwidths = [f"vol:{r:g}" for r in default_ratios()]
    spec = get_benchmark(problem)
    cells = []
    for n in pops:
        for bw in bandwidths:
            cfg = ExperimentConfig(
                problem, n=int(n), bandwidth=bw, max_fes=max_fes, accuracy=accuracy,
                nr=nr, base_seed=base_seed, spec=spec,
            )
            rep = run_experiment(cfg)
            cell = SweepCell(int(n), str(cfg.bandwidth), rep.pr, rep.sr)
            cells.append(cell)
            if progress is not None:
                progress(cell)
    return cells


def write_sweep(path: str | Path, cells: list[SweepCell], accuracy) -> None:
    header = ["n", "bandwidth"] + [f"pr@{e:g}" for e in accuracy] + [f"sr@{e:g}" for e in accuracy]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for c in cells:
            writer.writerow([c.n, c.bandwidth, *map(repr, c.pr), *map(repr, c.sr)])
