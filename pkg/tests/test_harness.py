from __future__ import annotations

import csv
import os

import numpy as np
import pytest

from mgpbbbc.benchmarks import make_benchmark
from mgpbbbc.core import ConfigError, Population, RunConfig, random_init, make_rng
from mgpbbbc.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    ReportIOError,
    default_ratios,
    read_archive,
    read_report,
    run_experiment,
    sweep,
    write_archive,
    write_report,
)
from mgpbbbc.metrics import peak_ratio
from mgpbbbc.solver import run

SMALL = dict(problem="F2", n=100, bandwidth="0.08", max_fes=3000)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(nr=0, **SMALL)
    with pytest.raises(ConfigError):
        ExperimentConfig(accuracy=(1e-3, 1e-1), **SMALL)
    with pytest.raises(ConfigError):
        ExperimentConfig(workers=0, **SMALL)
    with pytest.raises(ConfigError):
        ExperimentConfig(problem="F2", bandwidth="vol:x")


def test_defaults_come_from_the_benchmark():
    cfg = ExperimentConfig(problem="F7").run_config(3)
    assert (cfg.n, cfg.bandwidth.value, cfg.max_fes, cfg.seed) == (500, 0.2, 200_000, 3)


def test_one_generation_returns_initial_population():
    spec = make_benchmark("F4")
    cfg = RunConfig(n=50, bandwidth=0.8, generations=1, seed=11)
    out = run(cfg, spec)
    init = random_init(50, spec.problem, make_rng(11))
    np.testing.assert_array_equal(out.archive.x, init.x)
    np.testing.assert_array_equal(out.archive.fit, spec.problem.evaluate(init.x))
    assert out.fes == 50


def test_same_seed_same_archive():
    spec = make_benchmark("F6")
    cfg = RunConfig(n=200, bandwidth=0.2, max_fes=4000, seed=5)
    assert run(cfg, spec).archive.same_as(run(cfg, spec).archive)


def test_fe_ceiling():
    for max_fes in (999, 1000, 2500):
        rep = run_experiment(ExperimentConfig(**{**SMALL, "max_fes": max_fes}, nr=3))
        assert all(r.fes_used <= max_fes for r in rep.records)
        assert all(r.fes_used <= max_fes + 100 for r in rep.records)


def test_forced_identical_seeds():
    cfg = ExperimentConfig(**SMALL, nr=1, base_seed=9)
    a, b = run_experiment(cfg).records[0], run_experiment(cfg).records[0]
    assert (a.seed, a.npf, a.fes_used) == (b.seed, b.npf, b.fes_used)


def test_f2_recommended_settings_find_every_peak():
    rep = run_experiment(ExperimentConfig(problem="F2", n=1000, bandwidth="0.08", max_fes=50_000, nr=10))
    level = rep.accuracy.index(1e-4)
    assert sum(r.npf[level] == 5 for r in rep.records) >= 9


def test_report_round_trip(tmp_path):
    rep = run_experiment(ExperimentConfig(**SMALL, nr=3, base_seed=4, out=tmp_path))
    back = read_report(tmp_path)
    assert back.records == rep.records
    assert back.settings == rep.settings
    assert (back.problem, back.accuracy, back.tnp) == (rep.problem, rep.accuracy, rep.tnp)
    assert back.pr == rep.pr and back.sr == rep.sr
    write_report(back, tmp_path / "again")
    assert read_report(tmp_path / "again").records == rep.records


def test_csv_aggregates_match_report(tmp_path):
    rep = run_experiment(ExperimentConfig(**SMALL, nr=4, out=tmp_path))
    with open(tmp_path / "runs.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        assert tuple(reader.fieldnames) == CSV_COLUMNS
        rows = list(reader)
    assert len(rows) == 4 * len(rep.accuracy)
    for j, eps in enumerate(rep.accuracy):
        level = [r for r in rows if float(r["epsilon"]) == eps]
        pr = peak_ratio([int(r["npf"]) for r in level], int(level[0]["tnp"]))
        sr = sum(int(r["success"]) for r in level) / len(level)
        assert pr == rep.pr[j]
        assert sr == rep.sr[j]


def test_run_order_does_not_change_aggregates(tmp_path):
    rep = run_experiment(ExperimentConfig(**SMALL, nr=4))
    rep.records.reverse()
    rev_pr, rev_sr = rep.pr, rep.sr
    rep.records.sort(key=lambda r: r.run_index)
    assert (rep.pr, rep.sr) == (rev_pr, rev_sr)


def test_parallel_workers_match_serial():
    serial = run_experiment(ExperimentConfig(**SMALL, nr=3))
    parallel = run_experiment(ExperimentConfig(**SMALL, nr=3, workers=2))
    strip = lambda recs: [(r.run_index, r.seed, r.npf, r.fes_used) for r in recs]
    assert strip(serial.records) == strip(parallel.records)


def test_archive_dump_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    pop = Population(rng.normal(size=(20, 3)) * 1e3, rng.normal(size=20) / 7)
    write_archive(tmp_path / "a.txt", pop)
    assert read_archive(tmp_path / "a.txt").same_as(pop)


def test_archive_dumps_are_deterministic(tmp_path):
    for name in ("a", "b"):
        run_experiment(ExperimentConfig(**SMALL, nr=2, base_seed=1, out=tmp_path / name))
    for k in range(2):
        dump = f"archives/run_{k:03d}.txt"
        assert (tmp_path / "a" / dump).read_bytes() == (tmp_path / "b" / dump).read_bytes()
        assert len((tmp_path / "a" / dump).read_text().splitlines()) == 100


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_io_failure_keeps_partial_results(tmp_path):
    out = tmp_path / "ro"
    out.mkdir()
    out.chmod(0o500)
    try:
        with pytest.raises(ReportIOError) as info:
            run_experiment(ExperimentConfig(**SMALL, nr=2, out=out / "sub"))
        assert info.value.partial.nr == 0
    finally:
        out.chmod(0o700)


def test_io_failure_midway_keeps_finished_runs(tmp_path):
    out = tmp_path / "res"
    seen = []

    def progress(rec):
        seen.append(rec)
        # the summary path becomes a directory, so the final write fails
        (out / "summary.json").mkdir(exist_ok=True)

    with pytest.raises(ReportIOError) as info:
        run_experiment(ExperimentConfig(**SMALL, nr=2, out=out), progress=progress)
    assert info.value.partial.nr == 2
    # wall times live in the summary, which never got written
    strip = lambda recs: [(r.run_index, r.seed, r.npf, r.fes_used) for r in recs]
    assert strip(read_report(out).records) == strip(info.value.partial.records)


def test_default_ratios():
    r = default_ratios()
    assert len(r) == 10 and r[0] == 2000.0 and r[-1] == 10.0
    assert np.allclose(np.diff(r), np.diff(r)[0])


def test_small_sweep():
    cells = sweep("F2", pops=(50, 100), bandwidths=("0.08", "vol:20"), max_fes=1000, accuracy=(1e-1, 1e-2))
    assert [(c.n, c.bandwidth) for c in cells] == [(50, "0.08"), (50, "vol:20"), (100, "0.08"), (100, "vol:20")]
    assert all(0.0 <= p <= 1.0 for c in cells for p in c.pr)
