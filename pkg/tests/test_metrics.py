from __future__ import annotations

import numpy as np
import pytest

from mgpbbbc.benchmarks import PeakRegistry, make_benchmark
from mgpbbbc.core import Population
from mgpbbbc.metrics import RunResult, count_peaks, peak_ratio, success_ratio


@pytest.fixture
def f2():
    return make_benchmark("F2")


def archive_at(spec, x):
    x = np.asarray(x, dtype=float).reshape(-1, spec.problem.dim)
    return Population(x, spec.problem.evaluate(x))


def test_exact_peaks_are_all_found(f2):
    res = count_peaks(archive_at(f2, f2.registry.peaks), f2.registry, 1e-5)
    assert res.npf == 5 and res.success
    assert sorted(res.found_peaks) == [0, 1, 2, 3, 4]


def test_no_candidates(f2):
    res = count_peaks(archive_at(f2, [0.0, 0.2, 0.4]), f2.registry, 1e-1)
    assert res.npf == 0 and not res.success


def test_duplicates_claim_one_peak(f2):
    res = count_peaks(archive_at(f2, 0.3 + np.linspace(-1e-4, 1e-4, 10)), f2.registry, 1e-1)
    assert res.npf == 1 and res.found_peaks == (1,)


def test_radius_limits_claims():
    reg = PeakRegistry(1.0, [[0.0], [1.0]], 0.1)
    arch = Population(np.array([[0.05], [0.5], [0.95]]), [1.0, 1.0, 1.0])
    assert count_peaks(arch, reg, 1e-3).found_peaks == (0, 1)


def test_monotone_in_epsilon_and_permutation(f2):
    rng = np.random.default_rng(4)
    levels = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    for _ in range(200):
        x = np.clip(f2.registry.peaks[rng.integers(5, size=30), 0] + rng.normal(scale=3e-3, size=30), 0, 1)
        arch = archive_at(f2, x)
        counts = [count_peaks(arch, f2.registry, e).npf for e in levels]
        assert counts == sorted(counts, reverse=True)
        res = count_peaks(arch, f2.registry, 1e-2)
        assert len(set(res.found_peaks)) == res.npf
        perm = rng.permutation(30)
        assert count_peaks(arch.take(perm), f2.registry, 1e-2).npf == res.npf


def test_peak_ratio_examples():
    assert peak_ratio([2, 2], 2, 2) == 1.0
    assert peak_ratio([1, 2], 2, 2) == 0.75
    assert peak_ratio([0, 0, 0], 4) == 0.0
    with pytest.raises(ValueError):
        peak_ratio([1, 2], 2, 3)


def test_success_ratio_examples():
    ok, bad = RunResult(36, 36, ()), RunResult(35, 36, ())
    assert success_ratio([ok] * 4) == 1.0
    assert success_ratio([bad] * 4) == 0.0
    # 48 of 50 successful runs
    assert success_ratio([ok] * 48 + [bad] * 2) == pytest.approx(0.960, abs=5e-4)
    with pytest.raises(ValueError):
        success_ratio([])
