"""Peak counting, peak ratio and success ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .benchmarks import PeakRegistry
from .core import Population

__all__ = ["RunResult", "count_peaks", "peak_ratio", "success_ratio"]


@dataclass(frozen=True)
class RunResult:
    npf: int
    tnp: int
    found_peaks: tuple[int, ...]

    @property
    def success(self) -> bool:
        return self.npf == self.tnp


def count_peaks(archive: Population, registry: PeakRegistry, epsilon: float) -> RunResult:
    """Number of registered peaks recovered by ``archive`` at accuracy ``epsilon``.

    Members within ``epsilon`` of the optimum value are scanned from best to
    worst (ties by archive index); each claims the nearest still-unclaimed
    peak inside the niche radius, if any.
    """
    fit = np.asarray(archive.fit, dtype=float)
    candidates = np.flatnonzero(registry.fstar - fit <= epsilon)
    candidates = candidates[np.argsort(-fit[candidates], kind="stable")]
    peaks = registry.peaks
    claimed = np.zeros(len(peaks), dtype=bool)
    found = []
    r2 = registry.radius**2
    for i in candidates:
        d2 = ((peaks - archive.x[i]) ** 2).sum(axis=1)
        d2[claimed] = np.inf
        p = int(np.argmin(d2))
        if d2[p] <= r2:
            claimed[p] = True
            found.append(p)
            if len(found) == len(peaks):
                break
    return RunResult(npf=len(found), tnp=len(peaks), found_peaks=tuple(found))


def peak_ratio(npf_per_run, tnp: int, nr: int | None = None) -> float:
    """Mean fraction of global peaks found per run."""
    npf = [int(v) for v in npf_per_run]
    if nr is None:
        nr = len(npf)
    if nr < 1 or len(npf) != nr:
        raise ValueError(f"expected {nr} run counts, got {len(npf)}")
    return sum(npf) / (tnp * nr)


def success_ratio(results) -> float:
    """Fraction of runs that found every global peak."""
    results = list(results)
    if not results:
        raise ValueError("need at least one run result")
    return sum(1 for r in results if r.success) / len(results)
