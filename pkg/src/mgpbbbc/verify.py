"""Independent checks of a benchmark's peak registry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter
from scipy.optimize import minimize

from .benchmarks import BenchmarkSpec

__all__ = [
    "GRID_ORACLE_IDS",
    "RegistryCheck",
    "GridOracle",
    "hill_climb",
    "check_registry",
    "grid_oracle",
    "nearest_match",
]

GRID_ORACLE_IDS = ("F2", "F4", "F5", "F6", "F7", "F10")
VALUE_TOL = 1e-7
CLIMB_TOL = 1e-9
REGION_TOL = 1e-6


@dataclass(frozen=True)
class RegistryCheck:
    problem: str
    tnp: int
    fstar: float
    max_gap: float
    max_climb: float
    value_tol: float = VALUE_TOL
    climb_tol: float = CLIMB_TOL

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.value_tol and self.max_climb <= self.climb_tol


@dataclass(frozen=True)
class GridOracle:
    problem: str
    cells: tuple[int, ...]
    regions: np.ndarray
    values: np.ndarray
    fstar: float

    @property
    def count(self) -> int:
        return len(self.regions)


def _polish(problem, x0, step, xatol=1e-13, fatol=1e-16):
    """Bounded Nelder-Mead ascent from ``x0`` with a simplex of edge ``step``."""
    x0 = np.asarray(x0, dtype=float)
    d = len(x0)
    simplex = np.vstack([x0, x0 + step * np.eye(d)])
    simplex = np.clip(simplex, problem.lower, problem.upper)
    if np.linalg.matrix_rank(simplex[1:] - simplex[0]) < d:
        # vertex sits on the upper bound; step inwards instead
        simplex = np.clip(np.vstack([x0, x0 - step * np.eye(d)]), problem.lower, problem.upper)
    res = minimize(
        lambda z: -float(problem.evaluate(z)),
        x0,
        method="Nelder-Mead",
        bounds=list(zip(problem.lower, problem.upper)),
        options={"initial_simplex": simplex, "xatol": xatol, "fatol": fatol, "maxiter": 4000},
    )
    return res.x, -res.fun


def hill_climb(spec: BenchmarkSpec, step: float = 1e-6) -> np.ndarray:
    """Fitness gain of a local ascent started at every registered peak."""
    problem = spec.problem
    start = problem.evaluate(spec.registry.peaks)
    gains = np.empty(spec.registry.tnp)
    for p, peak in enumerate(spec.registry.peaks):
        _, best = _polish(problem, peak, step)
        gains[p] = max(best - start[p], 0.0)
    return gains


def check_registry(spec: BenchmarkSpec, value_tol: float = VALUE_TOL, climb_tol: float = CLIMB_TOL) -> RegistryCheck:
    """Every peak sits at the optimum value and is a local maximum."""
    values = spec.problem.evaluate(spec.registry.peaks)
    return RegistryCheck(
        problem=spec.id,
        tnp=spec.registry.tnp,
        fstar=spec.registry.fstar,
        max_gap=float(np.max(np.abs(values - spec.registry.fstar))),
        max_climb=float(hill_climb(spec).max()),
        value_tol=value_tol,
        climb_tol=climb_tol,
    )


def _cells(spec: BenchmarkSpec, per_gap: int) -> tuple[int, ...]:
    # per-dimension spacing so adjacent peak coordinates are per_gap cells apart
    cells = []
    for d in range(spec.problem.dim):
        coords = np.unique(spec.registry.peaks[:, d])
        gap = np.diff(coords).min() if len(coords) > 1 else spec.problem.width[d]
        cells.append(int(np.ceil(per_gap * spec.problem.width[d] / gap)) + 1)
    return tuple(cells)


def grid_oracle(spec: BenchmarkSpec, per_gap: int = 20, tol: float = REGION_TOL) -> GridOracle:
    """Count near-optimal regions without looking at peak locations.

    The box is sampled on a regular grid (the peak table only sets the
    resolution).  Every discrete local maximum of the grid is polished by a
    bounded local ascent, coarsely first and then finely for the ones that
    came close to the best value.  Polished points within ``tol`` of the best
    value found are near-optimal, and those closer than two grid cells are
    one region.
    """
    problem = spec.problem
    cells = _cells(spec, per_gap)
    axes = [np.linspace(lo, hi, c) for lo, hi, c in zip(problem.lower, problem.upper, cells)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, problem.dim)
    values = problem.evaluate(mesh).reshape(cells)
    peaks = values == maximum_filter(values, size=3, mode="nearest")
    step = np.array([a[1] - a[0] for a in axes])

    polished, best = [], []
    for idx in np.argwhere(peaks):
        x, f = _polish(problem, [a[i] for a, i in zip(axes, idx)], 0.5 * step.min(), xatol=1e-8, fatol=1e-10)
        polished.append(x)
        best.append(f)
    polished = np.array(polished)
    best = np.array(best)
    close = np.flatnonzero(best >= best.max() - max(1e-4, 100 * tol))
    for i in close:
        polished[i], best[i] = _polish(problem, polished[i], 1e-6)
    fstar = float(best.max())
    keep = fstar - best <= tol
    regions, region_values = [], []
    for x, f in zip(polished[keep], best[keep]):
        if all(np.any(np.abs(x - r) > 2 * step) for r in regions):
            regions.append(x)
            region_values.append(f)
    return GridOracle(spec.id, cells, np.array(regions), np.array(region_values), fstar)


def nearest_match(regions: np.ndarray, peaks: np.ndarray) -> float:
    """Largest distance from a region to its nearest registered peak."""
    return max(min(np.linalg.norm(r - p) for p in peaks) for r in regions) if len(regions) else np.inf
