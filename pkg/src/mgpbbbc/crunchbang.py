"""Big crunch (centres of mass and offspring quotas), big bang, and bandwidths."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist
from scipy.special import gammaln

from .clustering import mean_shift
from .core import Population, Problem

__all__ = [
    "EXPLOITATION_LEVELS",
    "CenterOfMass",
    "ExtentSchedule",
    "bandwidth_from_spread",
    "bandwidth_from_volume_ratio",
    "big_bang",
    "big_crunch",
    "get_extent",
    "offspring_per_com",
    "round_half_away",
]

EXPLORATION_SHARE = 0.6
EXPLORATION_END = 1e-1
EXPLOITATION_LEVELS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
SPREAD_FALLBACK_RATIO = 2000.0


@dataclass
class CenterOfMass:
    x: np.ndarray
    fit: float
    niche_count: int


def round_half_away(v: float) -> int:
    return int(math.floor(abs(v) + 0.5)) * (1 if v >= 0 else -1)


@dataclass(frozen=True)
class ExtentSchedule:
    """Bang extent over ``g`` generations.

    Up to 60 % of the run the per-dimension extent falls logarithmically from
    a quarter of the box width to ``0.1``; the remaining generations step
    through the absolute levels ``1e-1 ... 1e-5`` in five near-equal plateaus.
    """

    g: int
    start: np.ndarray

    @classmethod
    def for_problem(cls, g: int, problem: Problem) -> "ExtentSchedule":
        return cls(int(g), problem.width / 4.0)

    @property
    def boundary(self) -> float:
        return EXPLORATION_SHARE * self.g

    @property
    def plateau(self) -> int:
        return max(1, math.floor((1.0 - EXPLORATION_SHARE) * self.g / len(EXPLOITATION_LEVELS)))

    def __call__(self, it: int) -> np.ndarray:
        if not 1 <= it <= self.g:
            raise ValueError(f"generation {it} outside 1..{self.g}")
        e1 = np.asarray(self.start, dtype=float)
        if it < self.boundary:
            slope = (e1 - EXPLORATION_END) / math.log(self.boundary)
            # non-integer 0.6*g lets the last exploration step undershoot 0.1
            return np.maximum(e1 - slope * math.log(it + 1), EXPLORATION_END)
        k = min(len(EXPLOITATION_LEVELS), 1 + (it - math.ceil(self.boundary)) // self.plateau)
        return np.full(e1.shape, EXPLOITATION_LEVELS[k - 1])


def get_extent(it: int, g: int, problem: Problem) -> np.ndarray:
    return ExtentSchedule.for_problem(g, problem)(it)


def offspring_per_com(n: int, niche_counts, rng: np.random.Generator) -> np.ndarray:
    """Offspring quota of every centre of mass, summing to ``n``.

    Every centre starts at the rounded mean niche count.  A shortfall is
    handed out one by one to random centres whose niche count is at most the
    floored mean; an excess is taken back from random centres whose niche
    count is at least the floored mean.  Each eligibility search gives up
    after ``10 * len(niche_counts)`` draws and then accepts any centre.
    Quotas never drop below zero.
    """
    nc = np.asarray(niche_counts, dtype=np.int64)
    k = len(nc)
    if k == 0:
        raise ValueError("need at least one niche count")
    avg = float(nc.mean())
    floor_avg = math.floor(avg)
    opc = np.full(k, round_half_away(avg), dtype=np.int64)
    cap = 10 * k
    diff = n - int(opc.sum())
    if diff > 0:
        for _ in range(diff):
            j = _draw(rng, k, cap, lambda j: nc[j] <= floor_avg)
            if j < 0:
                j = int(rng.integers(k))
            opc[j] += 1
    elif diff < 0:
        for _ in range(-diff):
            j = _draw(rng, k, cap, lambda j: nc[j] >= floor_avg and opc[j] > 0)
            if j < 0:
                j = int(rng.choice(np.flatnonzero(opc > 0)))
            opc[j] -= 1
    return opc


def _draw(rng, k, cap, ok):
    for _ in range(cap):
        j = int(rng.integers(k))
        if ok(j):
            return j
    return -1


def big_crunch(
    archive: Population, h: float, rng: np.random.Generator
) -> tuple[list[CenterOfMass], np.ndarray]:
    """Best member of every mean-shift cluster, plus offspring quotas."""
    clusters = mean_shift(archive.x, h)
    centers = []
    for c in range(len(clusters)):
        members = clusters.members(c)
        # argmax keeps the first maximum, matching a strict-improvement scan
        best = members[int(np.argmax(archive.fit[members]))]
        centers.append(CenterOfMass(archive.x[best].copy(), float(archive.fit[best]), int(clusters.sizes[c])))
    opc = offspring_per_com(len(archive), clusters.sizes, rng)
    return centers, opc


def big_bang(
    centers: list[CenterOfMass],
    it: int,
    g: int,
    opc,
    problem: Problem,
    rng: np.random.Generator,
    schedule: ExtentSchedule | None = None,
) -> Population:
    """Scatter ``opc[i]`` offspring uniformly within the current extent of centre ``i``.

    Disturbances are drawn per dimension in (centre, offspring, dimension)
    order and the result is clipped to the box.
    """
    opc = np.asarray(opc, dtype=np.int64)
    if len(centers) != len(opc):
        raise ValueError("one quota per centre of mass is required")
    if schedule is None:
        schedule = ExtentSchedule.for_problem(g, problem)
    extent = schedule(it)
    total = int(opc.sum())
    if total == 0:
        return Population.empty(problem.dim)
    origin = np.repeat(np.array([c.x for c in centers]), opc, axis=0)
    x = origin + extent * rng.uniform(-1.0, 1.0, size=(total, problem.dim))
    np.clip(x, problem.lower, problem.upper, out=x)
    return Population(x)


def bandwidth_from_volume_ratio(problem: Problem, ratio: float) -> float:
    """Radius of the ball whose volume is ``1/ratio`` of the search box."""
    if not ratio > 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    d = problem.dim
    log_h = (gammaln(d / 2 + 1) + np.log(problem.width).sum() - (d / 2) * math.log(math.pi) - math.log(ratio)) / d
    return float(math.exp(log_h))


def bandwidth_from_spread(x, ratio: float, previous: float | None = None, problem: Problem | None = None) -> float:
    """Widest pairwise distance of ``x`` divided by ``ratio``.

    A degenerate population (all points equal) reuses ``previous``; without
    one, it falls back to the volume-ratio bandwidth at ratio 2000.
    """
    if not ratio > 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    x = x.x if isinstance(x, Population) else np.asarray(x, dtype=float)
    spread = float(pdist(x).max()) if len(x) >= 2 else 0.0
    if spread > 0:
        return spread / ratio
    if previous is not None and previous > 0:
        return float(previous)
    if problem is None:
        raise ValueError("degenerate population and no fallback bandwidth available")
    return bandwidth_from_volume_ratio(problem, SPREAD_FALLBACK_RATIO)
