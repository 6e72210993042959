"""The generational loop: bang, evaluate, survive, crunch."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .benchmarks import BenchmarkSpec
from .core import BudgetExceeded, Evaluator, Population, Problem, RunConfig, make_rng, random_init
from .crunchbang import (
    ExtentSchedule,
    bandwidth_from_spread,
    bandwidth_from_volume_ratio,
    big_bang,
    big_crunch,
)
from .survival import FLOOR_FACTOR, survival

__all__ = ["GenerationInfo", "RunOutcome", "initial_bandwidth", "run"]


@dataclass(frozen=True)
class GenerationInfo:
    """Snapshot passed to the per-generation observer."""

    it: int
    n_offspring: int
    archive_size: int
    th: float
    h: float
    extent: np.ndarray | None
    n_centers: int
    opc: np.ndarray | None
    fes: int


@dataclass
class RunOutcome:
    archive: Population
    fes: int
    generations: int
    th: float
    h: float


def initial_bandwidth(config: RunConfig, problem: Problem, first: Population) -> float:
    strategy = config.bandwidth
    if strategy.kind == "fixed":
        return strategy.value
    if strategy.kind == "volume":
        return bandwidth_from_volume_ratio(problem, strategy.value)
    return bandwidth_from_spread(first.x, strategy.value, problem=problem)


def run(
    config: RunConfig,
    spec: BenchmarkSpec | Problem,
    rng: np.random.Generator | None = None,
    observer: Callable[[GenerationInfo], None] | None = None,
) -> RunOutcome:
    """One seeded optimisation run; returns the final elite archive.

    Random draws happen in a fixed order (initial sampling, then per
    generation: bang disturbances, survival top-up, offspring quotas) so a
    seed reproduces the archive bit for bit.
    """
    problem = spec.problem if isinstance(spec, BenchmarkSpec) else spec
    if rng is None:
        rng = make_rng(config.seed)
    n, g = config.n, config.g
    evaluator = Evaluator(problem, config.budget)
    schedule = ExtentSchedule.for_problem(g, problem)

    offspring = random_init(n, problem, rng)
    archive = Population.empty(problem.dim)
    h = initial_bandwidth(config, problem, offspring)
    th = h
    th_floor = FLOOR_FACTOR * h
    centers, opc = None, None
    done = 0
    for it in range(1, g + 1):
        extent = None
        if it != 1:
            extent = schedule(it)
            offspring = big_bang(centers, it, g, opc, problem, rng, schedule=schedule)
        try:
            evaluator(offspring)
        except BudgetExceeded:
            break
        archive, th = survival(offspring, archive, th, n, rng=rng, th_floor=th_floor)
        done = it
        if config.bandwidth.kind == "spread":
            h = bandwidth_from_spread(archive.x, config.bandwidth.value, previous=h, problem=problem)
        if it < g:
            # the final crunch would only feed a bang that never happens
            centers, opc = big_crunch(archive, h, rng)
        if observer is not None:
            observer(
                GenerationInfo(
                    it=it,
                    n_offspring=len(offspring),
                    archive_size=len(archive),
                    th=th,
                    h=h,
                    extent=extent,
                    n_centers=0 if centers is None else len(centers),
                    opc=None if opc is None or it == g else opc.copy(),
                    fes=evaluator.count,
                )
            )
    return RunOutcome(archive=archive, fes=evaluator.count, generations=done, th=th, h=h)
