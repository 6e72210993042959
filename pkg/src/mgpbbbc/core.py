"""Domain types shared by every stage of the optimizer.

Populations are stored column-wise (an ``(N, D)`` position matrix plus an
``(N,)`` fitness vector) so the operators can stay vectorised; ``Individual``
is the row view handed out when a single member is inspected.

All problems are maximised.  Minimisation objectives are wrapped with
:meth:`Problem.negated` at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "BandwidthStrategy",
    "BudgetExceeded",
    "ConfigError",
    "Evaluator",
    "Individual",
    "Population",
    "Problem",
    "RunConfig",
    "evaluate_population",
    "make_rng",
    "random_init",
]

DEFAULT_ACCURACY_LEVELS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


class ConfigError(ValueError):
    """Invalid run, experiment or problem configuration."""


class BudgetExceeded(RuntimeError):
    """Raised when an evaluation batch would pass the function-evaluation budget."""


@dataclass
class Individual:
    x: np.ndarray
    fit: float = float("nan")
    tag: bool = False


@dataclass(frozen=True)
class Problem:
    """Box-bounded maximisation problem.

    Parameters
    ----------
    lower, upper : array_like
        Per-dimension bounds, ``lower[i] < upper[i]``.
    func : callable
        Objective.  With ``vectorized=True`` it maps an ``(N, D)`` array to
        ``(N,)`` values, otherwise it maps one ``(D,)`` vector to a float.
    name : str
        Label used in reports.
    """

    lower: np.ndarray
    upper: np.ndarray
    func: Callable[[np.ndarray], np.ndarray | float]
    name: str = "problem"
    vectorized: bool = True

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigError("lower and upper must be 1-D and of equal length")
        if not np.all(lower < upper):
            raise ConfigError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def evaluate(self, x) -> np.ndarray:
        """Objective values for a batch ``(N, D)`` or a single ``(D,)`` point."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        xs = np.atleast_2d(x)
        if xs.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {xs.shape[1]}")
        if self.vectorized:
            values = np.asarray(self.func(xs), dtype=float).reshape(-1)
        else:
            values = np.fromiter((self.func(row) for row in xs), dtype=float, count=len(xs))
        return values[0] if single else values

    def negated(self, name: str | None = None) -> "Problem":
        """Maximisation view of a minimisation objective."""
        inner = self.evaluate
        return Problem(self.lower, self.upper, lambda xs: -inner(xs), name or self.name)

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))


@dataclass
class Population:
    """Positions ``x`` with shape ``(N, D)`` and fitness ``fit`` with shape ``(N,)``.

    Unevaluated members carry NaN fitness.
    """

    x: np.ndarray
    fit: np.ndarray = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.ndim != 2:
            raise ValueError("population positions must be a 2-D array")
        if self.fit is None:
            self.fit = np.full(len(self.x), np.nan)
        else:
            self.fit = np.asarray(self.fit, dtype=float).reshape(-1)
        if self.fit.shape[0] != self.x.shape[0]:
            raise ValueError("fitness length does not match the number of positions")

    @classmethod
    def empty(cls, dim: int) -> "Population":
        return cls(np.empty((0, dim)), np.empty(0))

    @classmethod
    def from_individuals(cls, members, dim: int | None = None) -> "Population":
        members = list(members)
        if not members:
            if dim is None:
                raise ValueError("dim is required for an empty population")
            return cls.empty(dim)
        return cls(np.array([m.x for m in members], dtype=float), np.array([m.fit for m in members]))

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.x[i].copy(), float(self.fit[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def evaluated(self) -> bool:
        return not np.isnan(self.fit).any()

    def take(self, idx) -> "Population":
        idx = np.asarray(idx)
        return Population(self.x[idx], self.fit[idx])

    def concat(self, other: "Population") -> "Population":
        return Population(np.vstack([self.x, other.x]), np.concatenate([self.fit, other.fit]))

    def copy(self) -> "Population":
        return Population(self.x.copy(), self.fit.copy())

    def same_as(self, other: "Population") -> bool:
        """Bitwise equality of positions and fitness (NaNs compare equal)."""
        return (
            self.x.shape == other.x.shape
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.fit, other.fit, equal_nan=True)
        )


def make_rng(seed: int) -> np.random.Generator:
    """Root random stream of one run."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def random_init(n: int, problem: Problem, rng: np.random.Generator) -> Population:
    """``n`` points drawn uniformly in the box; fitness left unevaluated."""
    u = rng.random((n, problem.dim))
    return Population(problem.lower + u * problem.width)


class Evaluator:
    """Objective wrapper that counts function evaluations against a budget."""

    def __init__(self, problem: Problem, max_fes: int | None = None):
        self.problem = problem
        self.max_fes = max_fes
        self.count = 0

    def __call__(self, pop: Population) -> Population:
        if len(pop) == 0:
            return pop
        if self.max_fes is not None and self.count + len(pop) > self.max_fes:
            raise BudgetExceeded(f"{self.count} + {len(pop)} evaluations would exceed {self.max_fes}")
        pop.fit = self.problem.evaluate(pop.x)
        self.count += len(pop)
        return pop

    @property
    def remaining(self) -> float:
        return math.inf if self.max_fes is None else self.max_fes - self.count


def evaluate_population(pop: Population, problem: Problem | Evaluator) -> Population:
    """Set fitness of every member; counts evaluations when given an :class:`Evaluator`."""
    evaluator = problem if isinstance(problem, Evaluator) else Evaluator(problem)
    return evaluator(pop)


@dataclass(frozen=True)
class BandwidthStrategy:
    """How the clustering bandwidth ``h`` is obtained.

    ``fixed``  -- ``value`` is ``h`` itself.
    ``volume`` -- ``value`` is the search-space to kernel-ball volume ratio.
    ``spread`` -- ``value`` divides the widest pairwise distance of the
    archive, recomputed every generation.
    """

    kind: str
    value: float

    KINDS = ("fixed", "volume", "spread")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown bandwidth strategy {self.kind!r}")
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ConfigError(f"bandwidth parameter must be positive, got {self.value}")

    @classmethod
    def parse(cls, text: str) -> "BandwidthStrategy":
        """Parse ``"0.2"``, ``"vol:200"`` or ``"spread:10"``."""
        text = str(text).strip()
        prefix, sep, rest = text.partition(":")
        try:
            if not sep:
                return cls("fixed", float(text))
            kind = {"vol": "volume", "volume": "volume", "spread": "spread", "fixed": "fixed"}.get(prefix)
            if kind is None:
                raise ConfigError(f"unknown bandwidth prefix {prefix!r}")
            return cls(kind, float(rest))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse bandwidth {text!r}") from exc

    def __str__(self) -> str:
        prefix = {"fixed": "", "volume": "vol:", "spread": "spread:"}[self.kind]
        return f"{prefix}{self.value:g}"


@dataclass(frozen=True)
class RunConfig:
    """Tunables of one seeded run.

    Exactly one of ``generations`` and ``max_fes`` is given; with a budget the
    generation count is ``max_fes // n`` since every generation evaluates
    ``n`` individuals.
    """

    n: int
    bandwidth: BandwidthStrategy
    generations: int | None = None
    max_fes: int | None = None
    accuracy: tuple[float, ...] = DEFAULT_ACCURACY_LEVELS
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.bandwidth, (int, float, str)):
            object.__setattr__(self, "bandwidth", BandwidthStrategy.parse(str(self.bandwidth)))
        object.__setattr__(self, "accuracy", tuple(float(a) for a in self.accuracy))
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"population size must be an integer >= 2, got {self.n}")
        if (self.generations is None) == (self.max_fes is None):
            raise ConfigError("give exactly one of generations and max_fes")
        if self.generations is not None and self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if self.max_fes is not None and self.max_fes < self.n:
            raise ConfigError(f"max_fes={self.max_fes} cannot cover one population of {self.n}")
        if not self.accuracy or any(not (a > 0) for a in self.accuracy):
            raise ConfigError("accuracy levels must be positive")

    @property
    def g(self) -> int:
        if self.generations is not None:
            return int(self.generations)
        return int(self.max_fes // self.n)

    @property
    def budget(self) -> int:
        return self.max_fes if self.max_fes is not None else self.g * self.n
