"""Analytic niching benchmarks F1-F10 with their global-peak registries.

The objective definitions follow the CEC'2013 niching competition suite
(all maximised).  Bounds, budgets, niche radii and the tuned population
size / bandwidth of every function live in ``data/benchmarks.json``.

Problems outside the suite are plugged in through :func:`register_custom`
or loaded from a JSON description with :func:`load_custom`.
"""

from __future__ import annotations

import importlib
import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar, root

from .core import BandwidthStrategy, ConfigError, Problem

__all__ = [
    "BUILTIN_IDS",
    "EVALUATORS",
    "BenchmarkSpec",
    "PeakRegistry",
    "benchmark_table",
    "get_benchmark",
    "load_custom",
    "make_benchmark",
    "register_custom",
    "register_evaluator",
]

BUILTIN_IDS = tuple(f"F{i}" for i in range(1, 11))
REGISTRY_TOL = 1e-6

EVALUATORS: dict[str, Callable] = {}


def register_evaluator(name: str, vectorized: bool = True):
    """Decorator making an objective addressable from a custom-problem file."""

    def wrap(func):
        func.vectorized = vectorized
        EVALUATORS[name] = func
        return func

    return wrap


# ---------------------------------------------------------------------------
# objectives, all taking an (N, D) array
# ---------------------------------------------------------------------------


@register_evaluator("five_uneven_peak_trap")
def five_uneven_peak_trap(x):
    x = x[:, 0]
    conds = [x < 2.5, x < 5.0, x < 7.5, x < 12.5, x < 17.5, x < 22.5, x < 27.5]
    vals = [
        80.0 * (2.5 - x),
        64.0 * (x - 2.5),
        64.0 * (7.5 - x),
        28.0 * (x - 7.5),
        28.0 * (17.5 - x),
        32.0 * (x - 17.5),
        32.0 * (27.5 - x),
    ]
    return np.select(conds, vals, default=80.0 * (x - 27.5))


@register_evaluator("equal_maxima")
def equal_maxima(x):
    return np.sin(5.0 * np.pi * x[:, 0]) ** 6


@register_evaluator("uneven_decreasing_maxima")
def uneven_decreasing_maxima(x):
    x = x[:, 0]
    envelope = np.exp(-2.0 * np.log(2.0) * ((x - 0.08) / 0.854) ** 2)
    return envelope * np.sin(5.0 * np.pi * (np.abs(x) ** 0.75 - 0.05)) ** 6


@register_evaluator("himmelblau")
def himmelblau(x):
    a, b = x[:, 0], x[:, 1]
    return 200.0 - (a**2 + b - 11.0) ** 2 - (a + b**2 - 7.0) ** 2


@register_evaluator("six_hump_camel_back")
def six_hump_camel_back(x):
    a, b = x[:, 0], x[:, 1]
    a2 = a * a
    b2 = b * b
    return -((4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (4.0 * b2 - 4.0) * b2)


def _shubert_factor(t):
    j = np.arange(1, 6)
    return (j * np.cos(np.multiply.outer(t, j + 1) + j)).sum(axis=-1)


@register_evaluator("shubert")
def shubert(x):
    return -np.prod(_shubert_factor(x), axis=1)


@register_evaluator("vincent")
def vincent(x):
    return np.sin(10.0 * np.log(x)).mean(axis=1)


@register_evaluator("modified_rastrigin")
def modified_rastrigin(x):
    k = np.array([3.0, 4.0])[: x.shape[1]]
    return -(10.0 + 9.0 * np.cos(2.0 * np.pi * k * x)).sum(axis=1)


_OBJECTIVES = {
    "F1": five_uneven_peak_trap,
    "F2": equal_maxima,
    "F3": uneven_decreasing_maxima,
    "F4": himmelblau,
    "F5": six_hump_camel_back,
    "F6": shubert,
    "F7": vincent,
    "F8": shubert,
    "F9": vincent,
    "F10": modified_rastrigin,
}


# ---------------------------------------------------------------------------
# peak generators
# ---------------------------------------------------------------------------


def _peaks_f1():
    return np.array([[0.0], [30.0]])


def _peaks_f2():
    return np.array([[0.1], [0.3], [0.5], [0.7], [0.9]])


def _peaks_f3():
    res = minimize_scalar(
        lambda t: -uneven_decreasing_maxima(np.array([[t]]))[0],
        bounds=(0.05, 0.11),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return np.array([[res.x]])


def _peaks_f4():
    # both squared residuals vanish at every optimum
    def residual(p):
        a, b = p
        return [a * a + b - 11.0, a + b * b - 7.0]

    def jac(p):
        a, b = p
        return [[2.0 * a, 1.0], [1.0, 2.0 * b]]

    seeds = [(3.0, 2.0), (-2.8051, 3.1313), (-3.7793, -3.2832), (3.5844, -1.8481)]
    return np.array([root(residual, s, jac=jac, tol=1e-15).x for s in seeds])


def _peaks_f5():
    def grad(p):
        a, b = p
        return [-(8.0 * a - 8.4 * a**3 + 2.0 * a**5 + b), -(a + 16.0 * b**3 - 8.0 * b)]

    def hess(p):
        a, b = p
        return [[-(8.0 - 25.2 * a**2 + 10.0 * a**4), -1.0], [-1.0, -(48.0 * b**2 - 8.0)]]

    seeds = [(0.0898, -0.7127), (-0.0898, 0.7127)]
    return np.array([root(grad, s, jac=hess, tol=1e-15).x for s in seeds])


@lru_cache(maxsize=1)
def _shubert_extrema(lo=-10.0, hi=10.0):
    """Abscissae in ``[lo, hi]`` of the global minima and maxima of the 1-D factor."""
    j = np.arange(1, 6)

    def deriv(t):
        return float(-(j * (j + 1) * np.sin((j + 1) * t + j)).sum())

    grid = np.linspace(lo, hi, 20001)
    d = np.array([deriv(t) for t in grid])
    roots = [brentq(deriv, grid[k], grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
             for k in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)]
    roots = np.array(roots)
    vals = _shubert_factor(roots)
    lows = np.sort(roots[vals < vals.min() + 1e-9])
    highs = np.sort(roots[vals > vals.max() - 1e-9])
    return lows, highs


def _peaks_shubert(dim):
    # -prod(s_i) is maximal with exactly one factor at its minimum, the rest at their maximum
    lows, highs = _shubert_extrema()
    peaks = []
    for neg in range(dim):
        choices = [lows if i == neg else highs for i in range(dim)]
        peaks.extend(itertools.product(*choices))
    return np.array(sorted(peaks))


def _peaks_vincent(dim, lo=0.25, hi=10.0):
    k = np.arange(-10, 11)
    coords = np.exp((np.pi / 2 + 2.0 * np.pi * k) / 10.0)
    coords = coords[(coords >= lo) & (coords <= hi)]
    return np.array(list(itertools.product(coords, repeat=dim)))


def _peaks_f10():
    xs = [(2 * m + 1) / 6.0 for m in range(3)]
    ys = [(2 * m + 1) / 8.0 for m in range(4)]
    return np.array(list(itertools.product(xs, ys)))


_PEAKS = {
    "F1": _peaks_f1,
    "F2": _peaks_f2,
    "F3": _peaks_f3,
    "F4": _peaks_f4,
    "F5": _peaks_f5,
    "F6": lambda: _peaks_shubert(2),
    "F7": lambda: _peaks_vincent(2),
    "F8": lambda: _peaks_shubert(3),
    "F9": lambda: _peaks_vincent(3),
    "F10": _peaks_f10,
}


# ---------------------------------------------------------------------------
# registry and spec
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeakRegistry:
    """Known global peaks: optimum value, locations and the niche radius used for counting."""

    fstar: float
    peaks: np.ndarray
    radius: float

    def __post_init__(self):
        peaks = np.asarray(self.peaks, dtype=float)
        if peaks.ndim == 1:
            peaks = peaks[:, None]
        object.__setattr__(self, "peaks", peaks)
        if not self.radius > 0:
            raise ConfigError(f"niche radius must be positive, got {self.radius}")

    @property
    def tnp(self) -> int:
        return len(self.peaks)


@dataclass(frozen=True)
class BenchmarkSpec:
    id: str
    problem: Problem
    registry: PeakRegistry
    max_fes: int
    default_n: int = 100
    default_h: float = 0.1
    name: str = ""

    @property
    def default_bandwidth(self) -> BandwidthStrategy:
        return BandwidthStrategy("fixed", self.default_h)


@lru_cache(maxsize=1)
def benchmark_table() -> dict:
    """Parsed contents of the shipped data file."""
    text = resources.files("mgpbbbc").joinpath("data/benchmarks.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def make_benchmark(fid: str) -> BenchmarkSpec:
    """Built-in benchmark ``F1`` ... ``F10``."""
    key = str(fid).upper()
    table = benchmark_table()["functions"]
    if key not in table:
        raise ConfigError(f"unknown benchmark {fid!r}; built-ins are {', '.join(BUILTIN_IDS)}")
    row = table[key]
    problem = Problem(row["lower"], row["upper"], _OBJECTIVES[key], name=key)
    peaks = _PEAKS[key]()
    # optimum value taken from the registered peaks so the registry is self-consistent
    fstar = float(problem.evaluate(peaks).max())
    registry = PeakRegistry(fstar=fstar, peaks=peaks, radius=row["radius"])
    if registry.tnp != row["tnp"]:
        raise RuntimeError(f"{key}: generated {registry.tnp} peaks, expected {row['tnp']}")
    return BenchmarkSpec(
        id=key,
        problem=problem,
        registry=registry,
        max_fes=int(row["max_fes"]),
        default_n=int(row["pop"]),
        default_h=float(row["bandwidth"]),
        name=row["name"],
    )


def register_custom(
    problem: Problem,
    registry: PeakRegistry,
    max_fes: int,
    default_n: int = 100,
    default_h: float = 0.1,
    id: str | None = None,
    name: str = "",
    tol: float = REGISTRY_TOL,
) -> BenchmarkSpec:
    """Validate a user problem and its peak table and wrap them as a benchmark.

    Raises
    ------
    ConfigError
        Empty peak table, wrong dimension, a peak outside the box, or a peak
        whose value is ``tol`` or more away from ``registry.fstar``.
    """
    peaks = registry.peaks
    if registry.tnp == 0:
        raise ConfigError("peak registry is empty")
    if peaks.shape[1] != problem.dim:
        raise ConfigError(f"peaks have {peaks.shape[1]} coordinates, problem has {problem.dim}")
    for p, peak in enumerate(peaks):
        for d, v in enumerate(peak):
            if not problem.lower[d] <= v <= problem.upper[d]:
                raise ConfigError(
                    f"peak {p} coordinate {d} = {v!r} outside [{problem.lower[d]!r}, {problem.upper[d]!r}]"
                )
    values = problem.evaluate(peaks)
    gaps = np.abs(values - registry.fstar)
    if not np.all(gaps < tol):
        p = int(np.argmax(gaps))
        raise ConfigError(f"peak {p} evaluates to {values[p]!r}, {gaps[p]:.3g} away from fstar={registry.fstar!r}")
    if int(max_fes) < 1:
        raise ConfigError("max_fes must be positive")
    return BenchmarkSpec(
        id=id or problem.name,
        problem=problem,
        registry=registry,
        max_fes=int(max_fes),
        default_n=int(default_n),
        default_h=float(default_h),
        name=name or problem.name,
    )


def _resolve_evaluator(ref: str) -> Callable:
    if ref in EVALUATORS:
        return EVALUATORS[ref]
    module, sep, attr = ref.partition(":")
    if not sep:
        raise ConfigError(f"evaluator {ref!r} is neither registered nor of the form 'module:function'")
    try:
        return getattr(importlib.import_module(module), attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigError(f"cannot import evaluator {ref!r}: {exc}") from exc


def load_custom(path: str | Path) -> BenchmarkSpec:
    """Build a benchmark from a JSON description.

    Required keys: ``lower``, ``upper``, ``max_fes``, ``fstar``, ``radius``,
    ``peaks`` and ``evaluator`` (a name given to :func:`register_evaluator`
    or an importable ``"module:function"``).  Optional: ``name``,
    ``vectorized`` (default: the evaluator's own flag, else True),
    ``minimize`` (negate the objective), ``pop`` and ``bandwidth``.
    """
    path = Path(path)
    try:
        desc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    missing = [k for k in ("lower", "upper", "max_fes", "fstar", "radius", "peaks", "evaluator") if k not in desc]
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")
    func = _resolve_evaluator(desc["evaluator"])
    vectorized = bool(desc.get("vectorized", getattr(func, "vectorized", True)))
    name = desc.get("name", path.stem)
    problem = Problem(desc["lower"], desc["upper"], func, name=name, vectorized=vectorized)
    fstar = float(desc["fstar"])
    if desc.get("minimize", False):
        problem = problem.negated()
        fstar = -fstar
    registry = PeakRegistry(fstar, np.asarray(desc["peaks"], dtype=float), float(desc["radius"]))
    return register_custom(
        problem,
        registry,
        int(desc["max_fes"]),
        default_n=int(desc.get("pop", 100)),
        default_h=float(desc.get("bandwidth", 0.1)),
        id=name,
        name=name,
    )


def get_benchmark(ref: str) -> BenchmarkSpec:
    """Built-in id (``F7``) or path to a custom-problem JSON file."""
    if str(ref).upper() in BUILTIN_IDS:
        return make_benchmark(str(ref).upper())
    path = Path(ref)
    if path.suffix.lower() == ".json" or path.exists():
        if not path.exists():
            raise FileNotFoundError(f"custom problem file {path} not found")
        return load_custom(path)
    raise ConfigError(f"unknown problem {ref!r}")
