"""Environmental selection: distance filtering followed by mu+lambda truncation."""

from __future__ import annotations

import numpy as np
from numba import njit

from .core import Population

__all__ = ["PAIR_DTYPE", "pairwise_distances", "filter_population", "filter_mask", "survival"]

PAIR_DTYPE = np.dtype([("dist", np.float64), ("ind1", np.int64), ("ind2", np.int64)])

DECAY = 0.9
MAX_DECAY_PASSES = 200
FLOOR_FACTOR = 1e-12


@njit(cache=True)
def _pairs(x, limit):
    n, d = x.shape
    cap = n * (n - 1) // 2
    dist = np.empty(cap)
    ind1 = np.empty(cap, dtype=np.int64)
    ind2 = np.empty(cap, dtype=np.int64)
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                s += diff * diff
            r = np.sqrt(s)
            if r < limit:
                dist[m] = r
                ind1[m] = i
                ind2[m] = j
                m += 1
    return dist[:m], ind1[:m], ind2[:m]


def _as_table(dist, ind1, ind2):
    out = np.empty(len(dist), dtype=PAIR_DTYPE)
    out["dist"] = dist
    out["ind1"] = ind1
    out["ind2"] = ind2
    return out


def pairwise_distances(pop: Population | np.ndarray, below: float = np.inf) -> np.ndarray:
    """Euclidean separation of every unordered pair, as a structured array.

    Records are ordered ``(0,1), (0,2), ..., (0,N-1), (1,2), ...`` and carry
    the fields ``dist``, ``ind1`` and ``ind2`` with ``ind1 < ind2``.  With
    ``below`` only pairs closer than that are kept, order unchanged.
    """
    x = pop.x if isinstance(pop, Population) else np.asarray(pop, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return _as_table(*_pairs(np.ascontiguousarray(x, dtype=np.float64), float(below)))


@njit(cache=True)
def _scan(dist, ind1, ind2, fit, th, tag):
    for k in range(dist.shape[0]):
        if dist[k] < th:
            i = ind1[k]
            j = ind2[k]
            if not tag[i] and not tag[j]:
                if fit[i] >= fit[j]:
                    tag[j] = True
                else:
                    tag[i] = True


def filter_mask(fit: np.ndarray, pairs: np.ndarray, th: float) -> np.ndarray:
    """Boolean survivor mask of the sequential tagging scan."""
    tag = np.zeros(len(fit), dtype=np.bool_)
    if len(pairs):
        _scan(
            np.ascontiguousarray(pairs["dist"]),
            np.ascontiguousarray(pairs["ind1"]),
            np.ascontiguousarray(pairs["ind2"]),
            np.ascontiguousarray(fit, dtype=np.float64),
            float(th),
            tag,
        )
    return ~tag


def filter_population(pop: Population, pairs: np.ndarray, th: float) -> Population:
    """Drop the worse member of every close pair, scanning ``pairs`` in order.

    A pair closer than ``th`` whose members are both still untagged tags the
    lower-fitness one (the second index on ties).  Survivors keep their
    original order.
    """
    return pop.take(np.flatnonzero(filter_mask(pop.fit, pairs, th)))


def survival(
    offspring: Population,
    archive: Population,
    th: float,
    n: int | None = None,
    rng: np.random.Generator | None = None,
    th_floor: float | None = None,
) -> tuple[Population, float]:
    """Merge offspring into the elite archive.

    Both populations are filtered separately at threshold ``th``; while their
    union holds fewer than ``n`` members the threshold shrinks by 10 % and the
    original populations are filtered again.  The union is then sorted by
    fitness (descending, stable) and cut to ``n``.

    If the threshold falls below ``th_floor`` (default ``1e-12 * th``) or
    200 shrink passes elapse, the shortfall is topped up with distinct members
    of the unfiltered archive drawn at random, then of the unfiltered
    offspring.

    Returns
    -------
    archive : Population
    th : float
        Threshold after decay, never above the input value.
    """
    if n is None:
        n = len(offspring)
    if len(archive) == 0:
        return offspring, th
    if th_floor is None:
        th_floor = FLOOR_FACTOR * th

    # records at or beyond th can never trigger again once th only shrinks
    pairs_a = pairwise_distances(archive, below=th)
    pairs_o = pairwise_distances(offspring, below=th)

    passes = 0
    while True:
        keep_a = filter_mask(archive.fit, pairs_a, th)
        keep_o = filter_mask(offspring.fit, pairs_o, th)
        size = int(keep_a.sum() + keep_o.sum())
        if size >= n:
            break
        th *= DECAY
        passes += 1
        if th < th_floor or passes >= MAX_DECAY_PASSES:
            keep_a, keep_o = _random_fill(keep_a, keep_o, n - size, rng)
            break
        pairs_a = pairs_a[pairs_a["dist"] < th]
        pairs_o = pairs_o[pairs_o["dist"] < th]

    union = offspring.take(np.flatnonzero(keep_o)).concat(archive.take(np.flatnonzero(keep_a)))
    order = np.argsort(-union.fit, kind="stable")[:n]
    return union.take(order), th


def _random_fill(keep_a, keep_o, missing, rng):
    if rng is None:
        rng = np.random.default_rng(0)
    keep_a = keep_a.copy()
    keep_o = keep_o.copy()
    for keep in (keep_a, keep_o):
        if missing <= 0:
            break
        pool = np.flatnonzero(~keep)
        take = min(missing, len(pool))
        if take:
            keep[rng.choice(pool, size=take, replace=False)] = True
            missing -= take
    return keep_a, keep_o
