"""Flat-kernel mean-shift clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = ["ClusterSet", "mean_shift", "shift_points", "merge_modes"]

TOL_FACTOR = 1e-3
MAX_ITER = 500


@dataclass
class ClusterSet:
    """Mean-shift partition of a point set.

    ``labels[i]`` is the cluster of input point ``i``; clusters are numbered
    by their lowest member index.  ``modes[c]`` is the converged position of
    that lowest member and ``sizes[c]`` the niche count.
    """

    labels: np.ndarray
    modes: np.ndarray
    sizes: np.ndarray

    def __len__(self) -> int:
        return len(self.sizes)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)


@njit(cache=True)
def _local_means(ys, points, h):
    m, d = ys.shape
    n = points.shape[0]
    h2 = h * h
    out = np.empty_like(ys)
    for p in range(m):
        count = 0
        for k in range(d):
            out[p, k] = 0.0
        for q in range(n):
            s = 0.0
            for k in range(d):
                diff = points[q, k] - ys[p, k]
                s += diff * diff
            if s <= h2:
                count += 1
                for k in range(d):
                    out[p, k] += points[q, k]
        if count == 0:
            for k in range(d):
                out[p, k] = ys[p, k]
        else:
            for k in range(d):
                out[p, k] /= count
    return out


@njit(cache=True)
def _merge(shifted, radius):
    n, d = shifted.shape
    labels = np.empty(n, dtype=np.int64)
    heads = np.empty(n, dtype=np.int64)
    n_modes = 0
    r2 = radius * radius
    for p in range(n):
        best = -1
        best_d = np.inf
        for c in range(n_modes):
            s = 0.0
            for k in range(d):
                diff = shifted[p, k] - shifted[heads[c], k]
                s += diff * diff
            if s < r2 and s < best_d:
                best = c
                best_d = s
        if best < 0:
            heads[n_modes] = p
            labels[p] = n_modes
            n_modes += 1
        else:
            labels[p] = best
    return labels, heads[:n_modes].copy()


def shift_points(points, h: float, tol: float | None = None, max_iter: int = MAX_ITER) -> np.ndarray:
    """Converged position of every point under the flat-kernel shift.

    Each iterate moves to the mean of the original points within distance
    ``h`` (inclusive) until it moves less than ``tol`` (default ``1e-3*h``).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if tol is None:
        tol = TOL_FACTOR * h
    y = points.copy()
    active = np.arange(len(points))
    for _ in range(max_iter):
        if active.size == 0:
            break
        # trajectories still moving from the same spot share their future
        uniq, inverse = np.unique(y[active], axis=0, return_inverse=True)
        moved = _local_means(uniq, points, float(h))
        step = np.sqrt(((moved - uniq) ** 2).sum(axis=1))
        inverse = inverse.reshape(-1)
        y[active] = moved[inverse]
        active = active[step[inverse] >= tol]
    return y


def merge_modes(shifted: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Group converged positions, scanning points in index order.

    A point joins the nearest existing mode closer than ``radius`` or opens a
    new one headed by itself.  Returns labels and the head index of each mode.
    """
    return _merge(np.ascontiguousarray(shifted, dtype=np.float64), float(radius))


def mean_shift(points, h: float) -> ClusterSet:
    """Cluster ``points`` (shape ``(N, D)``) with bandwidth ``h``.

    Modes closer than ``h / 2`` are merged.
    """
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if len(points) == 0:
        raise ValueError("mean_shift needs at least one point")
    shifted = shift_points(points, h)
    labels, heads = merge_modes(shifted, 0.5 * h)
    sizes = np.bincount(labels, minlength=len(heads))
    return ClusterSet(labels=labels, modes=shifted[heads], sizes=sizes)
