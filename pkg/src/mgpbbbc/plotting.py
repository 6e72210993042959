"""Figures written next to the delimited results."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_accuracy", "plot_archive", "plot_sweep"]


def plot_accuracy(report, path) -> Path:
    """Peak ratio and success ratio against accuracy level."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    eps = np.asarray(report.accuracy)
    ax.plot(eps, report.pr, "o-", label="PR")
    ax.plot(eps, report.sr, "s--", label="SR")
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("accuracy level")
    ax.set_ylabel("ratio")
    ax.set_title(f"{report.problem}, {report.nr} runs")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_archive(spec, archive, path, resolution: int = 300) -> Path | None:
    """Final archive over the landscape; only drawn for one or two dimensions."""
    problem = spec.problem
    peaks = spec.registry.peaks
    if problem.dim == 1:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        xs = np.linspace(problem.lower[0], problem.upper[0], 20 * resolution)
        ax.plot(xs, problem.evaluate(xs[:, None]), lw=0.8, color="0.4")
        ax.plot(archive.x[:, 0], archive.fit, ".", ms=3, label="archive")
        ax.plot(peaks[:, 0], problem.evaluate(peaks), "rx", label="global peaks")
        ax.set_xlabel("x")
        ax.set_ylabel("f(x)")
    elif problem.dim == 2:
        fig, ax = plt.subplots(figsize=(5.5, 5))
        gx = np.linspace(problem.lower[0], problem.upper[0], resolution)
        gy = np.linspace(problem.lower[1], problem.upper[1], resolution)
        mx, my = np.meshgrid(gx, gy)
        z = problem.evaluate(np.column_stack([mx.ravel(), my.ravel()])).reshape(mx.shape)
        ax.contourf(mx, my, z, levels=30, cmap="viridis")
        ax.plot(archive.x[:, 0], archive.x[:, 1], "w.", ms=2, label="archive")
        ax.plot(peaks[:, 0], peaks[:, 1], "rx", ms=6, label="global peaks")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        return None
    ax.set_title(spec.id)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_sweep(cells, accuracy, level: int, path) -> Path:
    """Heat map of PR over population size and bandwidth at one accuracy level."""
    pops = sorted({c.n for c in cells})
    bands = list(dict.fromkeys(c.bandwidth for c in cells))
    grid = np.full((len(pops), len(bands)), np.nan)
    for c in cells:
        grid[pops.index(c.n), bands.index(c.bandwidth)] = c.pr[level]
    fig, ax = plt.subplots(figsize=(1.0 + 0.7 * len(bands), 1.2 + 0.5 * len(pops)))
    im = ax.imshow(grid, vmin=0, vmax=1, cmap="magma", aspect="auto")
    ax.set_xticks(range(len(bands)), bands, rotation=45, ha="right")
    ax.set_yticks(range(len(pops)), pops)
    ax.set_xlabel("bandwidth")
    ax.set_ylabel("population size")
    ax.set_title(f"PR at accuracy {accuracy[level]:g}")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
