"""Report figures: DOE heatmaps, convergence traces, similarity matrices.

Built on matplotlib's object API (Figure, no pyplot), so rendering works
headless and never touches global backend state.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure

from .errors import InvalidInputError
from .harness import ConvergenceTrace, DoeGrid


def doe_figure(grid: DoeGrid) -> Figure:
    """Log-scale heatmap of reconstruction error over the (p, N) grid."""
    fig = Figure(figsize=(1.2 + 0.9 * len(grid.point_counts),
                          1.0 + 0.6 * len(grid.precisions)))
    ax = fig.subplots()
    # floor at 1e-16 so exact cells do not blow up the log scale
    log_err = np.log10(np.maximum(grid.errors, 1e-16))
    image = ax.imshow(log_err, aspect="auto", cmap="viridis_r")
    ax.set_xticks(range(len(grid.point_counts)), [str(n) for n in grid.point_counts])
    ax.set_yticks(range(len(grid.precisions)), [str(p) for p in grid.precisions])
    ax.set_xlabel("interpolated points N")
    ax.set_ylabel("precision p")
    ax.set_title("reconstruction error")
    for i in range(len(grid.precisions)):
        for j in range(len(grid.point_counts)):
            ax.text(j, i, f"{grid.errors[i, j]:.1e}", ha="center", va="center",
                    fontsize=7, color="white")
    fig.colorbar(image, ax=ax, label="log10 error")
    return fig


def trace_figure(runs: Sequence[tuple[int, ConvergenceTrace]]) -> Figure:
    """Best fitness and average similarity per generation, one line per seed."""
    if not runs:
        raise InvalidInputError("trace figure needs at least one run")
    fig = Figure(figsize=(7.0, 5.5))
    ax_fit, ax_sim = fig.subplots(2, 1, sharex=True)
    for seed, trace in runs:
        generations = [e.generation_index for e in trace.entries]
        ax_fit.plot(generations, trace.best_fitness_series(),
                    marker="o", markersize=3, label=f"seed {seed}")
        ax_sim.plot(generations, trace.average_similarity_series(),
                    marker="o", markersize=3)
    ax_fit.set_ylabel("best fitness")
    ax_fit.set_ylim(0.0, 6.3)
    ax_sim.set_ylabel("avg similarity %")
    ax_sim.set_xlabel("generation")
    if len(runs) > 1:
        ax_fit.legend(fontsize=8)
    fig.suptitle("convergence trace")
    return fig


def matrix_figure(ids: Sequence[str], matrix: np.ndarray) -> Figure:
    """Similarity-percentage heatmap with the member ids on both axes."""
    n = len(ids)
    if matrix.shape != (n, n):
        raise InvalidInputError("ids must match the matrix size")
    fig = Figure(figsize=(1.5 + 0.35 * n, 1.2 + 0.35 * n))
    ax = fig.subplots()
    image = ax.imshow(matrix, vmin=0.0, vmax=100.0, cmap="magma")
    ax.set_xticks(range(n), [str(i) for i in ids], rotation=90, fontsize=7)
    ax.set_yticks(range(n), [str(i) for i in ids], fontsize=7)
    ax.set_title("similarity %")
    fig.colorbar(image, ax=ax)
    return fig


def save_figure(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    return path
