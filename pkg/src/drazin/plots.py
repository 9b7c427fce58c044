"""Convergence-curve rendering to image files (Agg backend, no display)."""

from __future__ import annotations

import numpy as np

__all__ = ["render_convergence"]


def render_convergence(report, path, title=None):
    """Render every solver's relative-seminorm history to ``path``.

    The output format follows the file extension (png, pdf, svg, ...).
    Stagnating runs are marked in the legend.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for outcome in report.outcomes:
        records = outcome.history.records
        cycles = [r.cycle for r in records]
        rel = [r.relative_seminorm if r.relative_seminorm > 0 else np.nan
               for r in records]
        label = outcome.label + (" (stagnated)" if outcome.stagnated else "")
        ax.semilogy(cycles, rel, label=label)
    ax.set_xlabel("restart cycle")
    ax.set_ylabel("relative seminorm")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
