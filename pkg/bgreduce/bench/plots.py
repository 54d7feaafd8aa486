"""Static comparison plots of reference and reduced runs."""

from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from ..simulation.trajectory import Trajectory  # noqa: E402
from .metrics import MetricsError  # noqa: E402


def plot_comparison(
    reference: Trajectory,
    approx: Trajectory,
    variables: Sequence[str],
    path: str | Path,
    columns: int = 2,
    dpi: int = 150,
) -> Path:
    """Write one panel per variable (reference solid, reduced dashed) to a PNG."""
    if not variables:
        raise MetricsError("Select at least one variable to plot.")
    rows = math.ceil(len(variables) / columns)
    cols = min(columns, len(variables))
    fig, axes = plt.subplots(rows, cols, figsize=(4.5 * cols, 3.0 * rows), squeeze=False)
    try:
        for ax, name in zip(axes.ravel(), variables, strict=False):
            ax.plot(reference.times, reference.series(name), color="black", lw=1.2, label="full")
            ax.plot(
                approx.times, approx.series(name), color="tab:red", lw=1.2, ls="--", label="reduced"
            )
            ax.set_title(name)
            ax.set_xlabel("time [s]")
            ax.grid(alpha=0.3)
        for ax in axes.ravel()[len(variables):]:
            ax.set_visible(False)
        axes.ravel()[0].legend(loc="best", fontsize=8)
        fig.tight_layout()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=dpi, bbox_inches="tight")
    finally:
        plt.close(fig)
    return path
