"""Mean and maximal absolute errors between two sets of trajectories.

Both metrics run over the chosen variables, the samples k = 1..m (t_0 is left
out) and the parameter points. The i-th approximation is compared with the i-th
reference.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import BgReduceError
from ..simulation.trajectory import Trajectory, TrajectoryError

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


class MetricsError(BgReduceError):
    """Raised when trajectory sets cannot be compared sample by sample."""


def _as_list(trajectories: Trajectory | Sequence[Trajectory]) -> list[Trajectory]:
    return [trajectories] if isinstance(trajectories, Trajectory) else list(trajectories)


def error_cube(
    reference: Trajectory | Sequence[Trajectory],
    approx: Trajectory | Sequence[Trajectory],
    variables: Sequence[str] | None = None,
) -> tuple[list[str], np.ndarray]:
    """Absolute differences of shape (points, variables, m).

    ``variables`` defaults to every differential variable of the first reference.

    Raises:
        MetricsError: Sets of different sizes, grids or parameter points, unknown
            variables, or non-finite values.
    """
    reference, approx = _as_list(reference), _as_list(approx)
    if not reference:
        raise MetricsError("No trajectories to compare.")
    if len(reference) != len(approx):
        raise MetricsError(
            f"Reference has {len(reference)} trajectories but approximation has {len(approx)}."
        )
    names = list(reference[0].theta_names if variables is None else variables)
    if not names:
        raise MetricsError("No variables selected.")
    grid = reference[0].times
    blocks = []
    for p, (ref, app) in enumerate(zip(reference, approx, strict=True)):
        if not (np.array_equal(ref.times, grid) and np.array_equal(app.times, grid)):
            raise MetricsError(f"Trajectory pair {p} is not on the common time grid.", index=p)
        if dict(ref.point) != dict(app.point):
            raise MetricsError(
                f"Trajectory pair {p} was run at different parameter points.", index=p
            )
        try:
            diff = np.array([ref.series(n)[1:] - app.series(n)[1:] for n in names])
        except TrajectoryError as exc:
            raise MetricsError(str(exc), index=p) from exc
        if not np.all(np.isfinite(diff)):
            raise MetricsError(
                f"Trajectory pair {p} holds non-finite values for the selected variables.",
                index=p,
            )
        blocks.append(np.abs(diff))
    return names, np.stack(blocks)


def mae(
    reference: Trajectory | Sequence[Trajectory],
    approx: Trajectory | Sequence[Trajectory],
    variables: Sequence[str] | None = None,
) -> float:
    _, cube = error_cube(reference, approx, variables)
    return float(np.mean(cube))


def max_ae(
    reference: Trajectory | Sequence[Trajectory],
    approx: Trajectory | Sequence[Trajectory],
    variables: Sequence[str] | None = None,
) -> float:
    _, cube = error_cube(reference, approx, variables)
    return float(np.max(cube))


class VariableError(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    mae: float
    max_ae: float
    max_time: float
    max_point: int


class ErrorReport(BaseModel):
    """Accuracy of an approximation against reference runs (``schema_version`` 1)."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = REPORT_SCHEMA_VERSION
    mae: float
    max_ae: float
    max_variable: str
    max_time: float
    max_point: int
    max_point_values: dict[str, float]
    n_variables: int
    n_samples: int
    n_points: int
    variables: list[VariableError]


def error_report(
    reference: Trajectory | Sequence[Trajectory],
    approx: Trajectory | Sequence[Trajectory],
    variables: Sequence[str] | None = None,
) -> ErrorReport:
    """Aggregate and per-variable MAE / MaxAE with the location of every maximum.

    Point indices in the report are 1-based.
    """
    reference = _as_list(reference)
    names, cube = error_cube(reference, approx, variables)
    times = reference[0].times[1:]
    per_variable = []
    for v, name in enumerate(names):
        block = cube[:, v, :]
        p, k = np.unravel_index(int(np.argmax(block)), block.shape)
        per_variable.append(
            VariableError(
                name=name,
                mae=float(np.mean(block)),
                max_ae=float(block[p, k]),
                max_time=float(times[k]),
                max_point=int(p) + 1,
            )
        )
    p, v, k = np.unravel_index(int(np.argmax(cube)), cube.shape)
    report = ErrorReport(
        mae=float(np.mean(cube)),
        max_ae=float(cube[p, v, k]),
        max_variable=names[v],
        max_time=float(times[k]),
        max_point=int(p) + 1,
        max_point_values=dict(reference[p].point),
        n_variables=len(names),
        n_samples=cube.shape[2],
        n_points=cube.shape[0],
        variables=per_variable,
    )
    logger.info(
        "MAE %.4g, MaxAE %.4g (%s at t = %g s, point %d)",
        report.mae,
        report.max_ae,
        report.max_variable,
        report.max_time,
        report.max_point,
    )
    return report


def save_report(report: BaseModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path
