"""Time-sampled simulation output and its CSV form."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..dae.variables import VariableSpace
from ..errors import BgReduceError

TIME_COLUMN = "time_s"


class TrajectoryError(BgReduceError):
    """Raised when a trajectory file or array layout is inconsistent."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples of one run at times t_0..t_m.

    Attributes:
        times: Uniform time grid (s), ``times[0]`` is the initial instant.
        theta: Differential variables, shape (N_θ, m+1); column 0 is θ(0).
        gamma: Algebraic variables, shape (N_γ, m+1).
        inputs: Input channel samples on the same grid.
        theta_names: Names of the θ rows.
        gamma_names: Names of the γ rows.
        point: Parameter point μ the run was made for (may be empty).

    Variables not carried by a reduced run are NaN.
    """

    times: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    inputs: Mapping[str, np.ndarray]
    theta_names: tuple[str, ...]
    gamma_names: tuple[str, ...]
    point: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.times.shape[0]
        if self.theta.shape != (len(self.theta_names), n):
            raise TrajectoryError(
                f"theta has shape {self.theta.shape}, expected ({len(self.theta_names)}, {n})."
            )
        if self.gamma.shape != (len(self.gamma_names), n):
            raise TrajectoryError(
                f"gamma has shape {self.gamma.shape}, expected ({len(self.gamma_names)}, {n})."
            )
        for name, values in self.inputs.items():
            if np.shape(values) != (n,):
                raise TrajectoryError(f"input {name} has {np.size(values)} samples, expected {n}.")

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.n_samples > 1 else 0.0

    def theta_series(self, name: str) -> np.ndarray:
        return self.theta[self.theta_names.index(name)]

    def gamma_series(self, name: str) -> np.ndarray:
        return self.gamma[self.gamma_names.index(name)]

    def series(self, name: str) -> np.ndarray:
        if name in self.theta_names:
            return self.theta_series(name)
        if name in self.gamma_names:
            return self.gamma_series(name)
        if name in self.inputs:
            return np.asarray(self.inputs[name])
        raise TrajectoryError(f"Unknown variable: {name}.", variable=name)

    def to_frame(self) -> pd.DataFrame:
        columns: dict[str, np.ndarray] = {TIME_COLUMN: self.times}
        for names, values in ((self.theta_names, self.theta), (self.gamma_names, self.gamma)):
            for name, row in zip(names, values, strict=True):
                columns[name] = row
        for name, values in self.inputs.items():
            if name in columns:
                raise TrajectoryError(f"Input {name} clashes with a variable name.", input=name)
            columns[name] = np.asarray(values)
        return pd.DataFrame(columns)


def write_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    """Write ``time_s`` then θ, γ and input columns, with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory.to_frame().to_csv(path, index=False, float_format="%.17g")
    return path


def read_trajectory(
    path: str | Path, space: VariableSpace, point: Mapping[str, float] | None = None
) -> Trajectory:
    """Read a trajectory CSV; columns not named in ``space`` are taken as inputs.

    Raises:
        TrajectoryError: The file is missing, lacks ``time_s`` or a model variable.
    """
    path = Path(path)
    if not path.exists():
        raise TrajectoryError(f"Trajectory file does not exist: {path}", path=str(path))
    try:
        frame = pd.read_csv(path)
    except (ValueError, pd.errors.ParserError) as exc:
        raise TrajectoryError(f"Could not parse trajectory {path}: {exc}", path=str(path)) from exc
    if frame.columns.empty or frame.columns[0] != TIME_COLUMN:
        raise TrajectoryError(f"First column of {path} must be {TIME_COLUMN}.", path=str(path))
    missing = [n for n in (*space.theta_names, *space.gamma_names) if n not in frame.columns]
    if missing:
        raise TrajectoryError(
            f"Trajectory {path} lacks columns: {', '.join(missing[:5])}.",
            path=str(path),
            missing=missing,
        )
    known = {TIME_COLUMN, *space.theta_names, *space.gamma_names}
    return Trajectory(
        times=frame[TIME_COLUMN].to_numpy(float),
        theta=frame[list(space.theta_names)].to_numpy(float).T.copy(),
        gamma=frame[list(space.gamma_names)].to_numpy(float).T.copy(),
        inputs={c: frame[c].to_numpy(float) for c in frame.columns if c not in known},
        theta_names=space.theta_names,
        gamma_names=space.gamma_names,
        point=dict(point or {}),
    )
