"""Scaled offset snapshot matrix built from a set of trajectories."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..dae.variables import VariableSpace
from ..errors import BgReduceError
from ..simulation.trajectory import Trajectory

logger = logging.getLogger(__name__)


class SnapshotError(BgReduceError):
    """Raised when trajectories cannot be stacked into one snapshot matrix."""


@dataclass(frozen=True, eq=False)
class SnapshotMatrix:
    """A_ij = scale_i · (θ_i(t_k, μ_p) − θ_i(0)), columns ordered by (p, k), k = 1..m.

    Attributes:
        matrix: Array of shape (N_θ, P·m).
        columns: (trajectory index, time index) of every column.
        scale: Per-variable scale factors applied.
        initial: Initial values subtracted (physical units).
    """

    matrix: np.ndarray
    columns: tuple[tuple[int, int], ...]
    scale: np.ndarray
    initial: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def assemble_snapshots(trajectories: Sequence[Trajectory], space: VariableSpace) -> SnapshotMatrix:
    """Stack scaled offsets of every trajectory, leaving out the initial column.

    Raises:
        SnapshotError: No trajectories, or trajectories with different grids,
            variable names, or initial states.
    """
    if not trajectories:
        raise SnapshotError("At least one trajectory is needed to assemble snapshots.")
    reference = trajectories[0]
    if reference.n_samples < 2:
        raise SnapshotError("Trajectories need at least one sample after t_0.")
    initial = space.initial
    scale = space.scale
    blocks = []
    columns: list[tuple[int, int]] = []
    for p, trajectory in enumerate(trajectories):
        if trajectory.theta_names != space.theta_names:
            raise SnapshotError(
                f"Trajectory {p} does not carry the model's differential variables.", index=p
            )
        if trajectory.times.shape != reference.times.shape or not np.array_equal(
            trajectory.times, reference.times
        ):
            raise SnapshotError(
                f"Trajectory {p} is sampled on a different time grid than trajectory 0.", index=p
            )
        if not np.allclose(trajectory.theta[:, 0], initial, rtol=0.0, atol=1e-12):
            raise SnapshotError(
                f"Trajectory {p} does not start from the model's initial state.", index=p
            )
        if not np.all(np.isfinite(trajectory.theta)):
            raise SnapshotError(f"Trajectory {p} holds non-finite θ values.", index=p)
        offsets = trajectory.theta[:, 1:] - initial[:, None]
        blocks.append(scale[:, None] * offsets)
        columns.extend((p, k) for k in range(1, trajectory.n_samples))
    matrix = np.hstack(blocks)
    logger.info(
        "Assembled snapshot matrix %dx%d from %d trajectories",
        matrix.shape[0],
        matrix.shape[1],
        len(trajectories),
    )
    return SnapshotMatrix(
        matrix=matrix, columns=tuple(columns), scale=scale.copy(), initial=initial.copy()
    )
