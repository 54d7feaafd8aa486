"""Greedy interpolation-index selection on a reduced basis (DEIM)."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import BgReduceError
from .svd import ReducedBasis

logger = logging.getLogger(__name__)


class DegenerateBasisError(BgReduceError):
    """Raised when the interpolation system on the chosen rows is singular."""


def select_interpolation_indices(
    basis: ReducedBasis | np.ndarray, rcond: float = 1e-12
) -> tuple[int, ...]:
    """Return N distinct 0-based row indices in selection order.

    The first index maximizes |V[:, 0]|. Each following one maximizes the absolute
    residual of the next column after interpolating it on the rows chosen so far.

    Raises:
        DegenerateBasisError: The basis has no column, or a residual vanishes so
            that the interpolation system on the chosen rows is singular.
    """
    modes = basis.modes if isinstance(basis, ReducedBasis) else np.asarray(basis, dtype=float)
    if modes.ndim != 2 or modes.shape[1] < 1 or modes.shape[1] > modes.shape[0]:
        raise DegenerateBasisError(
            f"Basis of shape {modes.shape} cannot provide interpolation indices."
        )
    scale = float(np.max(np.abs(modes)))
    indices = [int(np.argmax(np.abs(modes[:, 0])))]
    for column in range(1, modes.shape[1]):
        chosen = modes[indices, :column]
        try:
            coefficients = np.linalg.solve(chosen, modes[indices, column])
        except np.linalg.LinAlgError as exc:
            raise DegenerateBasisError(
                f"Singular interpolation system at column {column + 1}.",
                indices=[i + 1 for i in indices],
            ) from exc
        residual = modes[:, column] - modes[:, :column] @ coefficients
        index = int(np.argmax(np.abs(residual)))
        if abs(residual[index]) <= rcond * scale:
            raise DegenerateBasisError(
                f"Column {column + 1} is interpolated exactly by the previous columns; "
                "the basis is degenerate.",
                indices=[i + 1 for i in indices],
            )
        indices.append(index)
    logger.info("Interpolation indices (1-based): %s", [i + 1 for i in indices])
    return tuple(indices)
