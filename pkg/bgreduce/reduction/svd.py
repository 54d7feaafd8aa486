"""Truncated SVD of the snapshot matrix and projection diagnostics.

The basis is the left singular subspace of A. Truncation keeps either a fixed
number of modes or the smallest N with ‖A − V S Hᵀ‖_F ≤ ε, i.e. with the tail
energy sqrt(Σ_{i>N} s_i²) not above ε.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import linalg

from ..errors import BgReduceError, ModelConfigurationError
from .snapshots import SnapshotMatrix

logger = logging.getLogger(__name__)

TruncationRule = Literal["n_modes", "eps_tol"]


class TruncationError(ModelConfigurationError):
    """Raised when the truncation rule is missing or invalid, or A is zero."""


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    """Orthonormal modes V (N_θ × N) with the data needed to map back to physical units.

    Attributes:
        modes: V, orthonormal columns, sign-canonicalized.
        singular_values: s_1 ≥ … ≥ s_N > 0.
        spectrum: Full singular spectrum of A.
        rule: Truncation rule used.
        rule_value: N or ε of the rule.
        scale: Per-variable scale factors of the snapshots.
        initial: Initial values subtracted from the snapshots.
    """

    modes: np.ndarray
    singular_values: np.ndarray
    spectrum: np.ndarray
    rule: TruncationRule
    rule_value: float
    scale: np.ndarray
    initial: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.modes.shape[1]

    @property
    def n_theta(self) -> int:
        return self.modes.shape[0]

    def with_modes(self, modes: np.ndarray) -> ReducedBasis:
        """Copy with another mode matrix of the same shape (used for sign-flip checks)."""
        modes = np.asarray(modes, dtype=float)
        if modes.shape != self.modes.shape:
            raise BgReduceError(f"modes must have shape {self.modes.shape}.")
        return ReducedBasis(
            modes=modes,
            singular_values=self.singular_values,
            spectrum=self.spectrum,
            rule=self.rule,
            rule_value=self.rule_value,
            scale=self.scale,
            initial=self.initial,
        )


def canonicalize_signs(modes: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    modes = np.array(modes, dtype=float)
    pivots = np.argmax(np.abs(modes), axis=0)
    signs = np.sign(modes[pivots, np.arange(modes.shape[1])])
    signs[signs == 0] = 1.0
    return modes * signs


def truncated_svd(
    snapshots: SnapshotMatrix | np.ndarray,
    n_modes: int | None = None,
    eps_tol: float | None = None,
    scale: Sequence[float] | None = None,
    initial: Sequence[float] | None = None,
) -> ReducedBasis:
    """Compute the truncated left singular basis of the snapshot matrix.

    Exactly one of ``n_modes`` and ``eps_tol`` applies; ``n_modes`` wins when both
    are given.

    Raises:
        TruncationError: Neither rule given, ε ≤ 0, N out of range, or A is zero.
    """
    if isinstance(snapshots, SnapshotMatrix):
        matrix = snapshots.matrix
        scale = snapshots.scale if scale is None else scale
        initial = snapshots.initial if initial is None else initial
    else:
        matrix = np.asarray(snapshots, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise TruncationError("The snapshot matrix must be a non-empty 2-D array.")
    n_theta = matrix.shape[0]
    scale = np.ones(n_theta) if scale is None else np.asarray(scale, dtype=float)
    initial = np.zeros(n_theta) if initial is None else np.asarray(initial, dtype=float)

    if n_modes is None and (eps_tol is None or not eps_tol > 0):
        raise TruncationError(
            "Give a positive eps_tol or a mode count n_modes.", eps_tol=eps_tol
        )
    if not np.any(matrix):
        raise TruncationError("The snapshot matrix is zero; there is nothing to reduce.")

    try:
        left, spectrum, _ = linalg.svd(matrix, full_matrices=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise TruncationError(f"SVD of the snapshot matrix failed: {exc}") from exc

    rank = int(np.sum(spectrum > spectrum[0] * max(matrix.shape) * np.finfo(float).eps))
    if n_modes is not None:
        rule: TruncationRule = "n_modes"
        rule_value = float(n_modes)
        if not 1 <= n_modes <= rank:
            raise TruncationError(
                f"n_modes must be between 1 and the numerical rank {rank} (received {n_modes}).",
                n_modes=n_modes,
                rank=rank,
            )
        n = int(n_modes)
    else:
        rule = "eps_tol"
        rule_value = float(eps_tol)
        tails = np.sqrt(np.cumsum((spectrum**2)[::-1])[::-1])
        # tails[i] is the residual when keeping i modes
        n = next((i for i in range(1, rank + 1) if i == rank or tails[i] <= eps_tol), rank)

    modes = canonicalize_signs(left[:, :n])
    logger.info(
        "Truncated SVD keeps %d of %d modes (s_N/s_1 = %.3e)",
        n,
        spectrum.size,
        spectrum[n - 1] / spectrum[0],
    )
    return ReducedBasis(
        modes=modes,
        singular_values=spectrum[:n].copy(),
        spectrum=spectrum.copy(),
        rule=rule,
        rule_value=rule_value,
        scale=scale.copy(),
        initial=initial.copy(),
    )


def project(basis: ReducedBasis, matrix: SnapshotMatrix | np.ndarray) -> np.ndarray:
    """Reduced coordinates Vᵀ A."""
    data = matrix.matrix if isinstance(matrix, SnapshotMatrix) else np.asarray(matrix, float)
    return basis.modes.T @ data


def projection_error(basis: ReducedBasis, matrix: SnapshotMatrix | np.ndarray) -> float:
    """Squared Frobenius norm of A − V Vᵀ A."""
    data = matrix.matrix if isinstance(matrix, SnapshotMatrix) else np.asarray(matrix, float)
    residual = data - basis.modes @ (basis.modes.T @ data)
    return float(np.sum(residual**2))


def interpolation_coordinates(
    basis: ReducedBasis, primary: Sequence[int], offsets: np.ndarray
) -> np.ndarray:
    """Coordinates g with V[P,:] g = offsets[P] (least squares when V[P,:] is tall).

    ``offsets`` holds scaled offsets, one column per sample (or a single vector).
    """
    rows = basis.modes[list(primary), :]
    data = np.asarray(offsets, dtype=float)
    selected = data[list(primary)]
    coordinates, *_ = np.linalg.lstsq(rows, selected, rcond=None)
    return coordinates
