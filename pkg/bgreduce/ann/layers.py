"""One-layer linear networks calibrated in closed form from a reduced basis.

A layer maps scaled offsets of the primary differential variables to scaled
offsets of its outputs (secondary variables for the coupling layer, tertiary
ones for the reconstruction layer). With Ñ modes the weights are

    W = V[T, :Ñ] (V[P, :Ñ]ᵀ V[P, :Ñ])⁻¹ V[P, :Ñ]ᵀ,   b = 0,

which is V[T, :] V[P, :]⁻¹ when Ñ = N and V[P, :] is square.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import BgReduceError
from ..reduction.svd import ReducedBasis
from ..settings import SETTINGS

logger = logging.getLogger(__name__)

Activation = Literal["identity", "relu"]
ACTIVATIONS: tuple[str, ...] = ("identity", "relu")


class CalibrationError(BgReduceError):
    """Raised when the normal-equations matrix is too ill-conditioned to invert."""


class LayerShapeError(BgReduceError):
    """Raised when a layer is applied to inputs of the wrong shape."""


@dataclass(frozen=True, eq=False)
class LinearLayer:
    """Dense layer ``f(W x + b)`` in scaled offset coordinates.

    Attributes:
        weights: W, shape (len(outputs), len(inputs)).
        bias: b, shape (len(outputs),).
        activation: ``identity`` or ``relu``.
        inputs: 0-based primary θ indices feeding the layer, sorted.
        outputs: 0-based θ indices produced, sorted.
        n_modes: Number of modes Ñ used to calibrate.
        clamped: θ indices among ``outputs`` that ``relu`` keeps non-negative;
            None clamps every output.
    """

    weights: np.ndarray
    bias: np.ndarray
    activation: Activation
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    n_modes: int
    clamped: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float).reshape(len(self.outputs), len(self.inputs))
        bias = np.asarray(self.bias, dtype=float).reshape(len(self.outputs))
        if self.activation not in ACTIVATIONS:
            raise LayerShapeError(
                f"Unknown activation {self.activation!r}; expected one of {', '.join(ACTIVATIONS)}."
            )
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise CalibrationError("Layer weights must be finite.")
        weights.setflags(write=False)
        bias.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))
        object.__setattr__(self, "outputs", tuple(int(i) for i in self.outputs))
        clamped = self.outputs
        if self.clamped is not None:
            clamped = tuple(sorted(int(i) for i in self.clamped))
        stray = sorted(set(clamped) - set(self.outputs))
        if stray:
            raise LayerShapeError(
                f"Clamped rows {[i + 1 for i in stray]} are not layer outputs.",
                clamped=[i + 1 for i in stray],
            )
        object.__setattr__(self, "clamped", clamped)

    @property
    def is_empty(self) -> bool:
        return not self.outputs

    @property
    def clamp_mask(self) -> np.ndarray:
        """Boolean mask over ``outputs`` of the rows clamped by ``relu``."""
        clamped = set(self.clamped or ())
        return np.array([i in clamped for i in self.outputs], dtype=bool)


def _modes(basis: ReducedBasis | np.ndarray) -> np.ndarray:
    modes = basis.modes if isinstance(basis, ReducedBasis) else np.asarray(basis, dtype=float)
    if modes.ndim != 2:
        raise CalibrationError(f"Mode matrix must be 2-D (received shape {modes.shape}).")
    return modes


def calibrate_layer(
    basis: ReducedBasis | np.ndarray,
    primary: Sequence[int],
    targets: Sequence[int],
    n_modes: int | None = None,
    activation: Activation = "identity",
    nonnegative: Sequence[int] | None = None,
) -> LinearLayer:
    """Closed-form weights predicting ``targets`` rows from ``primary`` rows.

    Args:
        basis: Reduced basis or its mode matrix V.
        primary: 0-based primary θ indices.
        targets: 0-based output θ indices, disjoint from ``primary``.
        n_modes: Ñ, the number of leading modes used (defaults to all N).
        activation: Activation tag stored on the layer.
        nonnegative: 0-based θ indices a ``relu`` layer may clamp; the clamp covers
            the targets among them. None clamps every target.

    Raises:
        CalibrationError: Ñ out of range, overlapping index sets, or
            V[P, :Ñ]ᵀ V[P, :Ñ] ill-conditioned beyond SETTINGS.conditioning_threshold.
    """
    modes = _modes(basis)
    primary = tuple(sorted(int(i) for i in primary))
    targets = tuple(sorted(int(i) for i in targets))
    n = modes.shape[1]
    n_modes = n if n_modes is None else int(n_modes)
    if not 1 <= n_modes <= n:
        raise CalibrationError(
            f"n_modes must be between 1 and {n} (received {n_modes}).", n_modes=n_modes
        )
    overlap = sorted(set(primary) & set(targets))
    if overlap:
        raise CalibrationError(
            f"Targets overlap the primary set at {[i + 1 for i in overlap]}.",
            overlap=[i + 1 for i in overlap],
        )
    if not primary:
        raise CalibrationError("A layer needs at least one primary input.")

    v_p = modes[list(primary), :n_modes]
    v_t = modes[list(targets), :n_modes]
    normal = v_p.T @ v_p
    # reciprocal condition number in the 2-norm
    singular = np.linalg.svd(normal, compute_uv=False)
    rcond = float(singular[-1] / singular[0]) if singular[0] > 0 else 0.0
    if rcond < SETTINGS.conditioning_threshold:
        raise CalibrationError(
            f"V[P, :{n_modes}]ᵀ V[P, :{n_modes}] is singular (rcond {rcond:.2e}); "
            "try a smaller number of stabilized modes.",
            n_modes=n_modes,
            rcond=rcond,
        )
    try:
        weights = v_t @ np.linalg.solve(normal, v_p.T)
    except np.linalg.LinAlgError as exc:
        raise CalibrationError(f"Calibration solve failed: {exc}", n_modes=n_modes) from exc

    logger.debug(
        "Calibrated layer %d->%d with %d modes (rcond %.2e)",
        len(primary),
        len(targets),
        n_modes,
        rcond,
    )
    return LinearLayer(
        weights=weights,
        bias=np.zeros(len(targets)),
        activation=activation,
        inputs=primary,
        outputs=targets,
        n_modes=n_modes,
        clamped=None if nonnegative is None else set(targets) & {int(i) for i in nonnegative},
    )


def forward(
    layer: LinearLayer, offsets: np.ndarray, initial: np.ndarray | None = None
) -> np.ndarray:
    """Apply the layer to scaled primary offsets.

    ``offsets`` is a vector of length len(layer.inputs) or a matrix with one
    column per sample. ``relu`` clamps the scaled physical value of the
    ``clamped`` rows, so those rows read ``max(0, initial + W x + b) − initial``
    with ``initial`` the scaled initial values of the outputs. The other rows
    stay linear.

    Raises:
        LayerShapeError: Input length mismatch, or ``relu`` without ``initial``.
    """
    x = np.asarray(offsets, dtype=float)
    if x.shape[0:1] != (len(layer.inputs),) or x.ndim > 2:
        raise LayerShapeError(
            f"Layer expects {len(layer.inputs)} inputs (received shape {x.shape}).",
            expected=len(layer.inputs),
            received=list(x.shape),
        )
    bias = layer.bias if x.ndim == 1 else layer.bias[:, None]
    out = layer.weights @ x + bias
    if layer.activation == "identity":
        return out
    if initial is None:
        raise LayerShapeError("A relu layer needs the scaled initial values of its outputs.")
    start = np.asarray(initial, dtype=float).reshape(len(layer.outputs))
    if x.ndim == 2:
        start = start[:, None]
    clamped = np.maximum(0.0, start + out) - start
    mask = layer.clamp_mask if x.ndim == 1 else layer.clamp_mask[:, None]
    return np.where(mask, clamped, out)
