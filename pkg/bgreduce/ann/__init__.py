"""Closed-form calibrated linear layers."""

from __future__ import annotations

from .layers import (
    ACTIVATIONS,
    CalibrationError,
    LayerShapeError,
    LinearLayer,
    calibrate_layer,
    forward,
)
from .stabilize import ModeSweep, select_stabilized_modes

__all__ = [
    "ACTIVATIONS",
    "CalibrationError",
    "LayerShapeError",
    "LinearLayer",
    "ModeSweep",
    "calibrate_layer",
    "forward",
    "select_stabilized_modes",
]
