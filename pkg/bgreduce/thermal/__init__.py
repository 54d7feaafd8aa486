"""Cabin thermal models and humid-air helpers."""

from __future__ import annotations

from .illustrative import IllustrativeParams, WallParams, build_illustrative_cabin
from .multizone import MultizoneConfig, build_multizone_demo, external_coefficient
from .psychrometrics import (
    PsychrometricError,
    absolute_humidity,
    air_temperature,
    moist_air_enthalpy,
    relative_humidity,
    saturation_pressure,
)
from .registry import (
    MODEL_BUILDERS,
    build_model,
    default_schedule,
    get_builder,
    load_model,
    parse_params,
)

__all__ = [
    "IllustrativeParams",
    "MODEL_BUILDERS",
    "MultizoneConfig",
    "PsychrometricError",
    "WallParams",
    "absolute_humidity",
    "air_temperature",
    "build_illustrative_cabin",
    "build_model",
    "build_multizone_demo",
    "default_schedule",
    "external_coefficient",
    "get_builder",
    "load_model",
    "moist_air_enthalpy",
    "parse_params",
    "relative_humidity",
    "saturation_pressure",
]
