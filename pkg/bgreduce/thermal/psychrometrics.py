"""Humid-air properties.

All functions use:
- Temperature in °C
- Pressure in Pa
- Relative humidity as a fraction in [0, 1]
- Absolute humidity x in kg water vapor per kg dry air
- Specific enthalpy in J per kg dry air
"""

from __future__ import annotations

import math

from ..errors import ModelConfigurationError

P_ATM = 101325.0  # Pa
CP_DA = 1006.0  # J/(kg·K), dry air
CP_WV = 1860.0  # J/(kg·K), water vapor
H_FG_0 = 2.501e6  # J/kg, latent heat of vaporization at 0 °C
MOLAR_RATIO = 0.622  # M_water / M_dry_air

# Magnus coefficients
MAGNUS_A = 610.94  # Pa
MAGNUS_B = 17.625
MAGNUS_C = 243.04  # °C


class PsychrometricError(ModelConfigurationError):
    """Raised when humid-air inputs are outside their physical range."""


def saturation_pressure(T: float) -> float:
    """Magnus saturation vapor pressure (Pa) at ``T`` °C."""
    return MAGNUS_A * math.exp(MAGNUS_B * T / (T + MAGNUS_C))


def absolute_humidity(T: float, r: float, P: float = P_ATM) -> float:
    """Absolute humidity x = 0.622·r·p_sat / (P - r·p_sat).

    Raises:
        PsychrometricError: ``r`` is outside [0, 1] or the vapor pressure reaches ``P``.
    """
    if not 0.0 <= r <= 1.0:
        raise PsychrometricError(
            f"Relative humidity must be a fraction in [0, 1] (received {r!r}).", r=r
        )
    vapor = r * saturation_pressure(T)
    if P <= vapor:
        raise PsychrometricError(
            f"Pressure {P} Pa must exceed the vapor pressure {vapor:.1f} Pa.", P=P, T=T
        )
    return MOLAR_RATIO * vapor / (P - vapor)


def vapor_pressure(x: float, P: float = P_ATM) -> float:
    """Partial vapor pressure (Pa) of air with absolute humidity ``x``."""
    return x * P / (MOLAR_RATIO + x)


def relative_humidity(T: float, x: float, P: float = P_ATM) -> float:
    """Relative humidity fraction of air at ``T`` °C with absolute humidity ``x``.

    Values above 1 are returned as is (supersaturated state, no condensation model).
    """
    return vapor_pressure(x, P) / saturation_pressure(T)


def moist_air_enthalpy(T: float, x: float) -> float:
    """h = cp_da·T + x·(h_fg0 + cp_wv·T), referenced to dry air and liquid water at 0 °C."""
    return CP_DA * T + x * (H_FG_0 + CP_WV * T)


def air_temperature(h: float, x: float) -> float:
    """Invert :func:`moist_air_enthalpy` for the temperature."""
    return (h - H_FG_0 * x) / (CP_DA + CP_WV * x)
