"""Synthetic multi-zone cabin with humid air, ventilation and longwave radiation.

Every wall is split into an internal node (facing its air zone) and an external
node (facing the ambience when exposed). Air zones carry specific enthalpy and
absolute humidity balances fed by the HVAC inlet, infiltration, zone-to-zone
through-flows and symmetric exchange flows.

θ = [T_wi (N_w), T_we (N_w), h (N_a), x (N_a)], so N_θ = 2(N_w + N_a).
γ = [T_air (N_a), Q_conv (N_w), Q_cond (N_w), Q_rad (N_w), Q_ext, Q_lw, r (N_a)]
where Q_ext and Q_lw exist for exposed walls only and the radiation fluxes only
when ``radiation`` is enabled.

Inputs: V_veh (km/h), T_ext (°C), r_ext (%), I_sol (W/m²), m_inlet (kg/h),
r_inlet (%), T_inlet (°C).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..dae.model import AlgebraicEquation, DaeModel, DifferentialEquation, Inputs, RowFn
from ..dae.variables import InputSchedule, VariableSpace
from ..errors import ModelConfigurationError
from .psychrometrics import (
    CP_DA,
    CP_WV,
    H_FG_0,
    P_ATM,
    absolute_humidity,
    moist_air_enthalpy,
    relative_humidity,
)

MODEL_NAME = "multizone"
INPUTS = ("V_veh", "T_ext", "r_ext", "I_sol", "m_inlet", "r_inlet", "T_inlet")

KELVIN = 273.15
SIGMA = 5.670374419e-8  # W/(m²·K⁴)
ENTHALPY_SCALE = 1e-3  # J/kg -> kJ/kg, i.e. divided by a dry-air Cp of 10³
HUMIDITY_SCALE = 1e3  # kg/kg -> g/kg

# Defaults by wall kind: window, roof, door, floor
_KIND_AREA = (0.9, 1.0, 0.8, 1.1)
_KIND_C_INTERNAL = (4500.0, 8000.0, 10000.0, 15000.0)
_KIND_C_EXTERNAL = (4500.0, 6000.0, 8000.0, 12000.0)
_KIND_CONDUCTANCE = (200.0, 8.0, 6.0, 5.0)
_KIND_EMISSIVITY = (0.84, 0.9, 0.9, 0.9)
_KIND_ABSORPTIVITY = (0.1, 0.7, 0.6, 0.3)


def external_coefficient(speed_kmh: float) -> float:
    """External convective coefficient (W·m⁻²·K⁻¹) for a vehicle speed in km/h."""
    return 5.7 + 3.8 * speed_kmh / 3.6


class MultizoneConfig(BaseModel):
    """Topology and parameters of the multi-zone cabin.

    Per-wall and per-zone lists left as ``None`` are filled with defaults that
    cycle through four wall kinds (window, roof, door, floor) and distribute the
    walls evenly over the zones.

    Attributes:
        n_zones: Number of air zones N_a.
        n_walls: Number of walls N_w.
        wall_zone: Zone index (0-based) each wall faces.
        wall_area: Wall surfaces (m²).
        c_internal: Internal node capacitances (J/K).
        c_external: External node capacitances (J/K).
        conductance: Conductance between internal and external nodes (W/K).
        emissivity: Longwave emissivities.
        absorptivity: Solar absorptivities of external faces.
        window: Whether each wall transmits solar radiation into its zone.
        exposed: Whether each external node exchanges with the ambience.
        transmissivity: Solar transmissivity of window walls.
        h_int: Internal convective coefficient (W·m⁻²·K⁻¹).
        zone_volume: Air zone volumes (m³).
        air_density: Dry-air density used for zone masses (kg/m³).
        inlet_fractions: Share of the HVAC inlet and infiltration entering each zone.
        flow_fractions: ``flow_fractions[a][b]`` is the share of zone a's outflow sent
            to zone b; the remainder of each row is extracted from the cabin.
        exchange_flow: Symmetric zone-to-zone mixing flows (kg/h).
        infiltration: Outdoor air leaking into the cabin (kg/h).
        internal_gain: Sensible gains per zone (W).
        moisture_gain: Vapor sources per zone (kg/s).
        radiation: Enable longwave radiation (the nonlinear terms).
        ambient_pressure: Pressure used for humid-air conversions (Pa).
        initial_temperature: Initial temperature of every wall node and zone (°C).
        initial_relative_humidity: Initial zone relative humidity (fraction).
    """

    model_config = ConfigDict(extra="forbid")

    n_zones: int = Field(default=6, ge=1)
    n_walls: int = Field(default=24, ge=1)
    wall_zone: list[int] | None = None
    wall_area: list[float] | None = None
    c_internal: list[float] | None = None
    c_external: list[float] | None = None
    conductance: list[float] | None = None
    emissivity: list[float] | None = None
    absorptivity: list[float] | None = None
    window: list[bool] | None = None
    exposed: list[bool] | None = None
    transmissivity: float = Field(default=0.6, ge=0, le=1)
    h_int: float = Field(default=8.0, gt=0)
    zone_volume: list[float] | None = None
    air_density: float = Field(default=1.2, gt=0)
    inlet_fractions: list[float] | None = None
    flow_fractions: list[list[float]] | None = None
    exchange_flow: list[list[float]] | None = None
    infiltration: float = Field(default=10.0, ge=0)
    internal_gain: list[float] | None = None
    moisture_gain: list[float] | None = None
    radiation: bool = True
    ambient_pressure: float = Field(default=P_ATM, gt=0)
    initial_temperature: float = 35.0
    initial_relative_humidity: float = Field(default=0.3, ge=0, le=1)

    @model_validator(mode="after")
    def _fill_and_check(self) -> MultizoneConfig:
        nw, na = self.n_walls, self.n_zones

        def per_wall(values: list | None, table: Sequence, label: str) -> list:
            if values is None:
                return [table[i % len(table)] for i in range(nw)]
            if len(values) != nw:
                raise ValueError(f"{label} needs {nw} entries (received {len(values)}).")
            return list(values)

        def per_zone(values: list | None, default: float, label: str) -> list:
            if values is None:
                return [default] * na
            if len(values) != na:
                raise ValueError(f"{label} needs {na} entries (received {len(values)}).")
            return list(values)

        if self.wall_zone is None:
            self.wall_zone = [i * na // nw for i in range(nw)]
        elif len(self.wall_zone) != nw:
            raise ValueError(f"wall_zone needs {nw} entries (received {len(self.wall_zone)}).")
        if any(not 0 <= z < na for z in self.wall_zone):
            raise ValueError(f"wall_zone entries must lie in [0, {na}).")

        self.wall_area = per_wall(self.wall_area, _KIND_AREA, "wall_area")
        self.c_internal = per_wall(self.c_internal, _KIND_C_INTERNAL, "c_internal")
        self.c_external = per_wall(self.c_external, _KIND_C_EXTERNAL, "c_external")
        self.conductance = per_wall(self.conductance, _KIND_CONDUCTANCE, "conductance")
        self.emissivity = per_wall(self.emissivity, _KIND_EMISSIVITY, "emissivity")
        self.absorptivity = per_wall(self.absorptivity, _KIND_ABSORPTIVITY, "absorptivity")
        self.window = per_wall(self.window, (True, False, False, False), "window")
        self.exposed = per_wall(self.exposed, (True,), "exposed")
        for label in ("wall_area", "c_internal", "c_external", "conductance"):
            if any(v <= 0 for v in getattr(self, label)):
                raise ValueError(f"{label} entries must be strictly positive.")
        for label in ("emissivity", "absorptivity"):
            if any(not 0 <= v <= 1 for v in getattr(self, label)):
                raise ValueError(f"{label} entries must lie in [0, 1].")

        self.zone_volume = per_zone(self.zone_volume, 0.5, "zone_volume")
        if any(v <= 0 for v in self.zone_volume):
            raise ValueError("zone_volume entries must be strictly positive.")
        self.inlet_fractions = per_zone(self.inlet_fractions, 1.0 / na, "inlet_fractions")
        if any(f < 0 for f in self.inlet_fractions) or sum(self.inlet_fractions) > 1 + 1e-12:
            raise ValueError("inlet_fractions must be non-negative and sum to at most 1.")
        self.internal_gain = per_zone(self.internal_gain, 0.0, "internal_gain")
        self.moisture_gain = per_zone(self.moisture_gain, 0.0, "moisture_gain")

        if self.flow_fractions is None:
            self.flow_fractions = [
                [0.4 if b == a + 2 else 0.0 for b in range(na)] for a in range(na)
            ]
        flows = np.asarray(self.flow_fractions, dtype=float)
        if flows.shape != (na, na):
            raise ValueError(f"flow_fractions must be a {na}x{na} matrix.")
        if np.any(flows < 0) or np.any(np.diag(flows) != 0):
            raise ValueError("flow_fractions must be non-negative with a zero diagonal.")
        if np.any(flows.sum(axis=1) > 1 + 1e-12):
            raise ValueError("flow fractions out of each zone must sum to at most 1.")

        if self.exchange_flow is None:
            self.exchange_flow = [
                [10.0 if (a // 2 == b // 2 and a != b) else 0.0 for b in range(na)]
                for a in range(na)
            ]
        exchange = np.asarray(self.exchange_flow, dtype=float)
        if exchange.shape != (na, na):
            raise ValueError(f"exchange_flow must be a {na}x{na} matrix.")
        if np.any(exchange < 0) or not np.array_equal(exchange, exchange.T):
            raise ValueError("exchange_flow must be symmetric and non-negative.")
        return self


def _through_flow_shares(config: MultizoneConfig) -> np.ndarray:
    """Outflow of each zone per unit of total inflow: q = (I - Fᵀ)⁻¹ f."""
    flows = np.asarray(config.flow_fractions, dtype=float)
    system = np.eye(config.n_zones) - flows.T
    if np.linalg.cond(system) > 1e12:
        raise ModelConfigurationError(
            "Ventilation topology has a closed loop with no extraction path.",
            flow_fractions=config.flow_fractions,
        )
    return np.linalg.solve(system, np.asarray(config.inlet_fractions, dtype=float))


def _conv_row(h_a: float, wall: int, h_idx: int, x_idx: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        x = theta[x_idx]
        air = (theta[h_idx] - H_FG_0 * x) / (CP_DA + CP_WV * x)
        return h_a * (theta[wall] - air)

    return flux


def _cond_row(k: float, inner: int, outer: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return k * (theta[outer] - theta[inner])

    return flux


def _rad_row(wall: int, partners: tuple[int, ...], coefficients: tuple[float, ...]) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        own = (theta[wall] + KELVIN) ** 4
        total = 0.0
        for j, g in zip(partners, coefficients, strict=True):
            total += g * (own - (theta[j] + KELVIN) ** 4)
        return total

    return flux


def _ext_row(area: float, outer: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        h_ext = 5.7 + 3.8 * inputs["V_veh"] / 3.6
        return h_ext * area * (theta[outer] - inputs["T_ext"])

    return flux


def _lw_row(coefficient: float, outer: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return coefficient * ((theta[outer] + KELVIN) ** 4 - (inputs["T_ext"] + KELVIN) ** 4)

    return flux


def _air_temperature_row(h_idx: int, x_idx: int) -> RowFn:
    def explicit(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        x = theta[x_idx]
        return (theta[h_idx] - H_FG_0 * x) / (CP_DA + CP_WV * x)

    return explicit


def _air_temperature_residual(k: int, h_idx: int, x_idx: int) -> RowFn:
    def residual(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return (theta[h_idx] - moist_air_enthalpy(gamma[k], theta[x_idx])) * ENTHALPY_SCALE

    return residual


def _humidity_row(air_idx: int, x_idx: int, pressure: float) -> RowFn:
    def explicit(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return 100.0 * relative_humidity(gamma[air_idx], theta[x_idx], pressure)

    return explicit


def _internal_wall_rate(
    capacitance: float, cond: int, conv: int, rad: int | None, solar: float
) -> RowFn:
    def rate(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        power = gamma[cond] - gamma[conv] + solar * inputs["I_sol"]
        if rad is not None:
            power -= gamma[rad]
        return power / capacitance

    return rate


def _external_wall_rate(
    capacitance: float, cond: int, ext: int | None, lw: int | None, solar: float
) -> RowFn:
    def rate(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        power = solar * inputs["I_sol"] - gamma[cond]
        if ext is not None:
            power -= gamma[ext]
        if lw is not None:
            power -= gamma[lw]
        return power / capacitance

    return rate


def _supply_air(inputs: Inputs, pressure: float) -> tuple[float, float, float, float]:
    """Inlet and outdoor air as (x_in, h_in, x_out, h_out)."""
    x_in = absolute_humidity(inputs["T_inlet"], inputs["r_inlet"] / 100.0, pressure)
    x_out = absolute_humidity(inputs["T_ext"], inputs["r_ext"] / 100.0, pressure)
    return (
        x_in,
        moist_air_enthalpy(inputs["T_inlet"], x_in),
        x_out,
        moist_air_enthalpy(inputs["T_ext"], x_out),
    )


def _zone_rate(
    own: int,
    mass: float,
    inlet_share: float,
    infiltration: float,
    upstream: tuple[tuple[int, float], ...],
    exchange: tuple[tuple[int, float], ...],
    convective: tuple[int, ...],
    source: float,
    pressure: float,
    enthalpy: bool,
) -> RowFn:
    """Balance of h (``enthalpy``) or x for one zone, per kg of dry air."""

    def rate(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        value = theta[own]
        supply = inputs["m_inlet"] / 3600.0
        x_in, h_in, x_out, h_out = _supply_air(inputs, pressure)
        inlet, outdoor = (h_in, h_out) if enthalpy else (x_in, x_out)
        flow = inlet_share * (supply * (inlet - value) + infiltration * (outdoor - value))
        total = supply + infiltration
        for j, share in upstream:
            flow += share * total * (theta[j] - value)
        for j, mixing in exchange:
            flow += mixing * (theta[j] - value)
        for k in convective:
            flow += gamma[k]
        return (flow + source) / mass

    return rate


def build_multizone_demo(config: MultizoneConfig | None = None) -> DaeModel:
    """Build the nonlinear multi-zone cabin DAE.

    Raises:
        ModelConfigurationError: The ventilation topology has no extraction path.
    """
    config = config or MultizoneConfig()
    nw, na = config.n_walls, config.n_zones
    pressure = config.ambient_pressure
    zone_walls = [[i for i in range(nw) if config.wall_zone[i] == z] for z in range(na)]
    zone_area = [sum(config.wall_area[i] for i in walls) for walls in zone_walls]
    shares = _through_flow_shares(config)
    flows = np.asarray(config.flow_fractions, dtype=float)
    exchange = np.asarray(config.exchange_flow, dtype=float) / 3600.0

    # θ layout
    t_wi = list(range(nw))
    t_we = [nw + i for i in range(nw)]
    h_of = [2 * nw + z for z in range(na)]
    x_of = [2 * nw + na + z for z in range(na)]

    # γ layout
    exposed = [i for i in range(nw) if config.exposed[i]]
    t_air = list(range(na))
    q_conv = [na + i for i in range(nw)]
    q_cond = [na + nw + i for i in range(nw)]
    cursor = na + 2 * nw
    q_rad: list[int | None] = [None] * nw
    if config.radiation:
        q_rad = [cursor + i for i in range(nw)]
        cursor += nw
    q_ext: list[int | None] = [None] * nw
    for n, i in enumerate(exposed):
        q_ext[i] = cursor + n
    cursor += len(exposed)
    q_lw: list[int | None] = [None] * nw
    if config.radiation:
        for n, i in enumerate(exposed):
            q_lw[i] = cursor + n
        cursor += len(exposed)
    r_of = [cursor + z for z in range(na)]

    algebraic: list[AlgebraicEquation] = []
    for z in range(na):
        algebraic.append(
            AlgebraicEquation(
                f"T_air_{z + 1}",
                explicit=_air_temperature_row(h_of[z], x_of[z]),
                residual=_air_temperature_residual(t_air[z], h_of[z], x_of[z]),
                reads_theta=(h_of[z], x_of[z]),
                mixed=((t_air[z], x_of[z]),),
            )
        )
    for i in range(nw):
        z = config.wall_zone[i]
        algebraic.append(
            AlgebraicEquation(
                f"Q_conv_{i + 1}",
                _conv_row(config.h_int * config.wall_area[i], t_wi[i], h_of[z], x_of[z]),
                reads_theta=(t_wi[i], h_of[z], x_of[z]),
            )
        )
    for i in range(nw):
        algebraic.append(
            AlgebraicEquation(
                f"Q_cond_{i + 1}",
                _cond_row(config.conductance[i], t_wi[i], t_we[i]),
                reads_theta=(t_wi[i], t_we[i]),
            )
        )
    if config.radiation:
        for i in range(nw):
            z = config.wall_zone[i]
            partners = tuple(j for j in zone_walls[z] if j != i)
            coefficients = tuple(
                SIGMA
                * config.emissivity[i]
                * config.emissivity[j]
                * config.wall_area[i]
                * config.wall_area[j]
                / zone_area[z]
                for j in partners
            )
            algebraic.append(
                AlgebraicEquation(
                    f"Q_rad_{i + 1}",
                    _rad_row(t_wi[i], tuple(t_wi[j] for j in partners), coefficients),
                    reads_theta=(t_wi[i], *(t_wi[j] for j in partners)),
                )
            )
    for i in exposed:
        algebraic.append(
            AlgebraicEquation(
                f"Q_ext_{i + 1}",
                _ext_row(config.wall_area[i], t_we[i]),
                reads_theta=(t_we[i],),
            )
        )
    if config.radiation:
        for i in exposed:
            algebraic.append(
                AlgebraicEquation(
                    f"Q_lw_{i + 1}",
                    _lw_row(SIGMA * config.emissivity[i] * config.wall_area[i], t_we[i]),
                    reads_theta=(t_we[i],),
                )
            )
    for z in range(na):
        algebraic.append(
            AlgebraicEquation(
                f"r_{z + 1}",
                _humidity_row(t_air[z], x_of[z], pressure),
                reads_theta=(x_of[z],),
                reads_gamma=(t_air[z],),
                mixed=((t_air[z], x_of[z]),),
            )
        )

    differential: list[DifferentialEquation] = []
    for i in range(nw):
        z = config.wall_zone[i]
        transmitted = config.transmissivity * sum(
            config.wall_area[w] for w in zone_walls[z] if config.window[w]
        )
        solar = transmitted * config.wall_area[i] / zone_area[z]
        reads = (q_cond[i], q_conv[i]) + ((q_rad[i],) if q_rad[i] is not None else ())
        differential.append(
            DifferentialEquation(
                f"T_wi_{i + 1}",
                _internal_wall_rate(config.c_internal[i], q_cond[i], q_conv[i], q_rad[i], solar),
                reads_gamma=reads,
            )
        )
    for i in range(nw):
        solar = config.absorptivity[i] * config.wall_area[i] if config.exposed[i] else 0.0
        reads = (q_cond[i],) + tuple(k for k in (q_ext[i], q_lw[i]) if k is not None)
        differential.append(
            DifferentialEquation(
                f"T_we_{i + 1}",
                _external_wall_rate(config.c_external[i], q_cond[i], q_ext[i], q_lw[i], solar),
                reads_gamma=reads,
            )
        )
    infiltration = config.infiltration / 3600.0
    for enthalpy, states in ((True, h_of), (False, x_of)):
        for z in range(na):
            upstream = tuple(
                (states[a], float(flows[a, z] * shares[a]))
                for a in range(na)
                if flows[a, z] * shares[a] > 0
            )
            mixing = tuple(
                (states[b], float(exchange[z, b])) for b in range(na) if exchange[z, b] > 0
            )
            convective = tuple(q_conv[i] for i in zone_walls[z]) if enthalpy else ()
            source = config.internal_gain[z] if enthalpy else config.moisture_gain[z]
            differential.append(
                DifferentialEquation(
                    f"{'h' if enthalpy else 'x'}_{z + 1}",
                    _zone_rate(
                        states[z],
                        config.air_density * config.zone_volume[z],
                        config.inlet_fractions[z],
                        infiltration,
                        upstream,
                        mixing,
                        convective,
                        source,
                        pressure,
                        enthalpy,
                    ),
                    reads_theta=(states[z], *(j for j, _ in upstream), *(j for j, _ in mixing)),
                    reads_gamma=convective,
                )
            )

    x0 = absolute_humidity(
        config.initial_temperature, config.initial_relative_humidity, pressure
    )
    h0 = moist_air_enthalpy(config.initial_temperature, x0)
    initial = [config.initial_temperature] * (2 * nw) + [h0] * na + [x0] * na
    scale = [1.0] * (2 * nw) + [ENTHALPY_SCALE] * na + [HUMIDITY_SCALE] * na
    space = VariableSpace(
        theta_names=tuple(eq.variable for eq in differential),
        gamma_names=tuple(eq.variable for eq in algebraic),
        initial=initial,
        scale=scale,
        nonnegative=tuple(f"x_{z + 1}" for z in range(na)),
    )
    return DaeModel(
        name=MODEL_NAME,
        space=space,
        differential=tuple(differential),
        algebraic=tuple(algebraic),
        inputs=INPUTS,
        params=config.model_dump(mode="json"),
    )


def default_schedule(config: MultizoneConfig | None = None) -> InputSchedule:
    """Constant hot-soak cool-down inputs (validation scenario at a steady 50 km/h)."""
    return InputSchedule(
        {
            "V_veh": 50.0,
            "T_ext": 45.0,
            "r_ext": 40.0,
            "I_sol": 1000.0,
            "m_inlet": 450.0,
            "r_inlet": 20.0,
            "T_inlet": 15.0,
        }
    )
