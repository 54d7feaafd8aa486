"""Two-wall cabin: a windshield and a roof around one air zone.

Each wall is discretized into internal, middle and external nodes, every node
carrying the full wall capacitance m·Cp. The air temperature follows a first
order lag towards the comfort set point, with no feedback from the walls.

θ = [T_1 .. T_7] (°C): windshield nodes, roof nodes, air zone.
γ = [Q_1 .. Q_10] (W): heat fluxes, positive from the cabin towards the outside.
μ = (h_ext, T_ext, T_cab).
"""

from __future__ import annotations

from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, PositiveFloat

from ..dae.model import AlgebraicEquation, DaeModel, DifferentialEquation, Inputs, RowFn
from ..dae.variables import InputSchedule, VariableSpace

MODEL_NAME = "illustrative"
INPUTS = ("h_ext", "T_ext", "T_cab")


class WallParams(BaseModel):
    """Physical characteristics of one cabin wall.

    Attributes:
        mass: Total mass (kg).
        surface: Surface (m²).
        thickness: Thickness (m).
        specific_heat: Specific heat capacity (J·kg⁻¹·K⁻¹).
        conductivity: Thermal conductivity (W·m⁻¹·K⁻¹).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    mass: PositiveFloat
    surface: PositiveFloat
    thickness: PositiveFloat
    specific_heat: PositiveFloat
    conductivity: PositiveFloat

    @property
    def capacitance(self) -> float:
        return self.mass * self.specific_heat

    @property
    def half_conductance(self) -> float:
        """Conductance between adjacent nodes, 2·λ·S/E (W/K)."""
        return 2.0 * self.conductivity * self.surface / self.thickness


WINDSHIELD = WallParams(
    mass=14.8525, surface=1.3, thickness=0.005, specific_heat=829.0, conductivity=0.55
)
ROOF = WallParams(
    mass=49.708, surface=3.4, thickness=0.020, specific_heat=814.5, conductivity=0.042
)


class IllustrativeParams(BaseModel):
    """Parameters of the two-wall cabin.

    ``h_ext``, ``T_ext`` and ``T_cab`` are the default values of the input channels
    of the same name. ``initial_temperature`` defaults to ``T_ext``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    windshield: WallParams = WINDSHIELD
    roof: WallParams = ROOF
    h_int: PositiveFloat = 20.0
    h_ext: PositiveFloat = 35.0
    tau: PositiveFloat = 60.0
    T_ext: float = -18.0
    T_cab: float = 20.0
    initial_temperature: float | None = None

    @property
    def theta0(self) -> float:
        return self.T_ext if self.initial_temperature is None else self.initial_temperature


def _storage(c: float, q_in: int, q_out: int) -> RowFn:
    def rate(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return (gamma[q_in] - gamma[q_out]) / c

    return rate


def _conductance(k: float, hot: int, cold: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return k * (theta[hot] - theta[cold])

    return flux


def _external(surface: float, node: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return inputs["h_ext"] * surface * (theta[node] - inputs["T_ext"])

    return flux


def _junction(a: int, b: int) -> RowFn:
    def flux(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return gamma[a] + gamma[b]

    return flux


def build_illustrative_cabin(params: IllustrativeParams | None = None) -> DaeModel:
    """Build the linear two-wall cabin DAE (7 differential, 10 algebraic variables)."""
    params = params or IllustrativeParams()
    w, r = params.windshield, params.roof
    c_w, c_r = w.capacitance, r.capacitance
    tau = params.tau

    def air_lag(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return (inputs["T_cab"] - theta[6]) / tau

    differential = (
        DifferentialEquation("T_1", _storage(c_w, 0, 1), reads_gamma=(0, 1)),
        DifferentialEquation("T_2", _storage(c_w, 1, 2), reads_gamma=(1, 2)),
        DifferentialEquation("T_3", _storage(c_w, 2, 3), reads_gamma=(2, 3)),
        DifferentialEquation("T_4", _storage(c_r, 4, 5), reads_gamma=(4, 5)),
        DifferentialEquation("T_5", _storage(c_r, 5, 6), reads_gamma=(5, 6)),
        DifferentialEquation("T_6", _storage(c_r, 6, 7), reads_gamma=(6, 7)),
        DifferentialEquation("T_7", air_lag, reads_theta=(6,)),
    )
    algebraic = (
        AlgebraicEquation("Q_1", _conductance(params.h_int * w.surface, 6, 0), reads_theta=(6, 0)),
        AlgebraicEquation("Q_2", _conductance(w.half_conductance, 0, 1), reads_theta=(0, 1)),
        AlgebraicEquation("Q_3", _conductance(w.half_conductance, 1, 2), reads_theta=(1, 2)),
        AlgebraicEquation("Q_4", _external(w.surface, 2), reads_theta=(2,)),
        AlgebraicEquation("Q_5", _conductance(params.h_int * r.surface, 6, 3), reads_theta=(6, 3)),
        AlgebraicEquation("Q_6", _conductance(r.half_conductance, 3, 4), reads_theta=(3, 4)),
        AlgebraicEquation("Q_7", _conductance(r.half_conductance, 4, 5), reads_theta=(4, 5)),
        AlgebraicEquation("Q_8", _external(r.surface, 5), reads_theta=(5,)),
        AlgebraicEquation("Q_9", _junction(0, 4), reads_gamma=(0, 4)),
        AlgebraicEquation("Q_10", _junction(3, 7), reads_gamma=(3, 7)),
    )
    space = VariableSpace(
        theta_names=tuple(eq.variable for eq in differential),
        gamma_names=tuple(eq.variable for eq in algebraic),
        initial=[params.theta0] * len(differential),
    )
    return DaeModel(
        name=MODEL_NAME,
        space=space,
        differential=differential,
        algebraic=algebraic,
        inputs=INPUTS,
        params=params.model_dump(mode="json"),
    )


def default_schedule(params: IllustrativeParams | None = None) -> InputSchedule:
    params = params or IllustrativeParams()
    return InputSchedule({"h_ext": params.h_ext, "T_ext": params.T_ext, "T_cab": params.T_cab})
