"""Fixed-step explicit Euler integration of full DAE models.

Each internal step of size h = Δt / substeps first solves the algebraic
variables at t_n, then advances θ(t_{n+1}) = θ(t_n) + h·φ(θ, γ, μ(t_n)).
Samples are recorded every Δt.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping

import numpy as np

from ..dae.model import DaeModel, fill_explicit, newton_rows
from ..dae.variables import InputSchedule
from ..errors import BgReduceError, ModelConfigurationError
from ..settings import SETTINGS
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


class SimulationError(BgReduceError):
    """Raised when a state becomes non-finite (usually a stability failure)."""


def time_grid(t_final: float, dt: float, substeps: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Validate step settings and return (m, recorded times, internal times)."""
    if not dt > 0:
        raise ModelConfigurationError(f"dt must be positive (received {dt!r}).")
    if not t_final > 0:
        raise ModelConfigurationError(f"t_final must be positive (received {t_final!r}).")
    if int(substeps) != substeps or substeps < 1:
        raise ModelConfigurationError(
            f"substeps must be a positive integer (received {substeps!r})."
        )
    m = round(t_final / dt)
    if m < 1 or not math.isclose(m * dt, t_final, rel_tol=1e-9, abs_tol=1e-12):
        raise ModelConfigurationError(
            f"t_final ({t_final}) must be a multiple of dt ({dt}).", t_final=t_final, dt=dt
        )
    substeps = int(substeps)
    recorded = np.arange(m + 1) * dt
    internal = np.arange(m * substeps + 1) * (dt / substeps)
    return m, recorded, internal


def input_table(
    schedule: InputSchedule, names: tuple[str, ...], times: np.ndarray
) -> list[dict[str, float]]:
    """Sample the schedule once per internal step as plain float dicts."""
    if not names:
        return [{} for _ in range(times.shape[0])]
    sampled = schedule.sample(times)
    columns = [sampled[name].tolist() for name in names]
    return [dict(zip(names, row, strict=True)) for row in zip(*columns, strict=True)]


def check_finite(
    values: list[float], carried: tuple[int, ...], names: tuple[str, ...], t: float
) -> None:
    for i in carried:
        if not math.isfinite(values[i]):
            raise SimulationError(
                f"Non-finite value of {names[i]} at t = {t:g} s.", time=t, variable=names[i]
            )


def integrate(
    model: DaeModel,
    schedule: InputSchedule,
    t_final: float | None = None,
    dt: float | None = None,
    substeps: int | None = None,
    point: Mapping[str, float] | None = None,
) -> Trajectory:
    """Integrate the full model with explicit Euler.

    Args:
        model: The DAE model.
        schedule: Input channels; must cover [0, t_final] and every model input.
        t_final: Horizon in seconds (defaults to SETTINGS.t_final); a multiple of dt.
        dt: Recording interval in seconds (defaults to SETTINGS.dt).
        substeps: Internal steps per recording interval (defaults to SETTINGS.substeps).
        point: Parameter point stored on the trajectory.

    Returns:
        Trajectory with m+1 samples, column 0 holding the initial conditions.

    Raises:
        ModelConfigurationError: Invalid step settings or schedule.
        SimulationError: A state became non-finite.
        AlgebraicSolveError: The algebraic constraints could not be solved.
    """
    t_final = SETTINGS.t_final if t_final is None else t_final
    dt = SETTINGS.dt if dt is None else dt
    substeps = SETTINGS.substeps if substeps is None else substeps
    m, recorded, internal = time_grid(t_final, dt, substeps)
    schedule.check_covers(t_final, required=model.inputs)

    inputs = input_table(schedule, model.inputs, internal)
    h = dt / substeps
    n_theta, n_gamma = model.n_theta, model.n_gamma
    rates = model.rates
    order = model.explicit_order
    all_rows = tuple(range(n_gamma))
    all_theta = tuple(range(n_theta))
    names = model.space.theta_names
    tol = SETTINGS.newton_tol

    theta_out = np.empty((n_theta, m + 1))
    gamma_out = np.empty((n_gamma, m + 1))
    theta = model.space.initial.tolist()
    gamma = [0.0] * n_gamma

    last = m * substeps
    for n in range(last + 1):
        mu = inputs[n]
        if order is not None:
            fill_explicit(model, order, theta, gamma, mu)
        else:
            newton_rows(model, all_rows, theta, gamma, mu, tol=tol)
        if n % substeps == 0:
            k = n // substeps
            check_finite(theta, all_theta, names, float(recorded[k]))
            theta_out[:, k] = theta
            gamma_out[:, k] = gamma
        if n == last:
            break
        theta = [
            value + h * rate(theta, gamma, mu) for value, rate in zip(theta, rates, strict=True)
        ]

    logger.debug("Integrated %s over %d samples (dt=%g, substeps=%d)", model.name, m, dt, substeps)
    return Trajectory(
        times=recorded,
        theta=theta_out,
        gamma=gamma_out,
        inputs=schedule.sample(recorded),
        theta_names=model.space.theta_names,
        gamma_names=model.space.gamma_names,
        point=dict(point or {}),
    )
