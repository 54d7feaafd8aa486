"""Steady-state solve of a DAE model under constant inputs."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np
from scipy.optimize import root

from ..dae.model import DaeModel, Inputs, eval_derivatives, solve_algebraic
from ..dae.variables import check_vector
from .integrator import SimulationError

logger = logging.getLogger(__name__)


def steady_state(
    model: DaeModel,
    inputs: Inputs,
    theta_guess: Sequence[float] | None = None,
    hold: Iterable[int] = (),
    xtol: float = 1e-13,
    rate_tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Find θ with φ(θ, g(θ, μ), μ) = 0 and return (θ, γ).

    Args:
        model: The DAE model.
        inputs: Constant input values.
        theta_guess: Starting point (defaults to the initial state).
        hold: Differential variables kept at their guess value; use it for
            conserved quantities whose rate is identically zero.
        xtol: Relative tolerance passed to the hybrid Powell solver.
        rate_tol: Largest |dθ/dt| accepted when the solver stops without
            reporting success.

    Raises:
        SimulationError: The solver did not converge.
    """
    model.check_inputs(inputs)
    base = (
        model.space.initial.copy()
        if theta_guess is None
        else check_vector(theta_guess, model.n_theta, "theta_guess").copy()
    )
    held = set(hold)
    free = np.array([i for i in range(model.n_theta) if i not in held], dtype=int)
    gamma_guess = np.zeros(model.n_gamma)

    def unpack(x: np.ndarray) -> np.ndarray:
        theta = base.copy()
        theta[free] = x
        return theta

    def residual(x: np.ndarray) -> np.ndarray:
        theta = unpack(x)
        gamma = solve_algebraic(model, theta, inputs, gamma_guess)
        return eval_derivatives(model, theta, gamma, inputs)[free]

    solution = root(residual, base[free], method="hybr", options={"xtol": xtol})
    residual_norm = float(np.max(np.abs(solution.fun))) if free.size else 0.0
    if not solution.success and not residual_norm <= rate_tol:
        raise SimulationError(
            f"Steady-state solve failed for {model.name}: {solution.message}",
            model=model.name,
            residual_norm=residual_norm,
        )
    theta = unpack(solution.x)
    gamma = solve_algebraic(model, theta, inputs, gamma_guess)
    logger.debug("Steady state of %s found after %d evaluations", model.name, solution.nfev)
    return theta, gamma
