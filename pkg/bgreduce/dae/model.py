"""Semi-explicit DAE models built from per-variable equations.

A model is the system

    dθ/dt = φ(θ, γ, μ)
        0 = ψ(θ, γ, μ)

where each row φ_j governs θ_j and each row ψ_k causally defines γ_k. Rows are
plain callables ``fn(theta, gamma, inputs) -> float`` that accept any indexable
sequence of floats, so evaluators can work on numpy arrays or Python lists.
"""

from __future__ import annotations

import graphlib
import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from ..errors import BgReduceError, ModelConfigurationError
from ..settings import SETTINGS
from .incidence import Incidence
from .variables import VariableSpace, check_vector

logger = logging.getLogger(__name__)

Inputs = Mapping[str, float]
RowFn = Callable[[Sequence[float], Sequence[float], Inputs], float]
SolveMethod = Literal["auto", "explicit", "newton"]


class AlgebraicSolveError(BgReduceError):
    """Raised when the algebraic constraints cannot be solved to tolerance.

    Usually signals a causality or modeling defect; ``details["residual_norm"]``
    holds the infinity norm of the last residual.
    """


@dataclass(frozen=True)
class DifferentialEquation:
    """Row φ_j of the derivative map, governing one differential variable."""

    variable: str
    rate: RowFn
    reads_theta: tuple[int, ...] = ()
    reads_gamma: tuple[int, ...] = ()


@dataclass(frozen=True)
class AlgebraicEquation:
    """Row ψ_k of the algebraic map, defining one algebraic variable.

    Attributes:
        variable: Name of the algebraic variable γ_k this row defines.
        explicit: Optional map γ_k = g_k(θ, γ, μ); when given and ``residual`` is
            omitted the residual is γ_k - g_k.
        residual: Optional implicit residual ψ_k(θ, γ, μ).
        reads_theta: Differential variables read by the row.
        reads_gamma: Other algebraic variables read by the row (γ_k is implied).
        mixed: Pairs (i, j) with a structurally nonzero ∂²ψ_k/∂γ_i∂θ_j.
    """

    variable: str
    explicit: RowFn | None = None
    residual: RowFn | None = None
    reads_theta: tuple[int, ...] = ()
    reads_gamma: tuple[int, ...] = ()
    mixed: tuple[tuple[int, int], ...] = ()


def _explicit_residual(k: int, explicit: RowFn) -> RowFn:
    def residual(theta: Sequence[float], gamma: Sequence[float], inputs: Inputs) -> float:
        return gamma[k] - explicit(theta, gamma, inputs)

    return residual


def _explicit_order(algebraic: Sequence[AlgebraicEquation]) -> tuple[int, ...] | None:
    if any(eq.explicit is None for eq in algebraic):
        return None
    sorter: graphlib.TopologicalSorter[int] = graphlib.TopologicalSorter()
    for k, eq in enumerate(algebraic):
        sorter.add(k, *(i for i in eq.reads_gamma if i != k))
    try:
        return tuple(sorter.static_order())
    except graphlib.CycleError:
        return None


@dataclass(frozen=True, eq=False)
class DaeModel:
    """Immutable semi-explicit DAE with named variables and declared incidence.

    Attributes:
        name: Registry name of the builder that produced the model.
        space: Variable names, initial state and scaling.
        differential: One equation per differential variable, in θ order.
        algebraic: One equation per algebraic variable, in γ order.
        inputs: Names of the input channels μ read by the equations.
        params: Builder parameters (JSON-serializable) used for the model document.
    """

    name: str
    space: VariableSpace
    differential: tuple[DifferentialEquation, ...]
    algebraic: tuple[AlgebraicEquation, ...]
    inputs: tuple[str, ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)
    incidence: Incidence = field(init=False, repr=False)
    explicit_order: tuple[int, ...] | None = field(init=False, repr=False)
    rates: tuple[RowFn, ...] = field(init=False, repr=False)
    residuals: tuple[RowFn, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        differential = tuple(self.differential)
        algebraic = tuple(self.algebraic)
        theta_vars = tuple(eq.variable for eq in differential)
        gamma_vars = tuple(eq.variable for eq in algebraic)
        if theta_vars != self.space.theta_names:
            raise ModelConfigurationError(
                "Differential equations must govern the differential variables in order.",
                expected=list(self.space.theta_names),
                received=list(theta_vars),
            )
        if gamma_vars != self.space.gamma_names:
            raise ModelConfigurationError(
                "Algebraic equations must define the algebraic variables in order.",
                expected=list(self.space.gamma_names),
                received=list(gamma_vars),
            )

        residuals: list[RowFn] = []
        for k, eq in enumerate(algebraic):
            if eq.residual is not None:
                residuals.append(eq.residual)
            elif eq.explicit is not None:
                residuals.append(_explicit_residual(k, eq.explicit))
            else:
                raise ModelConfigurationError(
                    f"Algebraic equation for {eq.variable} needs an explicit map or a residual.",
                    variable=eq.variable,
                )

        incidence = Incidence.from_rows(
            self.space.n_theta,
            self.space.n_gamma,
            phi_theta=[eq.reads_theta for eq in differential],
            phi_gamma=[eq.reads_gamma for eq in differential],
            psi_theta=[eq.reads_theta for eq in algebraic],
            psi_gamma=[eq.reads_gamma for eq in algebraic],
            mixed=[(k, i, j) for k, eq in enumerate(algebraic) for i, j in eq.mixed],
        )

        object.__setattr__(self, "differential", differential)
        object.__setattr__(self, "algebraic", algebraic)
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "incidence", incidence)
        object.__setattr__(self, "explicit_order", _explicit_order(algebraic))
        object.__setattr__(self, "rates", tuple(eq.rate for eq in differential))
        object.__setattr__(self, "residuals", tuple(residuals))

    @property
    def n_theta(self) -> int:
        return self.space.n_theta

    @property
    def n_gamma(self) -> int:
        return self.space.n_gamma

    @property
    def has_explicit_map(self) -> bool:
        return self.explicit_order is not None

    def check_inputs(self, inputs: Inputs) -> None:
        missing = [name for name in self.inputs if name not in inputs]
        if missing:
            raise ModelConfigurationError(
                f"Missing input values: {', '.join(missing)}.", missing=missing
            )


def eval_derivatives(
    model: DaeModel,
    theta: Sequence[float],
    gamma: Sequence[float],
    inputs: Inputs,
    t: float = 0.0,
) -> np.ndarray:
    """Return φ(θ, γ, μ) as a new vector.

    ``t`` is accepted for symmetry with the integrators; time dependence enters
    through the input values, which the caller samples at ``t``.
    """
    theta = check_vector(theta, model.n_theta, "theta")
    gamma = check_vector(gamma, model.n_gamma, "gamma")
    model.check_inputs(inputs)
    return np.array([rate(theta, gamma, inputs) for rate in model.rates], dtype=float)


def eval_residuals(
    model: DaeModel, theta: Sequence[float], gamma: Sequence[float], inputs: Inputs
) -> np.ndarray:
    """Return ψ(θ, γ, μ) as a new vector."""
    theta = check_vector(theta, model.n_theta, "theta")
    gamma = check_vector(gamma, model.n_gamma, "gamma")
    model.check_inputs(inputs)
    return np.array([residual(theta, gamma, inputs) for residual in model.residuals], dtype=float)


def fill_explicit(
    model: DaeModel,
    order: Iterable[int],
    theta: Sequence[float],
    gamma: list[float],
    inputs: Inputs,
) -> None:
    """Evaluate the explicit maps of the given rows in order, writing into ``gamma``."""
    algebraic = model.algebraic
    for k in order:
        gamma[k] = algebraic[k].explicit(theta, gamma, inputs)  # type: ignore[misc]


def newton_rows(
    model: DaeModel,
    rows: Sequence[int],
    theta: Sequence[float],
    gamma: list[float],
    inputs: Inputs,
    *,
    tol: float,
    max_iter: int | None = None,
) -> float:
    """Damped Newton solve of ψ_k = 0 for γ_k over the given rows, in place.

    Entries of ``gamma`` outside ``rows`` are held fixed. The Jacobian is built by
    forward differences with a relative step of ``SETTINGS.fd_step``; each step is
    halved until the residual infinity norm decreases or the damping floor
    ``SETTINGS.newton_min_damping`` is reached.

    Returns:
        The final residual infinity norm.

    Raises:
        AlgebraicSolveError: The residual is still above ``tol`` after ``max_iter``
            iterations, or the Jacobian is singular.
    """
    rows = list(rows)
    if not rows:
        return 0.0
    max_iter = SETTINGS.newton_max_iter if max_iter is None else max_iter
    residuals = model.residuals
    work = list(gamma)

    def evaluate(values: np.ndarray) -> np.ndarray:
        for k, value in zip(rows, values, strict=True):
            work[k] = float(value)
        return np.array([residuals[k](theta, work, inputs) for k in rows], dtype=float)

    x = np.array([gamma[k] for k in rows], dtype=float)
    r = evaluate(x)
    norm = float(np.max(np.abs(r)))
    iteration = 0
    while norm > tol and iteration < max_iter:
        iteration += 1
        jacobian = np.empty((len(rows), len(rows)))
        for c in range(len(rows)):
            step = SETTINGS.fd_step * max(1.0, abs(x[c]))
            shifted = x.copy()
            shifted[c] += step
            jacobian[:, c] = (evaluate(shifted) - r) / step
        try:
            delta = np.linalg.solve(jacobian, r)
        except np.linalg.LinAlgError as exc:
            raise AlgebraicSolveError(
                f"Singular algebraic Jacobian: {exc}",
                residual_norm=norm,
                iterations=iteration,
            ) from exc

        damping = 1.0
        while True:
            candidate = x - damping * delta
            r_candidate = evaluate(candidate)
            norm_candidate = float(np.max(np.abs(r_candidate)))
            if norm_candidate < norm or damping <= SETTINGS.newton_min_damping:
                break
            damping *= 0.5
        if norm_candidate >= norm:
            logger.warning(
                "Newton line search hit the damping floor (residual %.3e -> %.3e)",
                norm,
                norm_candidate,
            )
        x, r, norm = candidate, r_candidate, norm_candidate

    if not np.isfinite(norm) or norm > tol:
        raise AlgebraicSolveError(
            f"Algebraic solve did not converge after {iteration} iterations "
            f"(residual {norm:.3e} > {tol:.3e}).",
            residual_norm=norm,
            iterations=iteration,
        )
    for k, value in zip(rows, x, strict=True):
        gamma[k] = float(value)
    logger.debug("Newton converged in %d iterations (residual %.3e)", iteration, norm)
    return norm


def solve_algebraic(
    model: DaeModel,
    theta: Sequence[float],
    inputs: Inputs,
    gamma_guess: Sequence[float] | None = None,
    tol: float | None = None,
    method: SolveMethod = "auto",
) -> np.ndarray:
    """Solve ψ(θ, γ, μ) = 0 for γ.

    Args:
        model: The DAE model.
        theta: Differential variable values.
        inputs: Input values μ.
        gamma_guess: Starting point for Newton (zeros when omitted).
        tol: Infinity-norm tolerance on the residual (defaults to SETTINGS.newton_tol).
        method: ``"explicit"`` evaluates the explicit maps in dependency order,
            ``"newton"`` runs damped Newton on the residuals, ``"auto"`` prefers the
            explicit maps when the model has them.

    Returns:
        The algebraic vector γ.

    Raises:
        ModelConfigurationError: ``tol`` is not positive or the explicit path was
            requested for a model without one.
        AlgebraicSolveError: The residual cannot be brought below ``tol``.
    """
    tol = SETTINGS.newton_tol if tol is None else tol
    if tol <= 0:
        raise ModelConfigurationError(f"tol must be positive (received {tol!r}).")
    theta = check_vector(theta, model.n_theta, "theta")
    model.check_inputs(inputs)
    if gamma_guess is None:
        gamma = [0.0] * model.n_gamma
    else:
        gamma = check_vector(gamma_guess, model.n_gamma, "gamma_guess").tolist()

    if method == "explicit" and not model.has_explicit_map:
        raise ModelConfigurationError(
            f"Model {model.name} has no explicit algebraic map.", model=model.name
        )
    if method in ("auto", "explicit") and model.has_explicit_map:
        fill_explicit(model, model.explicit_order, theta, gamma, inputs)  # type: ignore[arg-type]
        residual = max(
            (abs(fn(theta, gamma, inputs)) for fn in model.residuals), default=0.0
        )
        if not residual <= tol:
            raise AlgebraicSolveError(
                f"Explicit algebraic map leaves residual {residual:.3e} > {tol:.3e}.",
                residual_norm=residual,
            )
        return np.array(gamma)

    newton_rows(model, range(model.n_gamma), theta, gamma, inputs, tol=tol)
    return np.array(gamma)
