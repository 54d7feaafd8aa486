"""Restriction of a DAE model to its primary rows.

The restricted evaluators compute φ[P^θ] and ψ[P^γ] from (θ^P, γ^P, θ^S, μ).
Full-length work buffers hold NaN in every tertiary slot, so a row that read a
tertiary variable would surface as a non-finite value instead of a silently
wrong one.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..settings import SETTINGS
from .model import DaeModel, Inputs, fill_explicit, newton_rows
from .partition import Partition, PartitionError
from .variables import check_vector

NAN = float("nan")


@dataclass(frozen=True, eq=False)
class RestrictedModel:
    model: DaeModel
    partition: Partition
    gamma_order: tuple[int, ...] | None = field(init=False)

    def __post_init__(self) -> None:
        order = self.model.explicit_order
        if order is None:
            restricted = None
        else:
            primary = set(self.partition.primary_gamma)
            restricted = tuple(k for k in order if k in primary)
        object.__setattr__(self, "gamma_order", restricted)

    @property
    def theta_carried(self) -> tuple[int, ...]:
        return tuple(sorted(self.partition.primary_theta + self.partition.secondary_theta))

    def buffers(
        self,
        theta_p: Sequence[float],
        gamma_p: Sequence[float] | None,
        theta_s: Sequence[float],
    ) -> tuple[list[float], list[float]]:
        """Scatter restricted vectors into NaN-filled full-length buffers."""
        part = self.partition
        theta_p = check_vector(theta_p, len(part.primary_theta), "theta_p")
        theta_s = check_vector(theta_s, len(part.secondary_theta), "theta_s")
        theta = [NAN] * part.n_theta
        gamma = [NAN] * part.n_gamma
        for i, value in zip(part.primary_theta, theta_p, strict=True):
            theta[i] = float(value)
        for i, value in zip(part.secondary_theta, theta_s, strict=True):
            theta[i] = float(value)
        if gamma_p is not None:
            gamma_p = check_vector(gamma_p, len(part.primary_gamma), "gamma_p")
            for k, value in zip(part.primary_gamma, gamma_p, strict=True):
                gamma[k] = float(value)
        return theta, gamma

    def rates_into(
        self, theta: Sequence[float], gamma: Sequence[float], inputs: Inputs
    ) -> list[float]:
        rates = self.model.rates
        return [rates[j](theta, gamma, inputs) for j in self.partition.primary_theta]

    def solve_into(
        self, theta: Sequence[float], gamma: list[float], inputs: Inputs, tol: float
    ) -> None:
        """Solve ψ[P^γ] = 0 for γ^P in place on full-length buffers."""
        if self.gamma_order is not None:
            fill_explicit(self.model, self.gamma_order, theta, gamma, inputs)
            return
        for k in self.partition.primary_gamma:
            if gamma[k] != gamma[k]:
                gamma[k] = 0.0
        newton_rows(self.model, self.partition.primary_gamma, theta, gamma, inputs, tol=tol)

    def phi_p(
        self,
        theta_p: Sequence[float],
        gamma_p: Sequence[float],
        theta_s: Sequence[float],
        inputs: Inputs,
    ) -> np.ndarray:
        """φ^P(θ^P, γ^P, θ^S, μ): the P^θ rows of the derivative map."""
        self.model.check_inputs(inputs)
        theta, gamma = self.buffers(theta_p, gamma_p, theta_s)
        return np.array(self.rates_into(theta, gamma, inputs))

    def psi_p(
        self,
        theta_p: Sequence[float],
        gamma_p: Sequence[float],
        theta_s: Sequence[float],
        inputs: Inputs,
    ) -> np.ndarray:
        """ψ^P(θ^P, γ^P, θ^S, μ): the P^γ rows of the algebraic residual."""
        self.model.check_inputs(inputs)
        theta, gamma = self.buffers(theta_p, gamma_p, theta_s)
        residuals = self.model.residuals
        return np.array([residuals[k](theta, gamma, inputs) for k in self.partition.primary_gamma])

    def solve_gamma_p(
        self,
        theta_p: Sequence[float],
        theta_s: Sequence[float],
        inputs: Inputs,
        gamma_guess: Sequence[float] | None = None,
        tol: float | None = None,
    ) -> np.ndarray:
        self.model.check_inputs(inputs)
        theta, gamma = self.buffers(theta_p, gamma_guess, theta_s)
        self.solve_into(theta, gamma, inputs, SETTINGS.newton_tol if tol is None else tol)
        return np.array([gamma[k] for k in self.partition.primary_gamma])


def restrict_model(model: DaeModel, partition: Partition) -> RestrictedModel:
    """Return evaluators over (θ^P, γ^P, θ^S, μ) equal to the primary rows of φ and ψ.

    Raises:
        PartitionError: The partition does not match the model dimensions, or a
            retained row reads a tertiary variable.
    """
    if partition.n_theta != model.n_theta or partition.n_gamma != model.n_gamma:
        raise PartitionError(
            f"Partition sized for ({partition.n_theta}, {partition.n_gamma}) variables "
            f"but model {model.name} has ({model.n_theta}, {model.n_gamma}).",
            model=model.name,
        )
    incidence = model.incidence
    tertiary_theta = list(partition.tertiary_theta)
    tertiary_gamma = list(partition.tertiary_gamma)
    rows = list(partition.primary_theta)
    algebraic_rows = list(partition.primary_gamma)
    leaks = (
        incidence.phi_theta[np.ix_(rows, tertiary_theta)].any()
        or incidence.phi_gamma[np.ix_(rows, tertiary_gamma)].any()
        or incidence.psi_theta[np.ix_(algebraic_rows, tertiary_theta)].any()
        or incidence.psi_gamma[np.ix_(algebraic_rows, tertiary_gamma)].any()
    )
    if leaks:
        raise PartitionError(
            "A retained equation reads a tertiary variable; the partition is not closed.",
            model=model.name,
        )
    return RestrictedModel(model, partition)
