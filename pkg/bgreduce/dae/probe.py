"""Finite-difference check of declared incidence against the actual equations."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .model import DaeModel, Inputs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IncidenceViolation:
    relation: str
    row: int
    column: int
    change: float


def probe_incidence(
    model: DaeModel,
    sample: Callable[[np.random.Generator], tuple[np.ndarray, np.ndarray, Inputs]],
    n_samples: int = 100,
    seed: int = 0,
    threshold: float = 1e-12,
    step: float = 1e-3,
) -> list[IncidenceViolation]:
    """Perturb single variables and report rows that react without a declared bit.

    ``sample`` draws a base point (θ, γ, μ). For each draw one θ_i and one γ_i are
    perturbed by ``step``; any φ or ψ row changing by more than ``threshold`` where
    the incidence is false is a violation.
    """
    rng = np.random.default_rng(seed)
    incidence = model.incidence
    violations: list[IncidenceViolation] = []

    def rows(theta: np.ndarray, gamma: np.ndarray, inputs: Inputs) -> tuple[np.ndarray, ...]:
        phi = np.array([rate(theta, gamma, inputs) for rate in model.rates])
        psi = np.array([res(theta, gamma, inputs) for res in model.residuals])
        return phi, psi

    for _ in range(n_samples):
        theta, gamma, inputs = sample(rng)
        phi0, psi0 = rows(theta, gamma, inputs)

        i = int(rng.integers(model.n_theta))
        shifted = theta.copy()
        shifted[i] += step
        phi1, psi1 = rows(shifted, gamma, inputs)
        for relation, delta, declared in (
            ("phi_theta", phi1 - phi0, incidence.phi_theta[:, i]),
            ("psi_theta", psi1 - psi0, incidence.psi_theta[:, i]),
        ):
            for row in np.flatnonzero((np.abs(delta) > threshold) & ~declared):
                violations.append(IncidenceViolation(relation, int(row), i, float(delta[row])))

        if model.n_gamma:
            i = int(rng.integers(model.n_gamma))
            shifted = gamma.copy()
            shifted[i] += step
            phi1, psi1 = rows(theta, shifted, inputs)
            for relation, delta, declared in (
                ("phi_gamma", phi1 - phi0, incidence.phi_gamma[:, i]),
                ("psi_gamma", psi1 - psi0, incidence.psi_gamma[:, i]),
            ):
                for row in np.flatnonzero((np.abs(delta) > threshold) & ~declared):
                    violations.append(
                        IncidenceViolation(relation, int(row), i, float(delta[row]))
                    )

    if violations:
        logger.warning("%d undeclared incidences found in model %s", len(violations), model.name)
    return violations
