"""Structural incidence of a semi-explicit DAE.

Four boolean relations record which variables each equation reads:

- ``phi_gamma[j, i]``: γ_i appears in φ_j
- ``phi_theta[j, i]``: θ_i appears in φ_j
- ``psi_theta[k, j]``: θ_j appears in ψ_k
- ``psi_gamma[k, i]``: γ_i appears in ψ_k (diagonal always true)

``mixed`` holds triples (k, i, j) with a structurally nonzero ∂²ψ_k/∂γ_i∂θ_j.
All indices are 0-based.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import ModelConfigurationError


def _relation(rows: Sequence[Iterable[int]], n_cols: int, label: str) -> np.ndarray:
    matrix = np.zeros((len(rows), n_cols), dtype=bool)
    for row, columns in enumerate(rows):
        for column in columns:
            if not 0 <= column < n_cols:
                raise ModelConfigurationError(
                    f"{label}: row {row} references index {column} outside [0, {n_cols}).",
                    relation=label,
                    row=row,
                    index=column,
                )
            matrix[row, column] = True
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class Incidence:
    phi_theta: np.ndarray
    phi_gamma: np.ndarray
    psi_theta: np.ndarray
    psi_gamma: np.ndarray
    mixed: frozenset[tuple[int, int, int]] = frozenset()

    def __post_init__(self) -> None:
        n_theta, n_gamma = self.phi_gamma.shape
        expected = {
            "phi_theta": (n_theta, n_theta),
            "psi_theta": (n_gamma, n_theta),
            "psi_gamma": (n_gamma, n_gamma),
        }
        for label, shape in expected.items():
            if getattr(self, label).shape != shape:
                raise ModelConfigurationError(
                    f"{label} has shape {getattr(self, label).shape}, expected {shape}."
                )
        if n_gamma and not np.all(np.diag(self.psi_gamma)):
            missing = [int(k) for k in np.flatnonzero(~np.diag(self.psi_gamma))]
            raise ModelConfigurationError(
                "Every algebraic equation must involve the variable it defines.", rows=missing
            )
        for k, i, j in self.mixed:
            if not (0 <= k < n_gamma and 0 <= i < n_gamma and 0 <= j < n_theta):
                raise ModelConfigurationError(f"Mixed pair {(k, i, j)} is out of range.")
            if not (self.psi_gamma[k, i] and self.psi_theta[k, j]):
                raise ModelConfigurationError(
                    f"Mixed pair {(k, i, j)} needs γ_{i} and θ_{j} both in ψ_{k}.",
                    pair=[k, i, j],
                )

    @classmethod
    def from_rows(
        cls,
        n_theta: int,
        n_gamma: int,
        phi_theta: Sequence[Iterable[int]],
        phi_gamma: Sequence[Iterable[int]],
        psi_theta: Sequence[Iterable[int]],
        psi_gamma: Sequence[Iterable[int]],
        mixed: Iterable[tuple[int, int, int]] = (),
    ) -> Incidence:
        """Build the relations from per-equation dependency lists."""
        psi_gamma = [set(columns) | {row} for row, columns in enumerate(psi_gamma)]
        return cls(
            phi_theta=_relation(phi_theta, n_theta, "phi_theta"),
            phi_gamma=_relation(phi_gamma, n_gamma, "phi_gamma"),
            psi_theta=_relation(psi_theta, n_theta, "psi_theta"),
            psi_gamma=_relation(psi_gamma, n_gamma, "psi_gamma"),
            mixed=frozenset((int(k), int(i), int(j)) for k, i, j in mixed),
        )

    @property
    def n_theta(self) -> int:
        return self.phi_gamma.shape[0]

    @property
    def n_gamma(self) -> int:
        return self.phi_gamma.shape[1]

    def pairs(self, relation: str) -> list[list[int]]:
        """Return the true positions of a relation as sorted 1-based [row, column] pairs."""
        matrix = getattr(self, relation)
        return [[int(r) + 1, int(c) + 1] for r, c in zip(*np.nonzero(matrix), strict=True)]
