"""Primary / secondary / tertiary classification from the declared incidence."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import numpy as np

from ..dae.model import DaeModel
from ..dae.partition import Partition, PartitionError

logger = logging.getLogger(__name__)


class ClassificationError(PartitionError):
    """Raised when an algebraic variable would be secondary.

    The method assumes every algebraic variable read by a retained equation is
    itself primary; a model that breaks this is outside its scope.
    """


def classify_variables(model: DaeModel, primary: Iterable[int]) -> Partition:
    """Derive the full partition from the primary differential indices (0-based).

    - P^γ: algebraic variables read by a primary derivative row, or linked to a
      primary differential variable through a declared mixed pair.
    - T^θ, T^γ: non-primary variables read by no retained row (φ[P^θ] or ψ[P^γ]).
    - S^θ: the remaining differential variables.

    Raises:
        PartitionError: An index is out of range or repeated.
        ClassificationError: Some algebraic variable is neither primary nor tertiary.
    """
    requested = [int(j) for j in primary]
    primary_theta = sorted(set(requested))
    if len(primary_theta) != len(requested):
        raise PartitionError("Primary indices must be distinct.")
    n_theta, n_gamma = model.n_theta, model.n_gamma
    bad = [j for j in primary_theta if not 0 <= j < n_theta]
    if bad:
        raise PartitionError(
            f"Primary indices {[j + 1 for j in bad]} are outside 1..{n_theta}.",
            indices=[j + 1 for j in bad],
        )
    if not primary_theta:
        raise PartitionError("At least one primary differential variable is needed.")

    incidence = model.incidence
    in_primary = np.zeros(n_theta, dtype=bool)
    in_primary[primary_theta] = True

    gamma_primary = incidence.phi_gamma[in_primary].any(axis=0)
    for k, i, j in incidence.mixed:
        if in_primary[j]:
            gamma_primary[i] = True

    read_theta = incidence.phi_theta[in_primary].any(axis=0) | incidence.psi_theta[
        gamma_primary
    ].any(axis=0)
    read_gamma = incidence.phi_gamma[in_primary].any(axis=0) | incidence.psi_gamma[
        gamma_primary
    ].any(axis=0)

    tertiary_theta = ~in_primary & ~read_theta
    secondary_theta = ~in_primary & read_theta
    tertiary_gamma = ~gamma_primary & ~read_gamma
    secondary_gamma = ~gamma_primary & read_gamma

    if secondary_gamma.any():
        names = [model.space.gamma_names[i] for i in np.flatnonzero(secondary_gamma)]
        raise ClassificationError(
            "Algebraic variables "
            f"{', '.join(names)} feed retained equations but are not primary; "
            "the model has secondary algebraic variables, which the reduction does not support.",
            secondary_gamma=[int(i) + 1 for i in np.flatnonzero(secondary_gamma)],
        )

    partition = Partition(
        n_theta=n_theta,
        n_gamma=n_gamma,
        primary_theta=primary_theta,
        secondary_theta=np.flatnonzero(secondary_theta).tolist(),
        tertiary_theta=np.flatnonzero(tertiary_theta).tolist(),
        primary_gamma=np.flatnonzero(gamma_primary).tolist(),
        tertiary_gamma=np.flatnonzero(tertiary_gamma).tolist(),
    )
    logger.info(
        "Partition of %s: %d primary / %d secondary / %d tertiary θ, %d primary / %d tertiary γ",
        model.name,
        len(partition.primary_theta),
        len(partition.secondary_theta),
        len(partition.tertiary_theta),
        len(partition.primary_gamma),
        len(partition.tertiary_gamma),
    )
    return partition
