"""Trajectories in, hybrid artifact out."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Literal

import numpy as np

from ..ann.layers import Activation, calibrate_layer
from ..ann.stabilize import select_stabilized_modes
from ..dae.model import DaeModel
from ..dae.partition import Partition
from ..dae.variables import InputSchedule
from ..errors import BgReduceError, ModelConfigurationError
from ..reduction.classify import classify_variables
from ..reduction.deim import select_interpolation_indices
from ..reduction.snapshots import assemble_snapshots
from ..reduction.svd import ReducedBasis, truncated_svd
from ..simulation.trajectory import Trajectory
from .artifact import HybridArtifact, Provenance
from .model import build_hybrid, integrate_hybrid, reconstruct_tertiary

logger = logging.getLogger(__name__)

StabilizedModes = int | Literal["auto"] | None


class ReductionError(BgReduceError):
    """Raised when the reduction pipeline is configured inconsistently."""


def _assemble(
    model: DaeModel,
    basis: ReducedBasis,
    partition: Partition,
    n_stab: int,
    activation: Activation,
    order: tuple[int, ...],
    dt: float,
    substeps: int,
    t_final: float | None,
    provenance: Provenance,
) -> HybridArtifact:
    primary = partition.primary_theta
    bounded = model.space.nonnegative_indices
    coupling = calibrate_layer(
        basis, primary, partition.secondary_theta, n_stab, activation, nonnegative=bounded
    )
    reconstruction = calibrate_layer(
        basis, primary, partition.tertiary_theta, n_stab, activation, nonnegative=bounded
    )
    return build_hybrid(
        model,
        basis,
        partition,
        coupling,
        reconstruction,
        dt=dt,
        substeps=substeps,
        t_final=t_final,
        interpolation_order=order,
        provenance=provenance,
    )


def validation_max_error(artifact: HybridArtifact, validation: Sequence[Trajectory]) -> float:
    """Largest |error| over all θ and samples 1..m of the reconstructed hybrid runs."""
    worst = 0.0
    for reference in validation:
        schedule = InputSchedule.from_samples(reference.times, reference.inputs)
        run = integrate_hybrid(
            artifact,
            schedule,
            t_final=float(reference.times[-1]),
            dt=reference.dt,
            point=reference.point,
        )
        run = reconstruct_tertiary(artifact, run, algebraic=False)
        error = np.abs(run.theta[:, 1:] - reference.theta[:, 1:])
        if not np.all(np.isfinite(error)):
            return math.inf
        worst = max(worst, float(np.max(error)))
    return worst


def reduce_trajectories(
    model: DaeModel,
    trajectories: Sequence[Trajectory],
    n_modes: int | None = None,
    eps_tol: float | None = None,
    n_stab: StabilizedModes = None,
    activation: Activation = "identity",
    validation: Sequence[Trajectory] = (),
    substeps: int = 1,
    seed: int | None = None,
    files: Sequence[str] = (),
) -> HybridArtifact:
    """Snapshots → SVD → interpolation indices → classification → layers → artifact.

    Args:
        model: Full model that produced ``trajectories``.
        trajectories: Training runs sharing one time grid.
        n_modes: Fixed number of modes N.
        eps_tol: Frobenius residual bound, used when ``n_modes`` is None.
        n_stab: Stabilized modes Ñ; None uses N, ``"auto"`` sweeps 1..N on ``validation``.
        activation: Activation of both layers; ``relu`` only clamps the variables the
            model declares non-negative.
        validation: Held-out runs for the ``"auto"`` sweep.
        substeps: Internal steps per interval stored as the artifact default.
        seed: DOE seed recorded in the provenance block.
        files: Trajectory file names recorded in the provenance block.

    Raises:
        ReductionError: ``"auto"`` without validation trajectories.
    """
    if not trajectories:
        raise ReductionError("At least one training trajectory is needed.")
    if n_stab == "auto" and not validation:
        raise ReductionError("n_stab='auto' needs validation trajectories.")
    if isinstance(n_stab, int) and n_stab < 1:
        raise ModelConfigurationError(f"n_stab must be at least 1 (received {n_stab}).")
    if activation == "relu" and not model.space.nonnegative:
        logger.warning(
            "Model %s declares no non-negative variables; relu layers act as identity",
            model.name,
        )

    snapshots = assemble_snapshots(trajectories, model.space)
    basis = truncated_svd(snapshots, n_modes=n_modes, eps_tol=eps_tol)
    order = select_interpolation_indices(basis)
    partition = classify_variables(model, order)

    reference = trajectories[0]
    dt = reference.dt
    t_final = float(reference.times[-1])
    provenance = Provenance(
        seed=seed,
        points=[dict(t.point) for t in trajectories],
        trajectories=list(files),
    )

    def assemble(n: int) -> HybridArtifact:
        return _assemble(
            model, basis, partition, n, activation, order, dt, substeps, t_final, provenance
        )

    if n_stab == "auto":
        sweep = select_stabilized_modes(
            basis.n_modes, lambda n: validation_max_error(assemble(n), validation)
        )
        chosen = sweep.n_modes
        provenance.n_stab_scores = {
            n: (score if math.isfinite(score) else None) for n, score in sweep.scores.items()
        }
    else:
        chosen = basis.n_modes if n_stab is None else int(n_stab)

    artifact = assemble(chosen)
    logger.info(
        "Reduced %s to %d primary differential variables with N = %d, Ñ = %d",
        model.name,
        len(partition.primary_theta),
        basis.n_modes,
        chosen,
    )
    return artifact
