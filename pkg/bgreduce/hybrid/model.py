"""Assembly and time stepping of the hybrid reduced model.

Each internal step of size h solves ψ[P^γ] = 0 for γ^P at t_n, advances θ^P
with explicit Euler, then sets θ^S(t_{n+1}) from θ^P(t_{n+1}) through the
coupling layer in scaled offset coordinates. Tertiary variables are never read
or written while stepping; they are reconstructed from recorded samples.
"""

from __future__ import annotations

import graphlib
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ..ann.layers import LinearLayer, forward
from ..dae.document import describe_model
from ..dae.model import AlgebraicSolveError, DaeModel
from ..dae.partition import Partition
from ..dae.restriction import RestrictedModel, restrict_model
from ..dae.variables import InputSchedule
from ..reduction.svd import ReducedBasis
from ..settings import SETTINGS
from ..simulation.integrator import check_finite, input_table, time_grid
from ..simulation.trajectory import Trajectory, TrajectoryError
from ..thermal.registry import load_model
from .artifact import (
    ArtifactError,
    BasisDocument,
    HybridArtifact,
    IntegrationDefaults,
    LayerDocument,
    PartitionDocument,
    Provenance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HybridRuntime:
    """Numpy-side view of an artifact bound to its DAE model."""

    model: DaeModel
    restricted: RestrictedModel
    basis: ReducedBasis
    coupling: LinearLayer
    reconstruction: LinearLayer
    scaled_initial: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scaled_initial", self.basis.scale * self.basis.initial)

    @property
    def partition(self) -> Partition:
        return self.restricted.partition

    def primary_offsets(self, theta_p: np.ndarray) -> np.ndarray:
        """Scaled offsets of primary values (vector or one column per sample)."""
        rows = list(self.partition.primary_theta)
        scale, initial = self.basis.scale[rows], self.basis.initial[rows]
        if np.ndim(theta_p) == 2:
            return scale[:, None] * (theta_p - initial[:, None])
        return scale * (theta_p - initial)

    def apply(self, layer: LinearLayer, theta_p: np.ndarray) -> np.ndarray:
        """Physical output values of ``layer`` for physical primary values."""
        rows = list(layer.outputs)
        out = forward(layer, self.primary_offsets(theta_p), self.scaled_initial[rows])
        scale, initial = self.basis.scale[rows], self.basis.initial[rows]
        if out.ndim == 2:
            return initial[:, None] + out / scale[:, None]
        return initial + out / scale


def _check_layer(
    layer: LinearLayer, partition: Partition, outputs: tuple[int, ...], label: str
) -> None:
    if layer.inputs != partition.primary_theta:
        raise ArtifactError(
            f"{label} layer reads {len(layer.inputs)} inputs but the partition has "
            f"{len(partition.primary_theta)} primary differential variables.",
            layer=label,
        )
    if layer.outputs != outputs:
        raise ArtifactError(
            f"{label} layer outputs {[i + 1 for i in layer.outputs]} do not match the "
            f"partition {[i + 1 for i in outputs]}.",
            layer=label,
        )


def _check_clamp(
    layer: LinearLayer, basis: ReducedBasis, names: tuple[str, ...], label: str
) -> None:
    if layer.activation != "relu":
        return
    negative = [i for i in layer.clamped or () if basis.initial[i] < 0]
    if negative:
        raise ArtifactError(
            f"{label} layer clamps variables that start below zero: "
            f"{', '.join(names[i] for i in negative)}.",
            layer=label,
            variables=[names[i] for i in negative],
        )


def bind_artifact(artifact: HybridArtifact, model: DaeModel | None = None) -> HybridRuntime:
    """Attach runtime objects to ``artifact``; rebuild the model from its document if needed."""
    if model is None:
        model = load_model(artifact.model)
    elif describe_model(model).hash != artifact.model.hash:
        raise ArtifactError(
            f"Model {model.name} does not match the artifact's model document.", model=model.name
        )
    partition = artifact.partition.to_partition(model.n_theta, model.n_gamma)
    runtime = HybridRuntime(
        model=model,
        restricted=restrict_model(model, partition),
        basis=artifact.basis.to_basis(),
        coupling=artifact.coupling.to_layer(),
        reconstruction=artifact.reconstruction.to_layer(),
    )
    artifact._runtime = runtime
    return runtime


def build_hybrid(
    model: DaeModel,
    basis: ReducedBasis,
    partition: Partition,
    coupling: LinearLayer,
    reconstruction: LinearLayer,
    dt: float | None = None,
    substeps: int | None = None,
    t_final: float | None = None,
    interpolation_order: tuple[int, ...] = (),
    provenance: Provenance | None = None,
) -> HybridArtifact:
    """Assemble and validate a hybrid artifact bound to ``model``.

    Raises:
        ArtifactError: Basis, layers and partition have inconsistent shapes, or a
            ``relu`` layer clamps a variable whose initial value is negative.
        PartitionError: The partition does not fit the model or reads tertiary variables.
    """
    if basis.n_theta != model.n_theta:
        raise ArtifactError(
            f"Basis has {basis.n_theta} rows but model {model.name} has "
            f"{model.n_theta} differential variables.",
            model=model.name,
        )
    _check_layer(coupling, partition, partition.secondary_theta, "coupling")
    _check_layer(reconstruction, partition, partition.tertiary_theta, "reconstruction")
    names = model.space.theta_names
    _check_clamp(coupling, basis, names, "coupling")
    _check_clamp(reconstruction, basis, names, "reconstruction")
    restricted = restrict_model(model, partition)
    artifact = HybridArtifact(
        model=describe_model(model),
        partition=PartitionDocument.from_partition(partition),
        basis=BasisDocument.from_basis(basis, interpolation_order),
        coupling=LayerDocument.from_layer(coupling),
        reconstruction=LayerDocument.from_layer(reconstruction),
        integration=IntegrationDefaults(
            dt=SETTINGS.dt if dt is None else dt,
            substeps=SETTINGS.substeps if substeps is None else substeps,
            t_final=t_final,
        ),
        provenance=provenance or Provenance(),
    )
    artifact._runtime = HybridRuntime(
        model=model,
        restricted=restricted,
        basis=basis,
        coupling=coupling,
        reconstruction=reconstruction,
    )
    if coupling.is_empty:
        logger.info("All differential variables are primary; the coupling layer is skipped")
    logger.info(
        "Hybrid model of %s: %d primary θ, %d primary γ, %d secondary θ, %d tertiary θ",
        model.name,
        len(partition.primary_theta),
        len(partition.primary_gamma),
        len(partition.secondary_theta),
        len(partition.tertiary_theta),
    )
    return artifact


def integrate_hybrid(
    artifact: HybridArtifact,
    schedule: InputSchedule,
    t_final: float | None = None,
    dt: float | None = None,
    substeps: int | None = None,
    point: Mapping[str, float] | None = None,
) -> Trajectory:
    """Run the hybrid model; tertiary rows of the result are NaN.

    Step settings default to the artifact's integration defaults, then to SETTINGS.

    Raises:
        ModelConfigurationError: Invalid step settings or schedule.
        AlgebraicSolveError: ψ^P could not be solved; ``details["time"]`` holds t_n.
        SimulationError: A carried state became non-finite.
    """
    runtime = artifact.runtime
    model = runtime.model
    restricted = runtime.restricted
    part = runtime.partition
    defaults = artifact.integration
    dt = defaults.dt if dt is None else dt
    substeps = defaults.substeps if substeps is None else substeps
    if t_final is None:
        t_final = SETTINGS.t_final if defaults.t_final is None else defaults.t_final
    m, recorded, internal = time_grid(t_final, dt, substeps)
    schedule.check_covers(t_final, required=model.inputs)

    inputs = input_table(schedule, model.inputs, internal)
    h = dt / substeps
    tol = SETTINGS.newton_tol
    primary = part.primary_theta
    secondary = part.secondary_theta
    carried = restricted.theta_carried
    names = model.space.theta_names
    couple = not runtime.coupling.is_empty

    theta_out = np.full((model.n_theta, m + 1), np.nan)
    gamma_out = np.full((model.n_gamma, m + 1), np.nan)
    initial = model.space.initial.tolist()
    theta, gamma = restricted.buffers(
        [initial[i] for i in primary], None, [initial[i] for i in secondary]
    )

    last = m * substeps
    for n in range(last + 1):
        mu = inputs[n]
        t = float(internal[n])
        try:
            restricted.solve_into(theta, gamma, mu, tol)
        except AlgebraicSolveError as exc:
            raise AlgebraicSolveError(
                f"Hybrid algebraic solve failed at t = {t:g} s: {exc}", time=t, **exc.details
            ) from exc
        if n % substeps == 0:
            k = n // substeps
            check_finite(theta, carried, names, t)
            theta_out[:, k] = theta
            gamma_out[:, k] = gamma
        if n == last:
            break
        rates = restricted.rates_into(theta, gamma, mu)
        for j, rate in zip(primary, rates, strict=True):
            theta[j] = theta[j] + h * rate
        if couple:
            values = runtime.apply(runtime.coupling, np.array([theta[j] for j in primary]))
            for i, value in zip(secondary, values.tolist(), strict=True):
                theta[i] = value

    logger.debug(
        "Integrated hybrid %s over %d samples (dt=%g, substeps=%d)", model.name, m, dt, substeps
    )
    return Trajectory(
        times=recorded,
        theta=theta_out,
        gamma=gamma_out,
        inputs=schedule.sample(recorded),
        theta_names=model.space.theta_names,
        gamma_names=model.space.gamma_names,
        point=dict(point or {}),
    )


def _tertiary_order(model: DaeModel, tertiary: tuple[int, ...]) -> tuple[list[int], list[int]]:
    """Evaluation order of the tertiary rows with an explicit map, and the rows without one."""
    algebraic = model.algebraic
    missing = [k for k in tertiary if algebraic[k].explicit is None]
    explicit = set(tertiary) - set(missing)
    if model.explicit_order is not None:
        return [k for k in model.explicit_order if k in explicit], missing
    sorter: graphlib.TopologicalSorter[int] = graphlib.TopologicalSorter()
    for k in sorted(explicit):
        sorter.add(k, *(i for i in algebraic[k].reads_gamma if i in explicit and i != k))
    try:
        return list(sorter.static_order()), missing
    except graphlib.CycleError:
        return [], sorted(tertiary)


def reconstruct_tertiary(
    artifact: HybridArtifact, trajectory: Trajectory, algebraic: bool = True
) -> Trajectory:
    """Fill θ^T from the reconstruction layer and, optionally, γ^T from their explicit maps.

    Raises:
        TrajectoryError: The trajectory does not carry finite primary values.
    """
    runtime = artifact.runtime
    model = runtime.model
    part = runtime.partition
    if trajectory.theta_names != model.space.theta_names:
        raise TrajectoryError("Trajectory variables do not match the artifact's model.")
    primary = list(part.primary_theta)
    theta_p = trajectory.theta[primary]
    if not np.all(np.isfinite(theta_p)):
        missing = [
            model.space.theta_names[i]
            for i in primary
            if not np.all(np.isfinite(trajectory.theta[i]))
        ]
        raise TrajectoryError(
            f"Trajectory lacks values for primary variables: {', '.join(missing)}.",
            missing=missing,
        )

    theta = trajectory.theta.copy()
    gamma = trajectory.gamma.copy()
    if not runtime.reconstruction.is_empty:
        theta[list(part.tertiary_theta)] = runtime.apply(runtime.reconstruction, theta_p)

    if algebraic and part.tertiary_gamma:
        order, missing_rows = _tertiary_order(model, part.tertiary_gamma)
        absent = [name for name in model.inputs if name not in trajectory.inputs]
        if absent:
            logger.warning(
                "Cannot reconstruct tertiary algebraic variables without inputs %s",
                ", ".join(absent),
            )
            order, missing_rows = [], list(part.tertiary_gamma)
        if missing_rows:
            logger.warning(
                "Tertiary algebraic variables without an explicit map stay NaN: %s",
                ", ".join(model.space.gamma_names[k] for k in missing_rows),
            )
        if order:
            equations = model.algebraic
            columns = {name: np.asarray(trajectory.inputs[name]) for name in model.inputs}
            for s in range(trajectory.n_samples):
                theta_s = theta[:, s].tolist()
                gamma_s = gamma[:, s].tolist()
                mu = {name: float(values[s]) for name, values in columns.items()}
                for k in order:
                    gamma_s[k] = equations[k].explicit(theta_s, gamma_s, mu)
                gamma[order, s] = [gamma_s[k] for k in order]

    return Trajectory(
        times=trajectory.times,
        theta=theta,
        gamma=gamma,
        inputs=trajectory.inputs,
        theta_names=trajectory.theta_names,
        gamma_names=trajectory.gamma_names,
        point=dict(trajectory.point),
    )
