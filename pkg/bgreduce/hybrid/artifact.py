"""Serializable hybrid model: retained structure, basis, layers and provenance.

The artifact is plain data. Index sets are stored as sorted 1-based arrays and
matrices as row-major flat arrays with an explicit shape. The runtime objects
(bound DAE model, restricted evaluators, numpy layers) are attached by
:func:`bgreduce.hybrid.model.bind_artifact` and are never serialized.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, model_validator

from ..ann.layers import LinearLayer
from ..dae.document import ModelDocument
from ..dae.partition import Partition
from ..errors import BgReduceError, ModelConfigurationError
from ..reduction.svd import ReducedBasis

if TYPE_CHECKING:
    from .model import HybridRuntime

ARTIFACT_SCHEMA_VERSION = 1


class ArtifactError(BgReduceError):
    """Raised when an artifact is inconsistent, unbound, or cannot be read."""


def _check_shape(values: list[float], shape: list[int], label: str) -> None:
    if len(shape) != 2 or any(n < 0 for n in shape):
        raise ValueError(f"{label}: shape must be two non-negative integers.")
    if len(values) != shape[0] * shape[1]:
        raise ValueError(f"{label}: {len(values)} entries do not fill shape {shape}.")


class PartitionDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    primary_theta: list[int]
    secondary_theta: list[int]
    tertiary_theta: list[int]
    primary_gamma: list[int]
    tertiary_gamma: list[int]

    @classmethod
    def from_partition(cls, partition: Partition) -> PartitionDocument:
        return cls(**partition.one_based())

    def to_partition(self, n_theta: int, n_gamma: int) -> Partition:
        return Partition.from_one_based(n_theta, n_gamma, self.model_dump())


class BasisDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shape: list[int]
    modes: list[float]
    singular_values: list[float]
    spectrum: list[float]
    rule: Literal["n_modes", "eps_tol"]
    rule_value: float
    scale: list[float]
    initial: list[float]
    interpolation_order: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self) -> BasisDocument:
        _check_shape(self.modes, self.shape, "basis")
        if len(self.singular_values) != self.shape[1]:
            raise ValueError("basis: one singular value per mode is required.")
        if len(self.scale) != self.shape[0] or len(self.initial) != self.shape[0]:
            raise ValueError("basis: scale and initial need one entry per differential variable.")
        return self

    @classmethod
    def from_basis(cls, basis: ReducedBasis, order: tuple[int, ...] = ()) -> BasisDocument:
        return cls(
            shape=list(basis.modes.shape),
            modes=basis.modes.ravel().tolist(),
            singular_values=basis.singular_values.tolist(),
            spectrum=basis.spectrum.tolist(),
            rule=basis.rule,
            rule_value=basis.rule_value,
            scale=basis.scale.tolist(),
            initial=basis.initial.tolist(),
            interpolation_order=[i + 1 for i in order],
        )

    def to_basis(self) -> ReducedBasis:
        return ReducedBasis(
            modes=np.array(self.modes, dtype=float).reshape(self.shape),
            singular_values=np.array(self.singular_values, dtype=float),
            spectrum=np.array(self.spectrum, dtype=float),
            rule=self.rule,
            rule_value=self.rule_value,
            scale=np.array(self.scale, dtype=float),
            initial=np.array(self.initial, dtype=float),
        )


class LayerDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shape: list[int]
    weights: list[float]
    bias: list[float]
    activation: Literal["identity", "relu"]
    inputs: list[int]
    outputs: list[int]
    n_modes: int
    clamped: list[int] | None = None

    @model_validator(mode="after")
    def _consistent(self) -> LayerDocument:
        _check_shape(self.weights, self.shape, "layer")
        if self.shape != [len(self.outputs), len(self.inputs)]:
            raise ValueError("layer: shape must be (outputs, inputs).")
        if len(self.bias) != len(self.outputs):
            raise ValueError("layer: one bias per output is required.")
        if self.clamped is not None and not set(self.clamped) <= set(self.outputs):
            raise ValueError("layer: clamped rows must be outputs.")
        return self

    @classmethod
    def from_layer(cls, layer: LinearLayer) -> LayerDocument:
        return cls(
            shape=list(layer.weights.shape),
            weights=layer.weights.ravel().tolist(),
            bias=layer.bias.tolist(),
            activation=layer.activation,
            inputs=[i + 1 for i in layer.inputs],
            outputs=[i + 1 for i in layer.outputs],
            n_modes=layer.n_modes,
            clamped=[i + 1 for i in layer.clamped or ()],
        )

    def to_layer(self) -> LinearLayer:
        return LinearLayer(
            weights=np.array(self.weights, dtype=float).reshape(self.shape),
            bias=np.array(self.bias, dtype=float),
            activation=self.activation,
            inputs=tuple(i - 1 for i in self.inputs),
            outputs=tuple(i - 1 for i in self.outputs),
            n_modes=self.n_modes,
            clamped=None if self.clamped is None else tuple(i - 1 for i in self.clamped),
        )


class IntegrationDefaults(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt: float = Field(gt=0)
    substeps: int = Field(ge=1)
    t_final: float | None = None


class Provenance(BaseModel):
    """Where the training data came from."""

    model_config = ConfigDict(extra="forbid")

    seed: int | None = None
    points: list[dict[str, float]] = Field(default_factory=list)
    trajectories: list[str] = Field(default_factory=list)
    n_stab_scores: dict[int, float | None] = Field(default_factory=dict)


class HybridArtifact(BaseModel):
    """Hybrid reduced model as stored in JSON (``schema_version`` 1)."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = ARTIFACT_SCHEMA_VERSION
    model: ModelDocument
    partition: PartitionDocument
    basis: BasisDocument
    coupling: LayerDocument
    reconstruction: LayerDocument
    integration: IntegrationDefaults
    provenance: Provenance = Field(default_factory=Provenance)

    _runtime: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _layers_match_partition(self) -> HybridArtifact:
        part = self.partition
        if self.basis.shape[0] != len(self.model.theta_names):
            raise ValueError("basis rows must match the number of differential variables.")
        for label, layer, outputs in (
            ("coupling", self.coupling, part.secondary_theta),
            ("reconstruction", self.reconstruction, part.tertiary_theta),
        ):
            if layer.inputs != part.primary_theta:
                raise ValueError(f"{label} layer inputs must be the primary θ set.")
            if layer.outputs != outputs:
                raise ValueError(f"{label} layer outputs do not match the partition.")
        return self

    @property
    def runtime(self) -> HybridRuntime:
        """Bound runtime, rebuilt from the embedded model document when missing."""
        if self._runtime is None:
            from .model import bind_artifact

            bind_artifact(self)
        return self._runtime

    def canonical_json(self) -> str:
        payload = self.model_dump(mode="json")
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def artifact_hash(artifact: HybridArtifact) -> str:
    """sha256 of the artifact's canonical JSON."""
    return hashlib.sha256(artifact.canonical_json().encode("utf-8")).hexdigest()


def dump_artifact(artifact: HybridArtifact) -> str:
    return artifact.model_dump_json(indent=2)


def save_artifact(artifact: HybridArtifact, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_artifact(artifact), encoding="utf-8")
    return path


def parse_artifact(text: str, source: str = "<string>") -> HybridArtifact:
    try:
        artifact = HybridArtifact.model_validate_json(text)
    except ValidationError as exc:
        raise ArtifactError(f"Invalid hybrid artifact {source}: {exc}", source=source) from exc
    if artifact.schema_version != ARTIFACT_SCHEMA_VERSION:
        raise ArtifactError(
            f"Unsupported artifact schema_version {artifact.schema_version} "
            f"(expected {ARTIFACT_SCHEMA_VERSION}).",
            source=source,
        )
    return artifact


def load_artifact(path: str | Path, bind: bool = True) -> HybridArtifact:
    """Read an artifact and, unless ``bind`` is False, rebuild its DAE model.

    Raises:
        ModelConfigurationError: The file does not exist, or the embedded model
            cannot be rebuilt (unknown builder or structure hash mismatch).
        ArtifactError: The JSON does not validate.
    """
    path = Path(path)
    if not path.exists():
        raise ModelConfigurationError(f"Artifact file does not exist: {path}", path=str(path))
    artifact = parse_artifact(path.read_text(encoding="utf-8"), source=str(path))
    if bind:
        artifact.runtime  # noqa: B018
    return artifact
