"""Hybrid reduced model: retained DAE rows closed by calibrated layers."""

from __future__ import annotations

from .artifact import (
    ArtifactError,
    HybridArtifact,
    Provenance,
    artifact_hash,
    load_artifact,
    save_artifact,
)
from .model import (
    HybridRuntime,
    bind_artifact,
    build_hybrid,
    integrate_hybrid,
    reconstruct_tertiary,
)
from .pipeline import ReductionError, reduce_trajectories, validation_max_error

__all__ = [
    "ArtifactError",
    "HybridArtifact",
    "HybridRuntime",
    "Provenance",
    "ReductionError",
    "artifact_hash",
    "bind_artifact",
    "build_hybrid",
    "integrate_hybrid",
    "load_artifact",
    "reconstruct_tertiary",
    "reduce_trajectories",
    "save_artifact",
    "validation_max_error",
]
