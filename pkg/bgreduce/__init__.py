"""bgreduce: hybrid reduced models of bond-graph thermal DAEs."""

from __future__ import annotations

from .ann import calibrate_layer, forward
from .dae import DaeModel, Partition, eval_derivatives, restrict_model, solve_algebraic
from .errors import BgReduceError, ModelConfigurationError
from .hybrid import (
    HybridArtifact,
    build_hybrid,
    integrate_hybrid,
    load_artifact,
    reconstruct_tertiary,
    reduce_trajectories,
    save_artifact,
)
from .reduction import (
    assemble_snapshots,
    classify_variables,
    select_interpolation_indices,
    truncated_svd,
)
from .simulation import integrate, run_campaign, sample_doe
from .thermal import build_illustrative_cabin, build_model, build_multizone_demo

__all__ = [
    "BgReduceError",
    "DaeModel",
    "HybridArtifact",
    "ModelConfigurationError",
    "Partition",
    "assemble_snapshots",
    "build_hybrid",
    "build_illustrative_cabin",
    "build_model",
    "build_multizone_demo",
    "calibrate_layer",
    "classify_variables",
    "eval_derivatives",
    "forward",
    "integrate",
    "integrate_hybrid",
    "load_artifact",
    "reconstruct_tertiary",
    "reduce_trajectories",
    "restrict_model",
    "run_campaign",
    "sample_doe",
    "save_artifact",
    "select_interpolation_indices",
    "solve_algebraic",
    "truncated_svd",
]
