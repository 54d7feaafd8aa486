"""Snapshot SVD, interpolation indices and variable classification."""

from __future__ import annotations

from ..dae.partition import Partition, PartitionError
from .classify import ClassificationError, classify_variables
from .deim import DegenerateBasisError, select_interpolation_indices
from .snapshots import SnapshotError, SnapshotMatrix, assemble_snapshots
from .svd import (
    ReducedBasis,
    TruncationError,
    canonicalize_signs,
    interpolation_coordinates,
    project,
    projection_error,
    truncated_svd,
)

__all__ = [
    "ClassificationError",
    "DegenerateBasisError",
    "Partition",
    "PartitionError",
    "ReducedBasis",
    "SnapshotError",
    "SnapshotMatrix",
    "TruncationError",
    "assemble_snapshots",
    "canonicalize_signs",
    "classify_variables",
    "interpolation_coordinates",
    "project",
    "projection_error",
    "select_interpolation_indices",
    "truncated_svd",
]
