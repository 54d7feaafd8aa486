"""Semi-explicit DAE core: variables, incidence, evaluators and restriction."""

from __future__ import annotations

from .document import ModelDocument, describe_model, dump_model_document, load_model_document
from .incidence import Incidence
from .model import (
    AlgebraicEquation,
    AlgebraicSolveError,
    DaeModel,
    DifferentialEquation,
    eval_derivatives,
    eval_residuals,
    solve_algebraic,
)
from .partition import Partition, PartitionError
from .probe import IncidenceViolation, probe_incidence
from .restriction import RestrictedModel, restrict_model
from .variables import (
    DimensionError,
    InputSchedule,
    InputSeries,
    ScheduleError,
    VariableSpace,
    load_series_csv,
)

__all__ = [
    "AlgebraicEquation",
    "AlgebraicSolveError",
    "DaeModel",
    "DifferentialEquation",
    "DimensionError",
    "Incidence",
    "IncidenceViolation",
    "InputSchedule",
    "InputSeries",
    "ModelDocument",
    "Partition",
    "PartitionError",
    "RestrictedModel",
    "ScheduleError",
    "VariableSpace",
    "describe_model",
    "dump_model_document",
    "eval_derivatives",
    "eval_residuals",
    "load_model_document",
    "load_series_csv",
    "probe_incidence",
    "restrict_model",
    "solve_algebraic",
]
