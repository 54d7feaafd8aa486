"""Full-model integration, DOE sampling and snapshot campaigns."""

from __future__ import annotations

from .campaign import (
    CampaignError,
    CampaignManifest,
    load_campaign,
    run_campaign,
    write_campaign,
)
from .doe import (
    ConstraintError,
    DoePlan,
    ParamBound,
    ParamSpace,
    cabin_cooling_space,
    filter_constraints,
    load_plan,
    plan_from_points,
    sample_doe,
    save_plan,
    validation_scenario,
)
from .integrator import SimulationError, integrate
from .steady import steady_state
from .trajectory import Trajectory, TrajectoryError, read_trajectory, write_trajectory

__all__ = [
    "CampaignError",
    "CampaignManifest",
    "ConstraintError",
    "DoePlan",
    "ParamBound",
    "ParamSpace",
    "SimulationError",
    "Trajectory",
    "TrajectoryError",
    "cabin_cooling_space",
    "filter_constraints",
    "integrate",
    "load_campaign",
    "load_plan",
    "plan_from_points",
    "read_trajectory",
    "run_campaign",
    "sample_doe",
    "save_plan",
    "steady_state",
    "validation_scenario",
    "write_campaign",
    "write_trajectory",
]
