"""Design of experiments over the input space.

Points are drawn by Latin hypercube sampling: every dimension is split into n
equal bins holding exactly one point each. The humidity constraint keeps the
points whose inlet air is not more humid (in absolute terms) than the ambience.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.stats import qmc

from ..errors import ModelConfigurationError
from ..settings import SETTINGS
from ..thermal.psychrometrics import absolute_humidity

logger = logging.getLogger(__name__)

DOE_SCHEMA_VERSION = 1
CONSTRAINT_CHANNELS = ("T_ext", "r_ext", "T_inlet", "r_inlet")


class ConstraintError(ModelConfigurationError):
    """Raised when a plan lacks the channels a constraint needs."""


class ParamBound(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str
    lower: float
    upper: float
    unit: str = ""

    @model_validator(mode="after")
    def _ordered(self) -> ParamBound:
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower bound must be below upper bound.")
        return self


class ParamSpace(BaseModel):
    """Box of input values sampled by the DOE."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    bounds: list[ParamBound] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique(self) -> ParamSpace:
        names = [b.name for b in self.bounds]
        if len(set(names)) != len(names):
            raise ValueError("Parameter names must be unique.")
        return self

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.bounds]

    def contains(self, point: dict[str, float]) -> bool:
        return all(b.lower <= point[b.name] <= b.upper for b in self.bounds)


def cabin_cooling_space() -> ParamSpace:
    """Seven-input space of a cabin cool-down campaign."""
    return ParamSpace(
        bounds=[
            ParamBound(name="V_veh", lower=0.0, upper=130.0, unit="km/h"),
            ParamBound(name="T_ext", lower=20.0, upper=45.0, unit="°C"),
            ParamBound(name="r_ext", lower=0.0, upper=80.0, unit="%"),
            ParamBound(name="I_sol", lower=0.0, upper=1200.0, unit="W/m²"),
            ParamBound(name="m_inlet", lower=100.0, upper=600.0, unit="kg/h"),
            ParamBound(name="r_inlet", lower=0.0, upper=100.0, unit="%"),
            ParamBound(name="T_inlet", lower=2.0, upper=12.0, unit="°C"),
        ]
    )


def validation_scenario() -> dict[str, float]:
    """Constant inputs of the cabin validation run (speed comes from a drive cycle)."""
    return {
        "T_ext": 45.0,
        "r_ext": 40.0,
        "I_sol": 1000.0,
        "m_inlet": 450.0,
        "r_inlet": 20.0,
        "T_inlet": 15.0,
    }


class DoePlan(BaseModel):
    """Parameter points of a campaign (``schema_version`` 1).

    Attributes:
        space: Sampled box (None for hand-written plans).
        seed: Seed of the sampler.
        requested: Number of points drawn.
        retained: Number of points kept after constraint filtering.
        points: Retained points, name -> value.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: int = DOE_SCHEMA_VERSION
    space: ParamSpace | None = None
    seed: int | None = None
    requested: int
    retained: int
    points: list[dict[str, float]]

    @model_validator(mode="after")
    def _consistent(self) -> DoePlan:
        if self.retained != len(self.points):
            raise ValueError("retained must equal the number of points.")
        return self

    @property
    def rejected(self) -> int:
        return self.requested - self.retained

    @property
    def channels(self) -> set[str]:
        """Channels set by every point (the sampled names when a space is recorded)."""
        if self.space is not None:
            return set(self.space.names)
        if not self.points:
            return set()
        return set.intersection(*(set(p) for p in self.points))


def plan_from_points(points: list[dict[str, float]], seed: int | None = None) -> DoePlan:
    """Wrap hand-picked parameter points as a plan."""
    points = [{name: float(value) for name, value in p.items()} for p in points]
    return DoePlan(seed=seed, requested=len(points), retained=len(points), points=points)


def sample_doe(space: ParamSpace, n: int, seed: int | None = None) -> DoePlan:
    """Draw ``n`` Latin hypercube points inside ``space``, reproducible for a fixed seed."""
    if n < 1:
        raise ModelConfigurationError(f"n must be at least 1 (received {n!r}).")
    seed = SETTINGS.seed if seed is None else seed
    sampler = qmc.LatinHypercube(d=len(space.bounds), seed=np.random.default_rng(seed))
    unit = sampler.random(n)
    lower = [b.lower for b in space.bounds]
    upper = [b.upper for b in space.bounds]
    scaled = qmc.scale(unit, lower, upper)
    points = [dict(zip(space.names, (float(v) for v in row), strict=True)) for row in scaled]
    logger.info("Sampled %d DOE points over %d inputs (seed %d)", n, len(space.bounds), seed)
    return DoePlan(space=space, seed=seed, requested=n, retained=n, points=points)


def satisfies_humidity_constraint(point: dict[str, float], pressure: float) -> bool:
    """Inlet absolute humidity must not exceed the ambient one (humidities in %)."""
    inlet = absolute_humidity(point["T_inlet"], point["r_inlet"] / 100.0, pressure)
    ambient = absolute_humidity(point["T_ext"], point["r_ext"] / 100.0, pressure)
    return inlet <= ambient


def filter_constraints(plan: DoePlan, pressure: float | None = None) -> DoePlan:
    """Keep exactly the points satisfying the humidity constraint.

    Raises:
        ConstraintError: The plan lacks one of T_ext, r_ext, T_inlet, r_inlet.
    """
    pressure = SETTINGS.ambient_pressure if pressure is None else pressure
    missing = [c for c in CONSTRAINT_CHANNELS if c not in plan.channels]
    if missing:
        raise ConstraintError(
            f"Humidity constraint needs channels: {', '.join(missing)}.", missing=missing
        )
    kept = [p for p in plan.points if satisfies_humidity_constraint(p, pressure)]
    logger.info(
        "Humidity constraint kept %d of %d points (%d rejected)",
        len(kept),
        len(plan.points),
        len(plan.points) - len(kept),
    )
    return plan.model_copy(update={"points": kept, "retained": len(kept)})


def save_plan(plan: DoePlan, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(plan.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_plan(path: str | Path) -> DoePlan:
    path = Path(path)
    if not path.exists():
        raise ModelConfigurationError(f"Plan file does not exist: {path}", path=str(path))
    try:
        return DoePlan.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ModelConfigurationError(f"Invalid plan file {path}: {exc}") from exc


def load_space(path: str | Path) -> ParamSpace:
    path = Path(path)
    if not path.exists():
        raise ModelConfigurationError(f"Space file does not exist: {path}", path=str(path))
    try:
        return ParamSpace.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ModelConfigurationError(f"Invalid space file {path}: {exc}") from exc
