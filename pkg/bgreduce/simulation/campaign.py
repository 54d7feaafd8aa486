"""Snapshot campaigns: one full-model run per DOE point, stored as CSV files."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..dae.document import describe_model
from ..dae.model import DaeModel
from ..dae.variables import InputSchedule
from ..errors import BgReduceError, ModelConfigurationError
from ..settings import SETTINGS
from ..thermal.registry import default_schedule
from .doe import DoePlan
from .integrator import integrate
from .trajectory import Trajectory, read_trajectory, write_trajectory

logger = logging.getLogger(__name__)

CAMPAIGN_SCHEMA_VERSION = 1
MANIFEST_NAME = "campaign.json"


class CampaignError(BgReduceError):
    """Raised when a campaign cannot run; wraps the failing point's error."""


class CampaignEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    index: int
    point: dict[str, float]
    file: str


class CampaignManifest(BaseModel):
    """Index of a campaign directory (``schema_version`` 1)."""

    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    schema_version: int = CAMPAIGN_SCHEMA_VERSION
    model: str
    model_hash: str
    t_final: float
    dt: float
    substeps: int
    seed: int | None = None
    entries: list[CampaignEntry] = Field(default_factory=list)


def run_campaign(
    model: DaeModel,
    plan: DoePlan,
    schedule: InputSchedule | None = None,
    t_final: float | None = None,
    dt: float | None = None,
    substeps: int | None = None,
    workers: int | None = None,
) -> list[Trajectory]:
    """Integrate the model once per plan point, in plan order.

    Each point is bound onto ``schedule`` as constant channels, so a base
    schedule may carry a drive-cycle series for channels the plan leaves out.

    Args:
        model: The DAE model.
        plan: Parameter points; must not be empty.
        schedule: Base inputs (defaults to the registered model's default schedule).
        t_final: Horizon in seconds.
        dt: Recording interval in seconds.
        substeps: Internal steps per interval.
        workers: Concurrent runs (defaults to SETTINGS.campaign_workers).

    Raises:
        CampaignError: The plan is empty, or a point failed (the point is in ``details``).
    """
    if not plan.points:
        raise CampaignError("Campaign plan has no points (all rejected by constraints?).")
    workers = SETTINGS.campaign_workers if workers is None else workers
    if workers < 1:
        raise ModelConfigurationError(f"workers must be at least 1 (received {workers!r}).")
    base = default_schedule(model.name, model.params) if schedule is None else schedule

    def run(indexed: tuple[int, dict[str, float]]) -> Trajectory:
        index, point = indexed
        try:
            trajectory = integrate(
                model,
                base.with_constants(point),
                t_final=t_final,
                dt=dt,
                substeps=substeps,
                point=point,
            )
        except BgReduceError as exc:
            raise CampaignError(
                f"Campaign point {index} failed: {exc}", index=index, point=point
            ) from exc
        logger.info("Campaign point %d/%d done", index + 1, len(plan.points))
        return trajectory

    indexed = list(enumerate(plan.points))
    if workers == 1:
        return [run(item) for item in indexed]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, indexed))


def write_campaign(
    model: DaeModel,
    trajectories: list[Trajectory],
    directory: str | Path,
    seed: int | None = None,
    substeps: int | None = None,
) -> Path:
    """Write ``run_XXXX.csv`` files plus ``campaign.json`` into ``directory``."""
    if not trajectories:
        raise CampaignError("Nothing to write: the campaign has no trajectories.")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for index, trajectory in enumerate(trajectories):
        name = f"run_{index:04d}.csv"
        write_trajectory(trajectory, directory / name)
        entries.append(CampaignEntry(index=index, point=dict(trajectory.point), file=name))
    first = trajectories[0]
    manifest = CampaignManifest(
        model=model.name,
        model_hash=describe_model(model).hash,
        t_final=float(first.times[-1]),
        dt=first.dt,
        substeps=SETTINGS.substeps if substeps is None else substeps,
        seed=seed,
        entries=entries,
    )
    path = directory / MANIFEST_NAME
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Wrote %d trajectories to %s", len(entries), directory)
    return path


def load_manifest(directory: str | Path) -> CampaignManifest:
    path = Path(directory) / MANIFEST_NAME
    if not path.exists():
        raise ModelConfigurationError(f"Campaign manifest does not exist: {path}", path=str(path))
    try:
        return CampaignManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ModelConfigurationError(f"Invalid campaign manifest {path}: {exc}") from exc


def load_campaign(
    model: DaeModel, directory: str | Path
) -> tuple[CampaignManifest, list[Trajectory]]:
    """Read a campaign directory back, checking it was produced by ``model``."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    expected = describe_model(model).hash
    if manifest.model != model.name or manifest.model_hash != expected:
        raise ModelConfigurationError(
            f"Campaign {directory} was produced by a different model "
            f"({manifest.model} {manifest.model_hash[:12]}, "
            f"expected {model.name} {expected[:12]}).",
            path=str(directory),
        )
    trajectories = [
        read_trajectory(directory / entry.file, model.space, point=entry.point)
        for entry in manifest.entries
    ]
    return manifest, trajectories
