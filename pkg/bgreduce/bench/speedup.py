"""Wall-clock comparison of full and hybrid runs on the same schedule."""

from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Callable

from pydantic import BaseModel, ConfigDict

from ..dae.model import DaeModel
from ..dae.variables import InputSchedule
from ..errors import BgReduceError, ModelConfigurationError
from ..hybrid.artifact import HybridArtifact
from ..hybrid.model import integrate_hybrid
from ..settings import SETTINGS
from ..simulation.integrator import integrate, time_grid
from ..simulation.trajectory import Trajectory

logger = logging.getLogger(__name__)

BENCH_SCHEMA_VERSION = 1


class BenchmarkError(BgReduceError):
    """Raised when a timed run fails."""


class BenchReport(BaseModel):
    """Median timings of full and hybrid runs (``schema_version`` 1)."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = BENCH_SCHEMA_VERSION
    model: str
    full_seconds: float
    hybrid_seconds: float
    speedup: float
    n_theta: int
    n_primary: int
    full_steps: int
    hybrid_steps: int
    repeats: int
    dt: float
    substeps: int
    t_final: float


def _median_seconds(
    label: str, run: Callable[[], Trajectory], repeats: int
) -> tuple[float, Trajectory]:
    """Median wall-clock seconds of ``run`` and the trajectory of its last call."""
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        try:
            result = run()
        except BgReduceError as exc:
            raise BenchmarkError(f"{label} run failed: {exc}", run=label) from exc
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), result


def benchmark_speedup(
    model: DaeModel,
    artifact: HybridArtifact,
    schedule: InputSchedule,
    t_final: float | None = None,
    dt: float | None = None,
    substeps: int | None = None,
    repeats: int | None = None,
) -> BenchReport:
    """Time both runs sequentially, ``repeats`` times each, and report the median speedup.

    Raises:
        ModelConfigurationError: ``repeats`` below 3.
        BenchmarkError: Either run failed, or the runs took different step counts.
    """
    repeats = SETTINGS.bench_repeats if repeats is None else repeats
    if repeats < 3:
        raise ModelConfigurationError(f"repeats must be at least 3 (received {repeats}).")
    t_final = SETTINGS.t_final if t_final is None else t_final
    dt = artifact.integration.dt if dt is None else dt
    substeps = artifact.integration.substeps if substeps is None else substeps
    time_grid(t_final, dt, substeps)
    runtime = artifact.runtime

    full, full_run = _median_seconds(
        "full", lambda: integrate(model, schedule, t_final, dt, substeps), repeats
    )
    hybrid, hybrid_run = _median_seconds(
        "hybrid",
        lambda: integrate_hybrid(artifact, schedule, t_final, dt, substeps),
        repeats,
    )
    full_steps = (full_run.n_samples - 1) * substeps
    hybrid_steps = (hybrid_run.n_samples - 1) * substeps
    if full_steps != hybrid_steps:
        raise BenchmarkError(
            f"Full run took {full_steps} steps but the hybrid run took {hybrid_steps}.",
            full_steps=full_steps,
            hybrid_steps=hybrid_steps,
        )
    report = BenchReport(
        model=model.name,
        full_seconds=full,
        hybrid_seconds=hybrid,
        speedup=full / hybrid,
        n_theta=model.n_theta,
        n_primary=len(runtime.partition.primary_theta),
        full_steps=full_steps,
        hybrid_steps=hybrid_steps,
        repeats=repeats,
        dt=dt,
        substeps=substeps,
        t_final=t_final,
    )
    logger.info(
        "Full %.3f s, hybrid %.3f s, speedup %.2fx (%d -> %d states)",
        full,
        hybrid,
        report.speedup,
        report.n_theta,
        report.n_primary,
    )
    return report
