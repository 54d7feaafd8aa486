"""Application settings and configuration.

This module provides centralized configuration management using Pydantic Settings.
All settings can be overridden via environment variables with the BGREDUCE_ prefix.
"""

from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime defaults with environment variable support.

    All settings can be overridden via environment variables prefixed with BGREDUCE_.
    For example, BGREDUCE_SUBSTEPS=4 runs every integration with four internal steps
    per recorded sample.

    Attributes:
        dt: Recording interval in seconds (print interval of trajectories).
        t_final: Default simulated horizon in seconds.
        substeps: Internal explicit-Euler steps per recording interval.
        newton_tol: Infinity-norm tolerance on the algebraic residual.
        newton_max_iter: Iteration cap of the damped Newton solve.
        newton_min_damping: Smallest step fraction tried by the line search.
        fd_step: Relative finite-difference step for Jacobians and incidence probes.
        conditioning_threshold: Reciprocal condition number below which linear
            systems (DEIM, layer calibration) are rejected as degenerate.
        campaign_workers: Worker threads used by snapshot campaigns (1 = sequential).
        ambient_pressure: Ambient pressure in Pa for psychrometric conversions.
        seed: Default seed for DOE sampling.
        bench_repeats: Timed repetitions per benchmark run.
        outputs_dir: Default directory for CLI outputs.
        log_level: Logging level name used by the CLI.
    """

    # Integration
    dt: float = Field(default=1.0, gt=0)
    t_final: float = Field(default=3600.0, gt=0)
    substeps: int = Field(default=1, ge=1)

    # Algebraic solve
    newton_tol: float = Field(default=1e-10, gt=0)
    newton_max_iter: int = Field(default=50, ge=1)
    newton_min_damping: float = Field(default=1.0 / 1024.0, gt=0, le=1)
    fd_step: float = Field(default=1e-7, gt=0)

    # Reduction
    conditioning_threshold: float = Field(default=1e-12, gt=0)

    # Campaigns and DOE
    campaign_workers: int = Field(default=1, ge=1)
    ambient_pressure: float = Field(default=101325.0, gt=0)
    seed: int = 7

    # Benchmarks
    bench_repeats: int = Field(default=3, ge=3)

    # Output
    outputs_dir: str = "outputs"
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_prefix="BGREDUCE_")


SETTINGS = Settings()
