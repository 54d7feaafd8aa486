"""Accuracy metrics, speedup benchmarks and comparison plots."""

from __future__ import annotations

from .metrics import ErrorReport, MetricsError, error_report, mae, max_ae, save_report
from .plots import plot_comparison
from .speedup import BenchmarkError, BenchReport, benchmark_speedup

__all__ = [
    "BenchReport",
    "BenchmarkError",
    "ErrorReport",
    "MetricsError",
    "benchmark_speedup",
    "error_report",
    "mae",
    "max_ae",
    "plot_comparison",
    "save_report",
]
