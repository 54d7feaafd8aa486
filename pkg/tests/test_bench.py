from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest

from bgreduce.bench import (
    BenchmarkError,
    MetricsError,
    benchmark_speedup,
    error_report,
    mae,
    max_ae,
    plot_comparison,
    save_report,
)
from bgreduce.errors import ModelConfigurationError
from bgreduce.hybrid import integrate_hybrid, reconstruct_tertiary, reduce_trajectories
from bgreduce.simulation import integrate, plan_from_points, run_campaign
from bgreduce.thermal import build_multizone_demo, default_schedule


def _shifted(trajectory, offset):
    return dataclasses.replace(trajectory, theta=trajectory.theta + offset)


@pytest.fixture()
def short_run(cabin):
    return integrate(cabin, default_schedule("illustrative"), t_final=20.0, dt=1.0)


def test_constant_offset_gives_that_error(short_run):
    approx = _shifted(short_run, 0.5)

    assert mae(short_run, approx) == pytest.approx(0.5)
    assert max_ae(short_run, approx) == pytest.approx(0.5)


def test_metrics_match_a_plain_loop(cabin_training):
    reference = list(cabin_training)
    rng = np.random.default_rng(4)
    approx = [_shifted(t, rng.normal(scale=0.1, size=t.theta.shape)) for t in reference]

    total, count, worst = 0.0, 0, 0.0
    for ref, app in zip(reference, approx, strict=True):
        for i in range(ref.theta.shape[0]):
            for k in range(1, ref.n_samples):
                error = abs(ref.theta[i, k] - app.theta[i, k])
                total += error
                count += 1
                worst = max(worst, error)

    assert mae(reference, approx) == pytest.approx(total / count, abs=1e-12)
    assert max_ae(reference, approx) == pytest.approx(worst, abs=1e-12)
    assert max_ae(reference, approx) >= mae(reference, approx)


def test_initial_sample_is_excluded(short_run):
    theta = short_run.theta.copy()
    theta[:, 0] += 100.0

    assert mae(short_run, dataclasses.replace(short_run, theta=theta)) == 0.0


def test_report_locates_the_maximum(cabin_training, tmp_path):
    approx = []
    for p, trajectory in enumerate(cabin_training):
        theta = trajectory.theta.copy()
        if p == 1:
            theta[6, 120] += 2.0
        approx.append(dataclasses.replace(trajectory, theta=theta))

    report = error_report(cabin_training, approx)

    assert report.max_ae == pytest.approx(2.0)
    assert report.max_variable == "T_7"
    assert report.max_time == pytest.approx(120.0)
    assert report.max_point == 2
    assert report.max_point_values == {"h_ext": 10.0}
    assert report.n_points == 2 and report.n_samples == 3600
    assert [v.name for v in report.variables] == [f"T_{i}" for i in range(1, 8)]

    data = json.loads(save_report(report, tmp_path / "report.json").read_text("utf-8"))
    assert data["schema_version"] == 1


def test_selected_variables_only(short_run):
    theta = short_run.theta.copy()
    theta[0] += 1.0

    approx = dataclasses.replace(short_run, theta=theta)

    assert mae(short_run, approx, variables=["T_7"]) == 0.0
    assert mae(short_run, approx, variables=["T_1"]) == pytest.approx(1.0)


def test_metrics_can_read_algebraic_variables(short_run):
    assert mae(short_run, short_run, variables=["Q_1", "Q_9"]) == 0.0


@pytest.mark.parametrize(
    ("approx_factory", "message"),
    [
        (lambda t: [t, t], "approximation has 2"),
        (lambda t: dataclasses.replace(t, times=t.times + 1.0), "time grid"),
        (lambda t: dataclasses.replace(t, point={"h_ext": 1.0}), "parameter points"),
        (lambda t: _shifted(t, np.nan), "non-finite"),
    ],
)
def test_mismatched_sets_are_rejected(short_run, approx_factory, message):
    with pytest.raises(MetricsError, match=message):
        mae(short_run, approx_factory(short_run))


def test_unknown_variable_is_rejected(short_run):
    with pytest.raises(MetricsError, match="T_99"):
        mae(short_run, short_run, variables=["T_99"])


def test_plot_writes_png(short_run, tmp_path):
    approx = _shifted(short_run, 0.2)

    path = plot_comparison(short_run, approx, ["T_1", "T_7", "Q_1"], tmp_path / "cmp.png")

    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_needs_variables(short_run, tmp_path):
    with pytest.raises(MetricsError, match="at least one"):
        plot_comparison(short_run, short_run, [], tmp_path / "none.png")


def test_benchmark_needs_three_repeats(cabin, cabin_training):
    artifact = reduce_trajectories(cabin, cabin_training, n_modes=4)

    with pytest.raises(ModelConfigurationError, match="at least 3"):
        benchmark_speedup(cabin, artifact, default_schedule("illustrative"), repeats=2)


def test_benchmark_counts_the_steps_of_each_run(cabin, cabin_training):
    artifact = reduce_trajectories(cabin, cabin_training, n_modes=4)

    report = benchmark_speedup(
        cabin, artifact, default_schedule("illustrative"), t_final=60.0, substeps=2, repeats=3
    )

    assert report.full_steps == 120
    assert report.hybrid_steps == 120


def test_benchmark_rejects_runs_of_different_length(cabin, cabin_training, monkeypatch):
    artifact = reduce_trajectories(cabin, cabin_training, n_modes=4)

    def truncated(artifact, schedule, t_final, dt, substeps):
        return integrate_hybrid(artifact, schedule, t_final / 2, dt, substeps)

    monkeypatch.setattr("bgreduce.bench.speedup.integrate_hybrid", truncated)

    with pytest.raises(BenchmarkError, match="60 steps but the hybrid run took 30"):
        benchmark_speedup(
            cabin, artifact, default_schedule("illustrative"), t_final=60.0, repeats=3
        )


@pytest.mark.slow
def test_multizone_hybrid_is_twice_as_fast_and_keeps_humidity_nonnegative():
    model = build_multizone_demo()
    plan = plan_from_points([{"m_inlet": 300.0}, {"m_inlet": 450.0}, {"m_inlet": 600.0}])
    trajectories = run_campaign(model, plan, t_final=600.0, dt=1.0)

    artifact = reduce_trajectories(model, trajectories, n_modes=6, activation="relu")
    schedule = default_schedule("multizone")
    run = reconstruct_tertiary(artifact, integrate_hybrid(artifact, schedule, t_final=600.0))
    report = benchmark_speedup(model, artifact, schedule, t_final=600.0, repeats=3)

    assert report.n_primary <= 20
    assert report.speedup >= 2.0
    humidity = run.theta[list(model.space.nonnegative_indices)]
    assert humidity.shape[0] == 6
    assert np.all(np.isfinite(humidity))
    assert np.all(humidity >= 0.0)
