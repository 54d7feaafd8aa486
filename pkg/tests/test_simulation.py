from __future__ import annotations

import math

import numpy as np
import pytest
from conftest import SAMPLE_DATA

from bgreduce.dae import (
    DaeModel,
    DifferentialEquation,
    InputSchedule,
    VariableSpace,
    load_series_csv,
)
from bgreduce.errors import ModelConfigurationError
from bgreduce.simulation import (
    CampaignError,
    ConstraintError,
    ParamBound,
    ParamSpace,
    SimulationError,
    TrajectoryError,
    cabin_cooling_space,
    filter_constraints,
    integrate,
    load_campaign,
    load_plan,
    plan_from_points,
    read_trajectory,
    run_campaign,
    sample_doe,
    save_plan,
    validation_scenario,
    write_campaign,
    write_trajectory,
)
from bgreduce.thermal import IllustrativeParams, build_illustrative_cabin, build_multizone_demo
from bgreduce.thermal.illustrative import default_schedule

LAG_AT_60 = 20.0 - 38.0 * math.exp(-1.0)


def _air_at_60(substeps: int) -> float:
    model = build_illustrative_cabin()
    trajectory = integrate(model, default_schedule(), t_final=60.0, dt=1.0, substeps=substeps)
    return float(trajectory.theta_series("T_7")[-1])


def test_air_lag_matches_closed_form():
    assert _air_at_60(substeps=4) == pytest.approx(LAG_AT_60, abs=0.05)


def test_halving_the_step_halves_the_error():
    coarse = abs(_air_at_60(substeps=1) - LAG_AT_60)
    fine = abs(_air_at_60(substeps=2) - LAG_AT_60)

    assert coarse / fine == pytest.approx(2.0, rel=0.2)


def test_trajectory_layout(cabin):
    trajectory = integrate(cabin, default_schedule(), t_final=10.0, dt=0.5)

    assert trajectory.n_samples == 21
    assert trajectory.dt == pytest.approx(0.5)
    np.testing.assert_array_equal(trajectory.theta[:, 0], cabin.space.initial)
    assert trajectory.gamma.shape == (10, 21)
    np.testing.assert_array_equal(trajectory.inputs["T_cab"], np.full(21, 20.0))


def test_equilibrium_inputs_keep_the_state_constant():
    model = build_illustrative_cabin(IllustrativeParams(T_cab=-18.0))
    schedule = default_schedule(IllustrativeParams(T_cab=-18.0))

    trajectory = integrate(model, schedule, t_final=120.0, dt=1.0)

    np.testing.assert_array_equal(trajectory.theta, np.full((7, 121), -18.0))


def test_integration_is_deterministic(cabin):
    first = integrate(cabin, default_schedule(), t_final=30.0, dt=1.0)
    second = integrate(cabin, default_schedule(), t_final=30.0, dt=1.0)

    np.testing.assert_array_equal(first.theta, second.theta)


def test_non_finite_state_names_time_and_variable():
    space = VariableSpace(theta_names=("runaway",), gamma_names=(), initial=[2.0])
    model = DaeModel(
        name="runaway",
        space=space,
        differential=(
            DifferentialEquation("runaway", lambda th, g, mu: th[0] * th[0], reads_theta=(0,)),
        ),
        algebraic=(),
    )

    with pytest.raises(SimulationError, match="runaway") as exc:
        integrate(model, InputSchedule(), t_final=50.0, dt=1.0)

    assert exc.value.details["variable"] == "runaway"
    assert exc.value.details["time"] <= 50.0


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"t_final": 10.5, "dt": 1.0}, "multiple of dt"),
        ({"t_final": 10.0, "dt": 0.0}, "dt must be positive"),
        ({"t_final": 10.0, "dt": 1.0, "substeps": 0}, "substeps"),
    ],
)
def test_step_settings_are_validated(cabin, kwargs, message):
    with pytest.raises(ModelConfigurationError, match=message):
        integrate(cabin, default_schedule(), **kwargs)


def test_schedule_must_provide_every_input(cabin):
    with pytest.raises(ModelConfigurationError, match="T_cab"):
        integrate(cabin, InputSchedule({"h_ext": 35.0, "T_ext": -18.0}), t_final=5.0, dt=1.0)


def test_trajectory_csv_round_trip(cabin, tmp_path):
    trajectory = integrate(cabin, default_schedule(), t_final=5.0, dt=1.0)

    path = write_trajectory(trajectory, tmp_path / "run.csv")
    loaded = read_trajectory(path, cabin.space)

    np.testing.assert_array_equal(loaded.theta, trajectory.theta)
    np.testing.assert_array_equal(loaded.gamma, trajectory.gamma)
    assert sorted(loaded.inputs) == ["T_cab", "T_ext", "h_ext"]


def test_read_trajectory_reports_missing_columns(cabin, tmp_path):
    path = tmp_path / "partial.csv"
    path.write_text("time_s,T_1\n0,1\n", encoding="utf-8")

    with pytest.raises(TrajectoryError, match="lacks columns"):
        read_trajectory(path, cabin.space)


def test_single_point_lies_inside_the_box():
    space = cabin_cooling_space()

    plan = sample_doe(space, 1, seed=3)

    assert plan.retained == 1
    assert space.contains(plan.points[0])


def test_same_seed_gives_identical_plans():
    space = cabin_cooling_space()

    assert sample_doe(space, 20, seed=11) == sample_doe(space, 20, seed=11)
    assert sample_doe(space, 20, seed=11) != sample_doe(space, 20, seed=12)


def test_latin_hypercube_stratifies_every_dimension():
    space = cabin_cooling_space()
    n = 500

    plan = sample_doe(space, n, seed=5)

    for bound in space.bounds:
        values = np.array([p[bound.name] for p in plan.points])
        assert values.min() >= bound.lower and values.max() <= bound.upper
        bins = np.floor((values - bound.lower) / (bound.upper - bound.lower) * n).astype(int)
        assert sorted(np.minimum(bins, n - 1).tolist()) == list(range(n))


def test_sample_doe_rejects_empty_request():
    with pytest.raises(ModelConfigurationError, match="at least 1"):
        sample_doe(cabin_cooling_space(), 0)


def test_param_bound_requires_ordered_limits():
    with pytest.raises(ValueError, match="lower bound"):
        ParamBound(name="T_ext", lower=5.0, upper=5.0)


@pytest.mark.parametrize(
    ("point", "kept"),
    [
        ({"T_ext": 20.0, "r_ext": 10.0, "T_inlet": 2.0, "r_inlet": 0.0}, True),
        ({"T_ext": 45.0, "r_ext": 40.0, "T_inlet": 12.0, "r_inlet": 100.0}, True),
        ({"T_ext": 20.0, "r_ext": 0.0, "T_inlet": 12.0, "r_inlet": 100.0}, False),
    ],
)
def test_humidity_constraint(point, kept):
    plan = plan_from_points([point])

    assert filter_constraints(plan).retained == int(kept)


def test_constraint_rejects_a_fraction_of_the_cooling_space():
    fractions = []
    for seed in (1, 2, 3):
        plan = filter_constraints(sample_doe(cabin_cooling_space(), 500, seed=seed))
        fractions.append(plan.rejected / plan.requested)

    assert 0.05 <= float(np.mean(fractions)) <= 0.25


def test_constraint_needs_humidity_channels():
    plan = sample_doe(ParamSpace(bounds=[ParamBound(name="h_ext", lower=5, upper=40)]), 4)

    with pytest.raises(ConstraintError, match="T_ext, r_ext, T_inlet, r_inlet"):
        filter_constraints(plan)


def test_plan_file_round_trip(tmp_path):
    plan = filter_constraints(sample_doe(cabin_cooling_space(), 10, seed=2))

    assert load_plan(save_plan(plan, tmp_path / "plan.json")) == plan


def test_load_plan_reports_missing_file(tmp_path):
    with pytest.raises(ModelConfigurationError, match="does not exist"):
        load_plan(tmp_path / "absent.json")


def test_campaign_runs_points_in_order(cabin):
    plan = plan_from_points([{"h_ext": 35.0}, {"h_ext": 10.0}, {"h_ext": 20.0}])

    sequential = run_campaign(cabin, plan, t_final=30.0, dt=1.0)
    threaded = run_campaign(cabin, plan, t_final=30.0, dt=1.0, workers=3)

    assert [t.point for t in sequential] == plan.points
    np.testing.assert_array_equal(sequential[0].inputs["h_ext"], np.full(31, 35.0))
    for a, b in zip(sequential, threaded, strict=True):
        np.testing.assert_array_equal(a.theta, b.theta)


def test_campaign_needs_points(cabin):
    with pytest.raises(CampaignError, match="no points"):
        run_campaign(cabin, plan_from_points([]), t_final=10.0, dt=1.0)


def test_campaign_reports_failing_point(cabin):
    plan = plan_from_points([{"h_ext": 35.0}, {"h_ext": 1e9}])

    with pytest.raises(CampaignError, match="point 1 failed") as exc:
        run_campaign(cabin, plan, t_final=200.0, dt=1.0)

    assert exc.value.details["point"] == {"h_ext": 1e9}
    assert isinstance(exc.value.__cause__, SimulationError)


def test_campaign_directory_round_trip(cabin, tmp_path):
    plan = plan_from_points([{"h_ext": 35.0}, {"h_ext": 10.0}], seed=4)
    trajectories = run_campaign(cabin, plan, t_final=20.0, dt=1.0)

    write_campaign(cabin, trajectories, tmp_path / "campaign", seed=plan.seed, substeps=1)
    manifest, loaded = load_campaign(cabin, tmp_path / "campaign")

    assert manifest.seed == 4
    assert [entry.file for entry in manifest.entries] == ["run_0000.csv", "run_0001.csv"]
    assert [t.point for t in loaded] == plan.points
    np.testing.assert_array_equal(loaded[1].theta, trajectories[1].theta)


def test_campaign_rejects_other_model(cabin, tmp_path):
    trajectories = run_campaign(cabin, plan_from_points([{"h_ext": 35.0}]), t_final=5.0, dt=1.0)
    write_campaign(cabin, trajectories, tmp_path / "campaign")
    other = build_illustrative_cabin(IllustrativeParams(tau=30.0))

    with pytest.raises(ModelConfigurationError, match="different model"):
        load_campaign(other, tmp_path / "campaign")


def test_validation_scenario_with_speed_cycle():
    model = build_multizone_demo()
    schedule = InputSchedule(validation_scenario()).with_series(
        {"V_veh": load_series_csv(SAMPLE_DATA / "speed_cycle.csv")}
    )

    trajectory = integrate(model, schedule, t_final=120.0, dt=1.0)

    assert np.all(np.isfinite(trajectory.theta))
    np.testing.assert_allclose(trajectory.inputs["V_veh"][[0, 60, 90]], [0.0, 50.0, 70.0])
