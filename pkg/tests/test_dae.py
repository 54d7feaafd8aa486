from __future__ import annotations

import numpy as np
import pytest

from bgreduce.dae import (
    AlgebraicEquation,
    AlgebraicSolveError,
    DaeModel,
    DifferentialEquation,
    DimensionError,
    Incidence,
    InputSchedule,
    InputSeries,
    Partition,
    PartitionError,
    ScheduleError,
    VariableSpace,
    describe_model,
    dump_model_document,
    eval_derivatives,
    eval_residuals,
    load_model_document,
    load_series_csv,
    probe_incidence,
    restrict_model,
    solve_algebraic,
)
from bgreduce.errors import ModelConfigurationError
from bgreduce.reduction import classify_variables

INPUTS = {"h_ext": 35.0, "T_ext": -18.0, "T_cab": 20.0}


def _theta(**overrides: float) -> np.ndarray:
    theta = np.full(7, -18.0)
    for name, value in overrides.items():
        theta[int(name[1:]) - 1] = value
    return theta


def test_air_lag_rate(cabin):
    theta = _theta()
    gamma = solve_algebraic(cabin, theta, INPUTS)

    rates = eval_derivatives(cabin, theta, gamma, INPUTS)

    assert rates[6] == pytest.approx(38.0 / 60.0)


def test_windshield_node_rate_from_fluxes(cabin):
    gamma = np.zeros(10)
    gamma[0], gamma[1] = 100.0, 40.0

    rates = eval_derivatives(cabin, _theta(), gamma, INPUTS)

    assert rates[0] == pytest.approx(60.0 / (14.8525 * 829.0))
    assert rates[0] == pytest.approx(4.873e-3, rel=1e-3)


def test_internal_convection_flux(cabin):
    gamma = solve_algebraic(cabin, _theta(T7=20.0, T1=10.0), INPUTS)

    assert gamma[0] == pytest.approx(260.0)


def test_explicit_solution_has_zero_residual(cabin):
    theta = np.linspace(-10.0, 15.0, 7)
    gamma = solve_algebraic(cabin, theta, INPUTS)

    assert np.max(np.abs(eval_residuals(cabin, theta, gamma, INPUTS))) < 1e-10


def test_newton_matches_explicit_solution(cabin):
    theta = np.linspace(-10.0, 15.0, 7)

    explicit = solve_algebraic(cabin, theta, INPUTS, method="explicit")
    newton = solve_algebraic(cabin, theta, INPUTS, method="newton")

    np.testing.assert_allclose(newton, explicit, rtol=1e-8, atol=1e-8)


def test_junction_fluxes_follow_their_inputs(cabin):
    gamma = solve_algebraic(cabin, np.linspace(-10.0, 15.0, 7), INPUTS)

    assert gamma[8] == pytest.approx(gamma[0] + gamma[4])
    assert gamma[9] == pytest.approx(gamma[3] + gamma[7])


def test_evaluators_do_not_mutate_arguments(cabin):
    theta = _theta(T7=5.0)
    gamma = solve_algebraic(cabin, theta, INPUTS)
    before = (theta.copy(), gamma.copy())

    eval_derivatives(cabin, theta, gamma, INPUTS)
    eval_residuals(cabin, theta, gamma, INPUTS)

    np.testing.assert_array_equal(theta, before[0])
    np.testing.assert_array_equal(gamma, before[1])


def test_eval_derivatives_rejects_wrong_length(cabin):
    with pytest.raises(DimensionError, match="theta has shape"):
        eval_derivatives(cabin, np.zeros(6), np.zeros(10), INPUTS)


def test_missing_input_is_reported(cabin):
    with pytest.raises(ModelConfigurationError, match="T_cab"):
        solve_algebraic(cabin, _theta(), {"h_ext": 35.0, "T_ext": -18.0})


def test_solve_algebraic_rejects_non_positive_tolerance(cabin):
    with pytest.raises(ModelConfigurationError, match="tol must be positive"):
        solve_algebraic(cabin, _theta(), INPUTS, tol=0.0)


def test_newton_reports_unsolvable_constraint():
    space = VariableSpace(theta_names=("a",), gamma_names=("g",), initial=[0.0])
    model = DaeModel(
        name="no-root",
        space=space,
        differential=(DifferentialEquation("a", lambda th, g, mu: g[0], reads_gamma=(0,)),),
        algebraic=(AlgebraicEquation("g", residual=lambda th, g, mu: g[0] ** 2 + 1.0),),
    )

    with pytest.raises(AlgebraicSolveError) as exc:
        solve_algebraic(model, [0.0], {}, gamma_guess=[1.0])

    assert exc.value.details["residual_norm"] > 0


def test_incidence_of_cabin(cabin):
    incidence = cabin.incidence

    assert incidence.phi_gamma[0].nonzero()[0].tolist() == [0, 1]
    assert incidence.phi_theta[6].nonzero()[0].tolist() == [6]
    assert incidence.psi_gamma[8].nonzero()[0].tolist() == [0, 4, 8]
    assert not incidence.mixed


def test_incidence_rejects_mixed_pair_outside_row():
    with pytest.raises(ModelConfigurationError, match="Mixed pair"):
        Incidence.from_rows(
            1,
            1,
            phi_theta=[[]],
            phi_gamma=[[0]],
            psi_theta=[[]],
            psi_gamma=[[]],
            mixed=[(0, 0, 0)],
        )


def test_incidence_rejects_out_of_range_index():
    with pytest.raises(ModelConfigurationError, match="outside"):
        Incidence.from_rows(1, 1, phi_theta=[[3]], phi_gamma=[[]], psi_theta=[[]], psi_gamma=[[]])


def test_declared_incidence_matches_equations(cabin):
    def sample(rng):
        return rng.uniform(-20, 30, 7), rng.uniform(-500, 500, 10), INPUTS

    assert probe_incidence(cabin, sample, n_samples=50) == []


def test_probe_flags_undeclared_read():
    space = VariableSpace(theta_names=("a", "b"), gamma_names=(), initial=[0.0, 0.0])
    model = DaeModel(
        name="leaky",
        space=space,
        differential=(
            DifferentialEquation("a", lambda th, g, mu: th[1]),
            DifferentialEquation("b", lambda th, g, mu: 0.0),
        ),
        algebraic=(),
    )

    def sample(rng):
        return rng.normal(size=2), np.zeros(0), {}

    violations = probe_incidence(model, sample, n_samples=20)

    assert {(v.relation, v.row, v.column) for v in violations} == {("phi_theta", 0, 1)}


def test_model_rejects_equations_out_of_order():
    space = VariableSpace(theta_names=("a", "b"), gamma_names=(), initial=[0.0, 0.0])

    with pytest.raises(ModelConfigurationError, match="in order"):
        DaeModel(
            name="swapped",
            space=space,
            differential=(
                DifferentialEquation("b", lambda th, g, mu: 0.0),
                DifferentialEquation("a", lambda th, g, mu: 0.0),
            ),
            algebraic=(),
        )


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"theta_names": ("a", "a"), "gamma_names": (), "initial": [0, 0]}, "unique"),
        ({"theta_names": ("a",), "gamma_names": ("a",), "initial": [0]}, "shared"),
        ({"theta_names": ("a",), "gamma_names": (), "initial": [0, 1]}, "initial has"),
        ({"theta_names": ("a",), "gamma_names": (), "initial": [0], "scale": [0.0]}, "positive"),
        (
            {"theta_names": ("a",), "gamma_names": ("g",), "initial": [0], "nonnegative": ("g",)},
            "not differential",
        ),
    ],
)
def test_variable_space_validation(kwargs, message):
    with pytest.raises(ModelConfigurationError, match=message):
        VariableSpace(**kwargs)


def test_schedule_interpolates_series():
    schedule = InputSchedule({"T_ext": 5.0, "V_veh": InputSeries([0.0, 10.0], [0.0, 100.0])})

    assert schedule.value_at(2.5) == {"T_ext": 5.0, "V_veh": 25.0}


def test_schedule_must_cover_horizon():
    schedule = InputSchedule({"V_veh": InputSeries([0.0, 10.0], [0.0, 100.0])})

    with pytest.raises(ScheduleError, match="covers"):
        schedule.check_covers(20.0)


def test_schedule_reports_missing_channels():
    with pytest.raises(ScheduleError, match="missing input channels: T_cab"):
        InputSchedule({"T_ext": 1.0}).check_covers(10.0, required=("T_ext", "T_cab"))


def test_series_must_increase():
    with pytest.raises(ScheduleError, match="strictly increasing"):
        InputSeries([0.0, 0.0], [1.0, 2.0])


def test_schedule_round_trips_through_dict():
    schedule = InputSchedule({"T_ext": 5.0, "V_veh": InputSeries([0.0, 10.0], [0.0, 100.0])})

    rebuilt = InputSchedule.from_dict(schedule.to_dict())

    assert rebuilt.value_at(7.0) == schedule.value_at(7.0)


def test_load_series_csv_reads_drive_cycle():
    from conftest import SAMPLE_DATA

    series = load_series_csv(SAMPLE_DATA / "speed_cycle.csv")

    assert series.value_at(90.0) == pytest.approx(70.0)


def test_load_series_csv_requires_time_column(tmp_path):
    path = tmp_path / "cycle.csv"
    path.write_text("t,V_veh\n0,1\n", encoding="utf-8")

    with pytest.raises(ScheduleError, match="time_s"):
        load_series_csv(path)


def test_restricted_evaluators_match_full_rows(cabin):
    partition = classify_variables(cabin, [2, 3, 4, 6])
    restricted = restrict_model(cabin, partition)
    theta = np.linspace(-10.0, 15.0, 7)
    gamma = solve_algebraic(cabin, theta, INPUTS)
    theta_p = theta[list(partition.primary_theta)]
    theta_s = theta[list(partition.secondary_theta)]

    gamma_p = restricted.solve_gamma_p(theta_p, theta_s, INPUTS)
    phi_p = restricted.phi_p(theta_p, gamma_p, theta_s, INPUTS)
    psi_p = restricted.psi_p(theta_p, gamma_p, theta_s, INPUTS)

    np.testing.assert_allclose(gamma_p, gamma[list(partition.primary_gamma)], atol=1e-12)
    full = eval_derivatives(cabin, theta, gamma, INPUTS)
    np.testing.assert_allclose(phi_p, full[list(partition.primary_theta)], atol=1e-12)
    assert np.max(np.abs(psi_p)) < 1e-10


def test_restriction_rejects_partition_reading_tertiary(cabin):
    partition = Partition(
        n_theta=7,
        n_gamma=10,
        primary_theta=(6,),
        secondary_theta=(),
        tertiary_theta=(0, 1, 2, 3, 4, 5),
        primary_gamma=(0,),
        tertiary_gamma=(1, 2, 3, 4, 5, 6, 7, 8, 9),
    )

    with pytest.raises(PartitionError, match="tertiary"):
        restrict_model(cabin, partition)


def test_partition_must_cover_every_variable():
    with pytest.raises(PartitionError, match="missing"):
        Partition(
            n_theta=3,
            n_gamma=0,
            primary_theta=(0,),
            secondary_theta=(1,),
            tertiary_theta=(),
            primary_gamma=(),
            tertiary_gamma=(),
        )


def test_partition_sets_are_disjoint():
    with pytest.raises(PartitionError, match="more than one set"):
        Partition(
            n_theta=2,
            n_gamma=0,
            primary_theta=(0,),
            secondary_theta=(0, 1),
            tertiary_theta=(),
            primary_gamma=(),
            tertiary_gamma=(),
        )


def test_model_document_round_trip(cabin, tmp_path):
    document = describe_model(cabin)

    path = dump_model_document(document, tmp_path / "cabin.model.json")
    loaded = load_model_document(path)

    assert loaded == document
    assert loaded.structure_hash() == document.hash
    assert [1, 1] in loaded.incidence.phi_gamma


def test_model_document_hash_tracks_parameters(cabin):
    from bgreduce.thermal import IllustrativeParams, build_illustrative_cabin

    other = build_illustrative_cabin(IllustrativeParams(tau=30.0))

    assert describe_model(other).hash != describe_model(cabin).hash


def test_load_model_document_rejects_unknown_schema(cabin, tmp_path):
    document = describe_model(cabin).model_copy(update={"schema_version": 99})
    path = dump_model_document(document, tmp_path / "cabin.model.json")

    with pytest.raises(ModelConfigurationError, match="schema_version"):
        load_model_document(path)
