from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest

from bgreduce.ann import calibrate_layer
from bgreduce.bench import error_report
from bgreduce.dae import AlgebraicSolveError, DaeModel, InputSchedule, InputSeries
from bgreduce.dae.restriction import RestrictedModel
from bgreduce.errors import ModelConfigurationError
from bgreduce.hybrid import (
    ArtifactError,
    ReductionError,
    artifact_hash,
    bind_artifact,
    build_hybrid,
    integrate_hybrid,
    load_artifact,
    reconstruct_tertiary,
    reduce_trajectories,
    save_artifact,
    validation_max_error,
)
from bgreduce.reduction import (
    assemble_snapshots,
    classify_variables,
    select_interpolation_indices,
    truncated_svd,
)
from bgreduce.simulation import TrajectoryError, integrate
from bgreduce.thermal import IllustrativeParams, build_illustrative_cabin
from bgreduce.thermal.illustrative import WINDSHIELD, default_schedule


def _run(model, h_ext, t_final=3600.0):
    schedule = default_schedule().with_constants({"h_ext": h_ext})
    return integrate(model, schedule, t_final=t_final, dt=1.0, point={"h_ext": h_ext})


def _counting(model: DaeModel, rows, counter: list[int]) -> DaeModel:
    algebraic = list(model.algebraic)
    for k in rows:
        inner = algebraic[k].explicit

        def counted(theta, gamma, inputs, inner=inner):
            counter[0] += 1
            return inner(theta, gamma, inputs)

        algebraic[k] = dataclasses.replace(algebraic[k], explicit=counted)
    return dataclasses.replace(model, algebraic=tuple(algebraic))


@pytest.fixture(scope="module")
def cabin_artifact(cabin_training):
    return reduce_trajectories(build_illustrative_cabin(), cabin_training, n_modes=4, seed=7)


def test_artifact_partition_is_one_based_and_consistent(cabin_artifact):
    partition = cabin_artifact.partition

    assert len(partition.primary_theta) == 4
    theta_sets = partition.primary_theta + partition.secondary_theta + partition.tertiary_theta
    assert sorted(theta_sets) == [1, 2, 3, 4, 5, 6, 7]
    assert sorted(cabin_artifact.basis.interpolation_order) == partition.primary_theta
    assert cabin_artifact.coupling.inputs == partition.primary_theta
    assert cabin_artifact.provenance.points == [{"h_ext": 35.0}, {"h_ext": 10.0}]
    assert cabin_artifact.integration.dt == 1.0


@pytest.mark.slow
def test_cabin_reduction_meets_accuracy_targets(cabin_artifact):
    model = build_illustrative_cabin()
    reference = _run(model, 20.0)

    run = integrate_hybrid(
        cabin_artifact, default_schedule().with_constants({"h_ext": 20.0}), point={"h_ext": 20.0}
    )
    run = reconstruct_tertiary(cabin_artifact, run)
    report = error_report(reference, run)

    assert report.mae <= 0.2
    assert report.max_ae <= 1.0
    assert report.n_variables == 7


@pytest.mark.slow
@pytest.mark.parametrize(("h_ext", "bound"), [(35.0, 1.0), (10.0, 1.2)])
def test_training_replay_stays_within_bound(cabin_artifact, cabin_training, h_ext, bound):
    reference = next(t for t in cabin_training if t.point == {"h_ext": h_ext})
    schedule = default_schedule().with_constants({"h_ext": h_ext})

    run = integrate_hybrid(cabin_artifact, schedule, point={"h_ext": h_ext})
    report = error_report(reference, reconstruct_tertiary(cabin_artifact, run))

    assert report.max_ae <= bound


def test_relu_leaves_cabin_temperatures_unclamped(cabin_artifact, cabin_training):
    relu = reduce_trajectories(
        build_illustrative_cabin(), cabin_training, n_modes=4, activation="relu"
    )
    schedule = default_schedule()

    linear_run = reconstruct_tertiary(
        cabin_artifact, integrate_hybrid(cabin_artifact, schedule, t_final=60.0)
    )
    relu_run = reconstruct_tertiary(relu, integrate_hybrid(relu, schedule, t_final=60.0))

    assert relu.coupling.activation == "relu"
    assert relu.coupling.clamped == []
    assert relu.reconstruction.clamped == []
    np.testing.assert_array_equal(relu_run.theta, linear_run.theta)
    assert np.all(relu_run.theta_series("T_2")[:3] < -17.0)
    assert np.all(relu_run.theta_series("T_1")[:3] < -17.0)


def test_relu_clamp_on_negative_start_is_rejected(cabin, cabin_training):
    basis = truncated_svd(assemble_snapshots(cabin_training, cabin.space), n_modes=4)
    partition = classify_variables(cabin, select_interpolation_indices(basis))
    primary = partition.primary_theta
    coupling = calibrate_layer(basis, primary, partition.secondary_theta, activation="relu")
    reconstruction = calibrate_layer(basis, primary, partition.tertiary_theta)

    with pytest.raises(ArtifactError, match="start below zero") as exc:
        build_hybrid(cabin, basis, partition, coupling, reconstruction)

    assert "T_2" in exc.value.details["variables"]


def test_hybrid_is_exact_on_its_own_invariant_subspace():
    model = build_illustrative_cabin(IllustrativeParams(roof=WINDSHIELD))
    reference = _run(model, 35.0, t_final=600.0)

    artifact = reduce_trajectories(model, [reference], n_modes=4)
    run = integrate_hybrid(artifact, default_schedule(), t_final=600.0, point={"h_ext": 35.0})
    run = reconstruct_tertiary(artifact, run)

    np.testing.assert_allclose(run.theta, reference.theta, atol=1e-6)
    assert validation_max_error(artifact, [reference]) < 1e-6


@pytest.fixture(scope="module")
def all_primary_artifact(cabin_training):
    model = build_illustrative_cabin()
    basis = truncated_svd(assemble_snapshots(cabin_training, model.space), n_modes=4)
    partition = classify_variables(model, range(7))
    everything = partition.primary_theta
    coupling = calibrate_layer(basis, everything, ())
    reconstruction = calibrate_layer(basis, everything, ())
    return build_hybrid(model, basis, partition, coupling, reconstruction, dt=1.0, substeps=1)


def _random_schedule(seed: int) -> InputSchedule:
    rng = np.random.default_rng(seed)
    knots = np.linspace(0.0, 600.0, 7)
    return default_schedule().with_series(
        {
            "h_ext": InputSeries(knots, rng.uniform(5.0, 40.0, size=knots.size)),
            "T_cab": InputSeries(knots, rng.uniform(15.0, 30.0, size=knots.size)),
        }
    )


@pytest.mark.parametrize("seed", range(10))
def test_all_primary_hybrid_equals_full_model(all_primary_artifact, seed):
    model = all_primary_artifact.runtime.model
    schedule = _random_schedule(seed)

    run = integrate_hybrid(all_primary_artifact, schedule, t_final=600.0)
    reference = integrate(model, schedule, t_final=600.0, dt=1.0)

    np.testing.assert_allclose(run.theta, reference.theta, atol=1e-12)
    assert np.all(np.isnan(run.gamma[[8, 9]]))


def test_tertiary_equations_are_never_evaluated_while_stepping(cabin_artifact):
    counter = [0]
    model = _counting(build_illustrative_cabin(), rows=(8, 9), counter=counter)
    bind_artifact(cabin_artifact, model=model)

    try:
        run = integrate_hybrid(cabin_artifact, default_schedule(), t_final=300.0)
        assert counter[0] == 0

        filled = reconstruct_tertiary(cabin_artifact, run)
        assert counter[0] == 2 * run.n_samples
    finally:
        bind_artifact(cabin_artifact)

    assert np.all(np.isfinite(filled.gamma))
    np.testing.assert_allclose(
        filled.gamma_series("Q_9"),
        filled.gamma_series("Q_1") + filled.gamma_series("Q_5"),
        rtol=1e-12,
    )


def test_tertiary_rows_are_nan_until_reconstructed(cabin_artifact):
    run = integrate_hybrid(cabin_artifact, default_schedule(), t_final=30.0)
    tertiary = [i - 1 for i in cabin_artifact.partition.tertiary_theta]

    assert np.all(np.isnan(run.theta[tertiary]))
    assert np.all(np.isfinite(reconstruct_tertiary(cabin_artifact, run).theta))


def test_reconstruction_needs_primary_values(cabin_artifact):
    run = integrate_hybrid(cabin_artifact, default_schedule(), t_final=10.0)
    theta = run.theta.copy()
    theta[cabin_artifact.partition.primary_theta[0] - 1] = np.nan

    with pytest.raises(TrajectoryError, match="primary"):
        reconstruct_tertiary(cabin_artifact, dataclasses.replace(run, theta=theta))


def test_algebraic_failure_reports_time(monkeypatch, cabin_artifact):
    calls = {"n": 0}
    original = RestrictedModel.solve_into

    def flaky(self, theta, gamma, inputs, tol):
        calls["n"] += 1
        if calls["n"] > 5:
            raise AlgebraicSolveError("no convergence", residual_norm=1.0)
        return original(self, theta, gamma, inputs, tol)

    monkeypatch.setattr(RestrictedModel, "solve_into", flaky)

    with pytest.raises(AlgebraicSolveError, match="t = 5 s") as exc:
        integrate_hybrid(cabin_artifact, default_schedule(), t_final=30.0)

    assert exc.value.details["time"] == 5.0
    assert exc.value.details["residual_norm"] == 1.0


def test_artifact_file_round_trip(cabin_artifact, tmp_path):
    path = save_artifact(cabin_artifact, tmp_path / "artifact.json")

    loaded = load_artifact(path)
    first = integrate_hybrid(cabin_artifact, default_schedule(), t_final=60.0)
    second = integrate_hybrid(loaded, default_schedule(), t_final=60.0)

    assert artifact_hash(loaded) == artifact_hash(cabin_artifact)
    np.testing.assert_array_equal(first.theta, second.theta)


def test_artifact_json_is_plain_data(cabin_artifact, tmp_path):
    data = json.loads(save_artifact(cabin_artifact, tmp_path / "a.json").read_text("utf-8"))

    assert data["schema_version"] == 1
    assert data["basis"]["shape"] == [7, 4]
    assert len(data["basis"]["modes"]) == 28
    assert data["coupling"]["shape"] == [len(data["partition"]["secondary_theta"]), 4]
    assert "_runtime" not in data


def test_artifact_rejects_layer_outside_partition(cabin_artifact, tmp_path):
    data = json.loads(cabin_artifact.model_dump_json())
    data["reconstruction"]["outputs"] = data["partition"]["primary_theta"][:1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")

    with pytest.raises(ArtifactError, match="Invalid hybrid artifact"):
        load_artifact(path)


def test_artifact_with_foreign_model_hash_is_rejected(cabin_artifact, tmp_path):
    data = json.loads(cabin_artifact.model_dump_json())
    data["model"]["hash"] = "f" * 64
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(data), encoding="utf-8")

    with pytest.raises(ModelConfigurationError, match="hash mismatch"):
        load_artifact(path)
    assert load_artifact(path, bind=False).model.hash == "f" * 64


def test_bind_rejects_other_model(cabin_artifact):
    with pytest.raises(ArtifactError, match="does not match"):
        bind_artifact(cabin_artifact, build_illustrative_cabin(IllustrativeParams(tau=30.0)))


def test_auto_stabilized_modes_need_validation(cabin, cabin_training):
    with pytest.raises(ReductionError, match="validation"):
        reduce_trajectories(cabin, cabin_training, n_modes=4, n_stab="auto")


@pytest.mark.slow
def test_auto_sweep_records_scores(cabin, cabin_training):
    validation = [_run(cabin, 20.0, t_final=3600.0)]

    artifact = reduce_trajectories(
        cabin, cabin_training, n_modes=4, n_stab="auto", validation=validation
    )

    scores = artifact.provenance.n_stab_scores
    assert sorted(scores) == [1, 2, 3, 4]
    finite = {n: s for n, s in scores.items() if s is not None}
    assert artifact.coupling.n_modes == min(finite, key=lambda n: (finite[n], -n))
    assert artifact.reconstruction.n_modes == artifact.coupling.n_modes


def test_fixed_stabilized_modes(cabin, cabin_training):
    artifact = reduce_trajectories(cabin, cabin_training, n_modes=4, n_stab=2)

    assert artifact.coupling.n_modes == 2
    assert artifact.basis.shape == [7, 4]
