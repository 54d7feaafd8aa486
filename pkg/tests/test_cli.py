from __future__ import annotations

import json

import pytest
from conftest import SAMPLE_DATA
from typer.testing import CliRunner

from bgreduce.cli.error_handling import EXIT_CONFIGURATION, EXIT_RUNTIME, report_error
from bgreduce.cli.main import app, parse_inputs, parse_n_stab
from bgreduce.errors import ModelConfigurationError
from bgreduce.simulation import SimulationError, plan_from_points, save_plan

runner = CliRunner()


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _payload(result) -> dict:
    return json.loads(result.stdout)


def test_describe_writes_model_document(tmp_path):
    out = tmp_path / "cabin.json"

    result = _invoke("describe", "--model", "illustrative", "--out", out)

    assert result.exit_code == 0, result.output
    document = json.loads(out.read_text("utf-8"))
    assert document["hash"] == _payload(result)["hash"]
    assert len(document["theta_names"]) == 7


def test_simulate_with_constant_input(tmp_path):
    out = tmp_path / "run.csv"

    result = _invoke(
        "simulate", "--input", "h_ext=20", "--t-final", "30", "--dt", "1", "--out", out
    )

    assert result.exit_code == 0, result.output
    assert _payload(result)["samples"] == 31
    assert out.read_text("utf-8").startswith("time_s")


def test_simulate_multizone_with_speed_cycle(tmp_path):
    result = _invoke(
        "simulate",
        "--model",
        "multizone",
        "--cycle",
        f"V_veh={SAMPLE_DATA / 'speed_cycle.csv'}",
        "--t-final",
        "10",
        "--out",
        tmp_path / "mz.csv",
    )

    assert result.exit_code == 0, result.output


def test_doe_reports_rejections(tmp_path):
    out = tmp_path / "plan.json"

    result = _invoke("doe", "-n", "50", "--seed", "3", "--out", out)

    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["requested"] == 50
    assert payload["retained"] + payload["rejected"] == 50
    assert len(json.loads(out.read_text("utf-8"))["points"]) == payload["retained"]


@pytest.mark.integration
def test_reduce_pipeline_end_to_end(tmp_path):
    plan = save_plan(
        plan_from_points([{"h_ext": 35.0}, {"h_ext": 10.0}], seed=1), tmp_path / "plan.json"
    )
    campaign = tmp_path / "campaign"
    artifact = tmp_path / "artifact.json"
    reference = tmp_path / "reference.csv"
    reduced = tmp_path / "reduced.csv"

    steps = [
        ("campaign", "--plan", plan, "--t-final", "600", "--dt", "1", "--out", campaign),
        ("reduce", "--campaign", campaign, "--n-modes", "4", "--out", artifact),
        (
            "run-reduced",
            "--artifact",
            artifact,
            "--reconstruct",
            "--input",
            "h_ext=20",
            "--out",
            reduced,
        ),
        ("simulate", "--input", "h_ext=20", "--t-final", "600", "--out", reference),
    ]
    for args in steps:
        result = _invoke(*args)
        assert result.exit_code == 0, result.output

    summary = json.loads(artifact.read_text("utf-8"))
    assert len(summary["partition"]["primary_theta"]) == 4

    result = _invoke(
        "evaluate",
        "--reference",
        reference,
        "--approx",
        reduced,
        "--plot",
        tmp_path / "cmp.png",
        "--out",
        tmp_path / "report.json",
    )

    assert result.exit_code == 0, result.output
    payload = _payload(result)
    assert payload["max_ae"] >= payload["mae"] >= 0.0
    assert (tmp_path / "cmp.png").exists()


def test_bad_input_is_a_configuration_error(tmp_path):
    result = _invoke("simulate", "--input", "h_ext", "--t-final", "5", "--out", tmp_path / "x.csv")

    assert result.exit_code == EXIT_CONFIGURATION
    error = json.loads(result.stderr.strip().splitlines()[-1])
    assert error["error"] == "ModelConfigurationError"
    assert "NAME=VALUE" in error["message"]


def test_unknown_model_is_a_configuration_error(tmp_path):
    result = _invoke("describe", "--model", "submarine", "--out", tmp_path / "x.json")

    assert result.exit_code == EXIT_CONFIGURATION


def test_numerical_failure_is_a_runtime_error(tmp_path):
    result = _invoke(
        "simulate", "--input", "h_ext=1e9", "--t-final", "200", "--out", tmp_path / "x.csv"
    )

    assert result.exit_code == EXIT_RUNTIME
    error = json.loads(result.stderr.strip().splitlines()[-1])
    assert error["error"] == "SimulationError"
    assert "time" in error["details"]


def test_missing_artifact_file(tmp_path):
    result = _invoke("run-reduced", "--artifact", tmp_path / "absent.json")

    assert result.exit_code == EXIT_CONFIGURATION


def test_report_error_follows_the_cause_chain(capsys):
    try:
        try:
            raise ModelConfigurationError("bad dt")
        except ModelConfigurationError as exc:
            raise SimulationError("wrapped") from exc
    except SimulationError as exc:
        code = report_error(exc)

    assert code == EXIT_CONFIGURATION
    assert json.loads(capsys.readouterr().err)["message"] == "wrapped"


@pytest.mark.parametrize(
    ("raw", "expected"),
    [(None, None), ("auto", "auto"), ("3", 3)],
)
def test_parse_n_stab(raw, expected):
    assert parse_n_stab(raw) == expected


@pytest.mark.parametrize("raw", ["0", "many"])
def test_parse_n_stab_rejects_bad_values(raw):
    with pytest.raises(ModelConfigurationError, match="--n-stab"):
        parse_n_stab(raw)


def test_parse_inputs():
    assert parse_inputs(["T_ext=30", " h_ext = 12.5 "]) == {"T_ext": 30.0, "h_ext": 12.5}

    with pytest.raises(ModelConfigurationError, match="must be a number"):
        parse_inputs(["T_ext=warm"])
