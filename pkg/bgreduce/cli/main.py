"""Command-line pipeline: simulate, sample, reduce, run and evaluate hybrid models."""

import json
import logging
import sys
from pathlib import Path
from typing import Annotated, Any

import typer
from dotenv import load_dotenv

# Load environment variables from .env file (if present) before settings are read
load_dotenv()

from bgreduce.ann.layers import ACTIVATIONS  # noqa: E402
from bgreduce.bench.metrics import error_report, save_report  # noqa: E402
from bgreduce.bench.plots import plot_comparison  # noqa: E402
from bgreduce.bench.speedup import benchmark_speedup  # noqa: E402
from bgreduce.cli.error_handling import handle_cli_errors  # noqa: E402
from bgreduce.dae.document import describe_model, dump_model_document  # noqa: E402
from bgreduce.dae.model import DaeModel  # noqa: E402
from bgreduce.dae.variables import InputSchedule, load_series_csv  # noqa: E402
from bgreduce.errors import ModelConfigurationError  # noqa: E402
from bgreduce.hybrid.artifact import artifact_hash, load_artifact, save_artifact  # noqa: E402
from bgreduce.hybrid.model import integrate_hybrid, reconstruct_tertiary  # noqa: E402
from bgreduce.hybrid.pipeline import reduce_trajectories  # noqa: E402
from bgreduce.settings import SETTINGS  # noqa: E402
from bgreduce.simulation.campaign import load_campaign, run_campaign, write_campaign  # noqa: E402
from bgreduce.simulation.doe import (  # noqa: E402
    cabin_cooling_space,
    filter_constraints,
    load_plan,
    load_space,
    sample_doe,
    save_plan,
)
from bgreduce.simulation.integrator import integrate  # noqa: E402
from bgreduce.simulation.trajectory import read_trajectory, write_trajectory  # noqa: E402
from bgreduce.thermal.registry import build_model, default_schedule, parse_params  # noqa: E402

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="bgreduce",
    help="Hybrid reduced models of bond-graph thermal DAEs.",
    no_args_is_help=True,
    add_completion=False,
)

ModelOption = Annotated[str, typer.Option("--model", help="Registered model name.")]
ParamsOption = Annotated[
    str | None, typer.Option("--params", help="JSON object or path to a JSON file of overrides.")
]
InputOption = Annotated[
    list[str] | None, typer.Option("--input", help="Constant input NAME=VALUE (repeatable).")
]
CycleOption = Annotated[
    list[str] | None,
    typer.Option("--cycle", help="Time-series input NAME=PATH to a two-column CSV (repeatable)."),
]
TFinalOption = Annotated[float | None, typer.Option("--t-final", help="Horizon in seconds.")]
DtOption = Annotated[float | None, typer.Option("--dt", help="Recording interval in seconds.")]
SubstepsOption = Annotated[
    int | None, typer.Option("--substeps", help="Internal Euler steps per interval.")
]


def _emit(payload: dict[str, Any]) -> None:
    typer.echo(json.dumps(payload, indent=2, default=str))


def _split(assignment: str, flag: str) -> tuple[str, str]:
    name, sep, value = assignment.partition("=")
    if not sep or not name.strip() or not value.strip():
        raise ModelConfigurationError(
            f"{flag} expects NAME=VALUE (received {assignment!r}).", flag=flag
        )
    return name.strip(), value.strip()


def parse_inputs(inputs: list[str] | None) -> dict[str, float]:
    values: dict[str, float] = {}
    for assignment in inputs or []:
        name, raw = _split(assignment, "--input")
        try:
            values[name] = float(raw)
        except ValueError as exc:
            raise ModelConfigurationError(
                f"--input {name} must be a number (received {raw!r})."
            ) from exc
    return values


def build_schedule(
    model_name: str,
    params: dict[str, Any],
    inputs: list[str] | None,
    cycles: list[str] | None,
) -> InputSchedule:
    """Registered default inputs overridden by --input constants and --cycle series."""
    schedule = default_schedule(model_name, params).with_constants(parse_inputs(inputs))
    series = {}
    for assignment in cycles or []:
        name, path = _split(assignment, "--cycle")
        series[name] = load_series_csv(path)
    return schedule.with_series(series)


def parse_n_stab(raw: str | None) -> int | str | None:
    if raw is None:
        return None
    if raw == "auto":
        return "auto"
    try:
        value = int(raw)
    except ValueError as exc:
        raise ModelConfigurationError(
            f"--n-stab must be a positive integer or 'auto' (received {raw!r})."
        ) from exc
    if value < 1:
        raise ModelConfigurationError(f"--n-stab must be at least 1 (received {value}).")
    return value


def _output(path: Path | None, default: str) -> Path:
    return path if path is not None else Path(SETTINGS.outputs_dir) / default


def _load_model(model: str, params: str | None) -> tuple[DaeModel, dict[str, Any]]:
    overrides = parse_params(params)
    return build_model(model, overrides), overrides


@app.command()
@handle_cli_errors
def simulate(
    model: ModelOption = "illustrative",
    params: ParamsOption = None,
    inputs: InputOption = None,
    cycles: CycleOption = None,
    t_final: TFinalOption = None,
    dt: DtOption = None,
    substeps: SubstepsOption = None,
    out: Annotated[Path | None, typer.Option("--out", help="Trajectory CSV path.")] = None,
) -> None:
    """Integrate the full model and write its trajectory CSV."""
    dae, overrides = _load_model(model, params)
    schedule = build_schedule(model, overrides, inputs, cycles)
    trajectory = integrate(dae, schedule, t_final=t_final, dt=dt, substeps=substeps)
    path = write_trajectory(trajectory, _output(out, "trajectory.csv"))
    _emit({"model": dae.name, "samples": trajectory.n_samples, "out": str(path)})


@app.command()
@handle_cli_errors
def doe(
    n_points: Annotated[int, typer.Option("--n-points", "-n", help="Points to draw.")] = 500,
    seed: Annotated[int | None, typer.Option("--seed", help="Sampler seed.")] = None,
    space: Annotated[
        Path | None, typer.Option("--space", help="ParamSpace JSON (default: cabin cooling).")
    ] = None,
    constrain: Annotated[
        bool, typer.Option("--constrain/--no-constrain", help="Apply the humidity constraint.")
    ] = True,
    pressure: Annotated[
        float | None, typer.Option("--pressure", help="Ambient pressure in Pa.")
    ] = None,
    out: Annotated[Path | None, typer.Option("--out", help="Plan JSON path.")] = None,
) -> None:
    """Draw a Latin hypercube plan, optionally filtered by the humidity constraint."""
    box = cabin_cooling_space() if space is None else load_space(space)
    plan = sample_doe(box, n_points, seed=seed)
    if constrain:
        plan = filter_constraints(plan, pressure)
    path = save_plan(plan, _output(out, "plan.json"))
    _emit(
        {
            "requested": plan.requested,
            "retained": plan.retained,
            "rejected": plan.rejected,
            "seed": plan.seed,
            "out": str(path),
        }
    )


@app.command()
@handle_cli_errors
def campaign(
    plan: Annotated[Path, typer.Option("--plan", help="Plan JSON produced by `doe`.")],
    model: ModelOption = "illustrative",
    params: ParamsOption = None,
    inputs: InputOption = None,
    cycles: CycleOption = None,
    t_final: TFinalOption = None,
    dt: DtOption = None,
    substeps: SubstepsOption = None,
    workers: Annotated[int | None, typer.Option("--workers", help="Concurrent runs.")] = None,
    out: Annotated[Path | None, typer.Option("--out", help="Campaign directory.")] = None,
) -> None:
    """Run the full model once per plan point and store the trajectories."""
    dae, overrides = _load_model(model, params)
    doe_plan = load_plan(plan)
    schedule = build_schedule(model, overrides, inputs, cycles)
    trajectories = run_campaign(
        dae,
        doe_plan,
        schedule,
        t_final=t_final,
        dt=dt,
        substeps=substeps,
        workers=workers,
    )
    manifest = write_campaign(
        dae, trajectories, _output(out, "campaign"), seed=doe_plan.seed, substeps=substeps
    )
    _emit({"model": dae.name, "trajectories": len(trajectories), "manifest": str(manifest)})


@app.command()
@handle_cli_errors
def reduce(
    campaign_dir: Annotated[Path, typer.Option("--campaign", help="Training campaign directory.")],
    model: ModelOption = "illustrative",
    params: ParamsOption = None,
    n_modes: Annotated[
        int | None, typer.Option("--n-modes", help="Fixed number of modes N.")
    ] = None,
    eps_tol: Annotated[
        float | None, typer.Option("--eps-tol", help="Frobenius residual bound.")
    ] = None,
    n_stab: Annotated[
        str | None, typer.Option("--n-stab", help="Stabilized modes: an integer or 'auto'.")
    ] = None,
    validation_dir: Annotated[
        Path | None, typer.Option("--validation-dir", help="Held-out campaign for --n-stab auto.")
    ] = None,
    activation: Annotated[
        str, typer.Option("--activation", help=f"One of: {', '.join(ACTIVATIONS)}.")
    ] = "identity",
    substeps: SubstepsOption = None,
    out: Annotated[Path | None, typer.Option("--out", help="Artifact JSON path.")] = None,
) -> None:
    """Reduce a campaign into a hybrid artifact."""
    if activation not in ACTIVATIONS:
        raise ModelConfigurationError(
            f"--activation must be one of {', '.join(ACTIVATIONS)} (received {activation!r})."
        )
    dae, _ = _load_model(model, params)
    manifest, trajectories = load_campaign(dae, campaign_dir)
    validation = []
    if validation_dir is not None:
        _, validation = load_campaign(dae, validation_dir)
    artifact = reduce_trajectories(
        dae,
        trajectories,
        n_modes=n_modes,
        eps_tol=eps_tol,
        n_stab=parse_n_stab(n_stab),
        activation=activation,  # type: ignore[arg-type]
        validation=validation,
        substeps=manifest.substeps if substeps is None else substeps,
        seed=manifest.seed,
        files=[entry.file for entry in manifest.entries],
    )
    path = save_artifact(artifact, _output(out, "artifact.json"))
    _emit(
        {
            "model": dae.name,
            "n_modes": artifact.basis.shape[1],
            "primary_theta": artifact.partition.primary_theta,
            "secondary_theta": artifact.partition.secondary_theta,
            "tertiary_theta": artifact.partition.tertiary_theta,
            "n_stab": artifact.coupling.n_modes,
            "hash": artifact_hash(artifact),
            "out": str(path),
        }
    )


@app.command("run-reduced")
@handle_cli_errors
def run_reduced(
    artifact_path: Annotated[Path, typer.Option("--artifact", help="Hybrid artifact JSON.")],
    inputs: InputOption = None,
    cycles: CycleOption = None,
    t_final: TFinalOption = None,
    dt: DtOption = None,
    substeps: SubstepsOption = None,
    reconstruct: Annotated[
        bool, typer.Option("--reconstruct", help="Fill tertiary variables at printouts.")
    ] = False,
    out: Annotated[Path | None, typer.Option("--out", help="Trajectory CSV path.")] = None,
) -> None:
    """Run a hybrid artifact and write its trajectory CSV."""
    artifact = load_artifact(artifact_path)
    schedule = build_schedule(artifact.model.name, artifact.model.params, inputs, cycles)
    trajectory = integrate_hybrid(artifact, schedule, t_final=t_final, dt=dt, substeps=substeps)
    if reconstruct:
        trajectory = reconstruct_tertiary(artifact, trajectory)
    path = write_trajectory(trajectory, _output(out, "reduced.csv"))
    _emit({"model": artifact.model.name, "samples": trajectory.n_samples, "out": str(path)})


@app.command()
@handle_cli_errors
def evaluate(
    reference: Annotated[
        list[Path], typer.Option("--reference", help="Reference trajectory CSV (repeatable).")
    ],
    approx: Annotated[
        list[Path], typer.Option("--approx", help="Approximate trajectory CSV (repeatable).")
    ],
    model: ModelOption = "illustrative",
    params: ParamsOption = None,
    variables: Annotated[
        str | None, typer.Option("--variables", help="Comma-separated names (default: all θ).")
    ] = None,
    plot: Annotated[
        Path | None, typer.Option("--plot", help="PNG comparing the first pair.")
    ] = None,
    out: Annotated[Path | None, typer.Option("--out", help="ErrorReport JSON path.")] = None,
) -> None:
    """Compare two sets of trajectories (paired in order) and write an ErrorReport."""
    dae, _ = _load_model(model, params)
    names = [n.strip() for n in variables.split(",") if n.strip()] if variables else None
    references = [read_trajectory(path, dae.space) for path in reference]
    approximations = [read_trajectory(path, dae.space) for path in approx]
    report = error_report(references, approximations, names)
    path = save_report(report, _output(out, "error_report.json"))
    if plot is not None:
        plot_comparison(
            references[0], approximations[0], names or list(dae.space.theta_names), plot
        )
    _emit({"mae": report.mae, "max_ae": report.max_ae, "out": str(path)})


@app.command()
@handle_cli_errors
def bench(
    artifact_path: Annotated[Path, typer.Option("--artifact", help="Hybrid artifact JSON.")],
    inputs: InputOption = None,
    cycles: CycleOption = None,
    t_final: TFinalOption = None,
    dt: DtOption = None,
    substeps: SubstepsOption = None,
    repeats: Annotated[int | None, typer.Option("--repeats", help="Timed runs (>= 3).")] = None,
    out: Annotated[Path | None, typer.Option("--out", help="BenchReport JSON path.")] = None,
) -> None:
    """Time the full model against the hybrid artifact on identical inputs."""
    artifact = load_artifact(artifact_path)
    dae = artifact.runtime.model
    schedule = build_schedule(artifact.model.name, artifact.model.params, inputs, cycles)
    report = benchmark_speedup(
        dae, artifact, schedule, t_final=t_final, dt=dt, substeps=substeps, repeats=repeats
    )
    path = save_report(report, _output(out, "bench_report.json"))
    _emit({"speedup": report.speedup, "out": str(path)})


@app.command()
@handle_cli_errors
def describe(
    model: ModelOption = "illustrative",
    params: ParamsOption = None,
    out: Annotated[Path | None, typer.Option("--out", help="Model document JSON path.")] = None,
) -> None:
    """Write the JSON model document (variables, incidence, parameters, hash)."""
    dae, _ = _load_model(model, params)
    document = describe_model(dae)
    path = dump_model_document(document, _output(out, f"{dae.name}.model.json"))
    _emit({"model": dae.name, "hash": document.hash, "out": str(path)})


def main() -> None:
    logging.basicConfig(
        level=SETTINGS.log_level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    app()


if __name__ == "__main__":
    main()
