from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from bgreduce.dae.model import AlgebraicEquation, DaeModel, DifferentialEquation
from bgreduce.dae.variables import VariableSpace
from bgreduce.simulation.integrator import integrate
from bgreduce.thermal.illustrative import build_illustrative_cabin, default_schedule

SAMPLE_DATA = Path(__file__).resolve().parent / "sample_data"


def load_basis_fixture() -> np.ndarray:
    return pd.read_csv(SAMPLE_DATA / "illustrative_basis.csv").to_numpy(float)


@pytest.fixture()
def basis_fixture() -> np.ndarray:
    return load_basis_fixture()


@pytest.fixture()
def cabin() -> DaeModel:
    return build_illustrative_cabin()


@pytest.fixture(scope="session")
def cabin_training():
    """Full runs at h_ext = 35 and 10, one hour at 1 s."""
    model = build_illustrative_cabin()
    base = default_schedule()
    return [
        integrate(
            model,
            base.with_constants({"h_ext": h_ext}),
            t_final=3600.0,
            dt=1.0,
            substeps=1,
            point={"h_ext": h_ext},
        )
        for h_ext in (35.0, 10.0)
    ]


def secondary_gamma_toy() -> DaeModel:
    """θ = [θ1], γ = [γ1, γ2]; φ1 = −γ2, γ1 = 0.5·θ1, γ2 = θ1 − γ1."""
    space = VariableSpace(
        theta_names=("theta_1",), gamma_names=("gamma_1", "gamma_2"), initial=[1.0]
    )
    return DaeModel(
        name="toy",
        space=space,
        differential=(
            DifferentialEquation("theta_1", lambda th, g, mu: -g[1], reads_gamma=(1,)),
        ),
        algebraic=(
            AlgebraicEquation("gamma_1", lambda th, g, mu: 0.5 * th[0], reads_theta=(0,)),
            AlgebraicEquation(
                "gamma_2", lambda th, g, mu: th[0] - g[0], reads_theta=(0,), reads_gamma=(0,)
            ),
        ),
    )
