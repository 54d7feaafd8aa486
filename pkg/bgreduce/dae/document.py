"""Versioned JSON document describing a model's structure.

The document records the builder name and parameters, variable names, initial
state, scale factors, the variables that cannot go negative and the declared
incidence (1-based pairs). The ``hash`` is a sha256 over everything else, so a
model rebuilt from the document can be checked against the one that produced it.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ModelConfigurationError
from .model import DaeModel

MODEL_SCHEMA_VERSION = 1


class IncidenceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    phi_theta: list[list[int]]
    phi_gamma: list[list[int]]
    psi_theta: list[list[int]]
    psi_gamma: list[list[int]]
    mixed: list[list[int]] = Field(default_factory=list)


class ModelDocument(BaseModel):
    """Structure of a DAE model as stored in JSON (``schema_version`` 1)."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = MODEL_SCHEMA_VERSION
    name: str
    params: dict[str, Any] = Field(default_factory=dict)
    theta_names: list[str]
    gamma_names: list[str]
    inputs: list[str]
    initial: list[float]
    scale: list[float]
    nonnegative: list[str] = Field(default_factory=list)
    incidence: IncidenceDocument
    hash: str = ""

    def structure_hash(self) -> str:
        payload = self.model_dump(mode="json", exclude={"hash"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def describe_model(model: DaeModel) -> ModelDocument:
    """Build the JSON model document of ``model``."""
    incidence = model.incidence
    document = ModelDocument(
        name=model.name,
        params=dict(model.params),
        theta_names=list(model.space.theta_names),
        gamma_names=list(model.space.gamma_names),
        inputs=list(model.inputs),
        initial=model.space.initial.tolist(),
        scale=model.space.scale.tolist(),
        nonnegative=list(model.space.nonnegative),
        incidence=IncidenceDocument(
            phi_theta=incidence.pairs("phi_theta"),
            phi_gamma=incidence.pairs("phi_gamma"),
            psi_theta=incidence.pairs("psi_theta"),
            psi_gamma=incidence.pairs("psi_gamma"),
            mixed=sorted([k + 1, i + 1, j + 1] for k, i, j in incidence.mixed),
        ),
    )
    document.hash = document.structure_hash()
    return document


def dump_model_document(document: ModelDocument, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_model_document(path: str | Path) -> ModelDocument:
    path = Path(path)
    if not path.exists():
        raise ModelConfigurationError(f"Model document does not exist: {path}", path=str(path))
    try:
        document = ModelDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ModelConfigurationError(f"Invalid model document {path}: {exc}") from exc
    if document.schema_version != MODEL_SCHEMA_VERSION:
        raise ModelConfigurationError(
            f"Unsupported model schema_version {document.schema_version} "
            f"(expected {MODEL_SCHEMA_VERSION}).",
            path=str(path),
        )
    return document
