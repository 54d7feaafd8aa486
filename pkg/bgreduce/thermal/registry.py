"""Model builders registered by name."""

from __future__ import annotations

import json
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

from ..dae.document import ModelDocument, describe_model, load_model_document
from ..dae.model import DaeModel
from ..dae.variables import InputSchedule
from ..errors import ModelConfigurationError
from . import illustrative, multizone


@dataclass(frozen=True)
class ModelBuilder:
    """How to build one registered model (parameter class, builder, default inputs)."""

    params_class: type[BaseModel]
    build: Callable[[Any], DaeModel]
    default_schedule: Callable[[Any], InputSchedule]


MODEL_BUILDERS: dict[str, ModelBuilder] = {
    illustrative.MODEL_NAME: ModelBuilder(
        params_class=illustrative.IllustrativeParams,
        build=illustrative.build_illustrative_cabin,
        default_schedule=illustrative.default_schedule,
    ),
    multizone.MODEL_NAME: ModelBuilder(
        params_class=multizone.MultizoneConfig,
        build=multizone.build_multizone_demo,
        default_schedule=multizone.default_schedule,
    ),
}


def get_builder(name: str) -> ModelBuilder:
    """Return the builder registered under ``name``.

    Raises:
        ModelConfigurationError: If ``name`` is not registered.
    """
    if name not in MODEL_BUILDERS:
        available = ", ".join(sorted(MODEL_BUILDERS))
        raise ModelConfigurationError(
            f"Unknown model: {name}. Available models: {available}", model=name
        )
    return MODEL_BUILDERS[name]


def parse_params(raw: str | None) -> dict[str, Any]:
    """Parse CLI parameter overrides given as a JSON file path or an inline JSON object."""
    if raw is None or not raw.strip():
        return {}
    text = raw
    candidate = Path(raw)
    if not raw.lstrip().startswith("{") and candidate.exists():
        text = candidate.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelConfigurationError(
            f"--params must be a JSON object or a path to one (received {raw!r})."
        ) from exc
    if not isinstance(data, dict):
        raise ModelConfigurationError(f"--params must decode to an object (received {data!r}).")
    return data


def resolve_params(name: str, overrides: Mapping[str, Any] | None = None) -> BaseModel:
    builder = get_builder(name)
    try:
        return builder.params_class.model_validate(dict(overrides or {}))
    except ValidationError as exc:
        raise ModelConfigurationError(f"Invalid parameters for model {name}: {exc}") from exc


def build_model(name: str, overrides: Mapping[str, Any] | None = None) -> DaeModel:
    """Build the registered model ``name`` with parameter overrides."""
    params = resolve_params(name, overrides)
    return get_builder(name).build(params)


def default_schedule(name: str, overrides: Mapping[str, Any] | None = None) -> InputSchedule:
    params = resolve_params(name, overrides)
    return get_builder(name).default_schedule(params)


def load_model(source: ModelDocument | str | Path) -> DaeModel:
    """Rebuild a model from its JSON document and check the structure hash.

    Raises:
        ModelConfigurationError: Unknown builder, invalid parameters, or the rebuilt
            structure does not hash to the stored value.
    """
    document = source if isinstance(source, ModelDocument) else load_model_document(source)
    model = build_model(document.name, document.params)
    rebuilt = describe_model(model).hash
    if document.hash and rebuilt != document.hash:
        raise ModelConfigurationError(
            f"Model document hash mismatch for {document.name}: "
            f"stored {document.hash[:12]}, rebuilt {rebuilt[:12]}.",
            model=document.name,
        )
    return model
