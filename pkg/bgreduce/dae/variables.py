"""Variable registry and input schedules for semi-explicit DAE models."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..errors import BgReduceError, ModelConfigurationError


class ScheduleError(ModelConfigurationError):
    """Raised when an input schedule is malformed or does not cover the simulated horizon."""


def _readonly(values: Iterable[float], label: str) -> np.ndarray:
    array = np.array(list(values), dtype=float)
    if array.ndim != 1:
        raise ModelConfigurationError(f"{label} must be a flat vector.", vector=label)
    array.setflags(write=False)
    return array


def _check_names(names: Sequence[str], label: str) -> tuple[str, ...]:
    names = tuple(names)
    for name in names:
        if not isinstance(name, str) or not name.strip():
            raise ModelConfigurationError(f"{label} must be non-empty strings (received {name!r}).")
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise ModelConfigurationError(
            f"{label} must be unique (duplicates: {', '.join(duplicates)}).", duplicates=duplicates
        )
    return names


@dataclass(frozen=True, eq=False)
class VariableSpace:
    """Names, initial state and scaling of a DAE model.

    Attributes:
        theta_names: Differential variable names, in vector order.
        gamma_names: Algebraic variable names, in vector order.
        initial: Initial values of the differential variables (physical units).
        scale: Strictly positive per-variable factors mapping physical offsets to the
            homogeneous coordinates used for reduction (defaults to ones).
        nonnegative: Names of differential variables whose physical value cannot drop
            below zero (humidities). Only these are clamped by a ``relu`` layer.
    """

    theta_names: tuple[str, ...]
    gamma_names: tuple[str, ...]
    initial: np.ndarray
    scale: np.ndarray | None = None
    nonnegative: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        theta_names = _check_names(self.theta_names, "Differential variable names")
        gamma_names = _check_names(self.gamma_names, "Algebraic variable names")
        clash = sorted(set(theta_names) & set(gamma_names))
        if clash:
            raise ModelConfigurationError(
                f"Variable names shared by θ and γ: {', '.join(clash)}.", duplicates=clash
            )
        if not theta_names:
            raise ModelConfigurationError("A model needs at least one differential variable.")

        initial = _readonly(self.initial, "initial")
        if initial.shape != (len(theta_names),):
            raise ModelConfigurationError(
                f"initial has {initial.size} entries, expected {len(theta_names)}.",
                vector="initial",
            )
        if not np.all(np.isfinite(initial)):
            raise ModelConfigurationError("initial values must be finite.", vector="initial")

        scale = np.ones(len(theta_names)) if self.scale is None else self.scale
        scale = _readonly(scale, "scale")
        if scale.shape != (len(theta_names),):
            raise ModelConfigurationError(
                f"scale has {scale.size} entries, expected {len(theta_names)}.", vector="scale"
            )
        if not np.all(np.isfinite(scale)) or np.any(scale <= 0):
            raise ModelConfigurationError(
                "scale factors must be strictly positive.", vector="scale"
            )

        nonnegative = tuple(self.nonnegative)
        unknown = sorted(set(nonnegative) - set(theta_names))
        if unknown:
            raise ModelConfigurationError(
                f"Non-negative variables are not differential: {', '.join(unknown)}.",
                variables=unknown,
            )

        object.__setattr__(self, "theta_names", theta_names)
        object.__setattr__(self, "gamma_names", gamma_names)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "nonnegative", nonnegative)

    @property
    def n_theta(self) -> int:
        return len(self.theta_names)

    @property
    def n_gamma(self) -> int:
        return len(self.gamma_names)

    @property
    def nonnegative_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.theta_names.index(name) for name in self.nonnegative))

    def theta_index(self, name: str) -> int:
        try:
            return self.theta_names.index(name)
        except ValueError:
            raise ModelConfigurationError(
                f"Unknown differential variable: {name}.", variable=name
            ) from None

    def gamma_index(self, name: str) -> int:
        try:
            return self.gamma_names.index(name)
        except ValueError:
            raise ModelConfigurationError(
                f"Unknown algebraic variable: {name}.", variable=name
            ) from None


@dataclass(frozen=True, eq=False)
class InputSeries:
    """Piecewise-linear time series of one input channel (time in seconds)."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = _readonly(self.times, "times")
        values = _readonly(self.values, "values")
        if times.size == 0 or times.shape != values.shape:
            raise ScheduleError("A time series needs matching, non-empty time and value columns.")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ScheduleError("Time series entries must be finite.")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ScheduleError("Time series must be strictly increasing in time.")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def sample(self, times: np.ndarray) -> np.ndarray:
        return np.interp(times, self.times, self.values)


def load_series_csv(path: str | Path) -> InputSeries:
    """Read a two-column drive-cycle CSV (``time_s``, value) into an input series."""
    path = Path(path)
    if not path.exists():
        raise ScheduleError(f"Series file does not exist: {path}", path=str(path))
    try:
        frame = pd.read_csv(path)
    except (ValueError, pd.errors.ParserError) as exc:
        raise ScheduleError(f"Could not parse series file {path}: {exc}", path=str(path)) from exc
    if frame.shape[1] != 2:
        raise ScheduleError(
            f"Series file {path} must have exactly two columns (received {frame.shape[1]}).",
            path=str(path),
        )
    if frame.columns[0] != "time_s":
        raise ScheduleError(
            f"First column of {path} must be named time_s (received {frame.columns[0]!r}).",
            path=str(path),
        )
    return InputSeries(frame.iloc[:, 0].to_numpy(float), frame.iloc[:, 1].to_numpy(float))


Channel = float | InputSeries


@dataclass(frozen=True, eq=False)
class InputSchedule:
    """Named input channels μ, each a constant or a piecewise-linear time series."""

    channels: Mapping[str, Channel] = field(default_factory=dict)

    def __post_init__(self) -> None:
        checked: dict[str, Channel] = {}
        for name, channel in self.channels.items():
            if isinstance(channel, InputSeries):
                checked[name] = channel
                continue
            try:
                value = float(channel)
            except (TypeError, ValueError) as exc:
                raise ScheduleError(
                    f"Input {name} must be a number or a time series (received {channel!r})."
                ) from exc
            if not math.isfinite(value):
                raise ScheduleError(f"Input {name} must be finite (received {value!r}).")
            checked[name] = value
        object.__setattr__(self, "channels", checked)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.channels)

    def value_at(self, t: float) -> dict[str, float]:
        return {
            name: channel.value_at(t) if isinstance(channel, InputSeries) else channel
            for name, channel in self.channels.items()
        }

    def sample(self, times: np.ndarray) -> dict[str, np.ndarray]:
        times = np.asarray(times, dtype=float)
        return {
            name: (
                channel.sample(times)
                if isinstance(channel, InputSeries)
                else np.full(times.shape, channel)
            )
            for name, channel in self.channels.items()
        }

    def check_covers(self, t_final: float, required: Iterable[str] = ()) -> None:
        """Raise ScheduleError unless every channel is defined on [0, t_final]."""
        missing = [name for name in required if name not in self.channels]
        if missing:
            raise ScheduleError(
                f"Schedule is missing input channels: {', '.join(missing)}.", missing=missing
            )
        for name, channel in self.channels.items():
            if not isinstance(channel, InputSeries):
                continue
            start, end = float(channel.times[0]), float(channel.times[-1])
            if start > 0.0 or end < t_final:
                raise ScheduleError(
                    f"Input {name} covers [{start}, {end}] s but the run needs [0, {t_final}] s.",
                    channel=name,
                    t_final=t_final,
                )

    def with_constants(self, values: Mapping[str, float]) -> InputSchedule:
        """Return a copy where the given channels are replaced by constants."""
        channels = dict(self.channels)
        channels.update({name: float(value) for name, value in values.items()})
        return InputSchedule(channels)

    def with_series(self, series: Mapping[str, InputSeries]) -> InputSchedule:
        channels = dict(self.channels)
        channels.update(series)
        return InputSchedule(channels)

    def to_dict(self) -> dict[str, Any]:
        return {
            name: (
                {"time_s": channel.times.tolist(), "value": channel.values.tolist()}
                if isinstance(channel, InputSeries)
                else channel
            )
            for name, channel in self.channels.items()
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> InputSchedule:
        channels: dict[str, Channel] = {}
        for name, entry in data.items():
            if isinstance(entry, Mapping):
                try:
                    channels[name] = InputSeries(entry["time_s"], entry["value"])
                except KeyError as exc:
                    raise ScheduleError(
                        f"Series {name} needs 'time_s' and 'value' arrays."
                    ) from exc
            else:
                channels[name] = entry
        return cls(channels)

    @classmethod
    def from_samples(cls, times: np.ndarray, inputs: Mapping[str, np.ndarray]) -> InputSchedule:
        """Rebuild a schedule from recorded samples (constants stay constants)."""
        channels: dict[str, Channel] = {}
        for name, values in inputs.items():
            values = np.asarray(values, dtype=float)
            if values.size and np.all(values == values[0]):
                channels[name] = float(values[0])
            else:
                channels[name] = InputSeries(times, values)
        return cls(channels)


def check_vector(values: Any, expected: int, label: str) -> np.ndarray:
    """Return ``values`` as a float vector of the expected length or raise DimensionError."""
    array = np.asarray(values, dtype=float)
    if array.shape != (expected,):
        raise DimensionError(
            f"{label} has shape {array.shape}, expected ({expected},).",
            vector=label,
            expected=expected,
            received=list(array.shape),
        )
    return array


class DimensionError(BgReduceError):
    """Raised when a vector passed to an evaluator has the wrong length."""
