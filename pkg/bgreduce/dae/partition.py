"""Primary / secondary / tertiary partition of the model variables."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from ..errors import ModelConfigurationError


class PartitionError(ModelConfigurationError):
    """Raised when index sets do not form a valid partition of the model variables."""


def _as_sorted(indices: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in indices))


@dataclass(frozen=True)
class Partition:
    """Index sets P^θ, S^θ, T^θ, P^γ, T^γ (0-based, sorted).

    The θ-sets are pairwise disjoint and cover ``range(n_theta)``; the γ-sets cover
    ``range(n_gamma)`` with no secondary algebraic variables.
    """

    n_theta: int
    n_gamma: int
    primary_theta: tuple[int, ...]
    secondary_theta: tuple[int, ...]
    tertiary_theta: tuple[int, ...]
    primary_gamma: tuple[int, ...]
    tertiary_gamma: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in (
            "primary_theta",
            "secondary_theta",
            "tertiary_theta",
            "primary_gamma",
            "tertiary_gamma",
        ):
            object.__setattr__(self, name, _as_sorted(getattr(self, name)))
        self._check_cover(
            "θ",
            self.n_theta,
            (self.primary_theta, self.secondary_theta, self.tertiary_theta),
        )
        self._check_cover("γ", self.n_gamma, (self.primary_gamma, self.tertiary_gamma))
        if not self.primary_theta:
            raise PartitionError("A partition needs at least one primary differential variable.")

    @staticmethod
    def _check_cover(label: str, size: int, sets: tuple[tuple[int, ...], ...]) -> None:
        seen: set[int] = set()
        for indices in sets:
            for index in indices:
                if not 0 <= index < size:
                    raise PartitionError(
                        f"{label} index {index + 1} is outside 1..{size}.", index=index + 1
                    )
                if index in seen:
                    raise PartitionError(
                        f"{label} index {index + 1} appears in more than one set.",
                        index=index + 1,
                    )
                seen.add(index)
        if len(seen) != size:
            missing = sorted(set(range(size)) - seen)
            raise PartitionError(
                f"{label} sets do not cover every variable (missing {[i + 1 for i in missing]}).",
                missing=[i + 1 for i in missing],
            )

    @property
    def is_all_primary(self) -> bool:
        return len(self.primary_theta) == self.n_theta

    def one_based(self) -> dict[str, list[int]]:
        """Return the index sets as sorted 1-based lists (the document convention)."""
        return {
            "primary_theta": [i + 1 for i in self.primary_theta],
            "secondary_theta": [i + 1 for i in self.secondary_theta],
            "tertiary_theta": [i + 1 for i in self.tertiary_theta],
            "primary_gamma": [i + 1 for i in self.primary_gamma],
            "tertiary_gamma": [i + 1 for i in self.tertiary_gamma],
        }

    @classmethod
    def from_one_based(cls, n_theta: int, n_gamma: int, sets: dict[str, list[int]]) -> Partition:
        try:
            return cls(
                n_theta=n_theta,
                n_gamma=n_gamma,
                **{name: [i - 1 for i in indices] for name, indices in sets.items()},
            )
        except TypeError as exc:
            raise PartitionError(f"Invalid partition document: {exc}") from exc
