"""Choice of the number of stabilized modes Ñ."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

from ..errors import BgReduceError
from .layers import CalibrationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeSweep:
    """Outcome of a sweep: the selected Ñ and the score of every candidate tried."""

    n_modes: int
    scores: dict[int, float] = field(default_factory=dict)


def select_stabilized_modes(
    n_max: int, score: Callable[[int], float], candidates: range | None = None
) -> ModeSweep:
    """Pick the Ñ in ``candidates`` (default 1..n_max) with the lowest score.

    ``score(Ñ)`` typically calibrates the layers with Ñ modes, runs the hybrid
    model on held-out trajectories and returns the MaxAE. Candidates whose layers
    cannot be calibrated, or whose run fails, score +inf. Ties go to the larger Ñ.

    Raises:
        CalibrationError: No candidate produced a finite score.
    """
    candidates = range(1, n_max + 1) if candidates is None else candidates
    scores: dict[int, float] = {}
    for n_modes in candidates:
        try:
            value = float(score(n_modes))
        except BgReduceError as exc:
            logger.info("Ñ = %d rejected: %s", n_modes, exc)
            value = math.inf
        scores[n_modes] = value if math.isfinite(value) else math.inf
        logger.info("Ñ = %d scores %.4g", n_modes, scores[n_modes])
    finite = {n: s for n, s in scores.items() if math.isfinite(s)}
    if not finite:
        raise CalibrationError(
            "No number of stabilized modes gave a finite validation error.",
            candidates=list(scores),
        )
    best = min(finite, key=lambda n: (finite[n], -n))
    logger.info("Selected Ñ = %d", best)
    return ModeSweep(n_modes=best, scores=scores)
