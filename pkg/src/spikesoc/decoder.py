"""Output decoding: earliest spike wins; a silent layer falls back to the
largest membrane potential. Ties break toward the lowest neuron index on
both paths so results are reproducible."""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import DimensionMismatch
from .model import NO_SPIKE, SpikeTrain


def decode(fire_times: SpikeTrain, potentials: Sequence[int]) -> tuple[int, Optional[int]]:
    """Return (class index, decision time); decision time is NO_SPIKE on fallback."""
    if len(fire_times) == 0 or len(fire_times) != len(potentials):
        raise DimensionMismatch(
            f"{len(fire_times)} fire times vs {len(potentials)} potentials"
        )
    best_idx = None
    best_time = None
    for j, t in enumerate(fire_times):
        if t is NO_SPIKE:
            continue
        if best_time is None or t < best_time:
            best_idx, best_time = j, t
    if best_idx is not None:
        return best_idx, best_time
    best_idx = 0
    for j in range(1, len(potentials)):
        if potentials[j] > potentials[best_idx]:
            best_idx = j
    return best_idx, NO_SPIKE
