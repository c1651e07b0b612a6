"""Split-index selection: candidate filtering by output size, then winner by bandwidth."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError
from .profiles import ModelProfile, profile_model

DEFAULT_THRESHOLD_SECONDS = 1.0


@dataclass(frozen=True)
class SplitDecision:
    split_index: int
    bytes_per_iteration: int
    candidates: tuple[int, ...]

    @property
    def used_fallback(self) -> bool:
        return self.split_index not in self.candidates


def candidate_layers(profile: ModelProfile) -> tuple[int, ...]:
    """Layers at or before the freeze index whose output is smaller than the raw input."""
    sizes, _ = profile_model(profile)
    limit = profile.input_bytes_per_sample
    return tuple(
        i for i, size in enumerate(sizes, start=1)
        if size < limit and i <= profile.freeze_index
    )


def choose_split_index(
    profile: ModelProfile,
    training_batch: int,
    bandwidth_bytes_per_sec: float,
    threshold_seconds: float = DEFAULT_THRESHOLD_SECONDS,
) -> SplitDecision:
    """Pick the earliest candidate whose per-iteration transfer fits in ``threshold_seconds``.

    Falls back to the freeze index when no candidate qualifies. Both comparisons
    are strict, so a layer whose transfer exactly equals the budget is rejected.
    """
    if isinstance(training_batch, bool) or not isinstance(training_batch, int) or training_batch < 1:
        raise InvalidArgumentError(f"training_batch must be a positive integer, got {training_batch!r}")
    if not bandwidth_bytes_per_sec > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {bandwidth_bytes_per_sec!r}")
    if not threshold_seconds > 0:
        raise InvalidArgumentError(f"threshold_seconds must be positive, got {threshold_seconds!r}")

    candidates = candidate_layers(profile)
    budget = bandwidth_bytes_per_sec * threshold_seconds
    winner = profile.freeze_index
    for idx in candidates:
        if profile.output_bytes(idx) * training_batch < budget:
            winner = idx
            break
    return SplitDecision(
        split_index=winner,
        bytes_per_iteration=profile.output_bytes(winner) * training_batch,
        candidates=candidates,
    )
