"""Analytical epoch-time model for a split TL job and an exhaustive optimizer over it.

Epoch time is the sum of storage-side GPU time, network transfer time and
client time. The storage term scales with the number of concurrent requests
sharing the storage GPU; the client term does not. The model assumes uniform
per-layer cost and perfect batch parallelism, so the per-layer fields of a
profile are ignored here except for output sizes, weights and memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .profiles import ModelProfile, build_memory_estimate

MAX_COMBINATIONS = 10**6


@dataclass(frozen=True)
class CostParams:
    c11: float
    c12: float
    c21: float
    c22: float
    bandwidth_bytes_per_sec: float
    dataset_size: int
    gpu_mem_bytes: int
    concurrent_requests: int = 1

    def __post_init__(self):
        for name in ("c11", "c12", "c21", "c22", "bandwidth_bytes_per_sec", "dataset_size", "gpu_mem_bytes"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.concurrent_requests < 1:
            raise InvalidArgumentError("concurrent_requests must be >= 1")


@dataclass(frozen=True)
class PlanPoint:
    l_cos: int
    b_cos: int
    b_client: int

    def __post_init__(self):
        if self.l_cos < 0:
            raise InvalidArgumentError("l_cos must be >= 0")


@dataclass(frozen=True)
class SearchBounds:
    b_cos_min: int = 1
    b_cos_max: int = 1000
    b_client: int = 1000
    l_cos_max: Optional[int] = None  # defaults to the freeze index


@dataclass(frozen=True)
class OptimumResult:
    plan: Optional[PlanPoint]
    time: float

    @property
    def feasible(self) -> bool:
        return self.plan is not None


def split_bytes(profile: ModelProfile, l_cos: int) -> int:
    """Per-sample bytes crossing the network when ``l_cos`` layers run on storage."""
    if not 0 <= l_cos <= profile.num_layers:
        raise InvalidArgumentError(f"l_cos={l_cos} outside 0..{profile.num_layers}")
    return profile.output_bytes(l_cos)


def cos_time(params: CostParams, profile: ModelProfile, plan: PlanPoint) -> float:
    if plan.b_cos < 1:
        raise InvalidArgumentError("b_cos must be >= 1")
    l0 = profile.input_bytes_per_sample
    ls = split_bytes(profile, plan.l_cos)
    # |R| * (|D|/B) * (C11*B*(l0+ls) + C12*L), with the B inside distributed out so
    # the pass-through case is exactly independent of B
    d = params.dataset_size
    return params.concurrent_requests * (d * params.c11 * (l0 + ls) + (d / plan.b_cos) * params.c12 * plan.l_cos)


def client_time(params: CostParams, profile: ModelProfile, plan: PlanPoint) -> float:
    if plan.b_client < 1:
        raise InvalidArgumentError("b_client must be >= 1")
    ls = split_bytes(profile, plan.l_cos)
    l_client = profile.num_layers - plan.l_cos
    batches = params.dataset_size / plan.b_client
    return batches * (params.c21 * plan.b_client * ls + params.c22 * l_client)


def transfer_time(params: CostParams, profile: ModelProfile, plan: PlanPoint) -> float:
    return split_bytes(profile, plan.l_cos) * params.dataset_size / params.bandwidth_bytes_per_sec


def epoch_time(params: CostParams, profile: ModelProfile, plan: PlanPoint) -> float:
    return (cos_time(params, profile, plan)
            + transfer_time(params, profile, plan)
            + client_time(params, profile, plan))


def memory_required(profile: ModelProfile, plan: PlanPoint, requests: int = 1) -> int:
    """Summed storage GPU memory for ``requests`` identical requests at ``plan``.

    The per-sample term is the peak footprint over the storage-side layers
    (input of the active layer, its output and working memory); with no layers
    pushed down it is just the raw input.
    """
    est = build_memory_estimate(profile, upto=plan.l_cos, correction_per_sample_bytes=0)
    return requests * (est.model_bytes + plan.b_cos * est.per_sample_bytes)


def feasible(params: CostParams, profile: ModelProfile, plan: PlanPoint,
             requests: Optional[int] = None) -> bool:
    """Check the split constraints and the storage memory bound (``<=``)."""
    requests = params.concurrent_requests if requests is None else requests
    if not 0 <= plan.l_cos <= profile.freeze_index:
        return False
    l_client = profile.num_layers - plan.l_cos
    if plan.l_cos + l_client != profile.num_layers or l_client < 0:
        return False
    if plan.b_cos < 1 or plan.b_client < 1:
        return False
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (plan.l_cos, plan.b_cos, plan.b_client)):
        return False
    return memory_required(profile, plan, requests) <= params.gpu_mem_bytes


def brute_force_optimum(params: CostParams, profile: ModelProfile,
                        bounds: SearchBounds = SearchBounds()) -> OptimumResult:
    """Exhaustively scan ``(l_cos, b_cos)``; ties go to the smallest ``l_cos`` then ``b_cos``."""
    l_max = profile.freeze_index if bounds.l_cos_max is None else min(bounds.l_cos_max, profile.freeze_index)
    if bounds.b_cos_min < 1 or bounds.b_cos_max < bounds.b_cos_min or bounds.b_client < 1:
        raise InvalidArgumentError(f"invalid search bounds {bounds}")
    n_b = bounds.b_cos_max - bounds.b_cos_min + 1
    if (l_max + 1) * n_b > MAX_COMBINATIONS:
        raise InvalidArgumentError(
            f"search space {(l_max + 1) * n_b} exceeds {MAX_COMBINATIONS} combinations"
        )
    b = np.arange(bounds.b_cos_min, bounds.b_cos_max + 1, dtype=np.int64)
    best_plan, best_time = None, math.inf
    r = params.concurrent_requests
    l0 = profile.input_bytes_per_sample
    for l_cos in range(l_max + 1):
        ls = split_bytes(profile, l_cos)
        est = build_memory_estimate(profile, upto=l_cos, correction_per_sample_bytes=0)
        mem = r * (est.model_bytes + b * est.per_sample_bytes)
        ok = mem <= params.gpu_mem_bytes
        if not ok.any():
            continue
        # same operations, in the same order, as cos_time/transfer_time/client_time so
        # that ties resolve identically to a scalar scan
        d = params.dataset_size
        t_cos = r * (d * params.c11 * (l0 + ls) + (d / b) * params.c12 * l_cos)
        t_data = ls * d / params.bandwidth_bytes_per_sec
        t_client = (d / bounds.b_client) * (params.c21 * bounds.b_client * ls
                                            + params.c22 * (profile.num_layers - l_cos))
        total = np.where(ok, t_cos + t_data + t_client, np.inf)
        i = int(np.argmin(total))  # first minimum -> smallest b_cos
        if total[i] < best_time:
            best_time = float(total[i])
            best_plan = PlanPoint(l_cos=l_cos, b_cos=int(b[i]), b_client=bounds.b_client)
    return OptimumResult(plan=best_plan, time=best_time)
