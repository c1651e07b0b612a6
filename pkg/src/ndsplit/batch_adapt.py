"""Storage-side batch adaptation under a GPU memory budget.

The solver assigns every queued request a batch size in ``[b_min, b_max]`` so the
summed footprint ``b * data + model`` uses as much of the free memory as
possible without exceeding it. When even the minimum batches do not fit, the
most recently arrived request is deferred and the rest retried.
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import InvalidArgumentError

DEFAULT_B_MIN = 25
DEFAULT_STEP = 25
DEFAULT_WAIT_WINDOW_S = 0.005
DEFAULT_CONCURRENCY_CAP = 8


@dataclass(frozen=True)
class AdaptRequest:
    id: object
    mem_model_bytes: int
    mem_data_bytes_per_sample: int
    b_min: int
    b_max: int
    arrival_seq: int = 0

    def __post_init__(self):
        if self.b_min < 1 or self.b_max < self.b_min:
            raise InvalidArgumentError(
                f"request {self.id!r}: need 1 <= b_min <= b_max, got [{self.b_min}, {self.b_max}]"
            )
        if self.mem_model_bytes < 0 or self.mem_data_bytes_per_sample < 0:
            raise InvalidArgumentError(f"request {self.id!r}: memory coefficients must be >= 0")

    def footprint(self, batch: int) -> int:
        return batch * self.mem_data_bytes_per_sample + self.mem_model_bytes


@dataclass
class BatchAssignment:
    assigned: dict = field(default_factory=dict)
    deferred: list = field(default_factory=list)
    memory_used_bytes: int = 0


def _water_fill(reqs: Sequence[AdaptRequest], batches: list[int], leftover: int, step: int) -> int:
    """Grant ``step``-sized increments to the smallest batch that can still grow.

    Requests whose next increment no longer fits are dropped from the heap for
    good: ``leftover`` only shrinks, so they can never fit later in this pass.
    """
    heap = [(batches[i], r.arrival_seq, i) for i, r in enumerate(reqs) if batches[i] < r.b_max]
    heapq.heapify(heap)
    while heap:
        b, seq, i = heapq.heappop(heap)
        r = reqs[i]
        inc = min(step, r.b_max - b)
        cost = inc * r.mem_data_bytes_per_sample
        if cost > leftover:
            continue
        batches[i] = b + inc
        leftover -= cost
        if batches[i] < r.b_max:
            heapq.heappush(heap, (batches[i], seq, i))
    return leftover


def adapt_batches(
    requests: Iterable[AdaptRequest],
    available_bytes: int,
    step: int = DEFAULT_STEP,
) -> BatchAssignment:
    """Assign COS batch sizes for one GPU.

    Water-filling runs at ``step`` granularity, then a unit-step pass absorbs
    whatever capacity the coarse pass left, so the final slack is smaller than
    the per-sample cost of every request not yet at its ``b_max``.
    """
    if step < 1:
        raise InvalidArgumentError(f"step must be >= 1, got {step}")
    reqs = sorted(requests, key=lambda r: r.arrival_seq)
    ids = [r.id for r in reqs]
    if len(set(ids)) != len(ids):
        raise InvalidArgumentError("request ids must be unique")

    deferred = []
    while reqs and sum(r.footprint(r.b_min) for r in reqs) > available_bytes:
        deferred.append(reqs.pop().id)
    deferred.reverse()

    batches = [r.b_min for r in reqs]
    leftover = available_bytes - sum(r.footprint(r.b_min) for r in reqs)
    leftover = _water_fill(reqs, batches, leftover, step)
    if step > 1:
        leftover = _water_fill(reqs, batches, leftover, 1)

    assigned = {r.id: b for r, b in zip(reqs, batches)}
    used = sum(r.footprint(b) for r, b in zip(reqs, batches))
    return BatchAssignment(assigned=assigned, deferred=deferred, memory_used_bytes=used)


def fixed_batches(requests: Iterable[AdaptRequest]) -> BatchAssignment:
    """Adaptation disabled: every request runs at its ``b_max`` with no memory check."""
    reqs = sorted(requests, key=lambda r: r.arrival_seq)
    return BatchAssignment(
        assigned={r.id: r.b_max for r in reqs},
        deferred=[],
        memory_used_bytes=sum(r.footprint(r.b_max) for r in reqs),
    )


@dataclass(frozen=True)
class QueueState:
    """Snapshot of one GPU's queue and memory taken by the coordinator."""
    queued: tuple = ()
    unaccounted: frozenset = frozenset()
    free_bytes: int = 0


def should_trigger(state: QueueState, wait_window_elapsed: bool) -> bool:
    """Run a new adaptation round only with free memory and a not-yet-considered request."""
    if state.free_bytes <= 0:
        return False
    queued_ids = {r.id if isinstance(r, AdaptRequest) else r for r in state.queued}
    if not queued_ids & set(state.unaccounted):
        return False
    return bool(wait_window_elapsed)


def partition_to_gpus(requests: Iterable[AdaptRequest], gpu_count: int) -> list[list[AdaptRequest]]:
    """Deal requests round-robin across GPUs in arrival order."""
    if isinstance(gpu_count, bool) or not isinstance(gpu_count, int) or gpu_count < 1:
        raise InvalidArgumentError(f"gpu_count must be a positive integer, got {gpu_count!r}")
    out: list[list[AdaptRequest]] = [[] for _ in range(gpu_count)]
    for i, r in enumerate(sorted(requests, key=lambda r: r.arrival_seq)):
        out[i % gpu_count].append(r)
    return out


# --- live coordinator used by the networked server ------------------------------

@dataclass(frozen=True)
class Grant:
    request_id: object
    gpu: int
    cos_batch: int
    charged_bytes: int


class AdaptCoordinator:
    """Thread-safe owner of per-GPU queues for a running server.

    Callers block in :meth:`acquire` until their request is granted a batch
    size, and hand memory back with :meth:`release`. All queue state lives
    behind a single lock.
    """

    def __init__(
        self,
        gpu_count: int = 1,
        capacity_bytes: int = 16 * 2**30,
        wait_window_s: float = DEFAULT_WAIT_WINDOW_S,
        concurrency_cap: int = DEFAULT_CONCURRENCY_CAP,
        step: int = DEFAULT_STEP,
        adaptive: bool = True,
        clock: Callable[[], float] = time.monotonic,
    ):
        if gpu_count < 1:
            raise InvalidArgumentError("gpu_count must be >= 1")
        self.gpu_count = gpu_count
        self.capacity_bytes = capacity_bytes
        self.wait_window_s = wait_window_s
        self.concurrency_cap = concurrency_cap
        self.step = step
        self.adaptive = adaptive
        self._clock = clock
        self._cond = threading.Condition()
        self._seq = itertools.count()
        self._queues: list[list[AdaptRequest]] = [[] for _ in range(gpu_count)]
        self._unaccounted: list[set] = [set() for _ in range(gpu_count)]
        self._window_start: list[Optional[float]] = [None] * gpu_count
        self._used = [0] * gpu_count
        self._resident = [0] * gpu_count
        # the static cap is shared evenly so one GPU cannot take every slot
        self._per_gpu_cap = -(-concurrency_cap // gpu_count)
        self._running = 0
        self._grants: dict = {}

    def free_bytes(self, gpu: int) -> int:
        with self._cond:
            return self.capacity_bytes - self._used[gpu]

    @property
    def running(self) -> int:
        with self._cond:
            return self._running

    def acquire(self, mem_model_bytes: int, mem_data_bytes_per_sample: int,
                b_max: int, b_min: int = DEFAULT_B_MIN, timeout: Optional[float] = None) -> Grant:
        deadline = None if timeout is None else self._clock() + timeout
        with self._cond:
            seq = next(self._seq)
            req = AdaptRequest(id=seq, mem_model_bytes=mem_model_bytes,
                               mem_data_bytes_per_sample=mem_data_bytes_per_sample,
                               b_min=min(b_min, b_max), b_max=b_max, arrival_seq=seq)
            gpu = seq % self.gpu_count
            self._queues[gpu].append(req)
            self._mark_unaccounted(gpu, [seq])
            self._cond.notify_all()
            while seq not in self._grants:
                now = self._clock()
                start = self._window_start[gpu]
                elapsed = start is not None and now - start >= self.wait_window_s
                state = QueueState(queued=tuple(self._queues[gpu]),
                                   unaccounted=frozenset(self._unaccounted[gpu]),
                                   free_bytes=self.capacity_bytes - self._used[gpu])
                if should_trigger(state, elapsed) and self._room(gpu) > 0:
                    self._run_round(gpu)
                    continue
                if deadline is not None and now >= deadline:
                    self._queues[gpu] = [r for r in self._queues[gpu] if r.id != seq]
                    self._unaccounted[gpu].discard(seq)
                    raise TimeoutError(f"request {seq} was not scheduled within {timeout}s")
                wait = self.wait_window_s if start is None else max(0.0, start + self.wait_window_s - now)
                if deadline is not None:
                    wait = min(wait, max(0.0, deadline - now))
                self._cond.wait(timeout=max(wait, 1e-4))
            return self._grants.pop(seq)

    def release(self, grant: Grant) -> None:
        with self._cond:
            self._used[grant.gpu] -= grant.charged_bytes
            self._resident[grant.gpu] -= 1
            self._running -= 1
            # deferred requests become schedulable again once memory frees up
            self._mark_unaccounted(grant.gpu, [r.id for r in self._queues[grant.gpu]])
            self._cond.notify_all()

    def _mark_unaccounted(self, gpu: int, ids) -> None:
        ids = list(ids)
        if not ids:
            return
        if not self._unaccounted[gpu]:
            self._window_start[gpu] = self._clock()
        self._unaccounted[gpu].update(ids)

    def _room(self, gpu: int) -> int:
        return min(self.concurrency_cap - self._running, self._per_gpu_cap - self._resident[gpu])

    def _run_round(self, gpu: int) -> None:
        queue = self._queues[gpu]
        room = self._room(gpu)
        considered, overflow = queue[:room], queue[room:]
        free = self.capacity_bytes - self._used[gpu]
        result = adapt_batches(considered, free, self.step) if self.adaptive else fixed_batches(considered)
        by_id = {r.id: r for r in considered}
        for rid, b in result.assigned.items():
            charge = by_id[rid].footprint(b)
            self._used[gpu] += charge
            self._resident[gpu] += 1
            self._running += 1
            self._grants[rid] = Grant(request_id=rid, gpu=gpu, cos_batch=b, charged_bytes=charge)
        self._queues[gpu] = [by_id[rid] for rid in result.deferred] + overflow
        self._unaccounted[gpu].clear()
        self._window_start[gpu] = None
        self._cond.notify_all()
