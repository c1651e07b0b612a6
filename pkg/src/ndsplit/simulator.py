"""Deterministic discrete-event simulation of TL tenants sharing a storage GPU server.

Three execution modes are modelled:

``Split``
    Layers up to the split index run on the storage server, one POST request
    per ``post_request_samples`` samples. The server batches requests per GPU
    through batch adaptation; responses travel back over the client's link and
    the client finishes the network at the training batch size.
``Baseline``
    Raw samples are streamed to the client, which runs the whole network.
``AllInCos``
    Each training iteration runs entirely on the storage server at the
    training batch size, with memory-aware FIFO admission and no batch
    decoupling.

GPU service is processor sharing with linear slowdown: a task co-resident with
``n - 1`` others progresses at ``1/n`` of its solo rate. The clock ticks in
integer microseconds, work is integer nanoseconds of solo GPU time, and ties
between events are broken by insertion order.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .batch_adapt import AdaptRequest, QueueState, adapt_batches, fixed_batches, should_trigger
from .errors import ConfigError
from .profiles import BUILTIN_MODELS, ModelProfile, build_memory_estimate, load_builtin
from .reorder import reorder_results
from .splitter import choose_split_index

GiB = 2**30
US = 1_000_000


class Mode(str, Enum):
    SPLIT = "Split"
    BASELINE = "Baseline"
    ALL_IN_COS = "AllInCos"


class ClientKind(str, Enum):
    GPU = "GPU"
    CPU = "CPU"


@dataclass(frozen=True)
class SimConfig:
    gpu_count: int = 2
    gpu_mem_bytes_per_gpu: int = 16 * GiB
    reserved_mem_bytes: int = 2 * GiB          # per GPU, CUDA/framework analog
    reserved_per_request_bytes: int = 0
    bandwidth_bytes_per_sec: float = 125e6     # 1 Gbps
    object_size_samples: int = 1000
    post_request_samples: int = 1000
    cos_batch_max: Optional[int] = None        # None -> post_request_samples
    b_min: int = 25
    step: int = 25
    wait_window_us: int = 5_000
    concurrency_cap: int = 8
    mode: Mode = Mode.SPLIT
    batch_adaptation: bool = True
    seed: int = 0
    threshold_seconds: float = 1.0
    storage_read_latency_us: int = 0
    storage_read_jitter_us: int = 0
    client_compute: bool = True
    client_gpu_mem_bytes: int = 32 * GiB
    client_cpu_mem_bytes: int = 64 * GiB
    cos_gpu_speed: float = 1.0
    client_gpu_speed: float = 1.0
    client_cpu_speed: float = 1.0
    backward_cost_factor: float = 2.0
    prefetch_depth: int = 1                    # iterations fetched ahead of the one computing
    record_samples: bool = False

    def validate(self) -> "SimConfig":
        if self.gpu_count < 1:
            raise ConfigError("gpu_count must be >= 1")
        if self.gpu_mem_bytes_per_gpu <= self.reserved_mem_bytes:
            raise ConfigError("gpu_mem_bytes_per_gpu must exceed reserved_mem_bytes")
        for name in ("object_size_samples", "post_request_samples", "b_min", "step", "concurrency_cap",
                     "prefetch_depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.cos_batch_max is not None and self.cos_batch_max < 1:
            raise ConfigError("cos_batch_max must be >= 1")
        if not self.bandwidth_bytes_per_sec > 0:
            raise ConfigError("bandwidth_bytes_per_sec must be positive")
        for name in ("wait_window_us", "storage_read_latency_us", "storage_read_jitter_us",
                     "reserved_per_request_bytes"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for name in ("cos_gpu_speed", "client_gpu_speed", "client_cpu_speed"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        try:
            Mode(self.mode)
        except ValueError:
            raise ConfigError(f"unknown mode {self.mode!r}") from None
        return self

    @property
    def gpu_capacity_bytes(self) -> int:
        return self.gpu_mem_bytes_per_gpu - self.reserved_mem_bytes


@dataclass(frozen=True)
class Job:
    tenant: object
    profile: str
    training_batch: int
    dataset_samples: int
    client_kind: ClientKind = ClientKind.GPU
    submit_time_s: float = 0.0


@dataclass
class JobResult:
    tenant: object
    profile: str
    mode: Mode
    split_index: Optional[int]
    iterations: int
    epoch_time_s: Optional[float] = None
    bytes_transferred: int = 0
    client_mem_bytes: int = 0
    failed: bool = False
    failure: str = ""
    sample_stream: list = field(default_factory=list)

    @property
    def bytes_per_iteration(self) -> float:
        return self.bytes_transferred / self.iterations if self.iterations else 0.0


@dataclass
class SimMetrics:
    jobs: list = field(default_factory=list)
    avg_bytes_per_iteration: float = 0.0
    peak_cos_mem_bytes: int = 0
    peak_gpu_mem_bytes: list = field(default_factory=list)
    peak_client_mem_bytes: int = 0
    makespan_s: float = 0.0
    avg_jct_s: float = 0.0
    oom_events: int = 0
    requests_total: int = 0
    requests_reduced: int = 0
    avg_batch_reduction: float = 0.0
    max_coresident: int = 0
    adaptation_rounds: int = 0
    idle_violations: int = 0

    @property
    def epoch_times(self) -> dict:
        return {j.tenant: j.epoch_time_s for j in self.jobs}

    @property
    def completed(self) -> list:
        return [j for j in self.jobs if not j.failed]

    @property
    def reduced_fraction(self) -> float:
        return self.requests_reduced / self.requests_total if self.requests_total else 0.0


# --- internal state ------------------------------------------------------------

@dataclass(eq=False)
class _Task:
    id: int
    job: "_JobState"
    iteration: int
    ordinal: int
    samples: int
    sample_range: tuple
    objects: int
    work_ns: int
    b_min: int
    b_max: int
    adapt_model: int
    adapt_slope: int
    charge_model: int
    charge_per_sample: int
    payload_bytes: int
    arrival_seq: int = -1
    gpu: int = -1
    cos_batch: int = 0
    charged: int = 0
    remaining: int = 0


@dataclass(eq=False)
class _JobState:
    job: Job
    profile: ModelProfile
    result: JobResult
    n_iter: int
    submit_us: int
    split: int = 0
    link_free_us: int = 0
    fetched: set = field(default_factory=set)
    pending: dict = field(default_factory=dict)    # iteration -> outstanding requests
    received: dict = field(default_factory=dict)   # iteration -> [(ordinal, range)]
    next_compute: int = 0
    next_fetch: int = 0
    computing: bool = False
    done: bool = False


@dataclass(eq=False)
class _Gpu:
    index: int
    capacity: int
    used: int = 0
    peak: int = 0
    running: list = field(default_factory=list)
    queue: list = field(default_factory=list)
    unaccounted: set = field(default_factory=set)
    window_start: Optional[int] = None
    window_token: int = 0
    last_update: int = 0
    version: int = 0


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _split_iterations(dataset: int, batch: int) -> list[int]:
    full, rest = divmod(dataset, batch)
    return [batch] * full + ([rest] if rest else [])


class Simulator:
    """Single-use event loop; build one per run."""

    def __init__(self, config: SimConfig, profiles: Optional[Mapping[str, ModelProfile]] = None):
        self.config = config.validate()
        self.mode = Mode(config.mode)
        self.profiles = dict(profiles) if profiles is not None else None
        self._rng = np.random.default_rng(config.seed)
        self._events: list = []
        self._evseq = itertools.count()
        self._task_ids = itertools.count()
        self._arrivals = itertools.count()
        self.now = 0
        cap = config.gpu_capacity_bytes
        self.gpus = [_Gpu(index=i, capacity=cap) for i in range(config.gpu_count)]
        self.server_running = 0
        self.metrics = SimMetrics()
        self._reductions: list[float] = []
        self._ran = False
        # the static cap is shared evenly so one GPU cannot take every slot
        self._per_gpu_cap = _ceil_div(config.concurrency_cap, config.gpu_count)
        self._resident_count = [0] * config.gpu_count

    # -- helpers ---------------------------------------------------------------

    def _profile(self, name: str) -> ModelProfile:
        if self.profiles is not None:
            if name not in self.profiles:
                raise ConfigError(f"unknown profile {name!r}")
            return self.profiles[name]
        if name.lower() not in BUILTIN_MODELS:
            raise ConfigError(f"unknown profile {name!r}")
        return load_builtin(name)

    def _push(self, t: int, kind: str, *args) -> None:
        heapq.heappush(self._events, (t, next(self._evseq), kind, args))

    def _xfer_us(self, nbytes: int) -> int:
        bw = self.config.bandwidth_bytes_per_sec
        if nbytes == 0 or math.isinf(bw):
            return 0
        return math.ceil(nbytes * US / bw)

    def _read_us(self, objects: int) -> int:
        c = self.config
        if c.storage_read_jitter_us:
            jitter = int(self._rng.integers(0, c.storage_read_jitter_us + 1, size=objects).max())
        else:
            jitter = 0
        return c.storage_read_latency_us + jitter

    def _client_cost_ns(self, js: _JobState, first_layer: int, samples: int) -> int:
        if not self.config.client_compute:
            return 0
        p = js.profile
        cpu = js.job.client_kind == ClientKind.CPU
        speed = self.config.client_cpu_speed if cpu else self.config.client_gpu_speed
        per = [(l.fwd_cost_cpu if cpu else l.fwd_cost_gpu) for l in p.layers]
        fwd = sum(per[first_layer - 1:])
        bwd = self.config.backward_cost_factor * sum(per[p.freeze_index:])
        return math.ceil((fwd + bwd) * samples / speed)

    def _client_mem(self, js: _JobState, first_layer: int) -> int:
        p = js.profile
        prev = p.output_bytes(first_layer - 1)
        peak = 0
        for layer in p.layers[first_layer - 1:]:
            peak = max(peak, prev + layer.output_bytes_per_sample + layer.mem_bytes_per_sample)
            prev = layer.output_bytes_per_sample
        per_sample = peak + p.backward_mem_bytes_per_sample
        return p.weights_bytes(first_layer) + js.job.training_batch * per_sample

    def _resident(self, g: _Gpu) -> int:
        return self._resident_count[g.index]

    # -- public ----------------------------------------------------------------

    def run(self, jobs: Sequence[Job]) -> SimMetrics:
        if self._ran:
            raise RuntimeError("Simulator instances are single-use")
        self._ran = True
        states = []
        for job in jobs:
            states.append(self._make_job(job))
        for js in states:
            self._push(js.submit_us, "submit", js)
        while self._events:
            t, _, kind, args = heapq.heappop(self._events)
            self.now = t
            getattr(self, f"_on_{kind}")(*args)
        return self._finalize(states)

    def _make_job(self, job: Job) -> _JobState:
        c = self.config
        if job.training_batch < 1 or job.dataset_samples < 0:
            raise ConfigError(f"job {job.tenant!r}: invalid batch or dataset size")
        if self.mode == Mode.SPLIT and job.training_batch % c.post_request_samples:
            raise ConfigError(
                f"job {job.tenant!r}: training_batch {job.training_batch} is not a multiple of "
                f"post_request_samples {c.post_request_samples}"
            )
        profile = self._profile(job.profile)
        n_iter = len(_split_iterations(job.dataset_samples, job.training_batch))
        split = None
        if self.mode == Mode.SPLIT:
            split = choose_split_index(profile, job.training_batch, c.bandwidth_bytes_per_sec,
                                       c.threshold_seconds).split_index
        result = JobResult(tenant=job.tenant, profile=profile.name, mode=self.mode,
                           split_index=split, iterations=n_iter)
        js = _JobState(job=job, profile=profile, result=result, n_iter=n_iter,
                       submit_us=round(job.submit_time_s * US), split=split or 0)
        return js

    # -- event handlers ----------------------------------------------------------

    def _on_submit(self, js: _JobState) -> None:
        if js.n_iter == 0:
            self._complete(js)
            return
        if self.mode == Mode.ALL_IN_COS:
            self._issue_all_in_cos(js, 0)
            return
        first = js.split + 1 if self.mode == Mode.SPLIT else 1
        mem = self._client_mem(js, first) if first <= js.profile.num_layers else 0
        js.result.client_mem_bytes = mem
        self.metrics.peak_client_mem_bytes = max(self.metrics.peak_client_mem_bytes, mem)
        limit = (self.config.client_cpu_mem_bytes if js.job.client_kind == ClientKind.CPU
                 else self.config.client_gpu_mem_bytes)
        if mem > limit:
            self._fail(js, f"client OOM: needs {mem} B, has {limit} B", oom=True)
            return
        self._fill_prefetch(js, consumed=0)

    def _fill_prefetch(self, js: _JobState, consumed: int) -> None:
        limit = min(js.n_iter, consumed + self.config.prefetch_depth)
        while js.next_fetch < limit:
            js.next_fetch += 1
            self._start_fetch(js, js.next_fetch - 1)

    def _iteration_samples(self, js: _JobState, k: int) -> tuple[int, int]:
        start = k * js.job.training_batch
        return start, min(js.job.training_batch, js.job.dataset_samples - start)

    def _start_fetch(self, js: _JobState, k: int) -> None:
        start, samples = self._iteration_samples(js, k)
        c = self.config
        if self.mode == Mode.BASELINE:
            objects = _ceil_div(samples, c.object_size_samples)
            ready = self.now + self._read_us(objects)
            nbytes = samples * js.profile.input_bytes_per_sample
            begin = max(ready, js.link_free_us)
            js.link_free_us = begin + self._xfer_us(nbytes)
            js.result.bytes_transferred += nbytes
            js.received[k] = [(0, (start, start + samples))]
            self._push(js.link_free_us, "fetched", js, k)
            return
        p = js.profile
        est = build_memory_estimate(p, upto=js.split)
        work_per_sample = sum(l.fwd_cost_gpu for l in p.layers[:js.split])
        per_req = c.post_request_samples
        tasks = []
        for ordinal, offset in enumerate(range(0, samples, per_req)):
            n = min(per_req, samples - offset)
            b_max = min(n, c.cos_batch_max or c.post_request_samples, js.job.training_batch)
            lo = start + offset
            tasks.append(_Task(
                id=next(self._task_ids), job=js, iteration=k, ordinal=ordinal, samples=n,
                sample_range=(lo, lo + n), objects=_ceil_div(n, c.object_size_samples),
                work_ns=math.ceil(n * work_per_sample / c.cos_gpu_speed),
                b_min=min(c.b_min, b_max), b_max=b_max,
                adapt_model=est.model_bytes + c.reserved_per_request_bytes,
                adapt_slope=est.slope,
                charge_model=est.model_bytes + c.reserved_per_request_bytes,
                charge_per_sample=est.per_sample_bytes,
                payload_bytes=n * p.output_bytes(js.split),
            ))
        js.pending[k] = len(tasks)
        js.received[k] = []
        for t in tasks:
            self._arrive(t)

    def _issue_all_in_cos(self, js: _JobState, k: int) -> None:
        c = self.config
        p = js.profile
        start, samples = self._iteration_samples(js, k)
        est = build_memory_estimate(p)
        per_sample = est.per_sample_bytes + p.backward_mem_bytes_per_sample
        gpu_costs = [l.fwd_cost_gpu for l in p.layers]
        work = sum(gpu_costs) + c.backward_cost_factor * sum(gpu_costs[p.freeze_index:])
        task = _Task(
            id=next(self._task_ids), job=js, iteration=k, ordinal=0, samples=samples,
            sample_range=(start, start + samples),
            objects=_ceil_div(samples, c.object_size_samples),
            work_ns=math.ceil(samples * work / c.cos_gpu_speed),
            b_min=samples, b_max=samples,
            adapt_model=est.model_bytes + c.reserved_per_request_bytes,
            adapt_slope=per_sample + est.correction_per_sample_bytes,
            charge_model=est.model_bytes + c.reserved_per_request_bytes,
            charge_per_sample=per_sample, payload_bytes=0,
        )
        js.pending[k] = 1
        js.received[k] = []
        self._arrive(task)

    def _arrive(self, task: _Task) -> None:
        task.arrival_seq = next(self._arrivals)
        g = self.gpus[task.arrival_seq % len(self.gpus)]
        task.gpu = g.index
        g.queue.append(task)
        g.unaccounted.add(task.id)
        if g.window_start is None:
            self._open_window(g)

    def _open_window(self, g: _Gpu) -> None:
        g.window_start = self.now
        g.window_token += 1
        self._push(self.now + self.config.wait_window_us, "window", g, g.window_token)

    def _on_window(self, g: _Gpu, token: int) -> None:
        if token != g.window_token:
            return
        self._try_round(g)

    def _try_round(self, g: _Gpu) -> None:
        c = self.config
        state = QueueState(queued=tuple(t.id for t in g.queue),
                           unaccounted=frozenset(g.unaccounted),
                           free_bytes=g.capacity - g.used)
        if not should_trigger(state, wait_window_elapsed=True):
            return
        room = min(c.concurrency_cap - self.server_running,
                   self._per_gpu_cap - self._resident(g))
        if room <= 0:
            return
        considered, overflow = g.queue[:room], g.queue[room:]
        self.metrics.adaptation_rounds += 1
        if self.mode == Mode.ALL_IN_COS:
            admitted, rest = self._fifo_admission(g, considered)
        else:
            admitted, rest = self._batch_round(g, considered)
        g.queue = rest + overflow
        g.unaccounted.clear()
        g.window_start = None
        for task, b in admitted:
            self._start_task(g, task, b)

    def _batch_round(self, g: _Gpu, considered: list) -> tuple[list, list]:
        reqs = [AdaptRequest(id=t.id, mem_model_bytes=t.adapt_model, mem_data_bytes_per_sample=t.adapt_slope,
                             b_min=t.b_min, b_max=t.b_max, arrival_seq=t.arrival_seq)
                for t in considered]
        by_id = {t.id: t for t in considered}
        if self.config.batch_adaptation:
            result = adapt_batches(reqs, g.capacity - g.used, self.config.step)
        else:
            result = fixed_batches(reqs)
        admitted = []
        projected = g.used
        for t in considered:
            if t.id not in result.assigned:
                continue
            b = result.assigned[t.id]
            charge = t.charge_model + b * t.charge_per_sample
            if projected + charge > g.capacity:
                self._fail(t.job, f"COS OOM on GPU {g.index}", oom=True)
                continue
            projected += charge
            admitted.append((t, b))
        rest = [by_id[i] for i in result.deferred]
        return admitted, rest

    def _fifo_admission(self, g: _Gpu, considered: list) -> tuple[list, list]:
        admitted = []
        projected = g.used
        for pos, t in enumerate(considered):
            charge = t.charge_model + t.b_max * t.charge_per_sample
            if charge > g.capacity:
                self._fail(t.job, f"COS OOM on GPU {g.index}: task needs {charge} B", oom=True)
                continue
            if projected + charge > g.capacity:
                return admitted, [x for x in considered[pos:] if not x.job.result.failed]
            projected += charge
            admitted.append((t, t.b_max))
        return admitted, []

    def _start_task(self, g: _Gpu, task: _Task, b: int) -> None:
        task.cos_batch = b
        task.charged = task.charge_model + b * task.charge_per_sample
        g.used += task.charged
        g.peak = max(g.peak, g.used)
        self.server_running += 1
        self._resident_count[g.index] += 1
        m = self.metrics
        m.max_coresident = max(m.max_coresident, self.server_running)
        m.peak_cos_mem_bytes = max(m.peak_cos_mem_bytes, sum(x.used for x in self.gpus))
        m.requests_total += 1
        if b < task.b_max:
            m.requests_reduced += 1
            self._reductions.append(1 - b / task.b_max)
        task.remaining = task.work_ns
        delay = self._read_us(task.objects)
        if delay:
            self._push(self.now + delay, "read_done", g, task)
        else:
            self._gpu_add(g, task)

    def _on_read_done(self, g: _Gpu, task: _Task) -> None:
        self._gpu_add(g, task)

    def _advance(self, g: _Gpu) -> None:
        dt = self.now - g.last_update
        n = len(g.running)
        if n and dt:
            progress = dt * 1000 // n
            for t in g.running:
                t.remaining -= progress
        g.last_update = self.now

    def _reschedule(self, g: _Gpu) -> None:
        g.version += 1
        if g.running:
            n = len(g.running)
            rmin = max(0, min(t.remaining for t in g.running))
            self._push(self.now + _ceil_div(rmin * n, 1000), "gpu_done", g, g.version)

    def _gpu_add(self, g: _Gpu, task: _Task) -> None:
        self._advance(g)
        g.running.append(task)
        self._reschedule(g)

    def _on_gpu_done(self, g: _Gpu, version: int) -> None:
        if version != g.version:
            return
        self._advance(g)
        finished = [t for t in g.running if t.remaining <= 0]
        g.running = [t for t in g.running if t.remaining > 0]
        self._reschedule(g)
        for t in finished:
            self._finish_task(g, t)
        self._reopen_queues()

    def _reopen_queues(self) -> None:
        # freed memory or a freed concurrency slot: deferred requests get reconsidered
        for g in self.gpus:
            if g.queue:
                g.unaccounted = {t.id for t in g.queue}
                self._open_window(g)
            elif not g.running and not g.queue:
                g.window_start = None

    def _finish_task(self, g: _Gpu, t: _Task) -> None:
        g.used -= t.charged
        self.server_running -= 1
        self._resident_count[g.index] -= 1
        js = t.job
        if js.result.failed:
            return
        if self.mode == Mode.ALL_IN_COS:
            if t.iteration + 1 < js.n_iter:
                self._issue_all_in_cos(js, t.iteration + 1)
            else:
                self._complete(js)
            return
        begin = max(self.now, js.link_free_us)
        js.link_free_us = begin + self._xfer_us(t.payload_bytes)
        js.result.bytes_transferred += t.payload_bytes
        self._push(js.link_free_us, "response", t)

    def _on_response(self, t: _Task) -> None:
        js = t.job
        if js.result.failed:
            return
        js.received[t.iteration].append((t.ordinal, t.sample_range))
        js.pending[t.iteration] -= 1
        if js.pending[t.iteration] == 0:
            self._on_fetched(js, t.iteration)

    def _on_fetched(self, js: _JobState, k: int) -> None:
        if js.result.failed:
            return
        ranges = reorder_results(js.received.pop(k))
        if self.config.record_samples:
            js.result.sample_stream.extend(ranges)
        js.fetched.add(k)
        self._maybe_compute(js)

    def _maybe_compute(self, js: _JobState) -> None:
        k = js.next_compute
        if js.computing or k not in js.fetched:
            return
        js.computing = True
        js.fetched.discard(k)
        self._fill_prefetch(js, consumed=k + 1)
        _, samples = self._iteration_samples(js, k)
        first = js.split + 1 if self.mode == Mode.SPLIT else 1
        cost = self._client_cost_ns(js, first, samples)
        self._push(self.now + _ceil_div(cost, 1000), "computed", js, k)

    def _on_computed(self, js: _JobState, k: int) -> None:
        if js.result.failed:
            return
        js.computing = False
        js.next_compute = k + 1
        if js.next_compute == js.n_iter:
            self._complete(js)
        else:
            self._maybe_compute(js)

    def _complete(self, js: _JobState) -> None:
        js.done = True
        js.result.epoch_time_s = (self.now - js.submit_us) / US

    def _fail(self, js: _JobState, reason: str, oom: bool = False) -> None:
        if js.result.failed:
            return
        js.result.failed = True
        js.result.failure = reason
        if oom:
            self.metrics.oom_events += 1
        for g in self.gpus:
            g.queue = [t for t in g.queue if t.job is not js]
            g.unaccounted = {i for i in g.unaccounted if any(t.id == i for t in g.queue)}

    def _finalize(self, states: list) -> SimMetrics:
        m = self.metrics
        m.jobs = [js.result for js in states]
        m.peak_gpu_mem_bytes = [g.peak for g in self.gpus]
        done = [js for js in states if js.done]
        if done:
            ends = [js.submit_us / US + js.result.epoch_time_s for js in done]
            start = min(js.submit_us for js in states) / US
            m.makespan_s = max(ends) - start
            m.avg_jct_s = sum(js.result.epoch_time_s for js in done) / len(done)
            m.avg_bytes_per_iteration = sum(js.result.bytes_per_iteration for js in done) / len(done)
        if self._reductions:
            m.avg_batch_reduction = sum(self._reductions) / len(self._reductions)
        return m


def run(config: SimConfig, jobs: Iterable[Job],
        profiles: Optional[Mapping[str, ModelProfile]] = None) -> SimMetrics:
    return Simulator(config, profiles).run(list(jobs))


def sweep(spec, values=None, overrides=None, profiles=None):
    """Run a named scenario (or :class:`ScenarioSpec`) over an axis; see :mod:`ndsplit.scenarios`."""
    from . import scenarios

    if isinstance(spec, str):
        spec = scenarios.get_scenario(spec)
    return scenarios.sweep(spec, values, overrides, profiles)
