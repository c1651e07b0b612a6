"""Client side of the demo protocol: fan out one iteration, then reassemble."""

from __future__ import annotations

import itertools
import socket
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import ConfigError, FramingError, IterationFailedError
from ..profiles import ModelProfile, build_memory_estimate
from ..reorder import reorder_results
from ..splitter import SplitDecision
from .framing import KIND_REQUEST, KIND_RESPONSE, encode_frame, read_frame
from .messages import RequestHeader, ResponseHeader, Status
from .server import parse_endpoint
from .store import chunk_key


@dataclass
class IterationResult:
    iteration: int
    requests: int
    bytes_received: int
    payload: bytes
    cos_batches: list = field(default_factory=list)
    elapsed_s: float = 0.0


def send_request(endpoint, header: RequestHeader, timeout: Optional[float] = 60.0) -> tuple[ResponseHeader, bytes]:
    host, port = parse_endpoint(endpoint) if isinstance(endpoint, str) else endpoint
    with socket.create_connection((host, port), timeout=timeout) as sock:
        sock.sendall(encode_frame(KIND_REQUEST, header.to_dict()))
        with sock.makefile("rb") as stream:
            frame = read_frame(stream)
    if frame.kind != KIND_RESPONSE:
        raise FramingError("expected a response frame", 5)
    resp = ResponseHeader.from_dict(frame.header)
    if resp.status == Status.OK and len(frame.payload) != resp.payload_bytes:
        raise FramingError("payload length disagrees with header", len(frame.payload))
    return resp, frame.payload


def plan_iteration(
    profile: ModelProfile,
    decision: SplitDecision,
    training_batch: int,
    iteration: int = 0,
    object_size_samples: int = 1000,
    cos_batch_max: Optional[int] = None,
    first_request_id: int = 0,
) -> list[RequestHeader]:
    """One request per storage object covered by the iteration, in sample order."""
    if training_batch % object_size_samples:
        raise ConfigError(f"training batch {training_batch} is not a multiple of the object size "
                          f"{object_size_samples}")
    est = build_memory_estimate(profile, upto=decision.split_index)
    per_iter = training_batch // object_size_samples
    ids = itertools.count(first_request_id)
    return [
        RequestHeader(
            request_id=next(ids),
            model_name=profile.name,
            split_index=decision.split_index,
            object_key=chunk_key(iteration * per_iter + j),
            cos_batch_max=cos_batch_max or object_size_samples,
            mem_model_bytes=est.model_bytes,
            mem_data_bytes_per_sample=est.slope,
        )
        for j in range(per_iter)
    ]


def run_requests(endpoint, headers: Sequence[RequestHeader], timeout: Optional[float] = 60.0,
                 max_workers: Optional[int] = None) -> list[tuple[ResponseHeader, bytes]]:
    """Issue all requests concurrently; results come back indexed by ordinal."""
    done: list = []
    with ThreadPoolExecutor(max_workers=max_workers or max(1, len(headers))) as pool:
        futures = {pool.submit(send_request, endpoint, h, timeout): i for i, h in enumerate(headers)}
        for fut, ordinal in futures.items():
            done.append((ordinal, fut.result()))
    return reorder_results(done, expected_count=len(headers))


def client_run_iteration(
    profile: ModelProfile,
    decision: SplitDecision,
    endpoint,
    training_batch: int,
    iteration: int = 0,
    object_size_samples: int = 1000,
    cos_batch_max: Optional[int] = None,
    timeout: Optional[float] = 60.0,
) -> IterationResult:
    t0 = time.monotonic()
    headers = plan_iteration(profile, decision, training_batch, iteration, object_size_samples,
                             cos_batch_max, first_request_id=iteration * 2**20)
    results = run_requests(endpoint, headers, timeout)
    for ordinal, (resp, _) in enumerate(results):
        if resp.status != Status.OK:
            raise IterationFailedError(ordinal, f"{resp.status.value}: {resp.reason}")
    payload = b"".join(p for _, p in results)
    return IterationResult(
        iteration=iteration,
        requests=len(headers),
        bytes_received=len(payload),
        payload=payload,
        cos_batches=[resp.cos_batch_used for resp, _ in results],
        elapsed_s=time.monotonic() - t0,
    )
