"""Reference stateless storage-side server.

Each request is handled on its own: look up the object, ask the batch
adaptation coordinator for a storage batch size, "run" the layers up to the
split index and return a synthetic payload whose size matches the split
layer's output for every sample in the object. Nothing survives between
requests except the coordinator's memory accounting.
"""

from __future__ import annotations

import hashlib
import logging
import socketserver
import threading
import time
from typing import Callable, Mapping, Optional

from ..batch_adapt import DEFAULT_B_MIN, AdaptCoordinator
from ..errors import FramingError, NotFoundError
from ..profiles import ModelProfile
from .framing import KIND_REQUEST, KIND_RESPONSE, Frame, decode_frame, encode_frame, read_frame
from .messages import RequestHeader, ResponseHeader, Status
from .store import ObjectStore

log = logging.getLogger(__name__)

_PATTERN_BYTES = 4096


def synth_payload(object_key: str, split_index: int, nbytes: int) -> bytes:
    """Deterministic filler keyed by object and split; stands in for serialized activations."""
    if nbytes <= 0:
        return b""
    block = hashlib.shake_256(f"{object_key}\x00{split_index}".encode("utf-8")).digest(_PATTERN_BYTES)
    reps, rest = divmod(nbytes, _PATTERN_BYTES)
    return block * reps + block[:rest]


class SplitServer:
    def __init__(
        self,
        profiles: Mapping[str, ModelProfile],
        store: ObjectStore,
        coordinator: Optional[AdaptCoordinator] = None,
        b_min: int = DEFAULT_B_MIN,
        acquire_timeout_s: Optional[float] = 30.0,
        delay_fn: Optional[Callable[[RequestHeader], float]] = None,
    ):
        self.profiles = dict(profiles)
        self.store = store
        self.coordinator = coordinator or AdaptCoordinator()
        self.b_min = b_min
        self.acquire_timeout_s = acquire_timeout_s
        self.delay_fn = delay_fn      # test hook: extra service time per request
        self._tcp: Optional[socketserver.ThreadingTCPServer] = None
        self._thread: Optional[threading.Thread] = None

    # -- request handling --------------------------------------------------------

    def handle_request(self, req: RequestHeader) -> tuple[ResponseHeader, bytes]:
        def error(reason: str) -> tuple[ResponseHeader, bytes]:
            return ResponseHeader(request_id=req.request_id, status=Status.ERROR, reason=reason), b""

        profile = self.profiles.get(req.model_name)
        if profile is None:
            return error(f"unknown model {req.model_name!r}")
        if req.split_index > profile.freeze_index:
            return error(f"split index {req.split_index} exceeds freeze index {profile.freeze_index}")
        try:
            samples = self.store.get(req.object_key)
        except NotFoundError as exc:
            return error(str(exc))

        b_max = max(1, min(req.cos_batch_max, samples))
        try:
            grant = self.coordinator.acquire(req.mem_model_bytes, req.mem_data_bytes_per_sample,
                                             b_max=b_max, b_min=self.b_min,
                                             timeout=self.acquire_timeout_s)
        except TimeoutError as exc:
            return ResponseHeader(request_id=req.request_id, status=Status.DEFERRED, reason=str(exc)), b""
        try:
            if self.delay_fn is not None:
                time.sleep(max(0.0, self.delay_fn(req)))
            nbytes = samples * profile.output_bytes(req.split_index)
            payload = synth_payload(req.object_key, req.split_index, nbytes)
        finally:
            self.coordinator.release(grant)
        return ResponseHeader(request_id=req.request_id, status=Status.OK,
                              cos_batch_used=grant.cos_batch, payload_bytes=len(payload)), payload

    def handle_frame(self, frame: Frame) -> bytes:
        if frame.kind != KIND_REQUEST:
            raise FramingError("expected a request frame", 5)
        try:
            req = RequestHeader.from_dict(frame.header)
        except FramingError as exc:
            rid = frame.header.get("request_id")
            rid = rid if isinstance(rid, int) and not isinstance(rid, bool) and 0 <= rid < 2**64 else 0
            resp = ResponseHeader(request_id=rid, status=Status.ERROR, reason=f"bad request header: {exc}")
            return encode_frame(KIND_RESPONSE, resp.to_dict())
        resp, payload = self.handle_request(req)
        return encode_frame(KIND_RESPONSE, resp.to_dict(), payload)

    def handle_bytes(self, data: bytes) -> bytes:
        return self.handle_frame(decode_frame(data))

    # -- TCP ---------------------------------------------------------------------

    def start(self, host: str = "127.0.0.1", port: int = 0) -> tuple[str, int]:
        """Serve in a background thread; returns the bound address."""
        server = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                while True:
                    try:
                        frame = read_frame(self.rfile)
                    except FramingError as exc:
                        if exc.offset:
                            log.warning("dropping connection: %s", exc)
                        return
                    self.wfile.write(server.handle_frame(frame))
                    self.wfile.flush()

        class TCPServer(socketserver.ThreadingTCPServer):
            daemon_threads = True
            allow_reuse_address = True

        self._tcp = TCPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._tcp.serve_forever, name="ndsplit-server", daemon=True)
        self._thread.start()
        return self.address

    @property
    def address(self) -> tuple[str, int]:
        if self._tcp is None:
            raise RuntimeError("server not started")
        host, port = self._tcp.server_address[:2]
        return host, port

    def serve_forever(self, host: str, port: int) -> None:
        self.start(host, port)
        try:
            while self._thread is not None and self._thread.is_alive():
                self._thread.join(0.5)
        finally:
            self.stop()

    def stop(self) -> None:
        if self._tcp is not None:
            self._tcp.shutdown()
            self._tcp.server_close()
            self._tcp = None
        self._thread = None

    def __enter__(self):
        if self._tcp is None:
            self.start()
        return self

    def __exit__(self, *exc):
        self.stop()


def serve(bind: str, profiles: Mapping[str, ModelProfile], coordinator: Optional[AdaptCoordinator] = None,
          store: Optional[ObjectStore] = None, **kwargs) -> SplitServer:
    """Start a server on ``HOST:PORT`` in the background and return it."""
    host, port = parse_endpoint(bind)
    srv = SplitServer(profiles, store or ObjectStore(), coordinator, **kwargs)
    srv.start(host, port)
    return srv


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"expected HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)
