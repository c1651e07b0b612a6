"""Wire protocol, object-store stub, and reference server/client for the networked demo."""

from .client import IterationResult, client_run_iteration, plan_iteration, send_request
from .framing import (
    KIND_REQUEST,
    KIND_RESPONSE,
    MAGIC,
    MAX_HEADER_BYTES,
    VERSION,
    Frame,
    decode_frame,
    encode_frame,
    read_frame,
)
from .messages import RequestHeader, ResponseHeader, Status
from .server import SplitServer, parse_endpoint, serve, synth_payload
from .store import ObjectStore, chunk_key, layout_dataset
