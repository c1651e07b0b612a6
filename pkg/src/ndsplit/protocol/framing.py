"""Length-prefixed binary frames with a canonical-JSON header.

Layout::

    offset  size  field
    0       4     magic "HAPI"
    4       1     version (0x01)
    5       1     kind (0x01 request, 0x02 response)
    6       4     header length, u32 big-endian
    10      n     header, canonical JSON (UTF-8, sorted keys, no whitespace)
    10+n    8     payload length, u64 big-endian
    18+n    m     payload
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Any, BinaryIO, Mapping

from ..errors import FramingError

MAGIC = b"HAPI"
VERSION = 0x01
KIND_REQUEST = 0x01
KIND_RESPONSE = 0x02
KINDS = (KIND_REQUEST, KIND_RESPONSE)
MAX_HEADER_BYTES = 1 << 20
PREFIX_LEN = 10          # magic + version + kind + header length
_U32 = struct.Struct(">I")
_U64 = struct.Struct(">Q")


@dataclass(frozen=True)
class Frame:
    kind: int
    header: dict
    payload: bytes = b""


def canonical_json(header: Mapping[str, Any]) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False).encode("utf-8")


def encode_frame(kind: int, header: Mapping[str, Any], payload: bytes = b"") -> bytes:
    if kind not in KINDS:
        raise FramingError(f"unknown frame kind {kind!r}", 5)
    if not isinstance(header, Mapping):
        raise FramingError("header must be a JSON object", PREFIX_LEN)
    body = canonical_json(header)
    if len(body) > MAX_HEADER_BYTES:
        raise FramingError(f"header is {len(body)} bytes, limit {MAX_HEADER_BYTES}", 6)
    payload = bytes(payload)
    return b"".join((MAGIC, bytes((VERSION, kind)), _U32.pack(len(body)), body,
                     _U64.pack(len(payload)), payload))


def _parse_prefix(prefix: bytes) -> tuple[int, int]:
    for i, (got, want) in enumerate(zip(prefix[:4], MAGIC)):
        if got != want:
            raise FramingError("bad magic", i)
    if len(prefix) < PREFIX_LEN:
        raise FramingError("truncated frame prefix", len(prefix))
    if prefix[4] != VERSION:
        raise FramingError(f"unsupported version {prefix[4]}", 4)
    if prefix[5] not in KINDS:
        raise FramingError(f"unknown frame kind {prefix[5]}", 5)
    (hlen,) = _U32.unpack_from(prefix, 6)
    if hlen > MAX_HEADER_BYTES:
        raise FramingError(f"header length {hlen} exceeds {MAX_HEADER_BYTES}", 6)
    return prefix[5], hlen


def _parse_header(raw: bytes) -> dict:
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise FramingError(f"header is not valid UTF-8 JSON: {exc}", PREFIX_LEN) from None
    if not isinstance(header, dict):
        raise FramingError("header must be a JSON object", PREFIX_LEN)
    return header


def decode_frame(data: bytes) -> Frame:
    """Decode exactly one frame; trailing bytes are an error."""
    data = bytes(data)
    kind, hlen = _parse_prefix(data[:PREFIX_LEN])
    end_header = PREFIX_LEN + hlen
    if len(data) < end_header + 8:
        raise FramingError("truncated header or payload length", len(data))
    header = _parse_header(data[PREFIX_LEN:end_header])
    (plen,) = _U64.unpack_from(data, end_header)
    start = end_header + 8
    if len(data) < start + plen:
        raise FramingError(f"truncated payload: expected {plen} bytes", len(data))
    if len(data) > start + plen:
        raise FramingError("trailing bytes after frame", start + plen)
    return Frame(kind=kind, header=header, payload=data[start:start + plen])


def _read_exact(stream: BinaryIO, n: int, offset: int) -> bytes:
    chunks, got = [], 0
    while got < n:
        chunk = stream.read(n - got)
        if not chunk:
            raise FramingError(f"connection closed, wanted {n - got} more bytes", offset + got)
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(stream: BinaryIO) -> Frame:
    """Read one frame from a binary stream such as ``socket.makefile('rb')``."""
    prefix = _read_exact(stream, PREFIX_LEN, 0)
    kind, hlen = _parse_prefix(prefix)
    header = _parse_header(_read_exact(stream, hlen, PREFIX_LEN))
    (plen,) = _U64.unpack(_read_exact(stream, 8, PREFIX_LEN + hlen))
    payload = _read_exact(stream, plen, PREFIX_LEN + hlen + 8)
    return Frame(kind=kind, header=header, payload=payload)
