"""Typed request/response headers carried inside frames."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

from ..errors import FramingError

U16 = 2**16 - 1
U32 = 2**32 - 1
U64 = 2**64 - 1


class Status(str, Enum):
    OK = "ok"
    DEFERRED = "deferred"
    ERROR = "error"


def _uint(doc: dict, key: str, limit: int, minimum: int = 0) -> int:
    if key not in doc:
        raise FramingError(f"header missing field {key!r}", 10)
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or not minimum <= v <= limit:
        raise FramingError(f"header field {key!r} must be an integer in [{minimum}, {limit}]", 10)
    return v


def _str(doc: dict, key: str) -> str:
    v = doc.get(key)
    if not isinstance(v, str):
        raise FramingError(f"header field {key!r} must be a string", 10)
    return v


def _exact_keys(doc: dict, keys: tuple) -> None:
    extra = sorted(set(doc) - set(keys))
    if extra:
        raise FramingError(f"unknown header fields {extra}", 10)


@dataclass(frozen=True)
class RequestHeader:
    request_id: int
    model_name: str
    split_index: int
    object_key: str
    cos_batch_max: int
    mem_model_bytes: int
    mem_data_bytes_per_sample: int

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _RequestCodec.check(asdict(self))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RequestHeader":
        return cls(**_RequestCodec.check(doc))


class _RequestCodec:
    KEYS = ("request_id", "model_name", "split_index", "object_key", "cos_batch_max",
            "mem_model_bytes", "mem_data_bytes_per_sample")

    @classmethod
    def check(cls, doc: dict) -> dict:
        _exact_keys(doc, cls.KEYS)
        return {
            "request_id": _uint(doc, "request_id", U64),
            "model_name": _str(doc, "model_name"),
            "split_index": _uint(doc, "split_index", U16, minimum=1),
            "object_key": _str(doc, "object_key"),
            "cos_batch_max": _uint(doc, "cos_batch_max", U32, minimum=1),
            "mem_model_bytes": _uint(doc, "mem_model_bytes", U64),
            "mem_data_bytes_per_sample": _uint(doc, "mem_data_bytes_per_sample", U64),
        }


@dataclass(frozen=True)
class ResponseHeader:
    request_id: int
    status: Status
    cos_batch_used: int = 0
    payload_bytes: int = 0
    reason: str = ""

    KEYS = ("request_id", "status", "cos_batch_used", "payload_bytes", "reason")

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "status": Status(self.status).value,
            "cos_batch_used": self.cos_batch_used,
            "payload_bytes": self.payload_bytes,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ResponseHeader":
        _exact_keys(doc, cls.KEYS)
        try:
            status = Status(doc.get("status"))
        except ValueError:
            raise FramingError(f"bad status {doc.get('status')!r}", 10) from None
        return cls(
            request_id=_uint(doc, "request_id", U64),
            status=status,
            cos_batch_used=_uint(doc, "cos_batch_used", U32),
            payload_bytes=_uint(doc, "payload_bytes", U64),
            reason=_str(doc, "reason"),
        )
