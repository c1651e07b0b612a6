"""Client-side reassembly of out-of-order per-request results."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, TypeVar

from .errors import IncompleteIterationError

T = TypeVar("T")


def reorder_results(responses: Iterable[tuple[int, T]], expected_count: Optional[int] = None) -> list[T]:
    """Order ``(ordinal, payload)`` pairs by ordinal.

    Ordinals must be exactly ``0..n-1`` with ``n = expected_count`` (or the
    number of responses when unspecified); a gap or a repeat raises
    :class:`IncompleteIterationError`.
    """
    slots: dict[int, T] = {}
    for ordinal, payload in responses:
        if ordinal in slots:
            raise IncompleteIterationError(f"duplicate response for ordinal {ordinal}")
        slots[ordinal] = payload
    n = len(slots) if expected_count is None else expected_count
    missing = [i for i in range(n) if i not in slots]
    if missing:
        raise IncompleteIterationError(f"missing responses for ordinals {missing}")
    extra = sorted(set(slots) - set(range(n)))
    if extra:
        raise IncompleteIterationError(f"unexpected ordinals {extra}")
    return [slots[i] for i in range(n)]


def assemble(responses: Iterable[tuple[int, bytes]], expected_count: Optional[int] = None) -> bytes:
    return b"".join(reorder_results(responses, expected_count))
