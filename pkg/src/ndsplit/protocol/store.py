"""In-process stand-in for the object store's storage nodes."""

from __future__ import annotations

import threading

from ..errors import InvalidArgumentError, NotFoundError


def chunk_key(index: int) -> str:
    return f"chunk-{index:06d}"


class ObjectStore:
    """Maps object keys to the number of samples each object holds."""

    def __init__(self):
        self._objects: dict[str, int] = {}
        self._lock = threading.Lock()

    def put(self, key: str, sample_count: int) -> None:
        if isinstance(sample_count, bool) or not isinstance(sample_count, int) or sample_count < 0:
            raise InvalidArgumentError(f"sample_count must be a non-negative integer, got {sample_count!r}")
        with self._lock:
            self._objects[key] = sample_count

    def get(self, key: str) -> int:
        with self._lock:
            try:
                return self._objects[key]
            except KeyError:
                raise NotFoundError(f"no object named {key!r}") from None

    def __contains__(self, key: str) -> bool:
        with self._lock:
            return key in self._objects

    def keys(self) -> list[str]:
        with self._lock:
            return sorted(self._objects)

    def __len__(self) -> int:
        return len(self._objects)

    @classmethod
    def with_dataset(cls, dataset_samples: int, object_size_samples: int = 1000) -> "ObjectStore":
        store = cls()
        layout_dataset(store, dataset_samples, object_size_samples)
        return store


def layout_dataset(store: ObjectStore, dataset_samples: int, object_size_samples: int = 1000) -> list[str]:
    """Split a dataset into ``chunk-%06d`` objects; the last one may be short."""
    if object_size_samples < 1:
        raise InvalidArgumentError("object_size_samples must be >= 1")
    if dataset_samples < 0:
        raise InvalidArgumentError("dataset_samples must be >= 0")
    keys = []
    for i, start in enumerate(range(0, dataset_samples, object_size_samples)):
        key = chunk_key(i)
        store.put(key, min(object_size_samples, dataset_samples - start))
        keys.append(key)
    return keys
