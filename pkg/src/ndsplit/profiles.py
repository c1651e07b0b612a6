"""Declarative model profiles, the one-sample profiling pass, and memory estimates.

A :class:`ModelProfile` stands in for a real DNN: for every layer it records the
per-sample output size, a per-sample forward cost on GPU and CPU, transient
working memory and parameter bytes. Layer ordinals are 1-based, so layer ``i``
is ``profile.layers[i - 1]`` and a split index of ``i`` means layers ``1..i``
run on the storage side.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from .errors import InvalidArgumentError, InvalidProfileError, ProfileParseError

U64_MAX = 2**64 - 1

# Per-sample raw input sizes. Only the ratios are taken from the dataset
# descriptions; the Imagenet-like base value is a fixture choice (224x224x3 u8).
IMAGENET_INPUT_BYTES = 150_528
DATASET_INPUT_BYTES = {
    "imagenet": IMAGENET_INPUT_BYTES,
    "inaturalist": 2 * IMAGENET_INPUT_BYTES,
    "plantleaves": 8 * IMAGENET_INPUT_BYTES,
}

LAYER_FIELDS = (
    "index",
    "output_bytes_per_sample",
    "fwd_cost_gpu",
    "fwd_cost_cpu",
    "mem_bytes_per_sample",
    "weight_bytes",
)
PROFILE_FIELDS = (
    "name",
    "input_bytes_per_sample",
    "freeze_index",
    "backward_mem_bytes_per_sample",
    "layers",
)
OPTIONAL_PROFILE_FIELDS = ("correction_per_sample_bytes",)


@dataclass(frozen=True)
class LayerProfile:
    index: int
    output_bytes_per_sample: int
    fwd_cost_gpu: int
    fwd_cost_cpu: int
    mem_bytes_per_sample: int = 0
    weight_bytes: int = 0


@dataclass(frozen=True)
class ModelProfile:
    name: str
    input_bytes_per_sample: int
    layers: tuple[LayerProfile, ...]
    freeze_index: int
    backward_mem_bytes_per_sample: int = 0
    correction_per_sample_bytes: int = 0

    def __post_init__(self):
        # accept any iterable of layers but store an immutable tuple
        if not isinstance(self.layers, tuple):
            object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def layer(self, index: int) -> LayerProfile:
        """Return the layer with 1-based ordinal ``index``."""
        if not 1 <= index <= len(self.layers):
            raise InvalidArgumentError(f"layer index {index} outside 1..{len(self.layers)}")
        return self.layers[index - 1]

    def output_bytes(self, index: int) -> int:
        """Per-sample bytes leaving layer ``index``; index 0 is the raw input."""
        if index == 0:
            return self.input_bytes_per_sample
        return self.layer(index).output_bytes_per_sample

    def weights_bytes(self, first: int = 1, last: Optional[int] = None) -> int:
        last = len(self.layers) if last is None else last
        return sum(l.weight_bytes for l in self.layers[first - 1:last])

    def validate(self) -> "ModelProfile":
        if not self.layers:
            raise InvalidProfileError(f"profile {self.name!r} has no layers")
        for pos, layer in enumerate(self.layers, start=1):
            if layer.index != pos:
                raise InvalidProfileError(
                    f"profile {self.name!r}: layer at position {pos} has index {layer.index}; "
                    "indices must be contiguous from 1"
                )
            for name in LAYER_FIELDS[1:]:
                _check_u64(getattr(layer, name), f"layers[{pos - 1}].{name}", InvalidProfileError)
            if layer.output_bytes_per_sample <= 0:
                raise InvalidProfileError(
                    f"profile {self.name!r}: layer {pos} output_bytes_per_sample must be > 0"
                )
        for name in ("input_bytes_per_sample", "backward_mem_bytes_per_sample",
                     "correction_per_sample_bytes"):
            _check_u64(getattr(self, name), name, InvalidProfileError)
        if not 1 <= self.freeze_index <= len(self.layers):
            raise InvalidProfileError(
                f"profile {self.name!r}: freeze_index {self.freeze_index} outside 1..{len(self.layers)}"
            )
        return self

    def for_dataset(self, dataset: str) -> "ModelProfile":
        """Same network fed with another dataset's raw samples."""
        try:
            size = DATASET_INPUT_BYTES[dataset.lower()]
        except KeyError:
            raise InvalidArgumentError(
                f"unknown dataset {dataset!r}; known: {sorted(DATASET_INPUT_BYTES)}"
            ) from None
        return replace(self, input_bytes_per_sample=size)


@dataclass(frozen=True)
class MemoryEstimate:
    model_bytes: int
    per_sample_bytes: int
    correction_per_sample_bytes: int = 0

    def __post_init__(self):
        for name in ("model_bytes", "per_sample_bytes", "correction_per_sample_bytes"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")

    @property
    def slope(self) -> int:
        return self.per_sample_bytes + self.correction_per_sample_bytes


def _check_u64(value, path, exc=ProfileParseError):
    if isinstance(value, bool) or not isinstance(value, int):
        if exc is ProfileParseError:
            raise ProfileParseError(path, f"expected an unsigned integer, got {value!r}")
        raise exc(f"{path}: expected an unsigned integer, got {value!r}")
    if not 0 <= value <= U64_MAX:
        if exc is ProfileParseError:
            raise ProfileParseError(path, f"value {value} outside unsigned 64-bit range")
        raise exc(f"{path}: value {value} outside unsigned 64-bit range")


def profile_model(profile: ModelProfile) -> tuple[list[int], int]:
    """Simulated batch-size-1 forward pass: per-layer output sizes and model size."""
    profile.validate()
    sizes = [layer.output_bytes_per_sample for layer in profile.layers]
    return sizes, profile.weights_bytes()


def build_memory_estimate(
    profile: ModelProfile,
    upto: Optional[int] = None,
    correction_per_sample_bytes: Optional[int] = None,
) -> MemoryEstimate:
    """Model size plus the most expensive layer (input + output + working memory).

    ``upto`` restricts the estimate to layers ``1..upto``, which is what a server
    executing only the storage-side partition needs. ``upto=0`` describes a
    pass-through partition whose only per-sample cost is the raw input.
    """
    profile.validate()
    last = profile.num_layers if upto is None else upto
    if not 0 <= last <= profile.num_layers:
        raise InvalidArgumentError(f"upto={upto} outside 0..{profile.num_layers}")
    peak = profile.input_bytes_per_sample if last == 0 else 0
    prev_out = profile.input_bytes_per_sample
    for layer in profile.layers[:last]:
        peak = max(peak, prev_out + layer.output_bytes_per_sample + layer.mem_bytes_per_sample)
        prev_out = layer.output_bytes_per_sample
    correction = (profile.correction_per_sample_bytes
                  if correction_per_sample_bytes is None else correction_per_sample_bytes)
    return MemoryEstimate(
        model_bytes=profile.weights_bytes(1, last),
        per_sample_bytes=peak,
        correction_per_sample_bytes=correction,
    )


def estimate_max_memory(est: MemoryEstimate, batch: int) -> int:
    """Conservative memory prediction; never below :func:`charged_memory`."""
    if isinstance(batch, bool) or not isinstance(batch, int) or batch < 1:
        raise InvalidArgumentError(f"batch must be a positive integer, got {batch!r}")
    return est.model_bytes + batch * est.slope


def charged_memory(est: MemoryEstimate, batch: int) -> int:
    """Memory the simulated GPU actually charges (no correction term)."""
    if batch < 1:
        raise InvalidArgumentError(f"batch must be a positive integer, got {batch!r}")
    return est.model_bytes + batch * est.per_sample_bytes


# --- serialization -----------------------------------------------------------

def profile_to_dict(profile: ModelProfile) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "name": profile.name,
        "input_bytes_per_sample": profile.input_bytes_per_sample,
        "freeze_index": profile.freeze_index,
        "backward_mem_bytes_per_sample": profile.backward_mem_bytes_per_sample,
        "layers": [{f: getattr(layer, f) for f in LAYER_FIELDS} for layer in profile.layers],
    }
    if profile.correction_per_sample_bytes:
        doc["correction_per_sample_bytes"] = profile.correction_per_sample_bytes
    return doc


def _check_keys(obj, required, optional, path):
    if not isinstance(obj, dict):
        raise ProfileParseError(path, f"expected an object, got {type(obj).__name__}")
    for key in required:
        if key not in obj:
            raise ProfileParseError(f"{path}.{key}" if path else key, "missing required field")
    for key in obj:
        if key not in required and key not in optional:
            raise ProfileParseError(f"{path}.{key}" if path else key, "unknown field")


def profile_from_dict(doc: Any) -> ModelProfile:
    _check_keys(doc, PROFILE_FIELDS, OPTIONAL_PROFILE_FIELDS, "")
    if not isinstance(doc["name"], str) or not doc["name"]:
        raise ProfileParseError("name", "expected a non-empty string")
    for key in ("input_bytes_per_sample", "freeze_index", "backward_mem_bytes_per_sample"):
        _check_u64(doc[key], key)
    correction = doc.get("correction_per_sample_bytes", 0)
    _check_u64(correction, "correction_per_sample_bytes")
    if not isinstance(doc["layers"], list):
        raise ProfileParseError("layers", "expected a list")
    layers = []
    for i, raw in enumerate(doc["layers"]):
        path = f"layers[{i}]"
        _check_keys(raw, LAYER_FIELDS, (), path)
        for key in LAYER_FIELDS:
            _check_u64(raw[key], f"{path}.{key}")
        layers.append(LayerProfile(**{k: raw[k] for k in LAYER_FIELDS}))
    profile = ModelProfile(
        name=doc["name"],
        input_bytes_per_sample=doc["input_bytes_per_sample"],
        layers=tuple(layers),
        freeze_index=doc["freeze_index"],
        backward_mem_bytes_per_sample=doc["backward_mem_bytes_per_sample"],
        correction_per_sample_bytes=correction,
    )
    return profile.validate()


def load_profile(path: Union[str, os.PathLike]) -> ModelProfile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileParseError("", f"{path}: invalid JSON ({exc})") from exc
    return profile_from_dict(doc)


def save_profile(profile: ModelProfile, path: Union[str, os.PathLike]) -> None:
    profile.validate()
    Path(path).write_text(json.dumps(profile_to_dict(profile), indent=2) + "\n", encoding="utf-8")


# --- bundled fixtures ----------------------------------------------------------

BUILTIN_MODELS = ("resnet18", "resnet50", "vgg11", "vgg19", "alexnet", "densenet121", "transformer")


def builtin_profile_dir() -> Path:
    return Path(str(resources.files("ndsplit") / "data" / "profiles"))


def load_builtin(name: str) -> ModelProfile:
    path = builtin_profile_dir() / f"{name.lower()}.json"
    if not path.exists():
        raise InvalidArgumentError(f"no bundled profile named {name!r}; known: {list(BUILTIN_MODELS)}")
    return load_profile(path)


def load_profile_dir(directory: Union[str, os.PathLike]) -> dict[str, ModelProfile]:
    """Load every ``*.json`` profile in ``directory`` keyed by profile name."""
    out = {}
    for path in sorted(Path(directory).glob("*.json")):
        prof = load_profile(path)
        out[prof.name] = prof
    return out


def resolve_profile(ref: str, profiles_dir: Optional[Union[str, os.PathLike]] = None) -> ModelProfile:
    """Resolve a path, or a bare name looked up in ``profiles_dir`` then the bundled set."""
    candidate = Path(ref)
    if candidate.suffix == ".json" and candidate.exists():
        return load_profile(candidate)
    if profiles_dir is None:
        profiles_dir = os.environ.get("NDS_PROFILE_DIR")
    if profiles_dir:
        base = Path(profiles_dir)
        for name in (ref, f"{ref}.json", candidate.name):
            if (base / name).is_file():
                return load_profile(base / name)
    return load_builtin(candidate.stem)
