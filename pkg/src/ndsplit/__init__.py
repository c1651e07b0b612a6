"""Split feature extraction between an object store and a compute tier."""

from .errors import (
    ConfigError,
    FramingError,
    IncompleteIterationError,
    InvalidArgumentError,
    InvalidProfileError,
    NdsplitError,
    NotFoundError,
    ProfileParseError,
)
from .profiles import (
    LayerProfile,
    MemoryEstimate,
    ModelProfile,
    build_memory_estimate,
    estimate_max_memory,
    load_builtin,
    load_profile,
    profile_model,
    save_profile,
)
from .splitter import SplitDecision, choose_split_index
from .batch_adapt import AdaptRequest, BatchAssignment, adapt_batches, partition_to_gpus, should_trigger

__version__ = "0.1.0"
