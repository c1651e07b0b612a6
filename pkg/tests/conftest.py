import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ndsplit.profiles import LayerProfile, ModelProfile, load_builtin

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_profile(outputs, input_bytes=100, freeze=None, weights=None, mems=None, name="toy",
                 gpu=None, cpu=None, backward=0, correction=0):
    n = len(outputs)
    weights = weights or [0] * n
    mems = mems or [0] * n
    gpu = gpu or [10] * n
    cpu = cpu or [100] * n
    layers = tuple(
        LayerProfile(index=i + 1, output_bytes_per_sample=outputs[i], fwd_cost_gpu=gpu[i],
                     fwd_cost_cpu=cpu[i], mem_bytes_per_sample=mems[i], weight_bytes=weights[i])
        for i in range(n)
    )
    return ModelProfile(name=name, input_bytes_per_sample=input_bytes, layers=layers,
                        freeze_index=freeze or n, backward_mem_bytes_per_sample=backward,
                        correction_per_sample_bytes=correction)


@st.composite
def profiles(draw, max_layers=12, max_bytes=200_000):
    n = draw(st.integers(1, max_layers))
    outputs = draw(st.lists(st.integers(1, max_bytes), min_size=n, max_size=n))
    mems = draw(st.lists(st.integers(0, max_bytes), min_size=n, max_size=n))
    weights = draw(st.lists(st.integers(0, 10**7), min_size=n, max_size=n))
    input_bytes = draw(st.integers(1, max_bytes))
    freeze = draw(st.integers(1, n))
    correction = draw(st.integers(0, 10_000))
    return make_profile(outputs, input_bytes, freeze, weights, mems, correction=correction)


@pytest.fixture(scope="session")
def alexnet():
    return load_builtin("alexnet")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
