import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_profile, profiles
from ndsplit.errors import InvalidArgumentError, InvalidProfileError
from ndsplit.profiles import ModelProfile
from ndsplit.splitter import candidate_layers, choose_split_index

GBPS = 1e9 / 8


def oracle_split(profile, batch, bandwidth, threshold=1.0):
    """Literal reading of the selection loop, scanning every layer."""
    budget = bandwidth * threshold
    candidates = []
    for i in range(1, profile.num_layers + 1):
        if profile.output_bytes(i) < profile.input_bytes_per_sample and i <= profile.freeze_index:
            candidates.append(i)
    for i in candidates:
        if profile.output_bytes(i) * batch < budget:
            return i
    return profile.freeze_index


def test_calibration_points(alexnet):
    d = choose_split_index(alexnet, 3000, GBPS)
    assert (d.split_index, d.bytes_per_iteration) == (13, 105_600_000)
    d = choose_split_index(alexnet, 4000, GBPS)
    assert (d.split_index, d.bytes_per_iteration) == (16, 62_600_000)


def test_bandwidth_table(alexnet):
    got = [choose_split_index(alexnet, 8000, g * GBPS).split_index
           for g in (0.05, 0.1, 0.5, 1, 2, 3, 5, 10, 12)]
    assert got == [17, 17, 17, 17, 16, 5, 5, 5, 5]


def test_no_candidates_falls_back_to_freeze():
    p = make_profile([200, 300, 150, 400], input_bytes=100, freeze=3)
    d = choose_split_index(p, 10, 1e12)
    assert d.candidates == ()
    assert d.split_index == 3 and d.used_fallback


def test_equality_is_rejected():
    # 50 * 2 == 100 exactly: strict comparison fails, fall back to freeze
    p = make_profile([50, 40], input_bytes=100, freeze=2)
    assert choose_split_index(p, 2, 100.0).split_index == 2
    assert choose_split_index(p, 2, 100.1).split_index == 1


@pytest.mark.parametrize("batch", [0, -3, 1.5, True])
def test_bad_batch(alexnet, batch):
    with pytest.raises(InvalidArgumentError):
        choose_split_index(alexnet, batch, GBPS)


def test_bad_bandwidth(alexnet):
    with pytest.raises(InvalidArgumentError):
        choose_split_index(alexnet, 10, 0)


def test_empty_profile():
    p = ModelProfile(name="e", input_bytes_per_sample=5, layers=(), freeze_index=1)
    with pytest.raises(InvalidProfileError):
        choose_split_index(p, 1, 1.0)


@given(st.lists(st.integers(1, 60), min_size=4, max_size=4), st.integers(1, 4),
       st.integers(1, 50), st.floats(1, 5000))
def test_toy_matches_oracle(outputs, freeze, batch, bw):
    p = make_profile(outputs, input_bytes=40, freeze=freeze)
    assert choose_split_index(p, batch, bw).split_index == oracle_split(p, batch, bw)


@given(profiles(), st.integers(1, 10_000), st.floats(1e3, 1e10), st.floats(1e3, 1e10))
def test_bandwidth_monotone(p, batch, bw1, bw2):
    lo, hi = sorted((bw1, bw2))
    assert choose_split_index(p, batch, hi).split_index <= choose_split_index(p, batch, lo).split_index


@given(profiles(), st.integers(1, 10_000), st.integers(1, 10_000), st.floats(1e3, 1e10))
def test_batch_monotone(p, b1, b2, bw):
    lo, hi = sorted((b1, b2))
    assert choose_split_index(p, lo, bw).split_index <= choose_split_index(p, hi, bw).split_index


@given(profiles(), st.integers(1, 10_000), st.floats(1e3, 1e10))
def test_decision_invariants(p, batch, bw):
    d = choose_split_index(p, batch, bw)
    assert 1 <= d.split_index <= p.freeze_index
    assert d.split_index in d.candidates or d.split_index == p.freeze_index
    assert d.bytes_per_iteration < bw or d.split_index == p.freeze_index
    assert d.bytes_per_iteration == p.output_bytes(d.split_index) * batch
    assert all(p.output_bytes(c) < p.input_bytes_per_sample for c in candidate_layers(p))
    assert list(d.candidates) == sorted(d.candidates)
