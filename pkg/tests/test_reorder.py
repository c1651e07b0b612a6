import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndsplit.errors import IncompleteIterationError
from ndsplit.reorder import assemble, reorder_results


def test_reorders_by_ordinal():
    assert reorder_results([(2, "c"), (0, "a"), (1, "b")]) == ["a", "b", "c"]


def test_duplicate_rejected():
    with pytest.raises(IncompleteIterationError):
        reorder_results([(0, "a"), (0, "a")])


def test_missing_rejected():
    with pytest.raises(IncompleteIterationError):
        reorder_results([(0, "a"), (2, "c")])
    with pytest.raises(IncompleteIterationError):
        reorder_results([(0, "a")], expected_count=2)


def test_extra_rejected():
    with pytest.raises(IncompleteIterationError):
        reorder_results([(0, "a"), (1, "b")], expected_count=1)


@pytest.mark.parametrize("n", range(1, 6))
def test_every_permutation_assembles_identically(n):
    parts = [bytes([i]) * (i + 3) for i in range(n)]
    in_order = b"".join(parts)
    for perm in itertools.permutations(range(n)):
        assert assemble([(i, parts[i]) for i in perm], expected_count=n) == in_order


@given(st.lists(st.binary(max_size=16), min_size=1, max_size=12), st.randoms())
def test_random_permutations(parts, rnd):
    pairs = list(enumerate(parts))
    rnd.shuffle(pairs)
    assert assemble(pairs) == b"".join(parts)
