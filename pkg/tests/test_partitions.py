import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partition_modes import (canonicalize, conditional_entropy,
                             contingency_table, entropy, log2_omega,
                             modified_conditional_entropy, Partition,
                             PartitionSet)

from conftest import random_partition

label_lists = st.lists(st.integers(min_value=-5, max_value=9),
                       min_size=1, max_size=40)


def test_canonicalize_examples():
    p = canonicalize([7, 7, 3, 3])
    assert list(p.labels) == [0, 0, 1, 1]
    assert list(p.counts) == [2, 2]
    p = canonicalize([5, 5, 5])
    assert list(p.labels) == [0, 0, 0]
    assert list(p.counts) == [3]
    p = canonicalize([2, 9, 2, 9, 9])
    assert list(p.labels) == [0, 1, 0, 1, 1]
    assert list(p.counts) == [2, 3]


def test_canonicalize_empty_input():
    with pytest.raises(ValueError, match="empty partition"):
        canonicalize([])


@given(label_lists)
def test_canonicalize_preserves_structure(raw):
    p = canonicalize(raw)
    arr = np.asarray(raw)
    # same nodes grouped together iff they shared a raw label
    for g in range(p.n):
        idx = np.flatnonzero(p.labels == g)
        assert len(set(arr[idx])) == 1
    assert p.counts.sum() == len(raw)
    assert p.n == len(set(raw))
    # idempotent
    assert canonicalize(p.labels) == p


def test_partition_equality_and_hash():
    a = canonicalize([0, 0, 1, 1])
    b = canonicalize([5, 5, 2, 2])
    c = canonicalize([0, 1, 0, 1])
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_partition_set_validation():
    a = canonicalize([0, 0, 1])
    b = canonicalize([0, 1])
    with pytest.raises(ValueError, match="incompatible"):
        PartitionSet(partitions=[a, b], N=3)
    with pytest.raises(ValueError, match="empty"):
        PartitionSet.from_partitions([])
    pset = PartitionSet.from_partitions([a, a])
    assert pset.S == 2 and pset.N == 3
    assert pset.matrix().shape == (2, 3)


def test_entropy_examples():
    assert entropy(canonicalize(np.repeat(np.arange(4), 25))) == pytest.approx(2.0)
    assert entropy(canonicalize(np.zeros(100))) == 0.0
    labels = np.concatenate([np.zeros(50), np.ones(25), np.full(25, 2)])
    assert entropy(canonicalize(labels)) == pytest.approx(1.5)


@given(label_lists)
def test_entropy_bounds(raw):
    p = canonicalize(raw)
    h = entropy(p)
    assert -1e-12 <= h <= math.log2(p.n) + 1e-12
    assert (h == 0) == (p.n == 1)
    if p.n > 1 and len(set(p.counts)) == 1:
        assert h == pytest.approx(math.log2(p.n))


def test_contingency_table_examples():
    m = canonicalize([0, 0, 1, 1])
    assert np.array_equal(contingency_table(m, m).t, [[2, 0], [0, 2]])
    p = canonicalize([0, 1, 0, 1])
    assert np.array_equal(contingency_table(m, p).t, [[1, 1], [1, 1]])
    single = canonicalize([0, 0, 0, 0])
    assert np.array_equal(contingency_table(single, m).t, [[2, 2]])


def test_contingency_table_margins():
    rng = np.random.default_rng(3)
    for _ in range(50):
        N = int(rng.integers(2, 60))
        m = random_partition(N, 5, rng)
        p = random_partition(N, 5, rng)
        tab = contingency_table(m, p)
        assert np.array_equal(tab.row_sums, m.counts)
        assert np.array_equal(tab.col_sums, p.counts)
        assert tab.t.sum() == N


def test_contingency_table_mismatched_N():
    with pytest.raises(ValueError, match="incompatible"):
        contingency_table(canonicalize([0, 1]), canonicalize([0, 1, 2]))


def test_conditional_entropy_examples():
    m = canonicalize([0, 0, 1, 1])
    assert conditional_entropy(m, m) == 0.0
    assert conditional_entropy(canonicalize([0, 0, 0, 0]), m) == 0.0
    assert conditional_entropy(canonicalize([0, 1, 0, 1]), m) == pytest.approx(1.0)


def test_conditional_entropy_zero_iff_function_of_mode():
    rng = np.random.default_rng(4)
    for _ in range(100):
        N = int(rng.integers(5, 200))
        mode = random_partition(N, 6, rng)
        # p's label at each node is a function of mode's label there
        mapping = rng.integers(0, 4, size=mode.n)
        p = canonicalize(mapping[mode.labels])
        assert conditional_entropy(p, mode) == pytest.approx(0.0, abs=1e-12)


def test_conditional_entropy_nonnegative_random_pairs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        N = int(rng.integers(2, 200))
        p = random_partition(N, 8, rng)
        m = random_partition(N, 8, rng)
        assert conditional_entropy(p, m) >= 0.0


def test_modified_conditional_entropy_examples():
    half = canonicalize(np.repeat([0, 1], 50))
    assert modified_conditional_entropy(half, half) == \
        pytest.approx(math.log2(51) / 100)
    whole = canonicalize(np.zeros(100))
    assert modified_conditional_entropy(whole, whole) == 0.0
    m = canonicalize([0, 0, 1, 1])
    p = canonicalize([0, 1, 0, 1])
    assert modified_conditional_entropy(p, m) == \
        pytest.approx(1.0 + math.log2(3) / 4)


def test_modified_dominates_conditional():
    rng = np.random.default_rng(6)
    for _ in range(50):
        N = int(rng.integers(2, 120))
        p = random_partition(N, 6, rng)
        m = random_partition(N, 6, rng)
        assert modified_conditional_entropy(p, m) >= conditional_entropy(p, m) - 1e-12


def test_self_modified_entropy_matches_omega():
    rng = np.random.default_rng(7)
    for _ in range(50):
        N = int(rng.integers(2, 200))
        p = random_partition(N, 6, rng)
        expect = log2_omega(p.counts, p.counts) / N
        assert modified_conditional_entropy(p, p) == pytest.approx(expect, abs=1e-12)


def test_relabel_invariance():
    rng = np.random.default_rng(8)
    for _ in range(30):
        N = int(rng.integers(3, 80))
        p = random_partition(N, 5, rng)
        m = random_partition(N, 5, rng)
        # shuffle community identities, then recanonicalize
        perm = rng.permutation(p.n)
        p2 = canonicalize(perm[p.labels])
        assert entropy(p2) == pytest.approx(entropy(p))
        assert conditional_entropy(p2, m) == pytest.approx(conditional_entropy(p, m))
        assert modified_conditional_entropy(p2, m) == \
            pytest.approx(modified_conditional_entropy(p, m))
