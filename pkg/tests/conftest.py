"""Shared oracles and generators for the test suite."""

import numpy as np

from partition_modes import canonicalize


def brute_force_table_count(row_sums, col_sums):
    """Count non-negative integer matrices with the given margins by
    straight enumeration, cell by cell.  Independent of the library's
    memoized, symmetry-reduced counter."""
    rows = [int(v) for v in row_sums if v > 0]
    cols = [int(v) for v in col_sums if v > 0]
    assert sum(rows) == sum(cols)
    if len(rows) <= 1 or len(cols) <= 1:
        return 1
    k = len(cols)

    def fill_row(i, remaining_cols):
        if i == len(rows) - 1:
            # last row forced; feasible iff every remaining column fits
            return 1
        total = 0

        def cells(j, rem, caps):
            nonlocal total
            if j == k - 1:
                if rem <= caps[j]:
                    nxt = list(caps)
                    nxt[j] -= rem
                    total += fill_row(i + 1, tuple(nxt))
                return
            hi = min(caps[j], rem)
            for t in range(hi + 1):
                nxt = list(caps)
                nxt[j] -= t
                cells(j + 1, rem - t, nxt)

        cells(0, rows[i], remaining_cols)
        return total

    return fill_row(0, tuple(cols))


def margin_vectors(N, max_parts):
    """All unordered positive-integer compositions of N with at most
    max_parts parts (as sorted tuples)."""
    out = []

    def rec(remaining, max_val, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        for v in range(min(remaining, max_val), 0, -1):
            rec(remaining - v, v, prefix + [v])

    rec(N, N, [])
    return out


def random_partition(N, max_groups, rng):
    labels = rng.integers(0, max_groups, size=N)
    return canonicalize(labels)
