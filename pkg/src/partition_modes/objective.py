"""Description-length objective over clusterings of a partition ensemble.

Assembles the per-sample penalized objective (mode entropies, cluster
label entropy, modified conditional entropies, and the per-cluster
penalty) plus the exact four-part encoding length used for reporting
and cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .cache import PairCache
from .partitions import PartitionSet, contingency_table
from .tables import DEFAULT_MAX_COST, log2_omega

_LN2 = math.log(2.0)


@dataclass
class Clustering:
    """Assignment of the S ensemble partitions to K clusters, with one
    member partition of each cluster designated as its mode."""

    assignment: np.ndarray   # length S, values in [0, K)
    mode_index: list[int]    # length K, index into the PartitionSet
    K: int

    def validate(self, pset: PartitionSet) -> None:
        S = pset.S
        if self.assignment.shape != (S,):
            raise ValueError("assignment length does not match ensemble size")
        sizes = np.bincount(self.assignment, minlength=self.K)
        if len(self.mode_index) != self.K or np.any(sizes == 0):
            raise ValueError("every cluster must be non-empty with one mode")
        if self.assignment.min() < 0 or self.assignment.max() >= self.K:
            raise ValueError("cluster id out of range")
        for k, m in enumerate(self.mode_index):
            if self.assignment[m] != k:
                raise ValueError("mode %d is not a member of cluster %d" % (m, k))

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.K)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == k)


@dataclass
class ObjectiveBreakdown:
    mode_entropy_term: float
    cluster_label_term: float
    conditional_term: float
    penalty_term: float
    total: float
    weights: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "mode_entropy": self.mode_entropy_term,
            "cluster_labels": self.cluster_label_term,
            "conditional": self.conditional_term,
            "penalty": self.penalty_term,
            "total": self.total,
            "weights": [float(w) for w in self.weights],
        }


def cluster_label_entropy(cluster_sizes, S: int) -> float:
    """Entropy of the cluster-membership labels in bits: -sum (c/S) log2 (c/S)."""
    sizes = np.asarray(cluster_sizes, dtype=np.float64)
    if sizes.sum() != S or np.any(sizes < 1):
        raise ValueError("cluster sizes must be positive and sum to S")
    f = sizes / S
    return float(-np.sum(f * np.log2(f)))


def description_length(pset: PartitionSet, clustering: Clustering,
                       lam: float = 1.0,
                       cache: PairCache | None = None) -> ObjectiveBreakdown:
    """Penalized per-sample description length of the ensemble under the
    given clustering, broken into its four terms."""
    clustering.validate(pset)
    if lam < 0:
        raise ValueError("penalty weight must be non-negative")
    if cache is None:
        cache = PairCache(pset)
    N, S = pset.N, pset.S
    sizes = clustering.cluster_sizes()

    mode_term = N / S * sum(cache.entropy(m) for m in clustering.mode_index)
    label_term = cluster_label_entropy(sizes, S)
    cond = 0.0
    for k, m in enumerate(clustering.mode_index):
        cond += cache.hmod_given_mode(clustering.members(k), m).sum()
    cond_term = N / S * cond
    penalty = lam * clustering.K
    return ObjectiveBreakdown(
        mode_entropy_term=mode_term,
        cluster_label_term=label_term,
        conditional_term=cond_term,
        penalty_term=penalty,
        total=mode_term + label_term + cond_term + penalty,
        weights=sizes / S,
    )


def _log2_factorial(x) -> np.ndarray:
    return gammaln(np.asarray(x, dtype=np.float64) + 1.0) / _LN2


def _log2_binom(n: int, k: int) -> float:
    return float(_log2_factorial(n) - _log2_factorial(k) - _log2_factorial(n - k))


def full_description_length(pset: PartitionSet, clustering: Clustering,
                            max_cost: float = DEFAULT_MAX_COST) -> dict:
    """Exact (non-Stirling) encoding length in bits, split into its four
    stages: community-size vectors, mode label vectors, cluster
    assignments, and per-partition contingency tables plus labels.

    The mode's own transmission cost is included in L4 (the self term
    changes the total only negligibly and simplifies bookkeeping).
    L1 does not depend on the clustering and is reported but never used
    in optimization comparisons.
    """
    clustering.validate(pset)
    N, S, K = pset.N, pset.S, clustering.K
    sizes = clustering.cluster_sizes()

    L1 = float(sum(_log2_binom(N - 1, p.n - 1) for p in pset.partitions))
    L2 = float(sum(_log2_factorial(N) - _log2_factorial(pset.partitions[m].counts).sum()
                   for m in clustering.mode_index))
    L3 = _log2_binom(S - 1, K - 1) + float(_log2_factorial(S)
                                           - _log2_factorial(sizes).sum())
    L4 = 0.0
    for k, m in enumerate(clustering.mode_index):
        mode = pset.partitions[m]
        for p_idx in clustering.members(k):
            p = pset.partitions[p_idx]
            t = contingency_table(mode, p).t
            L4 += float(_log2_factorial(mode.counts).sum() - _log2_factorial(t).sum())
            L4 += log2_omega(mode.counts, p.counts, max_cost=max_cost)
    return {"L1": L1, "L2": L2, "L3": L3, "L4": L4,
            "total": L1 + L2 + L3 + L4}
