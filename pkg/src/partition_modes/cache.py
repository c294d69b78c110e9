"""Shared memoization of entropies and modified conditional entropies.

Values are keyed by partition content, so duplicated partitions in an
ensemble cost nothing extra.  Each partition index is mapped once to a
small integer content id; lookups are then dictionary hits on id pairs
and numpy gathers.  Batch methods compute missing pairs with vectorized
contingency tables.  Entries are deterministic, so concurrent
(duplicated) computation can never produce inconsistent values.
"""

from __future__ import annotations

import numpy as np

from .partitions import PartitionSet, entropy
from .tables import DEFAULT_MAX_COST, log2_omega


class PairCache:
    """Memoizes H(p) and H_mod(q | m) for partitions of one PartitionSet."""

    def __init__(self, pset: PartitionSet, max_cost: float = DEFAULT_MAX_COST):
        self.pset = pset
        self.max_cost = max_cost
        key_to_cid: dict[bytes, int] = {}
        cid = np.empty(pset.S, dtype=np.int64)
        reps: list[int] = []
        for i in range(pset.S):
            key = pset.key(i)
            c = key_to_cid.get(key)
            if c is None:
                c = len(reps)
                key_to_cid[key] = c
                reps.append(i)
            cid[i] = c
        self.cid = cid                      # content id per partition index
        self.rep = np.array(reps)           # lowest partition index per id
        self.n_cid = len(reps)
        self._ncomm = np.array([pset.partitions[r].n for r in reps])
        self._entropy = np.full(len(reps), np.nan)
        # H_mod values live in dense per-content rows so batch lookups
        # are contiguous numpy gathers: one dict keyed by the fixed mode
        # content (row over sample contents) and one keyed by the fixed
        # sample content (row over mode contents).  Rows are filled
        # lazily; unset cells are NaN.
        self._by_mode: dict[int, np.ndarray] = {}
        self._by_sample: dict[int, np.ndarray] = {}
        # many contents share one community-size vector, and the table
        # count depends only on the margins: give each content a margin
        # signature so omega is computed once per distinct margin pair
        sig_to_id: dict[tuple, int] = {}
        margin = np.empty(len(reps), dtype=np.int64)
        self._margins: list[tuple] = []
        for c, r in enumerate(reps):
            sig = tuple(sorted(int(v) for v in pset.partitions[r].counts))
            s = sig_to_id.get(sig)
            if s is None:
                s = len(self._margins)
                sig_to_id[sig] = s
                self._margins.append(sig)
            margin[c] = s
        self._margin_id = margin
        n_sig = len(self._margins)
        self._omega = np.full((n_sig, n_sig), np.nan)

    def _omega_block(self, m_indices, q_indices) -> np.ndarray:
        """log2 table counts for index pairs, deduplicated by margin
        signature."""
        ms = self._margin_id[self.cid[np.asarray(m_indices, dtype=np.int64)]]
        qs = self._margin_id[self.cid[np.asarray(q_indices, dtype=np.int64)]]
        vals = self._omega[ms, qs]
        missing = np.flatnonzero(np.isnan(vals))
        if missing.size:
            for a, b in set(zip(ms[missing], qs[missing])):
                self._omega[a, b] = log2_omega(self._margins[a],
                                               self._margins[b],
                                               max_cost=self.max_cost)
            vals = self._omega[ms, qs]
        return vals

    # -- entropies ---------------------------------------------------------

    def entropy(self, i: int) -> float:
        c = int(self.cid[i])
        val = self._entropy[c]
        if np.isnan(val):
            val = entropy(self.pset.partitions[i])
            self._entropy[c] = val
        return float(val)

    def entropies(self, indices) -> np.ndarray:
        cs = self.cid[np.asarray(indices, dtype=np.int64)]
        for c in np.unique(cs[np.isnan(self._entropy[cs])]):
            self._entropy[c] = entropy(self.pset.partitions[self.rep[c]])
        return self._entropy[cs].copy()

    # -- modified conditional entropies ------------------------------------

    def hmod(self, q_idx: int, m_idx: int) -> float:
        """H_mod(q | m): cost of transmitting partition q given mode m."""
        return float(self.hmod_given_mode([q_idx], m_idx)[0])

    def hmod_given_mode(self, q_indices, m_idx: int) -> np.ndarray:
        """H_mod(q | m) for many q against one fixed mode m."""
        m_cid = int(self.cid[m_idx])
        q_cids = self.cid[np.asarray(q_indices, dtype=np.int64)]
        row = self._by_mode.get(m_cid)
        if row is None:
            row = np.full(self.n_cid, np.nan)
            self._by_mode[m_cid] = row
        vals = row[q_cids]
        unset = np.isnan(vals)
        if unset.any():
            missing = np.unique(q_cids[unset])
            row[missing] = self._compute_block([m_idx] * len(missing),
                                               list(self.rep[missing]),
                                               fixed="mode")
            vals = row[q_cids]
        return vals

    def hmod_against_modes(self, q_idx: int, m_indices) -> np.ndarray:
        """H_mod(q | m) for one fixed q against many candidate modes m."""
        q_cid = int(self.cid[q_idx])
        m_cids = self.cid[np.asarray(m_indices, dtype=np.int64)]
        row = self._by_sample.get(q_cid)
        if row is None:
            row = np.full(self.n_cid, np.nan)
            self._by_sample[q_cid] = row
        vals = row[m_cids]
        unset = np.isnan(vals)
        if unset.any():
            missing = np.unique(m_cids[unset])
            row[missing] = self._compute_block(list(self.rep[missing]),
                                               [q_idx] * len(missing),
                                               fixed="q")
            vals = row[m_cids]
        return vals

    # -- internals ---------------------------------------------------------

    def _compute_block(self, m_indices, q_indices, fixed: str) -> np.ndarray:
        """Vectorized H_mod for pairs where one side is a single fixed
        partition (``fixed`` names which side varies' counterpart)."""
        P = self.pset
        N = P.N
        mat = P.matrix()
        parts = P.partitions
        if fixed == "mode":
            m = parts[m_indices[0]]
            mode_lab = m.labels[None, :]              # (1, N)
            samp_lab = mat[q_indices]                 # (c, N)
            n_mode = m.n
            samp_width = int(self._ncomm[self.cid[q_indices]].max())
        else:
            q = parts[q_indices[0]]
            samp_lab = q.labels[None, :]
            mode_lab = mat[m_indices]
            n_mode = int(self._ncomm[self.cid[m_indices]].max())
            samp_width = q.n
        c = max(len(m_indices), len(q_indices))
        codes = mode_lab * samp_width + samp_lab      # (c, N)
        width = n_mode * samp_width
        offsets = (np.arange(c) * width)[:, None]
        t = np.bincount((codes + offsets).ravel(), minlength=c * width)
        t = t.reshape(c, n_mode, samp_width)
        a = t.sum(axis=2, keepdims=True)              # mode community sizes
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(t > 0, t * np.log2(t / a), 0.0)
        hcond = np.maximum(0.0, -term.sum(axis=(1, 2)) / N)
        return hcond + self._omega_block(m_indices, q_indices) / N
