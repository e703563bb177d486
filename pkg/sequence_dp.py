#!/usr/bin/env python3
"""
Longest increasing subsequence and sparse longest common subsequence

Both run in rounds on a static tournament tree: round r removes every live
element that is a prefix-minimum record, and those are exactly the elements
whose LIS ending there has length r.
"""

import logging
import time
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from dp_types import INFINITY, InternalInvariantError, RoundStats
from fork_join import get_pool

logger = logging.getLogger(__name__)

# subtrees with more leaves than this are descended in parallel
FORK_LEAVES = 1024


class TournamentTree:
    """
    Static binary min-tree over integer keys

    Leaves live at size + index; removed leaves hold INFINITY, so every
    internal node is the minimum over its live leaves.
    """

    def __init__(self, keys: Sequence[int]):
        keys = np.asarray(keys, dtype=np.int64)
        if keys.ndim != 1:
            raise ValueError("tournament tree keys must be one-dimensional")
        self.length = len(keys)
        self.size = 1
        while self.size < max(1, self.length):
            self.size *= 2
        self.tree = np.full(2 * self.size, INFINITY, dtype=np.int64)
        self.tree[self.size:self.size + self.length] = keys
        level = self.size
        while level > 1:
            parents = np.arange(level // 2, level)
            self.tree[parents] = np.minimum(self.tree[2 * parents], self.tree[2 * parents + 1])
            level //= 2

    @property
    def live(self) -> int:
        return int(np.count_nonzero(self.tree[self.size:self.size + self.length] < INFINITY))

    def extract_records(self) -> np.ndarray:
        """Remove and return, in index order, every live leaf <= all earlier live leaves"""
        tree, size = self.tree, self.size
        pool = get_pool()

        def descend(node: int, prefix_min: int, leaves: int) -> List[int]:
            value = tree[node]
            if value >= INFINITY or value > prefix_min:
                return []
            if node >= size:
                return [node - size]
            left, right = 2 * node, 2 * node + 1
            right_min = min(prefix_min, int(tree[left]))
            if leaves > FORK_LEAVES:
                a, b = pool.par_do(lambda: descend(left, prefix_min, leaves // 2),
                                   lambda: descend(right, right_min, leaves // 2))
                return a + b
            return descend(left, prefix_min, leaves // 2) + descend(right, right_min, leaves // 2)

        records = np.asarray(descend(1, INFINITY, size), dtype=np.int64)
        self._remove(records)
        return records

    def _remove(self, indices: np.ndarray):
        if len(indices) == 0:
            return
        nodes = indices + self.size
        self.tree[nodes] = INFINITY
        while nodes[0] > 1:
            nodes = np.unique(nodes // 2)
            self.tree[nodes] = np.minimum(self.tree[2 * nodes], self.tree[2 * nodes + 1])

    def audit(self) -> bool:
        """Every internal node equals the min of its children"""
        internal = np.arange(1, self.size)
        expected = np.minimum(self.tree[2 * internal], self.tree[2 * internal + 1])
        if not np.array_equal(self.tree[internal], expected):
            raise InternalInvariantError("tournament tree node differs from the min of its children")
        if np.any(self.tree[self.size + self.length:] < INFINITY):
            raise InternalInvariantError("padding leaf became live")
        return True


def extract_prefix_min_records(tree: TournamentTree) -> np.ndarray:
    return tree.extract_records()


@dataclass
class LisResult:
    """LIS length and the LIS-ending-here value of every element"""
    k: int
    round_of: np.ndarray
    stats: Optional[RoundStats] = None


@dataclass
class LcsResult:
    """LCS length with the match indices finalized in each round"""
    k: int
    cordon_trace: List[np.ndarray] = field(default_factory=list)
    stats: Optional[RoundStats] = None


def _ranks(values: Sequence) -> np.ndarray:
    if len(values) == 0:
        return np.zeros(0, dtype=np.int64)
    _, inverse = np.unique(np.asarray(list(values)), return_inverse=True)
    return inverse.astype(np.int64).reshape(-1)


def _record_rounds(keys: np.ndarray, label: str):
    tree = TournamentTree(keys)
    stats = RoundStats()
    trace: List[np.ndarray] = []
    remaining = len(keys)
    while remaining:
        started = time.perf_counter()
        records = tree.extract_records()
        if len(records) == 0:
            raise InternalInvariantError(f"{label}: round {stats.rounds + 1} found no records")
        remaining -= len(records)
        stats.record_round(len(records), len(records), time.perf_counter() - started)
        trace.append(records)
        logger.debug("%s round %d: %d records, %d left", label, stats.rounds, len(records), remaining)
    return trace, stats


def lis(A: Sequence) -> LisResult:
    """
    Strictly increasing LIS by prefix-min rounds

    Each round takes the elements that are <= every earlier live element; an
    equal earlier value never extends a strict subsequence.
    """
    trace, stats = _record_rounds(_ranks(A), "lis")
    round_of = np.zeros(len(A), dtype=np.int64)
    for r, records in enumerate(trace, start=1):
        round_of[records] = r
    return LisResult(k=len(trace), round_of=round_of, stats=stats)


def lis_seq(A: Sequence) -> LisResult:
    """Binary-search LIS in O(n log k)"""
    tails: List = []
    round_of = np.zeros(len(A), dtype=np.int64)
    for idx, value in enumerate(A):
        pos = bisect_left(tails, value)
        if pos == len(tails):
            tails.append(value)
        else:
            tails[pos] = value
        round_of[idx] = pos + 1
    return LisResult(k=len(tails), round_of=round_of, stats=None)


def reconstruct_lis(A: Sequence, round_of: Sequence[int]) -> List[int]:
    """Indices of one strictly increasing subsequence of maximum length"""
    k = int(max(round_of, default=0))
    picked: List[int] = []
    want, bound = k, None
    for idx in range(len(A) - 1, -1, -1):
        if want == 0:
            break
        if round_of[idx] == want and (bound is None or A[idx] < bound):
            picked.append(idx)
            bound = A[idx]
            want -= 1
    return picked[::-1]


@dataclass
class MatchList:
    """
    Pairs (i, j), 1-indexed, with A[i] == B[j], sorted by i ascending then
    j descending
    """
    pairs: np.ndarray

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def j_sequence(self) -> np.ndarray:
        return self.pairs[:, 1] if len(self.pairs) else np.zeros(0, dtype=np.int64)

    def to_list(self) -> List[tuple]:
        return [tuple(p) for p in self.pairs.tolist()]


def build_match_list(A: Sequence, B: Sequence) -> MatchList:
    """All matching pairs, bucketed by symbol"""
    positions: Dict = defaultdict(list)
    for j in range(len(B), 0, -1):
        positions[B[j - 1]].append(j)
    pairs = [(i, j) for i in range(1, len(A) + 1) for j in positions.get(A[i - 1], ())]
    return MatchList(pairs=np.asarray(pairs, dtype=np.int64).reshape(-1, 2))


def sparse_lcs(M: MatchList) -> LcsResult:
    """
    LCS length in one round per output symbol

    A match joins the cordon when its column is <= the prefix-min column of
    the live matches before it in (i asc, j desc) order.
    """
    trace, stats = _record_rounds(M.j_sequence.astype(np.int64), "lcs")
    return LcsResult(k=len(trace), cordon_trace=trace, stats=stats)


def sparse_lcs_seq(M: MatchList) -> LcsResult:
    """Threshold-array LCS over the match list (strict increase in j)"""
    thresholds: List[int] = []
    for j in M.j_sequence.tolist():
        pos = bisect_left(thresholds, j)
        if pos == len(thresholds):
            thresholds.append(j)
        else:
            thresholds[pos] = j
    return LcsResult(k=len(thresholds), stats=None)


def lcs(A: Sequence, B: Sequence, match_list: Optional[MatchList] = None) -> LcsResult:
    """Parallel sparse LCS of two sequences"""
    return sparse_lcs(match_list if match_list is not None else build_match_list(A, B))
