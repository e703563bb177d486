#!/usr/bin/env python3
"""
k-GLWS and optimal binary search trees

k_glws fixes the number of clusters: D[i,k'] = min_{j<i} D[j,k'-1] + w(j,i).
Column k' is one frontier computed from column k'-1 by monotone minima.

obst fills D[i,j] (cost of keys i..j) span by span with Knuth's root range
restriction; each span is one frontier.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from cost_models import CostModel, Shape
from decision_intervals import monotone_minima
from dp_types import (NO_DECISION, DpValue, InvalidInputError, RoundStats, new_table,
                      sat_add_array)
from fork_join import get_pool

logger = logging.getLogger(__name__)


@dataclass
class KGlwsTable:
    """D[i, k'] and its argmin decisions for 0 <= i <= n, 0 <= k' <= k"""
    D: np.ndarray
    best: np.ndarray


@dataclass
class KGlwsResult:
    cost: DpValue
    table: Optional[KGlwsTable]
    rounds: int
    stats: RoundStats


def k_glws(model: CostModel, k: int, n: Optional[int] = None, rolling: bool = False) -> KGlwsResult:
    """
    Minimum cost of splitting states 1..n into exactly k segments

    Args:
        model: convex cost model
        k: number of segments
        n: number of states (defaults to model.n)
        rolling: keep only two columns; the returned table is None
    """
    n = model.n if n is None else n
    if n < 0 or n > model.n:
        raise InvalidInputError(f"problem size {n} outside cost model range [0, {model.n}]")
    if k < 1:
        raise InvalidInputError(f"cluster count must be positive, got {k}")
    if model.shape is not Shape.CONVEX:
        raise InvalidInputError("k-GLWS needs a convex cost model")
    kind = model.kind
    stats = RoundStats()
    if k > n:
        return KGlwsResult(cost=kind.infinity, table=None, rounds=0, stats=stats)

    prev = new_table(n + 1, kind)
    prev[0] = 0
    table = None
    if not rolling:
        table = KGlwsTable(D=new_table((n + 1, k + 1), kind),
                           best=np.full((n + 1, k + 1), NO_DECISION, dtype=np.int64))
        table.D[0, 0] = 0

    def eval_row(r: int, cols: np.ndarray) -> np.ndarray:
        i = r + 1
        values = np.full(len(cols), kind.infinity, dtype=kind.dtype)
        valid = cols[cols < i]
        if len(valid):
            values[:len(valid)] = sat_add_array(prev[valid], model.eval_w_many(valid, i), kind)
        return values

    for layer in range(1, k + 1):
        started = time.perf_counter()
        argmins, minima = monotone_minima(n, n, None, Shape.CONVEX, kind, eval_row=eval_row)
        current = new_table(n + 1, kind)
        current[1:] = minima
        if table is not None:
            table.D[:, layer] = current
            finite = minima < kind.infinity
            table.best[1:, layer] = np.where(finite, argmins, NO_DECISION)
        prev = current
        stats.record_round(n, n, time.perf_counter() - started)
        logger.debug("k-glws layer %d done", layer)

    return KGlwsResult(cost=prev[n].item(), table=table, rounds=stats.rounds, stats=stats)


@dataclass
class ObstTable:
    """
    D[i, j] is the cost of keys i..j (1-indexed), D[i, i-1] = 0; best holds
    the root of each span and wsum the weight prefix sums
    """
    D: np.ndarray
    best: np.ndarray
    wsum: np.ndarray
    gap_weights: bool = False

    @property
    def n(self) -> int:
        return self.D.shape[1] - 1

    def weight(self, i: int, j: int) -> DpValue:
        if self.gap_weights:
            return (self.wsum[2 * j + 1] - self.wsum[2 * (i - 1)]).item()
        return (self.wsum[j] - self.wsum[i - 1]).item()

    def knuth_monotone(self) -> bool:
        """best[i][j-1] <= best[i][j] <= best[i+1][j] over the whole table"""
        n = self.n
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if not self.best[i, j - 1] <= self.best[i, j] <= self.best[i + 1, j]:
                    return False
        return True


@dataclass
class ObstResult:
    cost: DpValue
    table: ObstTable
    rounds: int
    stats: Optional[RoundStats] = None


def _weight_prefix(weights: Sequence[DpValue], gap_weights: bool):
    arr = np.asarray(weights)
    if arr.ndim != 1:
        raise InvalidInputError("weights must be one-dimensional")
    if len(arr) and np.any(arr < 0):
        raise InvalidInputError("weights must be non-negative")
    if gap_weights:
        if len(arr) % 2 != 1:
            raise InvalidInputError(f"gap weights need 2n+1 entries, got {len(arr)}")
        n = (len(arr) - 1) // 2
    else:
        n = len(arr)
    dtype = np.float64 if arr.dtype.kind == 'f' else np.int64
    return n, np.concatenate([[0], np.cumsum(arr)]).astype(dtype)


def obst(weights: Sequence[DpValue], parallel: bool = False, gap_weights: bool = False) -> ObstResult:
    """
    Optimal binary search tree cost with Knuth's root range restriction

    Args:
        weights: key frequencies p_1..p_n, or with gap_weights the 2n+1
            interleaved weights a_0..a_2n where W(i,j) = a_{2(i-1)} + ... + a_{2j}
        parallel: evaluate every span as one parallel frontier
    """
    n, wsum = _weight_prefix(weights, gap_weights)
    D = np.zeros((n + 2, n + 1), dtype=wsum.dtype)
    best = np.full((n + 2, n + 1), NO_DECISION, dtype=np.int64)
    table = ObstTable(D=D, best=best, wsum=wsum, gap_weights=gap_weights)
    if n == 0:
        return ObstResult(cost=0, table=table, rounds=0)

    for i in range(1, n + 1):
        D[i, i] = table.weight(i, i)
        best[i, i] = i

    def solve_span(i: int, span: int):
        j = i + span
        lo, hi = int(best[i, j - 1]), int(best[i + 1, j])
        roots = np.arange(lo, hi + 1)
        costs = D[i, roots - 1] + D[roots + 1, j]
        pick = int(np.argmin(costs))
        return costs[pick] + table.weight(i, j), lo + pick

    pool = get_pool()
    stats = RoundStats() if parallel else None
    for span in range(1, n):
        started = time.perf_counter()
        starts = range(1, n - span + 1)
        if parallel:
            results = pool.parallel_map(lambda i: solve_span(i, span), starts, grain=32)
        else:
            results = [solve_span(i, span) for i in starts]
        for i, (value, root) in zip(starts, results):
            D[i, i + span] = value
            best[i, i + span] = root
        if stats is not None:
            stats.record_round(len(starts), len(starts), time.perf_counter() - started)

    return ObstResult(cost=D[1, n].item(), table=table, rounds=n - 1, stats=stats)


def obst_tree(table: ObstTable, lo: int = 1, hi: Optional[int] = None,
              keys: Optional[Sequence] = None) -> Optional[Dict]:
    """Nested {'key', 'left', 'right'} tree rooted at best[lo][hi]"""
    hi = table.n if hi is None else hi
    if lo > hi:
        return None
    root = int(table.best[lo, hi])
    return {
        "key": keys[root - 1] if keys is not None else root,
        "left": obst_tree(table, lo, root - 1, keys),
        "right": obst_tree(table, root + 1, hi, keys),
    }
