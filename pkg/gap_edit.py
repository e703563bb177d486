#!/usr/bin/env python3
"""
GAP edit distance

    P[i,j] = min_{i'<i} D[i',j] + w1(i',i)
    Q[i,j] = min_{j'<j} D[i,j'] + w2(j',j)
    D[i,j] = min(P[i,j], Q[i,j], D[i-1,j-1] if A[i] == B[j])

with D[0,0] = 0. gap_solve finalizes a staircase-shaped region per round:
all rows probe their next columns by prefix doubling in lockstep, sentinels
from row, column and diagonal dependencies are folded into a monotone cut,
and the per-row and per-column decision structures are refreshed for the
newly finalized cells.
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from cost_models import CostModel, Shape
from decision_intervals import (DecisionIntervals, find_intervals, first_relaxed,
                                merge_decisions, relaxes)
from dp_types import (NO_DECISION, DpValue, InternalInvariantError,
                      InvalidInputError, RoundStats, new_table, sat_add)
from fork_join import get_pool
from glws import MonotoneQueue
from sequence_dp import MatchList, build_match_list

logger = logging.getLogger(__name__)


@dataclass
class GapInstance:
    """Two sequences with interval costs for deleting runs of A (w1) and B (w2)"""
    A: Sequence
    B: Sequence
    w1: CostModel
    w2: CostModel
    matches: MatchList

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.B)


def make_gap_instance(A: Sequence, B: Sequence, w1: CostModel, w2: CostModel) -> GapInstance:
    """Validate cost sizes and precompute the match list"""
    if w1.n < len(A):
        raise InvalidInputError(f"w1 covers {w1.n} positions but A has {len(A)}")
    if w2.n < len(B):
        raise InvalidInputError(f"w2 covers {w2.n} positions but B has {len(B)}")
    if w1.kind is not w2.kind:
        raise InvalidInputError("w1 and w2 must use the same value kind")
    return GapInstance(A=list(A), B=list(B), w1=w1, w2=w2, matches=build_match_list(A, B))


@dataclass
class Staircase:
    """First non-finalized column of every row"""
    frontier: np.ndarray

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.frontier) <= 0))

    def finalized(self) -> int:
        return int(self.frontier.sum())


@dataclass
class GapSolution:
    """
    D table with the P and Q best decisions of every cell

    best_p[i,j] is the row i' behind P[i,j], best_q[i,j] the column j' behind
    Q[i,j]; NO_DECISION where the recurrence offers none.
    """
    D: np.ndarray
    best_p: np.ndarray
    best_q: np.ndarray
    stats: Optional[RoundStats] = None
    staircases: List[Staircase] = field(default_factory=list)

    @property
    def cost(self) -> DpValue:
        return self.D[-1, -1].item()


def gap_seq(inst: GapInstance) -> GapSolution:
    """Row-major sweep with one monotone queue per row and per column"""
    n, m = inst.n, inst.m
    kind = inst.w1.kind
    D = new_table((n + 1, m + 1), kind)
    best_p = np.full((n + 1, m + 1), NO_DECISION, dtype=np.int64)
    best_q = np.full((n + 1, m + 1), NO_DECISION, dtype=np.int64)
    D[0, 0] = 0
    columns = [MonotoneQueue(inst.w1, D[:, j], n) for j in range(m + 1)]

    for i in range(n + 1):
        row = MonotoneQueue(inst.w2, D[i, :], m)
        for j in range(m + 1):
            if i or j:
                value = kind.infinity
                if i:
                    p = columns[j].best_for(i)
                    value = sat_add(D[p, j].item(), inst.w1.eval_w(p, i))
                    best_p[i, j] = p
                if j:
                    q = row.best_for(j)
                    value = min(value, sat_add(D[i, q].item(), inst.w2.eval_w(q, j)))
                    best_q[i, j] = q
                if i and j and inst.A[i - 1] == inst.B[j - 1]:
                    value = min(value, D[i - 1, j - 1].item())
                D[i, j] = value
            columns[j].push(i)
            row.push(j)
    return GapSolution(D=D, best_p=best_p, best_q=best_q)


@dataclass
class _Grid:
    """
    Internal orientation: rows run over the shorter sequence so that prefix
    doubling walks along the longer one
    """
    X: List
    Y: List
    w_row: CostModel
    w_col: CostModel
    transposed: bool

    @property
    def R(self) -> int:
        return len(self.X)

    @property
    def C(self) -> int:
        return len(self.Y)


def _orient(inst: GapInstance) -> _Grid:
    if inst.m <= inst.n:
        return _Grid(X=list(inst.B), Y=list(inst.A), w_row=inst.w1, w_col=inst.w2, transposed=True)
    return _Grid(X=list(inst.A), Y=list(inst.B), w_row=inst.w2, w_col=inst.w1, transposed=False)


def _first_rows(g: np.ndarray, C: int) -> np.ndarray:
    """Per column, the number of rows already finalized there"""
    return len(g) - np.searchsorted(g[::-1], np.arange(C + 1), side='right')


def gap_solve(inst: GapInstance) -> GapSolution:
    """
    Parallel GAP edit distance in effective-depth rounds

    Returns the same D table as gap_seq, with round statistics.
    """
    grid = _orient(inst)
    R, C = grid.R, grid.C
    X, Y = grid.X, grid.Y
    w_row, w_col = grid.w_row, grid.w_col
    kind = inst.w1.kind
    inf = kind.infinity
    pool = get_pool()

    G = new_table((R + 1, C + 1), kind)
    best_row = np.full((R + 1, C + 1), NO_DECISION, dtype=np.int64)
    best_col = np.full((R + 1, C + 1), NO_DECISION, dtype=np.int64)
    G[0, 0] = 0

    g = np.zeros(R + 1, dtype=np.int64)
    g[0] = 1
    f = _first_rows(g, C)
    row_best: List[Optional[DecisionIntervals]] = [None] * (R + 1)
    col_best: List[Optional[DecisionIntervals]] = [None] * (C + 1)
    if C >= 1:
        row_best[0] = DecisionIntervals.single(1, C, 0)
    if R >= 1:
        col_best[0] = DecisionIntervals.single(1, R, 0)

    match_columns: Dict = defaultdict(list)
    for c, symbol in enumerate(Y, start=1):
        match_columns[symbol].append(c)
    match_columns = {s: np.asarray(cols, dtype=np.int64) for s, cols in match_columns.items()}

    def row_sentinel(r: int, c: int, value: DpValue) -> Optional[int]:
        B = row_best[r]
        if B is None:
            return c + 1 if value < inf else None
        if w_row.shape is Shape.CONCAVE:
            return c + 1 if relaxes(w_row, G[r], B, c, value, c + 1) else None
        return first_relaxed(w_row, G[r], B, c, value, c + 1, C)

    def col_sentinel(r: int, c: int, value: DpValue) -> Optional[int]:
        B = col_best[c]
        if B is None:
            return r + 1 if value < inf else None
        if w_col.shape is Shape.CONCAVE:
            return r + 1 if relaxes(w_col, G[:, c], B, r, value, r + 1) else None
        return first_relaxed(w_col, G[:, c], B, r, value, r + 1, R)

    def probe_row(r: int, lo: int, hi: int) -> Tuple[int, List[Tuple[int, int]]]:
        own = C + 1
        below: List[Tuple[int, int]] = []
        RB = row_best[r]
        for c in range(lo, hi + 1):
            value, from_row, from_col = inf, NO_DECISION, NO_DECISION
            if RB is not None:
                from_row = RB.lookup(c)
                value = sat_add(G[r, from_row].item(), w_row.eval_w(from_row, c))
            CB = col_best[c]
            if CB is not None:
                from_col = CB.lookup(r)
                value = min(value, sat_add(G[from_col, c].item(), w_col.eval_w(from_col, r)))
            if r and c and X[r - 1] == Y[c - 1] and c - 1 < g[r - 1]:
                value = min(value, G[r - 1, c - 1].item())
            G[r, c] = value
            best_row[r, c] = from_row
            best_col[r, c] = from_col
            if c < C:
                s = row_sentinel(r, c, value)
                if s is not None:
                    own = min(own, s)
            if r < R:
                s = col_sentinel(r, c, value)
                if s is not None:
                    below.append((s, c))
        return own, below

    def refresh_row(r: int, old: int, new: int) -> Optional[DecisionIntervals]:
        if new > C:
            return None
        if new == old:
            return row_best[r]
        fresh = find_intervals(w_row, G[r], old, new - 1, new, C)
        if row_best[r] is None:
            return fresh
        return merge_decisions(w_row, G[r], row_best[r].restrict(new, C), fresh)

    def refresh_col(c: int, old: int, new: int) -> Optional[DecisionIntervals]:
        if new > R:
            return None
        if new == old:
            return col_best[c]
        column = G[:, c]
        fresh = find_intervals(w_col, column, old, new - 1, new, R)
        if col_best[c] is None:
            return fresh
        return merge_decisions(w_col, column, col_best[c].restrict(new, R), fresh)

    stats = RoundStats()
    staircases = [Staircase(g.copy())]
    while np.any(g <= C):
        started = time.perf_counter()
        sent = np.full(R + 1, C + 1, dtype=np.int64)
        # a match whose diagonal predecessor is still open blocks its cell
        for r in range(1, R + 1):
            start = g[r - 1] + 1
            columns = match_columns.get(X[r - 1])
            if columns is None or start > C:
                continue
            k = int(np.searchsorted(columns, start, side='left'))
            if k < len(columns):
                sent[r] = min(sent[r], columns[k])
        cut = np.minimum.accumulate(sent)
        end = g - 1
        examined = 0
        t = 1
        while True:
            open_rows = np.flatnonzero((end < C) & (cut > end + 1))
            if len(open_rows) == 0:
                break
            lo = g[open_rows] + 2 ** (t - 1) - 1
            hi = np.minimum(np.minimum(g[open_rows] + 2 ** t - 2, C), cut[open_rows] - 1)
            tasks = [(int(r), int(a), int(b)) for r, a, b in zip(open_rows, lo, hi)]
            results = pool.parallel_map(lambda task: probe_row(*task), tasks, grain=4)
            for (r, a, b), (own, below) in zip(tasks, results):
                sent[r] = min(sent[r], own)
                for row, col in below:
                    sent[row] = min(sent[row], col)
                examined += b - a + 1
                end[r] = b
            cut = np.minimum.accumulate(sent)
            t += 1

        g_new = np.minimum(cut, C + 1)
        staircase = Staircase(g_new.copy())
        if not staircase.is_monotone():
            raise InternalInvariantError(f"staircase lost monotonicity in round {stats.rounds + 1}")
        frontier = int((g_new - g).sum())
        if frontier <= 0 or np.any(g_new < g):
            raise InternalInvariantError(
                f"no progress in round {stats.rounds + 1}; check the declared cost shapes")
        f_new = _first_rows(g_new, C)

        rows = [(r, int(g[r]), int(g_new[r])) for r in range(R + 1) if g_new[r] != g[r]]
        cols = [(c, int(f[c]), int(f_new[c])) for c in range(C + 1) if f_new[c] != f[c]]
        for (r, _, _), B in zip(rows, pool.parallel_map(lambda task: refresh_row(*task), rows, grain=4)):
            row_best[r] = B
        for (c, _, _), B in zip(cols, pool.parallel_map(lambda task: refresh_col(*task), cols, grain=4)):
            col_best[c] = B

        stats.record_round(frontier, examined, time.perf_counter() - started)
        logger.debug("gap round %d: %d cells final, %d examined, %d substeps",
                     stats.rounds, frontier, examined, t - 1)
        g, f = g_new, f_new
        staircases.append(staircase)

    logger.info("gap_solve %dx%d finished in %d rounds", inst.n, inst.m, stats.rounds)
    if grid.transposed:
        return GapSolution(D=G.T.copy(), best_p=best_row.T.copy(), best_q=best_col.T.copy(),
                           stats=stats, staircases=staircases)
    return GapSolution(D=G, best_p=best_col, best_q=best_row, stats=stats, staircases=staircases)


def gap_effective_depth(inst: GapInstance, D: np.ndarray, best_p: np.ndarray,
                        best_q: np.ndarray) -> int:
    """
    Longest path counting effective edges

    ed(i,j) = max(ed(i-1,j), ed(i,j-1), ed(best_p)+1, ed(best_q)+1,
                  ed(i-1,j-1)+1 on a match), ed(0,0) = 0
    """
    n, m = inst.n, inst.m
    if D.shape != (n + 1, m + 1) or best_p.shape != D.shape or best_q.shape != D.shape:
        raise InvalidInputError(f"tables must be {(n + 1, m + 1)}")
    if np.any(best_p[1:, :] < 0) or np.any(best_q[:, 1:] < 0):
        raise InvalidInputError("missing best decision records")
    ed = np.zeros((n + 1, m + 1), dtype=np.int64)
    for i in range(n + 1):
        for j in range(m + 1):
            if not (i or j):
                continue
            depth = 0
            if i:
                depth = max(depth, ed[i - 1, j], ed[best_p[i, j], j] + 1)
            if j:
                depth = max(depth, ed[i, j - 1], ed[i, best_q[i, j]] + 1)
            if i and j and inst.A[i - 1] == inst.B[j - 1]:
                depth = max(depth, ed[i - 1, j - 1] + 1)
            ed[i, j] = depth
    return int(ed.max())
