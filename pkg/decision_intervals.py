#!/usr/bin/env python3
"""
Compressed best-decision structures
DecisionIntervals stores the best decision of a contiguous state range as
sorted ([l, r], j) triples. The divide-and-conquer builders here are shared by
the GLWS, GAP and k-GLWS solvers.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from cost_models import CostModel, Shape
from dp_types import (DpValue, InvalidInputError, OutOfRangeError, ValueKind,
                      sat_add, sat_add_array)
from fork_join import get_pool

logger = logging.getLogger(__name__)

DEFAULT_GRAIN = 64


@dataclass(frozen=True, eq=False)
class DecisionIntervals:
    """
    Triples ([l, r], j) sorted by l that exactly tile [lo, hi]

    An empty structure has hi < lo.
    """
    lefts: np.ndarray
    rights: np.ndarray
    decisions: np.ndarray
    lo: int
    hi: int

    @classmethod
    def empty(cls, lo: int, hi: Optional[int] = None) -> 'DecisionIntervals':
        hi = lo - 1 if hi is None else hi
        none = np.zeros(0, dtype=np.int64)
        return cls(none, none, none, lo, min(hi, lo - 1))

    @classmethod
    def single(cls, lo: int, hi: int, j: int) -> 'DecisionIntervals':
        if hi < lo:
            return cls.empty(lo)
        return cls(np.array([lo], dtype=np.int64), np.array([hi], dtype=np.int64),
                   np.array([j], dtype=np.int64), lo, hi)

    @classmethod
    def from_best(cls, best: Sequence[int], lo: int) -> 'DecisionIntervals':
        """Compress a per-state decision array whose first entry is state lo"""
        best = np.asarray(best, dtype=np.int64)
        count = len(best)
        if count == 0:
            return cls.empty(lo)
        starts = np.concatenate([[0], np.flatnonzero(best[1:] != best[:-1]) + 1])
        ends = np.concatenate([starts[1:] - 1, [count - 1]])
        return cls(starts + lo, ends + lo, best[starts].copy(), lo, lo + count - 1)

    @classmethod
    def concat(cls, parts: Sequence['DecisionIntervals']) -> 'DecisionIntervals':
        """Join structures covering consecutive ranges, merging equal neighbours"""
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty(0)
        for before, after in zip(parts, parts[1:]):
            if after.lo != before.hi + 1:
                raise InvalidInputError(f"ranges [{before.lo},{before.hi}] and [{after.lo},{after.hi}] are not adjacent")
        joined = cls(np.concatenate([p.lefts for p in parts]),
                     np.concatenate([p.rights for p in parts]),
                     np.concatenate([p.decisions for p in parts]),
                     parts[0].lo, parts[-1].hi)
        return joined.merged()

    def __len__(self) -> int:
        return len(self.lefts)

    def __iter__(self) -> Iterator[Tuple[int, int, int]]:
        for l, r, j in zip(self.lefts.tolist(), self.rights.tolist(), self.decisions.tolist()):
            yield l, r, j

    def __repr__(self) -> str:
        body = ', '.join(f"([{l},{r}],{j})" for l, r, j in self)
        return f"DecisionIntervals[{body}]"

    def triples(self) -> List[Tuple[Tuple[int, int], int]]:
        return [((l, r), j) for l, r, j in self]

    @property
    def is_empty(self) -> bool:
        return self.hi < self.lo

    def covers(self, i: int) -> bool:
        return self.lo <= i <= self.hi

    def index_of(self, i: int) -> int:
        """Position of the triple containing state i"""
        if not self.covers(i):
            raise OutOfRangeError(f"state {i} outside decision coverage [{self.lo},{self.hi}]")
        return int(np.searchsorted(self.lefts, i, side='right')) - 1

    def lookup(self, i: int) -> int:
        """Best decision of state i"""
        return int(self.decisions[self.index_of(i)])

    def restrict(self, lo: int, hi: int) -> 'DecisionIntervals':
        """Clip to [lo, hi] intersected with the current coverage"""
        lo, hi = max(lo, self.lo), min(hi, self.hi)
        if hi < lo:
            return DecisionIntervals.empty(lo)
        first, last = self.index_of(lo), self.index_of(hi)
        lefts = self.lefts[first:last + 1].copy()
        rights = self.rights[first:last + 1].copy()
        lefts[0], rights[-1] = lo, hi
        return DecisionIntervals(lefts, rights, self.decisions[first:last + 1].copy(), lo, hi)

    def merged(self) -> 'DecisionIntervals':
        """Adjacent triples with equal decisions fused"""
        if len(self) < 2:
            return self
        keep = np.concatenate([[True], self.decisions[1:] != self.decisions[:-1]])
        if keep.all():
            return self
        starts = np.flatnonzero(keep)
        ends = np.concatenate([starts[1:] - 1, [len(self) - 1]])
        return DecisionIntervals(self.lefts[starts], self.rights[ends], self.decisions[starts],
                                 self.lo, self.hi)

    def to_best_array(self) -> np.ndarray:
        """Per-state decisions for lo..hi"""
        if self.is_empty:
            return np.zeros(0, dtype=np.int64)
        return np.repeat(self.decisions, self.rights - self.lefts + 1)


def decision_value(model: CostModel, E: np.ndarray, j: int, i: int) -> DpValue:
    """E[j] + w(j, i) with infinity absorbing"""
    return sat_add(E[j].item(), model.eval_w(j, i))


def relaxes(model: CostModel, E: np.ndarray, B: DecisionIntervals, cand: int,
            cand_value: DpValue, i: int) -> bool:
    """Whether cand, whose E value is cand_value, strictly improves state i over B"""
    current = B.lookup(i)
    return sat_add(cand_value, model.eval_w(cand, i)) < decision_value(model, E, current, i)


def first_relaxed(model: CostModel, E: np.ndarray, B: DecisionIntervals, cand: int,
                  cand_value: DpValue, lo: int, hi: int) -> Optional[int]:
    """
    First state in [lo, hi] that cand strictly relaxes against B, or None

    Requires every decision in B to be smaller than cand and a convex model:
    once cand beats the recorded decision of some state it beats it for all
    later states, so the answer is found by a binary search over triple right
    ends followed by one inside the boundary triple.
    """
    lo, hi = max(lo, B.lo), min(hi, B.hi)
    if hi < lo:
        return None
    first, last = B.index_of(lo), B.index_of(hi)

    def wins(i: int, j: int) -> bool:
        return sat_add(cand_value, model.eval_w(cand, i)) < decision_value(model, E, j, i)

    rights, decisions = B.rights, B.decisions
    a, b = first, last + 1
    while a < b:
        mid = (a + b) // 2
        if wins(min(int(rights[mid]), hi), int(decisions[mid])):
            b = mid
        else:
            a = mid + 1
    if a > last:
        return None

    j = int(decisions[a])
    a_state, b_state = max(int(B.lefts[a]), lo), min(int(rights[a]), hi)
    while a_state < b_state:
        mid = (a_state + b_state) // 2
        if wins(mid, j):
            b_state = mid
        else:
            a_state = mid + 1
    return a_state


def _argmin_range(model: CostModel, E: np.ndarray, j_lo: int, j_hi: int, i: int) -> int:
    js = np.arange(j_lo, j_hi + 1, dtype=np.int64)
    values = sat_add_array(E[j_lo:j_hi + 1], model.eval_w_many(js, i), model.kind)
    return j_lo + int(np.argmin(values))


def find_intervals(model: CostModel, E: np.ndarray, j_l: int, j_r: int, i_l: int, i_r: int,
                   grain: int = DEFAULT_GRAIN) -> DecisionIntervals:
    """
    Best decisions among [j_l, j_r] for every state of [i_l, i_r]

    Midpoint divide and conquer: the argmin j_m of the middle state splits the
    decision range for both halves (swapped for concave models). Each
    recursion node owns one state, and in-order flattening puts node i_m at
    slot i_m - i_l, so nodes write their singleton triple straight into the
    flattened array; equal neighbours are fused at the end.

    Args:
        model: cost model, decisions must precede states (i_l > j_r)
        E: E values indexed by decision
        grain: subproblems with fewer states recurse without forking
    """
    if j_l > j_r:
        raise InvalidInputError(f"empty decision range [{j_l},{j_r}]")
    if i_l > i_r:
        return DecisionIntervals.empty(i_l)
    if i_l <= j_r:
        raise InvalidInputError(f"decisions [{j_l},{j_r}] must precede states [{i_l},{i_r}]")

    pool = get_pool()
    concave = model.shape is Shape.CONCAVE
    flat = np.empty(i_r - i_l + 1, dtype=np.int64)

    def build(jl: int, jr: int, il: int, ir: int):
        if il > ir:
            return
        im = (il + ir) // 2
        jm = _argmin_range(model, E, jl, jr, im)
        flat[im - i_l] = jm
        if concave:
            left = lambda: build(jm, jr, il, im - 1)
            right = lambda: build(jl, jm, im + 1, ir)
        else:
            left = lambda: build(jl, jm, il, im - 1)
            right = lambda: build(jm, jr, im + 1, ir)
        if ir - il + 1 > grain:
            pool.par_do(left, right)
        else:
            left()
            right()

    build(j_l, j_r, i_l, i_r)
    return DecisionIntervals.from_best(flat, i_l)


def cut_point(model: CostModel, E: np.ndarray, B_old: DecisionIntervals,
              B_new: DecisionIntervals, shape: Optional[Shape] = None) -> int:
    """
    Last state of the leading part of a merge

    Concave: new decisions win exactly on a prefix [lo, p].
    Convex: old decisions keep exactly a prefix [lo, p] and new ones win after.
    Ties keep the old decision, which is the smaller index.
    """
    if (B_old.lo, B_old.hi) != (B_new.lo, B_new.hi):
        raise InvalidInputError(f"coverage mismatch: [{B_old.lo},{B_old.hi}] vs [{B_new.lo},{B_new.hi}]")
    shape = shape or model.shape
    lo, hi = B_new.lo, B_new.hi
    if hi < lo:
        return lo - 1
    pool = get_pool()

    def new_wins(i: int, j_new: int, j_old: int) -> bool:
        return decision_value(model, E, j_new, i) < decision_value(model, E, j_old, i)

    triples = list(B_new)
    if shape is Shape.CONCAVE:
        # probe every new triple at its left end; outcomes are true...false
        probes = pool.parallel_map(lambda t: new_wins(t[0], t[2], B_old.lookup(t[0])), triples, grain=32)
        k = _first_true(len(probes), lambda idx: not probes[idx]) - 1
        if k < 0:
            return lo - 1
        l_k, r_k, j_k = triples[k]
        first, last = B_old.index_of(l_k), B_old.index_of(r_k)
        # first old triple where j_k already loses at its right end
        t = first + _first_true(last - first + 1, lambda idx: not new_wins(
            min(int(B_old.rights[first + idx]), r_k), j_k, int(B_old.decisions[first + idx])))
        if t > last:
            return r_k
        j_t = int(B_old.decisions[t])
        a, b = max(int(B_old.lefts[t]), l_k), min(int(B_old.rights[t]), r_k)
        while a < b:
            mid = (a + b) // 2
            if new_wins(mid, j_k, j_t):
                a = mid + 1
            else:
                b = mid
        return a - 1

    # convex: probe every new triple at its right end; outcomes are false...true
    probes = pool.parallel_map(lambda t: new_wins(t[1], t[2], B_old.lookup(t[1])), triples, grain=32)
    k = _first_true(len(probes), lambda idx: probes[idx])
    if k >= len(triples):
        return hi
    l_k, r_k, j_k = triples[k]
    first, last = B_old.index_of(l_k), B_old.index_of(r_k)
    # last old triple where j_k still loses at its left end
    t = first + _first_true(last - first + 1, lambda idx: new_wins(
        max(int(B_old.lefts[first + idx]), l_k), j_k, int(B_old.decisions[first + idx]))) - 1
    if t < first:
        return l_k - 1
    j_t = int(B_old.decisions[t])
    a, b = max(int(B_old.lefts[t]), l_k), min(int(B_old.rights[t]), r_k)
    while a < b:
        mid = (a + b + 1) // 2
        if new_wins(mid, j_k, j_t):
            b = mid - 1
        else:
            a = mid
    return a


def _first_true(count: int, flag: Callable[[int], bool]) -> int:
    """First index in [0, count) where a false...true predicate holds, count if none"""
    a, b = 0, count
    while a < b:
        mid = (a + b) // 2
        if flag(mid):
            b = mid
        else:
            a = mid + 1
    return a


def merge_decisions(model: CostModel, E: np.ndarray, B_old: DecisionIntervals,
                    B_new: DecisionIntervals, shape: Optional[Shape] = None) -> DecisionIntervals:
    """
    Per-state better of two decision structures over the same range

    B_old's decisions must all be smaller than B_new's. The result takes
    B_new on a prefix (concave) or a suffix (convex) split at cut_point.
    """
    shape = shape or model.shape
    p = cut_point(model, E, B_old, B_new, shape)
    lo, hi = B_new.lo, B_new.hi
    if hi < lo:
        return B_new
    if shape is Shape.CONCAVE:
        parts = [B_new.restrict(lo, p), B_old.restrict(p + 1, hi)]
    else:
        parts = [B_old.restrict(lo, p), B_new.restrict(p + 1, hi)]
    merged = DecisionIntervals.concat(parts)
    logger.debug("merged decisions over [%d,%d] at cut %d (%d triples)", lo, hi, p, len(merged))
    return merged


def monotone_minima(rows: int, cols: int, eval_cell: Callable[[int, int], DpValue],
                    shape: Shape = Shape.CONVEX, kind: ValueKind = ValueKind.INT64,
                    eval_row: Optional[Callable[[int, np.ndarray], np.ndarray]] = None,
                    grain: int = DEFAULT_GRAIN) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row minima of a totally monotone matrix

    Convex matrices have non-decreasing leftmost row argmins, concave ones
    non-increasing. Ties go to the smallest column.

    Args:
        rows, cols: matrix shape
        eval_cell: value of cell (r, c)
        eval_row: optional vectorised eval_row(r, columns) used instead of eval_cell
    Returns:
        (argmin column per row, minimum per row)
    """
    argmins = np.zeros(rows, dtype=np.int64)
    minima = np.empty(rows, dtype=kind.dtype)
    if rows == 0 or cols == 0:
        return argmins[:0], minima[:0]

    if eval_row is None:
        def eval_row(r: int, cs: np.ndarray) -> np.ndarray:
            return np.array([eval_cell(r, int(c)) for c in cs], dtype=kind.dtype)

    pool = get_pool()
    concave = shape is Shape.CONCAVE

    def solve(rl: int, rr: int, cl: int, cr: int):
        if rl > rr:
            return
        rm = (rl + rr) // 2
        values = eval_row(rm, np.arange(cl, cr + 1, dtype=np.int64))
        best = int(np.argmin(values))
        cm = cl + best
        argmins[rm], minima[rm] = cm, values[best]
        if concave:
            top = lambda: solve(rl, rm - 1, cm, cr)
            bottom = lambda: solve(rm + 1, rr, cl, cm)
        else:
            top = lambda: solve(rl, rm - 1, cl, cm)
            bottom = lambda: solve(rm + 1, rr, cm, cr)
        if rr - rl + 1 > grain:
            pool.par_do(top, bottom)
        else:
            top()
            bottom()

    solve(0, rows - 1, 0, cols - 1)
    return argmins, minima
