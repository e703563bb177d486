#!/usr/bin/env python3
"""
Generalized least-weight subsequence
D[i] = min_{0<=j<i} E[j] + w(j, i) for convex or concave Monge costs.

glws_seq is the classic left-to-right scan with a monotone triple queue.
glws_par runs the cordon rounds: every round finalizes the states in front
of the cordon (the first state some tentative state can still improve),
then rebuilds the compressed best-decision structure for the rest.
"""

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from cost_models import CostModel, Shape
from decision_intervals import (DecisionIntervals, decision_value, find_intervals,
                                first_relaxed, merge_decisions, relaxes)
from dp_types import (NO_DECISION, DpValue, InternalInvariantError, InvalidInputError,
                      RoundStats, new_table)
from fork_join import get_pool

logger = logging.getLogger(__name__)


@dataclass
class GlwsSolution:
    """
    DP values and best decisions, indexed by state

    Index 0 is the boundary: D[0] = D0 and best[0] = NO_DECISION.
    """
    D: np.ndarray
    best: np.ndarray
    stats: Optional[RoundStats] = None

    @property
    def n(self) -> int:
        return len(self.D) - 1

    @property
    def cost(self) -> DpValue:
        return self.D[-1].item()

    def segments(self) -> List[Tuple[int, int]]:
        """Optimal chain from n back to 0 as (j, i) transitions in ascending order"""
        chain = []
        i = self.n
        while i > 0:
            j = int(self.best[i])
            chain.append((j, i))
            i = j
        return chain[::-1]

    @property
    def cluster_count(self) -> int:
        return len(self.segments())


def _check_size(model: CostModel, n: Optional[int]) -> int:
    n = model.n if n is None else n
    if n < 0 or n > model.n:
        raise InvalidInputError(f"problem size {n} outside cost model range [0, {model.n}]")
    return n


class MonotoneQueue:
    """
    Double-ended queue of [l, r, j] triples describing the current best
    decision of every state not yet reached by a left-to-right scan

    Convex: later decisions take over suffixes, so they are pushed at the back.
    Concave: later decisions take over prefixes, so they go to the front.
    """

    def __init__(self, model: CostModel, E: np.ndarray, n: int, shape: Optional[Shape] = None):
        self.model = model
        self.E = E
        self.n = n
        self.shape = shape or model.shape
        self.triples: deque = deque()

    def __len__(self) -> int:
        return len(self.triples)

    def _wins(self, cand: int, j: int, i: int) -> bool:
        return decision_value(self.model, self.E, cand, i) < decision_value(self.model, self.E, j, i)

    def best_for(self, i: int) -> int:
        """Best decision of state i; states must be queried in ascending order"""
        triples = self.triples
        if self.shape is Shape.CONVEX:
            while triples and triples[0][1] < i:
                triples.popleft()
            if not triples:
                raise InternalInvariantError(f"no decision covers state {i}")
            return triples[0][2]
        while triples and triples[0][1] < i:
            triples.popleft()
        if not triples or triples[0][0] > i:
            raise InternalInvariantError(f"no decision covers state {i}")
        return triples[0][2]

    def push(self, i: int):
        """Offer decision i, whose E value must already be final, to states i+1..n"""
        start = i + 1
        if start > self.n:
            return
        if self.shape is Shape.CONVEX:
            self._push_back(i, start)
        else:
            self._push_front(i, start)

    def _push_back(self, i: int, start: int):
        triples = self.triples
        new_start = self.n + 1
        while triples:
            l, r, j = triples[-1]
            first = max(l, start)
            if first > r or not self._wins(i, j, first):
                break
            triples.pop()
            new_start = first
        if triples:
            l, r, j = triples[-1]
            a, b = max(l, start), r + 1
            while a < b:
                mid = (a + b) // 2
                if self._wins(i, j, mid):
                    b = mid
                else:
                    a = mid + 1
            if a <= r:
                triples[-1][1] = a - 1
                new_start = a
        else:
            new_start = start
        if new_start <= self.n:
            triples.append([new_start, self.n, i])

    def _push_front(self, i: int, start: int):
        triples = self.triples
        new_end = start - 1
        while triples:
            l, r, j = triples[0]
            if r < start:
                triples.popleft()
                continue
            if not self._wins(i, j, r):
                break
            triples.popleft()
            new_end = r
        if triples:
            l, r, j = triples[0]
            a, b = max(l, start), r
            # last state of the front triple still won by i, a-1 if none
            a -= 1
            while a < b:
                mid = (a + b + 1) // 2
                if self._wins(i, j, mid):
                    a = mid
                else:
                    b = mid - 1
            if a >= max(l, start):
                new_end = a
            triples[0][0] = max(l, new_end + 1)
        else:
            new_end = self.n
        if new_end >= start:
            triples.appendleft([start, new_end, i])


def glws_seq(model: CostModel, n: Optional[int] = None, D0: DpValue = 0) -> GlwsSolution:
    """
    Sequential GLWS in O(n log n) evaluations

    Args:
        model: cost model, convex or concave
        n: number of states (defaults to model.n)
        D0: boundary value D[0]
    """
    n = _check_size(model, n)
    D = new_table(n + 1, model.kind)
    E = new_table(n + 1, model.kind)
    best = np.full(n + 1, NO_DECISION, dtype=np.int64)
    D[0] = D0
    E[0] = model.eval_E(model.kind.coerce(D0), 0)

    queue = MonotoneQueue(model, E, n)
    queue.push(0)
    for i in range(1, n + 1):
        j = queue.best_for(i)
        D[i] = decision_value(model, E, j, i)
        best[i] = j
        E[i] = model.eval_E(D[i].item(), i)
        queue.push(i)
    return GlwsSolution(D=D, best=best)


@dataclass
class CordonProbe:
    """
    Outcome of one cordon search

    values/decisions hold the tentative D and best of states now+1..cordon-1,
    which are final. sentinels maps each probed state to the first later
    state it relaxes.
    """
    cordon: int
    values: List[DpValue] = field(default_factory=list)
    decisions: List[int] = field(default_factory=list)
    sentinels: Dict[int, int] = field(default_factory=dict)
    examined: int = 0
    substeps: int = 0


def find_cordon(model: CostModel, E: np.ndarray, B: DecisionIntervals, now: int,
                n: Optional[int] = None) -> CordonProbe:
    """
    Extend the finalized prefix by prefix doubling

    Substep t probes states [now + 2^(t-1), now + 2^t - 1]. Each probed state
    reads its decision from B, takes a tentative value, and places a sentinel
    on the first later state it strictly relaxes. The cordon is the smallest
    sentinel so far; probing stops once it falls inside the probed range.
    """
    n = _check_size(model, n)
    if now >= n:
        return CordonProbe(cordon=n + 1)
    pool = get_pool()
    concave = model.shape is Shape.CONCAVE

    def probe(j: int) -> Tuple[DpValue, int, Optional[int]]:
        b = B.lookup(j)
        d = decision_value(model, E, b, j)
        e = model.eval_E(d, j)
        if j == n:
            return d, b, None
        if concave:
            return d, b, (j + 1 if relaxes(model, E, B, j, e, j + 1) else None)
        return d, b, first_relaxed(model, E, B, j, e, j + 1, n)

    result = CordonProbe(cordon=n + 1)
    t = 1
    while True:
        lo, hi = now + 2 ** (t - 1), min(n, now + 2 ** t - 1)
        probes = pool.parallel_map(probe, range(lo, hi + 1), grain=16)
        result.examined += hi - lo + 1
        result.substeps = t
        for j, (d, b, s) in zip(range(lo, hi + 1), probes):
            result.values.append(d)
            result.decisions.append(b)
            if s is not None:
                result.sentinels[j] = s
        found = pool.min_reduce(s for _, _, s in probes if s is not None)
        if found is not None:
            result.cordon = min(result.cordon, found)
        if result.cordon <= hi + 1 or hi == n:
            break
        t += 1

    if result.cordon <= now + 1:
        raise InternalInvariantError(
            f"empty frontier at now={now}; the cost model is probably not {model.shape.value} Monge")
    keep = result.cordon - 1 - now
    del result.values[keep:]
    del result.decisions[keep:]
    return result


def glws_par(model: CostModel, n: Optional[int] = None, D0: DpValue = 0) -> GlwsSolution:
    """
    Parallel GLWS by cordon rounds

    Convex models finish in perfect-depth rounds, concave ones in
    effective-depth rounds. Output equals glws_seq exactly.
    """
    n = _check_size(model, n)
    D = new_table(n + 1, model.kind)
    E = new_table(n + 1, model.kind)
    best = np.full(n + 1, NO_DECISION, dtype=np.int64)
    D[0] = D0
    E[0] = model.eval_E(model.kind.coerce(D0), 0)
    stats = RoundStats()

    B = DecisionIntervals.single(1, n, 0)
    now = 0
    while now < n:
        started = time.perf_counter()
        probe = find_cordon(model, E, B, now, n)
        cordon = probe.cordon
        for offset, (d, b) in enumerate(zip(probe.values, probe.decisions)):
            state = now + 1 + offset
            D[state] = d
            best[state] = b
            E[state] = model.eval_E(d, state)

        if cordon <= n:
            fresh = find_intervals(model, E, now + 1, cordon - 1, cordon, n)
            if model.shape is Shape.CONVEX:
                B = fresh
            else:
                B = merge_decisions(model, E, B.restrict(cordon, n), fresh)
        frontier = cordon - 1 - now
        stats.record_round(frontier, probe.examined, time.perf_counter() - started)
        logger.debug("round %d: states %d..%d final (%d examined, %d substeps, %d triples)",
                     stats.rounds, now + 1, cordon - 1, probe.examined, probe.substeps, len(B))
        now = cordon - 1

    logger.info("glws_par finished n=%d in %d rounds", n, stats.rounds)
    return GlwsSolution(D=D, best=best, stats=stats)


def solve(model: CostModel, n: Optional[int] = None, D0: DpValue = 0,
          parallel: bool = True) -> GlwsSolution:
    """Run the parallel or sequential solver"""
    return glws_par(model, n, D0) if parallel else glws_seq(model, n, D0)
