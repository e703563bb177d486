#!/usr/bin/env python3
"""
Brute-force reference implementations

Literal evaluations of every recurrence, used by the tests and by the
benchmark's --verify and selftest paths. Only dp_types and the cost models
are shared with the optimized solvers.
"""

import sys
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cost_models import CostModel
from dp_types import NO_DECISION, DpValue, InvalidInputError, new_table, sat_add


@dataclass
class OracleSolution:
    """D and best for states 0..n, same layout as the GLWS solvers"""
    D: np.ndarray
    best: np.ndarray


def brute_glws(model: CostModel, n: Optional[int] = None, D0: DpValue = 0) -> OracleSolution:
    """O(n^2) double loop, smallest j on ties"""
    n = model.n if n is None else n
    D = new_table(n + 1, model.kind)
    best = np.full(n + 1, NO_DECISION, dtype=np.int64)
    D[0] = D0
    E = [model.eval_E(model.kind.coerce(D0), 0)]
    for i in range(1, n + 1):
        value, choice = model.kind.infinity, NO_DECISION
        for j in range(i):
            candidate = sat_add(E[j], model.eval_w(j, i))
            if candidate < value:
                value, choice = candidate, j
        D[i], best[i] = value, choice
        E.append(model.eval_E(value, i))
    return OracleSolution(D=D, best=best)


def brute_lis(A: Sequence) -> Tuple[int, List[int]]:
    """O(n^2) strict LIS; dp[i] is the longest one ending at i"""
    dp = [1] * len(A)
    for i in range(len(A)):
        for j in range(i):
            if A[j] < A[i] and dp[j] + 1 > dp[i]:
                dp[i] = dp[j] + 1
    return max(dp, default=0), dp


def patience_lis(A: Sequence) -> int:
    """Pile count of patience sorting"""
    piles: List = []
    for value in A:
        pos = bisect_left(piles, value)
        if pos == len(piles):
            piles.append(value)
        else:
            piles[pos] = value
    return len(piles)


def brute_lcs(A: Sequence, B: Sequence) -> int:
    """Classic O(nm) LCS table"""
    previous = [0] * (len(B) + 1)
    for a in A:
        current = [0] * (len(B) + 1)
        for j, b in enumerate(B, start=1):
            current[j] = previous[j - 1] + 1 if a == b else max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def brute_gap(inst) -> np.ndarray:
    """Triple loop over the GAP recurrence; inst needs A, B, w1, w2"""
    A, B, w1, w2 = inst.A, inst.B, inst.w1, inst.w2
    n, m = len(A), len(B)
    D = new_table((n + 1, m + 1), w1.kind)
    D[0, 0] = 0
    for i in range(n + 1):
        for j in range(m + 1):
            if not (i or j):
                continue
            value = w1.kind.infinity
            for k in range(i):
                value = min(value, sat_add(D[k, j].item(), w1.eval_w(k, i)))
            for k in range(j):
                value = min(value, sat_add(D[i, k].item(), w2.eval_w(k, j)))
            if i and j and A[i - 1] == B[j - 1]:
                value = min(value, D[i - 1, j - 1].item())
            D[i, j] = value
    return D


def brute_gap_memo(inst) -> np.ndarray:
    """Memoised top-down evaluation of the GAP recurrence"""
    A, B, w1, w2 = inst.A, inst.B, inst.w1, inst.w2
    n, m = len(A), len(B)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * (n + m) + 100))

    @lru_cache(maxsize=None)
    def cell(i: int, j: int) -> DpValue:
        if i == 0 and j == 0:
            return 0
        options = [sat_add(cell(k, j), w1.eval_w(k, i)) for k in range(i)]
        options += [sat_add(cell(i, k), w2.eval_w(k, j)) for k in range(j)]
        if i and j and A[i - 1] == B[j - 1]:
            options.append(cell(i - 1, j - 1))
        return min(options)

    D = new_table((n + 1, m + 1), w1.kind)
    for i in range(n + 1):
        for j in range(m + 1):
            D[i, j] = cell(i, j)
    return D


def brute_kglws(model: CostModel, k: int, n: Optional[int] = None) -> DpValue:
    """O(k n^2) table over exact cluster counts"""
    n = model.n if n is None else n
    if k < 1:
        raise InvalidInputError(f"cluster count must be positive, got {k}")
    inf = model.kind.infinity
    prev = [0] + [inf] * n
    for _ in range(k):
        current = [inf] * (n + 1)
        for i in range(1, n + 1):
            for j in range(i):
                current[i] = min(current[i], sat_add(prev[j], model.eval_w(j, i)))
        prev = current
    return prev[n]


def brute_obst(weights: Sequence[DpValue], gap_weights: bool = False) -> DpValue:
    """Unrestricted O(n^3) optimal binary search tree cost"""
    values = list(weights)
    if gap_weights:
        if len(values) % 2 != 1:
            raise InvalidInputError(f"gap weights need 2n+1 entries, got {len(values)}")
        n = (len(values) - 1) // 2
        prefix = [0] + list(accumulate(values))

        def weight(i: int, j: int):
            return prefix[2 * j + 1] - prefix[2 * (i - 1)]
    else:
        n = len(values)

        def weight(i: int, j: int):
            return sum(values[i - 1:j])

    cost = [[0] * (n + 2) for _ in range(n + 2)]
    for span in range(n):
        for i in range(1, n - span + 1):
            j = i + span
            cost[i][j] = min(cost[i][r - 1] + cost[r + 1][j] for r in range(i, j + 1)) + weight(i, j)
    return cost[1][n] if n else 0
