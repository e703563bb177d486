#!/usr/bin/env python3
"""
Shared DP vocabulary
Cost values, infinity handling, round statistics and the two depth oracles
used to check round counts of the parallel algorithms
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Union

import numpy as np

DpValue = Union[int, float]

# Large enough for any real cost, small enough that INFINITY + INFINITY
# still fits in int64 before it is clamped back.
INFINITY = 2 ** 61

BOUNDARY = 0
NO_DECISION = -1


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition"""


class OutOfRangeError(IndexError):
    """Raised when a state index falls outside a structure's coverage"""


class InternalInvariantError(RuntimeError):
    """Raised when an algorithm detects a broken internal invariant"""


class UsageError(ValueError):
    """Raised for command-line level mistakes (unknown names, wrong file kinds)"""


class ValueKind(Enum):
    """Numeric representation used for DP values"""
    INT64 = "int64"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.int64) if self is ValueKind.INT64 else np.dtype(np.float64)

    @property
    def infinity(self) -> DpValue:
        return INFINITY if self is ValueKind.INT64 else math.inf

    def coerce(self, value) -> DpValue:
        """Convert a scalar to this kind's Python type"""
        return int(value) if self is ValueKind.INT64 else float(value)


def is_infinite(value: DpValue) -> bool:
    return value >= INFINITY


def sat_add(a: DpValue, b: DpValue) -> DpValue:
    """Addition where INFINITY absorbs"""
    if is_infinite(a) or is_infinite(b):
        return math.inf if isinstance(a, float) or isinstance(b, float) else INFINITY
    return a + b


def sat_add_array(a: np.ndarray, b: np.ndarray, kind: ValueKind = ValueKind.INT64) -> np.ndarray:
    """Element-wise saturating addition for numpy arrays"""
    total = a + b
    if kind is ValueKind.INT64:
        np.minimum(total, INFINITY, out=total)
        total[(a >= INFINITY) | (b >= INFINITY)] = INFINITY
    return total


def new_table(shape, kind: ValueKind = ValueKind.INT64) -> np.ndarray:
    """Allocate a DP table filled with infinity"""
    return np.full(shape, kind.infinity, dtype=kind.dtype)


@dataclass
class RoundStats:
    """Per-round instrumentation of a phase-parallel run"""
    rounds: int = 0
    frontier_sizes: List[int] = field(default_factory=list)
    wasted_states: int = 0
    elapsed_per_round: List[float] = field(default_factory=list)
    examined_per_round: List[int] = field(default_factory=list)

    def record_round(self, frontier: int, examined: int, elapsed: float):
        """Account one finished round"""
        self.rounds += 1
        self.frontier_sizes.append(frontier)
        self.examined_per_round.append(examined)
        self.wasted_states += max(0, examined - frontier)
        self.elapsed_per_round.append(elapsed)

    @property
    def finalized(self) -> int:
        return sum(self.frontier_sizes)

    @property
    def max_frontier(self) -> int:
        return max(self.frontier_sizes) if self.frontier_sizes else 0

    def to_dict(self) -> Dict:
        return {
            'rounds': self.rounds,
            'frontier_sizes': list(self.frontier_sizes),
            'wasted_states': self.wasted_states,
            'examined_per_round': list(self.examined_per_round),
            'elapsed_per_round': list(self.elapsed_per_round),
        }


@dataclass(frozen=True)
class DepthReport:
    """Depths of the best-decision DAG (perfect) and the optimized DAG (effective)"""
    perfect_depth: int
    effective_depth: int


def _validated(best: Sequence[int]) -> np.ndarray:
    decisions = np.asarray(best, dtype=np.int64)
    if decisions.ndim != 1:
        raise InvalidInputError("best decisions must be a flat sequence")
    states = np.arange(1, len(decisions) + 1, dtype=np.int64)
    bad = np.nonzero((decisions < 0) | (decisions >= states))[0]
    if len(bad):
        i = int(bad[0]) + 1
        raise InvalidInputError(f"best[{i}]={int(decisions[bad[0]])} is not a valid decision for state {i}")
    return decisions


def perfect_depth(best: Sequence[int]) -> int:
    """
    Longest chain i -> best[i] -> ... -> 0, counted in edges

    Args:
        best: best decisions of states 1..n (best[k] belongs to state k+1)
    """
    decisions = _validated(best)
    depth = np.zeros(len(decisions) + 1, dtype=np.int64)
    for i in range(1, len(decisions) + 1):
        depth[i] = depth[decisions[i - 1]] + 1
    return int(depth.max())


def effective_depth_glws(best: Sequence[int]) -> int:
    """
    Longest path counting effective edges when every j < i is a normal edge

    ed(0) = 0, ed(i) = max(ed(i-1), ed(best[i]) + 1)
    """
    decisions = _validated(best)
    ed = np.zeros(len(decisions) + 1, dtype=np.int64)
    for i in range(1, len(decisions) + 1):
        ed[i] = max(ed[i - 1], ed[decisions[i - 1]] + 1)
    return int(ed[-1])


def depth_report(best: Sequence[int]) -> DepthReport:
    return DepthReport(perfect_depth=perfect_depth(best), effective_depth=effective_depth_glws(best))
