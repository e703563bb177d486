#!/usr/bin/env python3
"""
Cost models for least-weight-subsequence recurrences
D[i] = min_{j<i} E[j] + w(j, i) with E[j] = f(D[j], j)
"""

import dataclasses
import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from dp_types import DpValue, InvalidInputError, UsageError, ValueKind, sat_add

DEFAULT_SQRT_SCALE = 2 ** 20


class Shape(Enum):
    """Monge direction of a cost function"""
    CONVEX = "convex"
    CONCAVE = "concave"


class CostVariant(Enum):
    """Built-in post-office cost families"""
    MEDIAN_DISTANCE = "median"
    SQUARED_LENGTH = "quad"
    SQRT_LENGTH = "sqrt"
    SQUARED_RANGE = "range2"


@dataclass(frozen=True, eq=False)
class CostModel:
    """
    Evaluator bundle for one recurrence

    Subclasses provide eval_w; E defaults to the identity on D, optionally
    shifted by a per-decision offset and/or passed through a transform f(d, j).
    """
    n: int
    shape: Shape
    kind: ValueKind = ValueKind.INT64
    offsets: Optional[np.ndarray] = None
    transform: Optional[Callable[[DpValue, int], DpValue]] = None

    def eval_w(self, j: int, i: int) -> DpValue:
        raise NotImplementedError

    def eval_w_many(self, js: np.ndarray, i: int) -> np.ndarray:
        """w(j, i) for every j in js"""
        return np.array([self.eval_w(int(j), i) for j in js], dtype=self.kind.dtype)

    def eval_E(self, d: DpValue, j: int) -> DpValue:
        value = d if self.transform is None else self.transform(d, j)
        if self.offsets is not None:
            value = sat_add(value, self.kind.coerce(self.offsets[j]))
        return value

    def with_offsets(self, offsets: Sequence[DpValue]) -> 'CostModel':
        """Copy whose E[j] adds offsets[j]; offsets needs n+1 entries"""
        arr = np.asarray(offsets, dtype=self.kind.dtype)
        if len(arr) != self.n + 1:
            raise InvalidInputError(f"need {self.n + 1} offsets, got {len(arr)}")
        return dataclasses.replace(self, offsets=arr)

    def with_transform(self, transform: Callable[[DpValue, int], DpValue]) -> 'CostModel':
        """Copy whose E[j] = transform(D[j], j)"""
        return dataclasses.replace(self, transform=transform)

    def _check_pair(self, j: int, i: int):
        if not 0 <= j < i <= self.n:
            raise InvalidInputError(f"w({j},{i}) is undefined for n={self.n}; need 0 <= j < i <= n")


@dataclass(frozen=True, eq=False)
class FunctionCost(CostModel):
    """Cost model backed by an arbitrary callable w(j, i)"""
    w: Callable[[int, int], DpValue] = None

    def eval_w(self, j: int, i: int) -> DpValue:
        self._check_pair(j, i)
        return self.w(j, i)


@dataclass(frozen=True, eq=False)
class PrefixSumCost(CostModel):
    """
    Post-office costs over sorted village positions, O(1) per query

    MedianDistance: C + sum |x_v - x_med| over villages j+1..i (lower median)
    SquaredLength:  C + (i - j)^2
    SqrtLength:     C + g(i - j), g an exactly concave integer table
    SquaredRange:   C + (x_i - x_{j+1})^2
    """
    positions: np.ndarray = None
    prefix: np.ndarray = None
    fixed_cost: DpValue = 0
    variant: CostVariant = CostVariant.SQUARED_LENGTH
    scale: DpValue = DEFAULT_SQRT_SCALE
    sqrt_table: Optional[np.ndarray] = None

    def __post_init__(self):
        # scalar lookups are much faster on plain lists than on numpy arrays
        object.__setattr__(self, '_pos', self.positions.tolist())
        object.__setattr__(self, '_pre', self.prefix.tolist())
        if self.sqrt_table is not None:
            object.__setattr__(self, '_g', self.sqrt_table.tolist())

    def eval_w(self, j: int, i: int) -> DpValue:
        self._check_pair(j, i)
        variant = self.variant
        if variant is CostVariant.SQUARED_LENGTH:
            return self.fixed_cost + (i - j) * (i - j)
        if variant is CostVariant.SQRT_LENGTH:
            return self.fixed_cost + self._g[i - j]
        pos = self._pos
        if variant is CostVariant.SQUARED_RANGE:
            span = pos[i] - pos[j + 1]
            return self.fixed_cost + span * span
        pre = self._pre
        med = j + (i - j + 1) // 2
        xm = pos[med]
        left = xm * (med - j) - (pre[med] - pre[j])
        right = (pre[i] - pre[med]) - xm * (i - med)
        return self.fixed_cost + left + right

    def eval_w_many(self, js: np.ndarray, i: int) -> np.ndarray:
        js = np.asarray(js, dtype=np.int64)
        if len(js) and (js.min() < 0 or js.max() >= i or i > self.n):
            raise InvalidInputError(f"w(j,{i}) is undefined for some j in the batch (n={self.n})")
        variant = self.variant
        if variant is CostVariant.SQUARED_LENGTH:
            lengths = i - js
            return (self.fixed_cost + lengths * lengths).astype(self.kind.dtype)
        if variant is CostVariant.SQRT_LENGTH:
            return (self.fixed_cost + self.sqrt_table[i - js]).astype(self.kind.dtype)
        if variant is CostVariant.SQUARED_RANGE:
            span = self.positions[i] - self.positions[js + 1]
            return (self.fixed_cost + span * span).astype(self.kind.dtype)
        med = js + (i - js + 1) // 2
        xm = self.positions[med]
        left = xm * (med - js) - (self.prefix[med] - self.prefix[js])
        right = (self.prefix[i] - self.prefix[med]) - xm * (i - med)
        return (self.fixed_cost + left + right).astype(self.kind.dtype)


@dataclass(frozen=True)
class MongeCheck:
    """Outcome of a quadrangle-inequality check"""
    ok: bool
    counterexample: Optional[Tuple[int, int, int, int]] = None


def check_quadruple(model: CostModel, a: int, b: int, c: int, d: int) -> bool:
    """Quadrangle inequality for a < b < c < d in the model's declared direction"""
    lhs = model.eval_w(a, c) + model.eval_w(b, d)
    rhs = model.eval_w(b, c) + model.eval_w(a, d)
    return lhs <= rhs if model.shape is Shape.CONVEX else lhs >= rhs


def monge_check(model: CostModel, samples: int = 10_000, seed: int = 0) -> MongeCheck:
    """
    Sample random quadruples a<b<c<d in [0, n] and test the declared shape

    Models with n < 4 pass vacuously.
    """
    if model.n < 4:
        return MongeCheck(ok=True)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        a, b, c, d = (int(v) for v in np.sort(rng.choice(model.n + 1, size=4, replace=False)))
        if not check_quadruple(model, a, b, c, d):
            return MongeCheck(ok=False, counterexample=(a, b, c, d))
    return MongeCheck(ok=True)


def monge_check_exhaustive(model: CostModel) -> MongeCheck:
    """Test every quadruple; meant for n <= 30"""
    for a, b, c, d in itertools.combinations(range(model.n + 1), 4):
        if not check_quadruple(model, a, b, c, d):
            return MongeCheck(ok=False, counterexample=(a, b, c, d))
    return MongeCheck(ok=True)


def concave_sqrt_table(n: int, scale: DpValue, kind: ValueKind = ValueKind.INT64) -> np.ndarray:
    """
    g(0..n) with g(L) ~ scale * sqrt(L)

    Integer mode accumulates floored increments scale*(sqrt(t) - sqrt(t-1));
    the increments never grow, so g is concave for every scale.
    """
    if kind is ValueKind.FLOAT64:
        return float(scale) * np.sqrt(np.arange(n + 1, dtype=np.float64))
    t = np.arange(1, n + 1, dtype=np.float64)
    increments = np.floor(float(scale) / (np.sqrt(t) + np.sqrt(t - 1))).astype(np.int64)
    return np.concatenate([[0], np.cumsum(increments)]).astype(np.int64)


def make_post_office_cost(positions: Sequence[DpValue], fixed_cost: DpValue = 0,
                          variant: CostVariant = CostVariant.SQUARED_LENGTH,
                          scale: DpValue = DEFAULT_SQRT_SCALE,
                          kind: ValueKind = ValueKind.INT64) -> PrefixSumCost:
    """
    Build the cost of serving villages j+1..i with one post office

    Args:
        positions: village coordinates, strictly ascending
        fixed_cost: per-cluster constant C
        variant: cost family
        scale: K for the sqrt family
        kind: integer or float DP values
    """
    coords = np.asarray(positions, dtype=kind.dtype)
    if coords.ndim != 1:
        raise InvalidInputError("positions must be one-dimensional")
    if len(coords) > 1 and not np.all(np.diff(coords) > 0):
        raise InvalidInputError("positions must be strictly ascending")
    n = len(coords)
    padded = np.concatenate([np.zeros(1, dtype=kind.dtype), coords])
    prefix = np.cumsum(padded)
    shape = Shape.CONCAVE if variant is CostVariant.SQRT_LENGTH else Shape.CONVEX
    table = concave_sqrt_table(n, scale, kind) if variant is CostVariant.SQRT_LENGTH else None
    return PrefixSumCost(n=n, shape=shape, kind=kind, positions=padded, prefix=prefix,
                         fixed_cost=kind.coerce(fixed_cost), variant=variant,
                         scale=kind.coerce(scale), sqrt_table=table)


def make_function_cost(n: int, w: Callable[[int, int], DpValue], shape: Shape = Shape.CONVEX,
                       kind: ValueKind = ValueKind.INT64) -> FunctionCost:
    """Wrap an arbitrary w(j, i); the caller vouches for its shape"""
    return FunctionCost(n=n, shape=shape, kind=kind, w=w)


def parse_cost_spec(spec: str) -> Tuple[CostVariant, Dict[str, float]]:
    """
    Parse 'family:key=value,...' such as 'quad:C=10' or 'sqrt:C=0,K=1048576'
    """
    family, _, params_text = spec.partition(':')
    try:
        variant = CostVariant(family.strip().lower())
    except ValueError:
        known = ', '.join(v.value for v in CostVariant)
        raise UsageError(f"unknown cost family '{family}' (known: {known})") from None

    params: Dict[str, float] = {}
    for item in filter(None, (p.strip() for p in params_text.split(','))):
        key, sep, value = item.partition('=')
        if not sep:
            raise UsageError(f"malformed cost parameter '{item}' in '{spec}'")
        try:
            params[key.strip().upper()] = float(value)
        except ValueError:
            raise UsageError(f"cost parameter {key} must be numeric, got '{value}'") from None
    unknown = set(params) - {'C', 'K'}
    if unknown:
        raise UsageError(f"unknown cost parameters {sorted(unknown)} in '{spec}'")
    return variant, params


def build_cost(spec: str, positions: Sequence[DpValue], kind: ValueKind = ValueKind.INT64) -> PrefixSumCost:
    """Cost model from a CLI spec over the given positions"""
    variant, params = parse_cost_spec(spec)
    return make_post_office_cost(positions, fixed_cost=params.get('C', 0), variant=variant,
                                 scale=params.get('K', DEFAULT_SQRT_SCALE), kind=kind)


def interval_length_cost(n: int, spec: str, kind: ValueKind = ValueKind.INT64) -> PrefixSumCost:
    """Cost model over positions 1..n, i.e. costs depending on index spans"""
    return build_cost(spec, np.arange(1, n + 1), kind)
