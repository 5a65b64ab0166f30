"""Weights of distance-graph edges.

A weight ``(strictness, value)`` bounds a clock difference: an edge
``x -> y`` carrying ``(<, c)`` means ``y - x < c``.  Two representations
live here:

* :class:`Weight`, a small immutable value used at API boundaries and in
  tests.
* the *raw* integer encoding used inside :mod:`tareach.dbm` matrices:
  ``(<, c) -> 2c`` and ``(<=, c) -> 2c + 1``.  Integer order on raw values
  coincides with the weight order, and the unique infinite weight
  ``(<, +inf)`` is the sentinel :data:`INF_RAW`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

INF_RAW = 1 << 50
"""Raw encoding of ``(<, +inf)``.  Finite raw values stay far below it."""

LE_ZERO_RAW = 1
"""Raw encoding of ``(<=, 0)``."""


@total_ordering
@dataclass(frozen=True)
class Weight:
    """An edge weight ``(strictness, value)``.

    ``strict`` selects ``<`` over ``<=``.  ``value`` is an ``int`` or
    ``math.inf``; the only infinite weight is ``(<, inf)``.
    """

    strict: bool
    value: int | float

    def __post_init__(self) -> None:
        if isinstance(self.value, float):
            if self.value != math.inf:
                raise ValueError(f"weight value must be an integer or +inf, got {self.value!r}")
            if not self.strict:
                raise ValueError("(<=, inf) is not a weight; use (<, inf)")
        elif not isinstance(self.value, (int, np.integer)):
            raise TypeError(f"weight value must be an integer, got {type(self.value).__name__}")
        else:
            object.__setattr__(self, "value", int(self.value))

    # constructors -----------------------------------------------------

    @classmethod
    def le(cls, c: int) -> Weight:
        return cls(False, c)

    @classmethod
    def lt(cls, c: int | float) -> Weight:
        return cls(True, c)

    @property
    def is_inf(self) -> bool:
        return self.value == math.inf

    # algebra ----------------------------------------------------------

    def __add__(self, other: Weight) -> Weight:
        if not isinstance(other, Weight):
            return NotImplemented
        if self.is_inf or other.is_inf:
            return INF
        return Weight(self.strict or other.strict, self.value + other.value)

    def __neg__(self) -> Weight:
        if self.is_inf:
            raise ValueError("negation is undefined on the infinite weight")
        return Weight(self.strict, -self.value)

    def __lt__(self, other: Weight) -> bool:
        if not isinstance(other, Weight):
            return NotImplemented
        if self.value != other.value:
            return self.value < other.value
        return self.strict and not other.strict

    def floor(self) -> Weight:
        if self.is_inf:
            raise ValueError("floor is undefined on the infinite weight")
        return Weight(False, self.value - 1) if self.strict else self

    def ceil(self) -> Weight:
        if self.is_inf:
            raise ValueError("ceiling is undefined on the infinite weight")
        return Weight(True, self.value + 1) if self.strict else self

    # raw encoding -----------------------------------------------------

    def to_raw(self) -> int:
        if self.is_inf:
            return INF_RAW
        return 2 * self.value + (0 if self.strict else 1)

    @classmethod
    def from_raw(cls, raw: int) -> Weight:
        raw = int(raw)
        if raw >= INF_RAW:
            return INF
        return cls(not (raw & 1), raw >> 1)

    def __repr__(self) -> str:
        op = "<" if self.strict else "<="
        return f"({op},{self.value})"


INF = Weight(True, math.inf)
LE_ZERO = Weight(False, 0)


def weight_add(a: Weight, b: Weight) -> Weight:
    return a + b


def weight_lt(a: Weight, b: Weight) -> bool:
    return a < b


def weight_neg(a: Weight) -> Weight:
    return -a


def weight_floor(a: Weight) -> Weight:
    return a.floor()


def weight_ceil(a: Weight) -> Weight:
    return a.ceil()


# raw arithmetic (scalars or numpy arrays) ------------------------------


def raw_add(a, b):
    """Sum of raw weights; ``INF_RAW`` absorbs.  Works elementwise on arrays."""
    # 2c1+w1 + 2c2+w2 must become 2(c1+c2) + (w1 & w2); subtract (w1 | w2).
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        s = a + b - ((a | b) & 1)
        return np.where((a >= INF_RAW) | (b >= INF_RAW), INF_RAW, s)
    if a >= INF_RAW or b >= INF_RAW:
        return INF_RAW
    return a + b - ((a | b) & 1)


def raw_neg(a):
    """``(s, c) -> (s, -c)`` on finite raw weights."""
    return -a + 2 * (a & 1)


def raw_floor(a):
    """``floor((<, c)) = (<=, c-1)``; weak weights are fixed points."""
    return a - 1 + (a & 1)


def raw_le(c):
    """Raw encoding of ``(<=, c)``."""
    return 2 * c + 1


def raw_lt(c):
    """Raw encoding of ``(<, c)``."""
    return 2 * c
