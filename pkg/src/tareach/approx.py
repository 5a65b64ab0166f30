"""Zone abstractions that are never materialized.

``Closure_a(Z)`` is the union of the a-regions meeting ``Z``; it is not
convex in general, so it is only ever *tested against*:

* :func:`not_included_closure` decides ``Z ⊄ Closure_a(Z')`` edge by edge
  in O(|X|^2) on the canonical graphs of ``Z`` and ``Z'``.
* :func:`not_included_closure_lu` does the same against
  ``Extra+_LU(Z')`` as produced by :func:`extra_lu_plus`, without
  canonicalizing it.

Bound maps are sequences indexed by clock ``1..n`` (position 0 is clock 1);
``-math.inf`` marks a clock that is never compared.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from tareach.dbm import Dbm, _check_dims, canonicalize, is_empty
from tareach.weights import INF_RAW, raw_floor, raw_neg

NO_BOUND = -(1 << 40)
"""Internal integer stand-in for a ``-inf`` bound."""

BoundMap = Sequence[float]


class LuBounds(NamedTuple):
    """Separate lower-bound (``L``) and upper-bound (``U``) guard constants."""

    L: Sequence[float]
    U: Sequence[float]

    def alpha(self) -> tuple[float, ...]:
        return tuple(max(l, u) for l, u in zip(self.L, self.U))


def bound_array(bounds: BoundMap) -> np.ndarray:
    """Convert a bound map to an ``int64`` array using :data:`NO_BOUND` for ``-inf``."""
    if isinstance(bounds, np.ndarray) and bounds.dtype == np.int64:
        return bounds
    out = np.empty(len(bounds), dtype=np.int64)
    for i, b in enumerate(bounds):
        if b is None or b <= NO_BOUND:
            out[i] = NO_BOUND
        else:
            if b < 0 or b != int(b):
                raise ValueError(f"bounds must be nonnegative integers or -inf, got {b!r}")
            out[i] = int(b)
    return out


def bounds_tuple(arr: np.ndarray) -> tuple[float, ...]:
    """Inverse of :func:`bound_array`."""
    return tuple(-math.inf if v <= NO_BOUND else int(v) for v in arr)


def _check_bounds(z: Dbm, a: np.ndarray) -> None:
    if a.shape[0] != z.nclocks:
        raise ValueError(f"bound map has {a.shape[0]} entries for {z.nclocks} clocks")


def extra_lu_plus(z: Dbm, lu: LuBounds) -> Dbm:
    """``Extra+_LU`` of a canonical nonempty zone.

    The result keeps the diagonal and is deliberately left non-canonical.
    """
    L = bound_array(lu.L)
    U = bound_array(lu.U)
    _check_bounds(z, L)
    _check_bounds(z, U)
    return Dbm(extra_lu_plus_raw(z.m, L, U), canonical=False)


def extra_lu_plus_raw(m: np.ndarray, L: np.ndarray, U: np.ndarray) -> np.ndarray:
    """:func:`extra_lu_plus` on raw stacks ``(..., d, d)`` with bounds ``(..., d-1)``."""
    zero = np.zeros(L.shape[:-1] + (1,), dtype=np.int64)
    # reference clock: L_0 = U_0 = 0 so no case fires on row 0 / column 0 by itself
    Lfull = np.concatenate((zero, L), axis=-1)
    Ufull = np.concatenate((zero, U), axis=-1)
    fin_L = Lfull > NO_BOUND
    fin_U = Ufull > NO_BOUND
    le_L = np.where(fin_L, 2 * Lfull + 1, -INF_RAW)  # (<=, L_y); -inf below everything
    le_U = np.where(fin_U, 2 * Ufull + 1, -INF_RAW)

    neg_col0 = raw_neg(m[..., :, 0])  # -Z_x0 for every x
    case1 = m > le_L[..., None, :]
    case2 = (neg_col0 > le_L)[..., None, :]
    upper_drop = neg_col0 > le_U  # -Z_x0 > (<=, U_x)
    d = m.shape[-1]
    not_ref = np.arange(d) != 0
    case3 = upper_drop[..., :, None] & not_ref
    case4 = upper_drop[..., :, None] & ~not_ref

    lt_minus_U = np.where(fin_U, -2 * Ufull, INF_RAW)  # (<, -U_x)
    out = np.where(case1 | case2 | case3, INF_RAW, np.where(case4, lt_minus_U[..., :, None], m))
    idx = np.arange(d)
    out[..., idx, idx] = m[..., idx, idx]
    return out.astype(np.int64)


def _conditions(Z: np.ndarray, Z2: np.ndarray, alpha: np.ndarray):
    """Masks of the three witness conditions on raw matrices.

    Works on stacks: ``Z``/``Z2`` have shape ``(..., d, d)`` and ``alpha``
    ``(..., d-1)``.  Clock axes are 0-based (axis position ``i`` is clock
    ``i + 1``).
    """
    fin = alpha > NO_BOUND
    le_a = 2 * alpha + 1  # (<=, a_x)
    le_neg_a = -2 * alpha + 1  # (<=, -a_x)

    z_0x, z2_0x = Z[..., 0, 1:], Z2[..., 0, 1:]
    z_x0, z2_x0 = Z[..., 1:, 0], Z2[..., 1:, 0]

    c1 = fin & (z2_0x < z_0x) & (z2_0x <= le_a)
    lower_in_range = fin & (z_x0 >= le_neg_a)
    c2 = lower_in_range & (z2_x0 < z_x0)
    # (<=, a_y) + floor(Z_x0): both weak, so raw sum minus one
    thr = le_a[..., None, :] + raw_floor(z_x0)[..., :, None] - 1
    Zxy, Z2xy = Z[..., 1:, 1:], Z2[..., 1:, 1:]
    c3 = lower_in_range[..., :, None] & fin[..., None, :] & (Z2xy < Zxy) & (Z2xy <= thr)
    return c1, c2, c3


_NEVER = -INF_RAW  # threshold no raw weight falls below


def inclusion_thresholds(Z: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Per-entry thresholds ``K`` with ``Z ⊄ Closure_a(Z')`` iff some ``Z'_xy < K_xy``.

    Each witness condition is a conjunction ``Z'_xy < A and Z'_xy <= B``
    (or a single strict comparison), and on integers that is
    ``Z'_xy < min(A, B + 1)``.  Entries that can never witness hold
    ``-INF_RAW``.  ``Z`` is ``(..., d, d)`` and ``alpha`` ``(..., d-1)``;
    leading dimensions broadcast.
    """
    fin = alpha > NO_BOUND
    le_a = 2 * alpha + 1
    z_0x = Z[..., 0, 1:]
    z_x0 = Z[..., 1:, 0]
    row0 = np.where(fin, np.minimum(z_0x, le_a + 1), _NEVER)
    lower_in_range = fin & (z_x0 >= -2 * alpha + 1)
    col0 = np.where(lower_in_range, z_x0, _NEVER)
    thr = le_a[..., None, :] + raw_floor(z_x0)[..., :, None] - 1
    ok = lower_in_range[..., :, None] & fin[..., None, :]
    inner = np.where(ok, np.minimum(Z[..., 1:, 1:], thr + 1), _NEVER)
    d = Z.shape[-1]
    K = np.full(inner.shape[:-2] + (d, d), _NEVER, dtype=np.int64)
    K[..., 0, 1:] = row0
    K[..., 1:, 0] = col0
    K[..., 1:, 1:] = inner
    idx = np.arange(d)
    K[..., idx, idx] = _NEVER
    return K


def not_included_closure_batch(Z: np.ndarray, Z2: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Vectorized :func:`not_included_closure` over stacks of raw canonical matrices.

    ``Z`` and ``Z2`` broadcast against each other.  Callers testing one
    ``Z`` against many ``Z'`` can hoist :func:`inclusion_thresholds` and
    use :func:`below_thresholds` directly.
    """
    return below_thresholds(inclusion_thresholds(Z, alpha), Z2)


def below_thresholds(K: np.ndarray, Z2: np.ndarray) -> np.ndarray:
    return np.any(Z2 < K, axis=(-2, -1))


def closure_witness(z: Dbm, z2: Dbm, alpha: BoundMap) -> tuple[int, int, int] | None:
    """First witness ``(condition, x, y)`` of ``Z ⊄ Closure_a(Z')``, or None.

    Clocks are reported with their DBM index (``>= 1``); conditions 1 and 2
    report ``y == x``.  Scan order is x outer, y inner.
    """
    _check_dims(z, z2)
    a = bound_array(alpha)
    _check_bounds(z, a)
    c1, c2, c3 = _conditions(z.m, z2.m, a)
    hits = c1 | c2 | c3.any(axis=1)
    if not hits.any():
        return None
    x = int(np.argmax(hits))
    if c1[x]:
        return (1, x + 1, x + 1)
    if c2[x]:
        return (2, x + 1, x + 1)
    return (3, x + 1, int(np.argmax(c3[x])) + 1)


def not_included_closure(z: Dbm, z2: Dbm, alpha: BoundMap) -> bool:
    """``Z ⊄ Closure_a(Z')`` for canonical ``z`` (nonempty) and ``z2``."""
    _check_dims(z, z2)
    a = bound_array(alpha)
    _check_bounds(z, a)
    return bool(np.any(z2.m < inclusion_thresholds(z.m, a)))


def not_included_closure_lu(z: Dbm, z2plus: Dbm, alpha: BoundMap) -> bool:
    """``Z ⊄ Closure_a(Extra+_LU(Z'))`` given the raw output of :func:`extra_lu_plus`.

    ``alpha`` is ``max(L, U)`` of the bounds that built ``z2plus``.
    """
    return not_included_closure(z, z2plus, alpha)


def included_closure(z: Dbm, z2: Dbm, alpha: BoundMap) -> bool:
    z = canonicalize(z)
    if is_empty(z):
        return True
    z2 = canonicalize(z2)
    if is_empty(z2):
        return False
    return not not_included_closure(z, z2, alpha)


def included_closure_lu(z: Dbm, z2plus: Dbm, alpha: BoundMap) -> bool:
    z = canonicalize(z)
    if is_empty(z):
        return True
    return not not_included_closure_lu(z, z2plus, alpha)


def alpha_of(lu: LuBounds) -> np.ndarray:
    return np.maximum(bound_array(lu.L), bound_array(lu.U))
