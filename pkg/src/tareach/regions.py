"""Brute-force region reference implementations.

Everything here enumerates a-regions explicitly and is meant for tests and
the ``--oracle`` cross-check mode; the search never calls it on its own.

A clock whose bound is ``-inf`` is never compared, so regions do not
constrain it at all (it gets the single band "free").
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from tareach.approx import NO_BOUND, BoundMap, LuBounds, bound_array
from tareach.dbm import Dbm, canonicalize, contains, is_empty, min_graph
from tareach.weights import INF_RAW, LE_ZERO_RAW, Weight, raw_add, raw_neg

MAX_CLOCKS = 4
MAX_BOUND = 6


class OracleScaleError(ValueError):
    """The instance is too large for explicit region enumeration."""


class OracleDisagreement(AssertionError):
    """Two independent criteria that must agree did not."""


Band = tuple[str, int]
"""``("point", c)``, ``("open", c)`` for ``c-1 < x < c``, ``("above", a)``, ``("free", 0)``."""


@dataclass(frozen=True)
class Region:
    bands: tuple[Band, ...]
    frac_order: tuple[frozenset[int], ...] = ()
    """Open-interval clocks (0-based) grouped by equal fractional part, increasing."""

    def describe(self) -> str:
        parts = []
        for i, (kind, c) in enumerate(self.bands):
            name = f"x{i + 1}"
            if kind == "point":
                parts.append(f"{name}={c}")
            elif kind == "open":
                parts.append(f"{c - 1}<{name}<{c}")
            elif kind == "above":
                parts.append(f"{name}>{c}")
        if len(self.frac_order) > 1:
            parts.append(" < ".join("=".join(f"fx{i + 1}" for i in sorted(b)) for b in self.frac_order))
        return " & ".join(parts) or "true"


def check_scale(alpha: BoundMap) -> np.ndarray:
    a = bound_array(alpha)
    if len(a) > MAX_CLOCKS:
        raise OracleScaleError(f"region oracle limited to {MAX_CLOCKS} clocks, got {len(a)}")
    if np.any(a > MAX_BOUND):
        raise OracleScaleError(f"region oracle limited to bounds <= {MAX_BOUND}, got {list(a)}")
    return a


def _bands(bound: int) -> list[Band]:
    if bound <= NO_BOUND:
        return [("free", 0)]
    out: list[Band] = [("point", 0)]
    for c in range(1, bound + 1):
        out.append(("open", c))
        out.append(("point", c))
    out.append(("above", bound))
    return out


def _ordered_partitions(items: tuple[int, ...]) -> Iterator[tuple[frozenset[int], ...]]:
    if not items:
        yield ()
        return
    for k in range(1, len(items) + 1):
        for first in itertools.combinations(items, k):
            rest = tuple(i for i in items if i not in first)
            for tail in _ordered_partitions(rest):
                yield (frozenset(first),) + tail


def enumerate_regions(alpha: BoundMap) -> list[Region]:
    """Every a-region over ``len(alpha)`` clocks, each exactly once."""
    a = check_scale(alpha)
    out = []
    for bands in itertools.product(*(_bands(int(b)) for b in a)):
        open_clocks = tuple(i for i, (kind, _) in enumerate(bands) if kind == "open")
        for order in _ordered_partitions(open_clocks):
            out.append(Region(tuple(bands), order))
    return out


def region_graph(r: Region) -> Dbm:
    """Canonical distance graph of a region."""
    n = len(r.bands)
    edges: dict[tuple[int, int], Weight] = {}
    for i, (kind, c) in enumerate(r.bands):
        x = i + 1
        if kind == "point":
            edges[0, x] = Weight.le(c)
            edges[x, 0] = Weight.le(-c)
        elif kind == "open":
            edges[0, x] = Weight.lt(c)
            edges[x, 0] = Weight.lt(-(c - 1))
        elif kind == "above":
            edges[x, 0] = Weight.lt(-c)
    rank = {i: k for k, block in enumerate(r.frac_order) for i in block}
    for i, j in itertools.permutations(rank, 2):
        d = (r.bands[j][1] - 1) - (r.bands[i][1] - 1)  # integer part of x_j - x_i
        if rank[i] == rank[j]:
            edges[i + 1, j + 1] = Weight.le(d)
        elif rank[i] < rank[j]:
            edges[i + 1, j + 1] = Weight.lt(d + 1)
        else:
            edges[i + 1, j + 1] = Weight.lt(d)
    return canonicalize(Dbm.from_edges(n, edges))


def region_of(valuation: Sequence[Fraction | int], alpha: BoundMap) -> Region:
    """The region holding a valuation."""
    a = bound_array(alpha)
    bands: list[Band] = []
    fracs: dict[int, Fraction] = {}
    for i, v in enumerate(valuation):
        v = Fraction(v)
        if a[i] <= NO_BOUND:
            bands.append(("free", 0))
        elif v > a[i]:
            bands.append(("above", int(a[i])))
        elif v.denominator == 1:
            bands.append(("point", int(v)))
        else:
            bands.append(("open", math.ceil(v)))
            fracs[i] = v - math.floor(v)
    order = tuple(
        frozenset(i for i in fracs if fracs[i] == f) for f in sorted(set(fracs.values()))
    )
    return Region(tuple(bands), order)


def _batch_close(M: np.ndarray) -> np.ndarray:
    for k in range(M.shape[-1]):
        np.minimum(M, raw_add(M[..., :, k : k + 1], M[..., k : k + 1, :]), out=M)
    return M


class RegionTable:
    """All regions for one bound map, with their graphs stacked for batch tests."""

    def __init__(self, alpha: BoundMap):
        self.alpha = tuple(int(v) for v in check_scale(alpha))
        self.regions = enumerate_regions(alpha)
        self.graphs = np.stack([region_graph(r).m for r in self.regions])

    def __len__(self) -> int:
        return len(self.regions)

    def intersecting(self, z: Dbm) -> np.ndarray:
        """Mask of regions meeting ``z``, by two criteria that must agree.

        Pairwise criterion: some ``Z_yx + R_xy <= (<, 0)``.  Direct
        criterion: ``min(G_R, G_Z)`` has a negative cycle.
        """
        z = canonicalize(z)
        if z.dim != self.graphs.shape[1]:
            raise ValueError(f"zone has {z.nclocks} clocks, table has {self.graphs.shape[1] - 1}")
        return self.intersecting_many(z.m[None])[0]

    def intersecting_many(self, Z: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Row ``i`` is the region mask of the canonical raw matrix ``Z[i]``."""
        out = np.zeros((len(Z), len(self.regions)), dtype=bool)
        R = self.graphs[None]
        for s in range(0, len(Z), chunk):
            Zc = Z[s : s + chunk]
            nonempty = np.all(np.diagonal(Zc, axis1=1, axis2=2) >= LE_ZERO_RAW, axis=1)
            Zc = Zc[:, None]
            pairwise = np.any(raw_add(np.swapaxes(Zc, -1, -2), R) < LE_ZERO_RAW, axis=(-2, -1))
            M = _batch_close(np.minimum(R, Zc))
            direct = np.any(np.diagonal(M, axis1=-2, axis2=-1) < LE_ZERO_RAW, axis=-1)
            if not np.array_equal(pairwise, direct):
                i, j = np.argwhere(pairwise != direct)[0]
                raise OracleDisagreement(
                    f"pairwise and direct emptiness differ on region {self.regions[j].describe()} "
                    f"vs {Dbm(Z[s + i], canonical=True)}"
                )
            out[s : s + chunk] = ~direct & nonempty[:, None]
        return out

    def closure_inclusion_matrix(self, Z: np.ndarray, Z2: np.ndarray) -> np.ndarray:
        """``[i, j]`` is whether ``Z[i]`` lies in the closure of ``Z2[j]``."""
        H = self.intersecting_many(Z).astype(np.float32)
        H2 = (~self.intersecting_many(Z2)).astype(np.float32)
        return (H @ H2.T) == 0


@lru_cache(maxsize=512)
def region_table(alpha: tuple[int, ...]) -> RegionTable:
    return RegionTable(alpha)


def _table(alpha: BoundMap) -> RegionTable:
    return region_table(tuple(int(v) for v in bound_array(alpha)))


def region_intersects_zone(r: Region, z: Dbm) -> bool:
    """Whether region ``r`` meets zone ``z``, checked by both criteria."""
    R = region_graph(r)
    z = canonicalize(z)
    if is_empty(z):
        return False
    n = z.dim
    pairwise = any(
        raw_add(int(z.m[y, x]), int(R.m[x, y])) < LE_ZERO_RAW for x in range(n) for y in range(n)
    )
    direct = is_empty(min_graph(R, z))
    if pairwise != direct:
        raise OracleDisagreement(f"criteria disagree on {r.describe()} vs {z}")
    return not direct


def closure_inclusion(z: Dbm, z2: Dbm, alpha: BoundMap) -> bool:
    """``Z ⊆ Closure_a(Z')``: every region meeting ``z`` also meets ``z2``."""
    table = _table(alpha)
    hit = table.intersecting(z)
    hit2 = table.intersecting(z2)
    return not bool(np.any(hit & ~hit2))


def closure_inclusion_lu(z: Dbm, z2plus: Dbm, alpha: BoundMap) -> bool:
    """Inclusion in the closure of a raw ``Extra+_LU`` graph, via its canonical form."""
    return closure_inclusion(z, canonicalize(z2plus), alpha)


# least region edges ------------------------------------------------------


def _raw_ceil(a: int) -> int:
    return a if a & 1 else a + 2


def _neg_ceil(a: int) -> int | None:
    """``ceil(-w)`` in raw form; None stands for ``-inf`` (when ``w`` is infinite)."""
    if a >= INF_RAW:
        return None
    return _raw_ceil(int(raw_neg(a)))


def min_region_edge_formula(z: Dbm, x: int, y: int, alpha: BoundMap, *, variant: str = "proof") -> Weight:
    """Closed form for the least ``R_xy`` over regions meeting ``z``.

    ``variant="proof"`` adds ``(<, -a_x)`` in the two-clock case;
    ``variant="statement"`` adds ``(<=, -a_x)`` instead.
    """
    a = bound_array(alpha)
    if np.any(a <= NO_BOUND):
        raise ValueError("closed forms need finite bounds")
    z = canonicalize(z)
    if is_empty(z):
        raise ValueError("zone must be nonempty")
    Z = z.m
    if x == y:
        return Weight.le(0)
    if x == 0:
        ay = int(a[y - 1])
        if Z[y, 0] < 2 * (-ay) + 1:
            return Weight.lt(math.inf)
        return Weight.from_raw(_neg_ceil(int(Z[y, 0])))
    if y == 0:
        ax = int(a[x - 1])
        c = _neg_ceil(int(Z[0, x]))
        lt_neg = 2 * (-ax)
        return Weight.from_raw(lt_neg if c is None else max(c, lt_neg))
    ax, ay = int(a[x - 1]), int(a[y - 1])
    if Z[y, 0] < 2 * (-ay) + 1:
        return Weight.lt(math.inf)
    first = _neg_ceil(int(Z[y, x]))
    shift = 2 * (-ax) if variant == "proof" else 2 * (-ax) + 1
    second = raw_add(_neg_ceil(int(Z[y, 0])), shift)
    return Weight.from_raw(second if first is None else max(first, second))


def min_region_edge_enumerated(z: Dbm, x: int, y: int, alpha: BoundMap) -> Weight:
    table = _table(alpha)
    hit = table.intersecting(z)
    if not hit.any():
        raise ValueError("zone must be nonempty")
    return Weight.from_raw(int(table.graphs[hit, x, y].min()))


def min_region_edge(z: Dbm, x: int, y: int, alpha: BoundMap) -> Weight:
    """Least region edge value, closed form cross-checked by enumeration."""
    closed = min_region_edge_formula(z, x, y, alpha)
    enumerated = min_region_edge_enumerated(z, x, y, alpha)
    if closed != enumerated:
        raise OracleDisagreement(f"least R_{x}{y}: formula {closed} vs enumeration {enumerated} on {z}")
    return closed


# LU preorder ---------------------------------------------------------------


def lu_preorder_le(v1: Sequence[Fraction | int], v2: Sequence[Fraction | int], lu: LuBounds) -> bool:
    """``v1 ≼_LU v2``: per clock, equal, or ``L < v1 < v2``, or ``U < v2 < v1``."""
    for a, b, l, u in zip(v1, v2, lu.L, lu.U):
        if a == b:
            continue
        if l < a < b:
            continue
        if u < b < a:
            continue
        return False
    return True


def sampled_alu_membership(z: Dbm, v: Sequence[Fraction | int], lu: LuBounds) -> bool:
    """Search a witness ``v' ∈ z`` with ``v' ≼_LU v`` on a half-integer grid.

    Sound when it answers True; a False answer only means no grid witness
    exists.
    """
    check_scale(lu.alpha())
    z = canonicalize(z)
    if is_empty(z):
        return False
    finite = [b for b in list(lu.L) + list(lu.U) if b != -math.inf]
    consts = np.abs(z.m[z.m < INF_RAW] >> 1)
    # the box must hold the zone's own corners as well as the bound bands
    top = max(max(finite, default=0), int(consts.max(initial=0))) + 2
    grid = [Fraction(k, 2) for k in range(0, 2 * int(top) + 1)]
    per_clock = []
    for i, target in enumerate(v):
        target = Fraction(target)
        cands = {c for c in grid + [target] if lu_preorder_le([c], [target], LuBounds([lu.L[i]], [lu.U[i]]))}
        per_clock.append(sorted(cands))
    return any(contains(z, cand) for cand in itertools.product(*per_clock))


def sample_grid(nclocks: int, top: int) -> Iterator[tuple[Fraction, ...]]:
    """All valuations with coordinates in ``{0, 1/2, ..., top}``."""
    axis = [Fraction(k, 2) for k in range(0, 2 * top + 1)]
    return itertools.product(axis, repeat=nclocks)


# random instances ------------------------------------------------------------


def random_zone(rng: np.random.Generator, nclocks: int, cmax: int, p_inf: float = 0.3) -> Dbm:
    """A random canonical nonempty zone with edge constants in ``[-cmax, cmax]``.

    Edges are drawn around a random half-integer point ``v`` that the zone
    always contains: each bound is ``ceil(v_y - v_x)`` plus a small slack,
    strict only when that still admits ``v``.  Each edge is dropped to
    infinity with probability ``p_inf``.
    """
    d = nclocks + 1
    v = np.concatenate(([0], rng.integers(0, 2 * cmax + 1, size=nclocks))) / 2
    diff = v[None, :] - v[:, None]  # v_y - v_x at [x, y]
    c = np.minimum(np.ceil(diff).astype(np.int64) + rng.integers(0, 3, size=(d, d)), cmax)
    strict = (rng.random((d, d)) < 0.5) & (c > diff)
    m = 2 * c + np.where(strict, 0, 1)
    m = np.where(rng.random((d, d)) < p_inf, INF_RAW, m)
    np.fill_diagonal(m, LE_ZERO_RAW)
    z = canonicalize(Dbm(m.astype(np.int64)))
    assert not is_empty(z)
    return z
