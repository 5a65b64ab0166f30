"""Distance graphs (DBMs) over clocks ``x1..xn`` plus the reference clock ``x0``.

Entry ``m[x, y]`` is the raw weight of the edge ``x -> y``, i.e. the
constraint ``y - x <= c`` (or ``<``).  So ``m[0, x]`` is an upper bound on
``x`` and ``m[x, 0]`` bounds ``-x`` from above.

Valuations are nonnegative, so :func:`canonicalize` tightens every
``m[x, 0]`` to at most ``(<=, 0)`` before closing the graph.  This does not
change the denoted set of valuations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from tareach.weights import INF_RAW, LE_ZERO_RAW, Weight, raw_add

ClockAtom = tuple[int, str, int]
"""``(clock index >= 1, op, constant)`` with op in ``< <= == >= >``."""

_EMPTY_MARK = 0  # raw (<, 0): a negative diagonal entry


class Dbm:
    """A distance graph, stored as a square ``int64`` matrix of raw weights.

    Instances are treated as immutable values; every operation returns a
    new ``Dbm``.  ``canonical`` records whether every entry is already the
    shortest-path weight.
    """

    __slots__ = ("m", "canonical")

    def __init__(self, m: np.ndarray, canonical: bool = False):
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"a DBM must be a non-empty square matrix, got shape {m.shape}")
        self.m = m
        self.canonical = canonical

    # construction -----------------------------------------------------

    @classmethod
    def unconstrained(cls, nclocks: int) -> Dbm:
        """Raw graph with every off-diagonal edge at ``(<, inf)``."""
        m = np.full((nclocks + 1, nclocks + 1), INF_RAW, dtype=np.int64)
        np.fill_diagonal(m, LE_ZERO_RAW)
        return cls(m, canonical=False)

    @classmethod
    def universe(cls, nclocks: int) -> Dbm:
        """Canonical graph of all nonnegative valuations."""
        m = np.full((nclocks + 1, nclocks + 1), INF_RAW, dtype=np.int64)
        m[:, 0] = LE_ZERO_RAW
        np.fill_diagonal(m, LE_ZERO_RAW)
        return cls(m, canonical=True)

    @classmethod
    def zero(cls, nclocks: int) -> Dbm:
        """The singleton zone holding the all-zero valuation."""
        return cls(np.full((nclocks + 1, nclocks + 1), LE_ZERO_RAW, dtype=np.int64), canonical=True)

    @classmethod
    def from_edges(cls, nclocks: int, edges: Mapping[tuple[int, int], Weight]) -> Dbm:
        """Raw (non-canonical) graph with the given edges; others unconstrained."""
        z = cls.unconstrained(nclocks)
        for (x, y), w in edges.items():
            z.m[x, y] = min(int(z.m[x, y]), w.to_raw())
        return z

    @classmethod
    def from_atoms(cls, nclocks: int, atoms: Iterable[ClockAtom]) -> Dbm:
        """Canonical zone of the nonnegative valuations satisfying ``atoms``."""
        return intersect_guard(cls.universe(nclocks), atoms)

    # access -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    @property
    def nclocks(self) -> int:
        return self.m.shape[0] - 1

    def entry(self, x: int, y: int) -> Weight:
        return Weight.from_raw(int(self.m[x, y]))

    def copy(self) -> Dbm:
        return Dbm(self.m.copy(), self.canonical)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dbm):
            return NotImplemented
        return self.m.shape == other.m.shape and bool(np.array_equal(self.m, other.m))

    def __hash__(self) -> int:
        return hash(self.m.tobytes())

    def __repr__(self) -> str:
        if self.canonical and is_empty(self):
            return "Dbm(empty)"
        parts = []
        n = self.dim
        for x in range(n):
            for y in range(n):
                if x == y or self.m[x, y] >= INF_RAW:
                    continue
                if x != 0 and y == 0 and self.m[x, y] == LE_ZERO_RAW:
                    continue
                parts.append(f"x{y}-x{x}{'<' if self.entry(x, y).strict else '<='}{self.entry(x, y).value}")
        tag = "" if self.canonical else ", raw"
        return f"Dbm({' & '.join(parts) or 'true'}{tag})"


def _check_dims(a: Dbm, b: Dbm) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _close(m: np.ndarray) -> np.ndarray:
    """Floyd-Warshall on raw weights, in place; stops once a negative cycle shows."""
    n = m.shape[0]
    for k in range(n):
        np.minimum(m, raw_add(m[:, k : k + 1], m[k : k + 1, :]), out=m)
        if m[k, k] < LE_ZERO_RAW:
            break
    return m


def _mark_empty(m: np.ndarray) -> np.ndarray:
    m[0, 0] = _EMPTY_MARK
    return m


def canonicalize(z: Dbm) -> Dbm:
    """Shortest-path closure of ``z``.  Idempotent; O(dim^3)."""
    if z.canonical:
        return z
    m = z.m.copy()
    np.minimum(m[:, 0], LE_ZERO_RAW, out=m[:, 0])
    diag = np.diagonal(m).copy()
    np.fill_diagonal(m, np.minimum(diag, LE_ZERO_RAW))
    _close(m)
    if np.any(np.diagonal(m) < LE_ZERO_RAW):
        _mark_empty(m)
    return Dbm(m, canonical=True)


def is_empty(z: Dbm) -> bool:
    """True iff the graph has a cycle of weight at most ``(<, 0)``."""
    if not z.canonical:
        z = canonicalize(z)
    return bool(np.any(np.diagonal(z.m) < LE_ZERO_RAW))


def constrain(z: Dbm, x: int, y: int, raw: int) -> Dbm:
    """Tighten edge ``x -> y`` of a canonical zone to ``raw``, keeping it canonical.

    O(dim^2): only paths through the new edge can get shorter.
    """
    m = z.m
    if raw >= m[x, y]:
        return z
    if raw_add(raw, int(m[y, x])) < LE_ZERO_RAW:
        return Dbm(_mark_empty(m.copy()), canonical=True)
    via = raw_add(m[:, x], raw)
    out = np.minimum(m, raw_add(via[:, None], m[y][None, :]))
    return Dbm(out, canonical=True)


def _atom_edges(atom: ClockAtom) -> list[tuple[int, int, int]]:
    x, op, c = atom
    if op == "<":
        return [(0, x, 2 * c)]
    if op == "<=":
        return [(0, x, 2 * c + 1)]
    if op == ">":
        return [(x, 0, -2 * c)]
    if op == ">=":
        return [(x, 0, -2 * c + 1)]
    if op in ("==", "="):
        return [(0, x, 2 * c + 1), (x, 0, -2 * c + 1)]
    raise ValueError(f"unknown comparison {op!r}")


def intersect_guard(z: Dbm, guard: Iterable[ClockAtom]) -> Dbm:
    """Conjoin clock atoms ``x # c`` to a zone; the result is canonical."""
    z = canonicalize(z)
    for atom in guard:
        for x, y, raw in _atom_edges(atom):
            if is_empty(z):
                return z
            z = constrain(z, x, y, raw)
    return z


def reset(z: Dbm, clocks: Iterable[int]) -> Dbm:
    """Set the given clocks to zero.  Preserves canonical form."""
    clocks = list(clocks)
    if not clocks:
        return z
    z = canonicalize(z)
    if is_empty(z):
        return z
    m = z.m.copy()
    for x in clocks:
        m[x, :] = m[0, :]
        m[:, x] = m[:, 0]
    return Dbm(m, canonical=True)


def elapse(z: Dbm) -> Dbm:
    """Let time pass: drop every upper bound.  Preserves canonical form."""
    z = canonicalize(z)
    if is_empty(z):
        return z
    m = z.m.copy()
    m[0, 1:] = INF_RAW
    return Dbm(m, canonical=True)


def zone_successor(z: Dbm, guard: Iterable[ClockAtom], resets: Iterable[int]) -> Dbm:
    """Delay, then take a transition with ``guard``, then reset ``resets``.

    Empty results are returned as empty zones, not dropped.
    """
    return reset(intersect_guard(elapse(z), guard), resets)


def min_graph(g1: Dbm, g2: Dbm) -> Dbm:
    """Entrywise minimum: the (non-canonical) graph of the intersection."""
    _check_dims(g1, g2)
    return Dbm(np.minimum(g1.m, g2.m), canonical=False)


def dbm_included(z: Dbm, z2: Dbm) -> bool:
    """Edgewise comparison of two canonical graphs."""
    _check_dims(z, z2)
    return bool(np.all(z.m <= z2.m))


def contains(z: Dbm, valuation: Sequence[Fraction | int]) -> bool:
    """Direct constraint check of a valuation for clocks ``1..n`` (any graph)."""
    if len(valuation) != z.nclocks:
        raise ValueError(f"expected {z.nclocks} clock values, got {len(valuation)}")
    if any(v < 0 for v in valuation):
        return False
    vals = [Fraction(0)] + [Fraction(v) for v in valuation]
    n = z.dim
    for x in range(n):
        for y in range(n):
            raw = int(z.m[x, y])
            if raw >= INF_RAW:
                continue
            d = vals[y] - vals[x]
            c = raw >> 1
            if raw & 1:
                if d > c:
                    return False
            elif d >= c:
                return False
    return True
