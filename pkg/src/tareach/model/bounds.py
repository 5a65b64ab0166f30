"""Static per-location clock bounds, and the bound combination used on edges.

Bounds are pairs of ``int64`` arrays ``(L, U)`` over clocks ``1..n``, with
:data:`~tareach.approx.NO_BOUND` standing for ``-inf``.  In M mode every
guard atom feeds both arrays, so ``L == U == a``.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from tareach.approx import NO_BOUND, LuBounds, bounds_tuple
from tareach.dbm import ClockAtom
from tareach.model.network import Network

_FEEDS_L = {">", ">=", "==", "="}
_FEEDS_U = {"<", "<=", "==", "="}


def empty_bounds(nclocks: int) -> tuple[np.ndarray, np.ndarray]:
    return np.full(nclocks, NO_BOUND, dtype=np.int64), np.full(nclocks, NO_BOUND, dtype=np.int64)


def guard_bounds(guard: Iterable[ClockAtom], nclocks: int, lu: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Bounds contributed by guard constants alone."""
    L, U = empty_bounds(nclocks)
    for x, op, c in guard:
        if not lu or op in _FEEDS_L:
            L[x - 1] = max(L[x - 1], c)
        if not lu or op in _FEEDS_U:
            U[x - 1] = max(U[x - 1], c)
    return L, U


def maxedge(guard_lu, resets: Iterable[int], child_L: np.ndarray, child_U: np.ndarray):
    """Drop reset clocks from the child's bounds, then max with the guard's."""
    gL, gU = guard_lu
    L = child_L.copy()
    U = child_U.copy()
    for x in resets:
        L[x - 1] = NO_BOUND
        U[x - 1] = NO_BOUND
    np.maximum(L, gL, out=L)
    np.maximum(U, gU, out=U)
    return L, U


class StaticBounds:
    """Location-indexed fixpoint of the edge equations, per process.

    ``bounds[p][l]`` is the ``(L, U)`` pair of location ``l`` of process
    ``p``.  A location's own invariant counts, since every move taken while
    the process sits there conjoins it.  The bound of a global state is
    the pointwise max over its components.
    """

    def __init__(self, net: Network, lu: bool = True):
        self.net = net
        self.lu = lu
        n = net.nclocks
        self.bounds = []
        for proc in net.processes:
            locs = [empty_bounds(n) for _ in proc.locations]
            for i, loc in enumerate(proc.locations):
                locs[i] = guard_bounds(loc.invariant, n, lu)
            edge_guards = []
            for e in proc.edges:
                inv_dst = [a for a in proc.locations[e.dst].invariant if a[0] not in e.resets]
                atoms = list(e.guard) + list(proc.locations[e.src].invariant) + inv_dst
                edge_guards.append(guard_bounds(atoms, n, lu))
            changed = True
            while changed:
                changed = False
                for e, g in zip(proc.edges, edge_guards):
                    L, U = maxedge(g, e.resets, *locs[e.dst])
                    oL, oU = locs[e.src]
                    nL, nU = np.maximum(oL, L), np.maximum(oU, U)
                    if not (np.array_equal(nL, oL) and np.array_equal(nU, oU)):
                        locs[e.src] = (nL, nU)
                        changed = True
            self.bounds.append(locs)

    def of_state(self, locs: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        L, U = empty_bounds(self.net.nclocks)
        for p, l in enumerate(locs):
            pl, pu = self.bounds[p][l]
            np.maximum(L, pl, out=L)
            np.maximum(U, pu, out=U)
        return L, U

    def global_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        L, U = empty_bounds(self.net.nclocks)
        for locs in self.bounds:
            for pl, pu in locs:
                np.maximum(L, pl, out=L)
                np.maximum(U, pu, out=U)
        return L, U


def static_bounds(net: Network) -> dict[tuple[str, str], LuBounds]:
    """Per ``(process, location)`` LU bounds, ``-inf`` as ``-math.inf``."""
    sb = StaticBounds(net, lu=True)
    out = {}
    for proc, locs in zip(net.processes, sb.bounds):
        for loc, (L, U) in zip(proc.locations, locs):
            out[proc.name, loc.name] = LuBounds(bounds_tuple(L), bounds_tuple(U))
    return out


def static_global_bounds(net: Network) -> LuBounds:
    L, U = StaticBounds(net, lu=True).global_bounds()
    return LuBounds(bounds_tuple(L), bounds_tuple(U))
