"""Symbolic successors of the synchronized product."""

from __future__ import annotations

import itertools
from typing import NamedTuple

from tareach.dbm import ClockAtom, Dbm, zone_successor
from tareach.model.network import DiscreteState, Network, compare

Label = tuple[tuple[int, int], ...]
"""Participating ``(process, edge index)`` pairs, sender first."""


class Successor(NamedTuple):
    label: Label
    guard: tuple[ClockAtom, ...]
    """Combined guard with folded invariants; this is what bound propagation reads."""
    resets: tuple[int, ...]
    state: DiscreteState
    zone: Dbm


def _int_enabled(edge, ints) -> bool:
    return all(compare(ints[v], op, c) for v, op, c in edge.int_guard)


def enabled_moves(net: Network, s: DiscreteState) -> list[Label]:
    """Discrete moves allowed from ``s``, in process / edge / partner order.

    Integer guards are evaluated here; clock guards are left to the zone.
    """
    moves: list[Label] = []
    procs = net.processes
    for p, proc in enumerate(procs):
        for ei in proc.out[s.locs[p]]:
            e = proc.edges[ei]
            if not _int_enabled(e, s.ints):
                continue
            if e.sync is None:
                moves.append(((p, ei),))
                continue
            if not e.sync.send:
                continue
            chan = net.channels[e.sync.channel]
            receivers = []
            for q, other in enumerate(procs):
                if q == p:
                    continue
                options = [
                    (q, fi)
                    for fi in other.out[s.locs[q]]
                    if other.edges[fi].sync == (e.sync.channel, False) and _int_enabled(other.edges[fi], s.ints)
                ]
                if chan.broadcast:
                    if options:
                        receivers.append(options)
                else:
                    moves.extend(((p, ei), r) for r in options)
            if chan.broadcast:
                moves.extend(((p, ei),) + combo for combo in itertools.product(*receivers))
    return moves


def move_target(net: Network, s: DiscreteState, label: Label):
    """``(guard, resets, target state)`` for a move.

    The guard conjoins the edge guards, the invariants of every current
    location, and the invariants of the new locations restricted to clocks
    the move does not reset.  For upper-bound invariants that is exact
    under delay-then-fire.
    """
    locs = list(s.locs)
    guard: list[ClockAtom] = []
    resets: list[int] = []
    ints = s.ints
    for p, ei in label:
        e = net.processes[p].edges[ei]
        guard.extend(e.guard)
        resets.extend(x for x in e.resets if x not in resets)
        locs[p] = e.dst
        ints = net.apply_updates(ints, e.updates)
    for p, l in enumerate(s.locs):
        guard.extend(net.processes[p].locations[l].invariant)
    for p, l in enumerate(locs):
        if l != s.locs[p] or any(q == p for q, _ in label):
            guard.extend(a for a in net.processes[p].locations[l].invariant if a[0] not in resets)
    seen = set()
    unique = tuple(a for a in guard if not (a in seen or seen.add(a)))
    return unique, tuple(resets), DiscreteState(tuple(locs), ints)


def product_successors(net: Network, s: DiscreteState, z: Dbm) -> list[Successor]:
    """All zone-graph successors of ``(s, z)``, empty zones included."""
    out = []
    for label in enabled_moves(net, s):
        guard, resets, target = move_target(net, s, label)
        out.append(Successor(label, guard, resets, target, zone_successor(z, guard, resets)))
    return out


def initial_zone(net: Network) -> Dbm:
    return Dbm.zero(net.nclocks)
