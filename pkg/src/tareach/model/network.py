"""Networks of timed automata with bounded integers and channels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from tareach.dbm import ClockAtom

IntAtom = tuple[int, str, int]
"""``(int variable index, op, constant)``; ``op`` in ``< <= == != >= >``."""

Update = tuple[int, str, int]
"""``(int variable index, kind, constant)``: kind ``=`` assigns, ``+`` / ``-`` shift."""


class DiscreteState(NamedTuple):
    locs: tuple[int, ...]
    ints: tuple[int, ...]


class Sync(NamedTuple):
    channel: int
    send: bool


@dataclass(frozen=True)
class IntVar:
    name: str
    lo: int
    hi: int
    init: int


@dataclass(frozen=True)
class Channel:
    name: str
    broadcast: bool = False


@dataclass(frozen=True)
class Location:
    name: str
    initial: bool = False
    accepting: bool = False
    invariant: tuple[ClockAtom, ...] = ()


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    guard: tuple[ClockAtom, ...] = ()
    int_guard: tuple[IntAtom, ...] = ()
    sync: Optional[Sync] = None
    resets: tuple[int, ...] = ()
    updates: tuple[Update, ...] = ()


@dataclass(frozen=True)
class Process:
    name: str
    locations: tuple[Location, ...]
    edges: tuple[Edge, ...]
    initial: int = 0
    out: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)
    """Edge indices leaving each location, in file order.  Derived."""

    def __post_init__(self) -> None:
        out = [[] for _ in self.locations]
        for i, e in enumerate(self.edges):
            out[e.src].append(i)
        object.__setattr__(self, "out", tuple(tuple(o) for o in out))

    def loc_index(self, name: str) -> int:
        for i, loc in enumerate(self.locations):
            if loc.name == name:
                return i
        raise KeyError(name)


class LocLiteral(NamedTuple):
    process: int
    location: int
    positive: bool = True


class IntLiteral(NamedTuple):
    var: int
    op: str
    const: int


Literal = LocLiteral | IntLiteral


@dataclass(frozen=True)
class Query:
    """A disjunction of conjunctions of literals."""

    disjuncts: tuple[tuple[Literal, ...], ...]


def compare(a: int, op: str, b: int) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op in ("==", "="):
        return a == b
    if op == "!=":
        return a != b
    if op == ">=":
        return a >= b
    if op == ">":
        return a > b
    raise ValueError(f"unknown comparison {op!r}")


class ModelRangeError(RuntimeError):
    """An integer update left the declared range of its variable."""


@dataclass(frozen=True)
class Network:
    """A synchronized product of processes over shared clocks and integers.

    Clocks are indexed from 1 in atoms, matching DBM indices; ``clocks[0]``
    is clock 1.  A discrete state is a target when some process sits in an
    accepting location or when the query holds.
    """

    name: str
    clocks: tuple[str, ...]
    ints: tuple[IntVar, ...]
    channels: tuple[Channel, ...]
    processes: tuple[Process, ...]
    query: Optional[Query] = None

    @property
    def nclocks(self) -> int:
        return len(self.clocks)

    def initial_state(self) -> DiscreteState:
        return DiscreteState(
            tuple(p.initial for p in self.processes), tuple(v.init for v in self.ints)
        )

    def is_target(self, s: DiscreteState) -> bool:
        for p, l in zip(self.processes, s.locs):
            if p.locations[l].accepting:
                return True
        if self.query is None:
            return False
        return any(all(self._holds(lit, s) for lit in conj) for conj in self.query.disjuncts)

    @staticmethod
    def _holds(lit: Literal, s: DiscreteState) -> bool:
        if isinstance(lit, LocLiteral):
            return (s.locs[lit.process] == lit.location) == lit.positive
        return compare(s.ints[lit.var], lit.op, lit.const)

    def apply_updates(self, ints: tuple[int, ...], updates) -> tuple[int, ...]:
        if not updates:
            return ints
        vals = list(ints)
        for var, kind, c in updates:
            if kind == "=":
                vals[var] = c
            elif kind == "+":
                vals[var] += c
            else:
                vals[var] -= c
            v = self.ints[var]
            if not v.lo <= vals[var] <= v.hi:
                raise ModelRangeError(f"{v.name} := {vals[var]} leaves [{v.lo}, {v.hi}]")
        return tuple(vals)

    def describe_state(self, s: DiscreteState) -> str:
        locs = ", ".join(f"{p.name}.{p.locations[l].name}" for p, l in zip(self.processes, s.locs))
        ints = ", ".join(f"{v.name}={x}" for v, x in zip(self.ints, s.ints))
        return f"<{locs}{'; ' + ints if ints else ''}>"

    def describe_label(self, label: tuple[tuple[int, int], ...]) -> str:
        parts = []
        for p, e in label:
            proc = self.processes[p]
            edge = proc.edges[e]
            parts.append(f"{proc.name}:{proc.locations[edge.src].name}->{proc.locations[edge.dst].name}")
        return " | ".join(parts)
