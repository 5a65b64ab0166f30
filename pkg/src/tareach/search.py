"""Reachability by depth-first search with closure subsumption.

The tree is built as in the on-the-fly algorithm: nodes hold exact zones
plus a bound pair ``(L, U)``; a node whose zone lies in the closure of a
stored node's zone (under that node's current bounds) becomes *tentative*
and copies the subsumer's bounds.  Bounds flow upward from children
through :func:`~tareach.model.bounds.maxedge`.  When a subsumer's bounds
grow enough to break an inclusion, the tentative node is reopened.

Four configurations are named in :data:`ALGORITHMS`.  The two
``extra-*-static`` ones are the classical baseline: zones are extrapolated
with static bounds before storing, and subsumption is plain inclusion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from tareach import regions
from tareach.approx import (
    LuBounds,
    below_thresholds,
    extra_lu_plus,
    extra_lu_plus_raw,
    inclusion_thresholds,
    not_included_closure,
    not_included_closure_lu,
)
from tareach.dbm import Dbm, canonicalize, dbm_included, is_empty, zone_successor
from tareach.model.bounds import StaticBounds, empty_bounds, guard_bounds, maxedge
from tareach.model.network import DiscreteState, Network
from tareach.model.semantics import Label, initial_zone, move_target, product_successors

NEW, EXPANDED, TENTATIVE, EMPTY = "new", "expanded", "tentative", "empty"


@dataclass(frozen=True)
class Options:
    bound_mode: str = "LU"
    """``"LU"`` keeps lower and upper guard constants apart; ``"M"`` merges them."""
    inclusion: str = "closure"
    """``"closure"`` tests against closures of exact zones; ``"convex"`` stores extrapolated zones."""
    bounds: str = "onthefly"
    """``"onthefly"`` propagates bounds through the tree; ``"static"`` uses location analysis."""
    oracle: bool = False
    """Re-check every subsumption verdict by region enumeration (small models only)."""
    max_nodes: int = 2_000_000
    update_limit: int = 100_000
    """Abort if one node's bounds change more often than this."""
    scan: str = "newest"
    """Which covering candidate wins: ``"newest"`` or ``"oldest"`` stored node."""

    def __post_init__(self) -> None:
        if self.bound_mode not in ("LU", "M"):
            raise ValueError(f"bound_mode must be 'LU' or 'M', got {self.bound_mode!r}")
        if self.inclusion not in ("closure", "convex"):
            raise ValueError(f"inclusion must be 'closure' or 'convex', got {self.inclusion!r}")
        if self.bounds not in ("onthefly", "static"):
            raise ValueError(f"bounds must be 'onthefly' or 'static', got {self.bounds!r}")
        if self.scan not in ("newest", "oldest"):
            raise ValueError(f"scan must be 'newest' or 'oldest', got {self.scan!r}")
        if self.inclusion == "convex" and self.bounds == "onthefly":
            raise ValueError("convex extrapolation needs bounds before exploring, so it requires static bounds")

    @property
    def lu(self) -> bool:
        return self.bound_mode == "LU"


ALGORITHMS = {
    "closure-lu": Options("LU", "closure", "onthefly"),
    "closure-m": Options("M", "closure", "onthefly"),
    "extra-lu-static": Options("LU", "convex", "static"),
    "extra-m-static": Options("M", "convex", "static"),
}


class SearchDivergence(RuntimeError):
    """The bound propagation or node budget guard tripped."""


class ReplayError(AssertionError):
    """A witness trace did not replay to a nonempty target zone."""


class Node:
    __slots__ = (
        "id", "state", "zone", "L", "U", "status", "subsumer", "parent", "label",
        "guard_lu", "resets", "children", "dependents", "updates", "_plus", "slot",
    )

    def __init__(self, nid, state, zone, L, U, parent=None, label=None, guard_lu=None, resets=()):
        self.id = nid
        self.state: DiscreteState = state
        self.zone: Dbm = zone
        self.L: np.ndarray = L
        self.U: np.ndarray = U
        self.status = NEW
        self.subsumer: Optional[Node] = None
        self.parent: Optional[Node] = parent
        self.label: Optional[Label] = label
        self.guard_lu = guard_lu
        self.resets = resets
        self.children: list[Node] = []
        self.dependents: dict[int, Node] = {}
        self.updates = 0
        self._plus = None
        self.slot = -1

    @property
    def alpha(self) -> np.ndarray:
        return np.maximum(self.L, self.U)

    def lu_bounds(self) -> LuBounds:
        return LuBounds(self.L, self.U)

    def __repr__(self) -> str:
        return f"Node({self.id}, {self.status}, {self.state})"


class _Bucket:
    """Expanded nodes of one discrete state, with their zones and bounds stacked."""

    def __init__(self, dim: int):
        self.nodes: list[Node] = []
        self.Z = np.empty((4, dim, dim), dtype=np.int64)
        self.L = np.empty((4, dim - 1), dtype=np.int64)
        self.U = np.empty((4, dim - 1), dtype=np.int64)

    def add(self, node: Node) -> None:
        k = len(self.nodes)
        if k == len(self.Z):
            self.Z = np.concatenate((self.Z, np.empty_like(self.Z)))
            self.L = np.concatenate((self.L, np.empty_like(self.L)))
            self.U = np.concatenate((self.U, np.empty_like(self.U)))
        self.Z[k] = node.zone.m
        self.L[k] = node.L
        self.U[k] = node.U
        node.slot = k
        self.nodes.append(node)

    def sync(self, node: Node) -> None:
        self.L[node.slot] = node.L
        self.U[node.slot] = node.U


@dataclass
class Stats:
    visited: int = 0
    """Calls to explore: nodes examined, whether then expanded or subsumed."""
    stored: int = 0
    """Nodes expanded and kept as subsumption candidates."""
    subsumption_tests: int = 0
    reopenings: int = 0
    nodes: int = 0
    """All tree nodes created, empty-zone children included."""
    propagations: int = 0
    oracle_checks: int = 0
    ms: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Verdict:
    reachable: bool
    trace: Optional[list[tuple[Label, DiscreteState]]]
    stats: Stats
    search: Optional["Search"] = field(default=None, repr=False, compare=False)


class Search:
    """One run of the algorithm over a network; keeps the tree for inspection."""

    def __init__(self, net: Network, opts: Options = Options()):
        self.net = net
        self.opts = opts
        self.n = net.nclocks
        self.stats = Stats()
        self.nodes: list[Node] = []
        self.store: dict[DiscreteState, _Bucket] = {}
        self.tentative: dict[int, Node] = {}
        self.static = StaticBounds(net, lu=opts.lu)
        self.main_stack: list[Node] = []
        self.root: Optional[Node] = None

    # node creation ---------------------------------------------------------

    def _bounds_for(self, state: DiscreteState):
        if self.opts.bounds == "static":
            return self.static.of_state(state.locs)
        return empty_bounds(self.n)

    def _new_node(self, state, zone, parent=None, label=None, guard=(), resets=()) -> Node:
        if len(self.nodes) >= self.opts.max_nodes:
            raise SearchDivergence(f"node budget {self.opts.max_nodes} exhausted")
        L, U = self._bounds_for(state)
        if self.opts.inclusion == "convex" and not is_empty(zone):
            zone = canonicalize(extra_lu_plus(zone, LuBounds(L, U)))
        node = Node(len(self.nodes), state, zone, L, U, parent, label,
                    guard_bounds(guard, self.n, self.opts.lu), tuple(resets))
        if is_empty(zone):
            node.status = EMPTY
        self.nodes.append(node)
        self.stats.nodes += 1
        return node

    # subsumption -----------------------------------------------------------

    def _plus_of(self, cand: Node) -> Dbm:
        key = (cand.L.tobytes(), cand.U.tobytes())
        if cand._plus is None or cand._plus[0] != key:
            cand._plus = (key, extra_lu_plus(cand.zone, cand.lu_bounds()))
        return cand._plus[1]

    def covered(self, node: Node, cand: Node) -> bool:
        """Whether ``node``'s zone is subsumed by ``cand`` under the current bounds."""
        self.stats.subsumption_tests += 1
        if self.opts.inclusion == "convex":
            return dbm_included(node.zone, cand.zone)
        alpha = cand.alpha
        if self.opts.lu:
            plus = self._plus_of(cand)
            verdict = not not_included_closure_lu(node.zone, plus, alpha)
        else:
            verdict = not not_included_closure(node.zone, cand.zone, alpha)
        if self.opts.oracle:
            self._oracle_check(node.zone, cand, alpha, verdict)
        return verdict

    def _oracle_check(self, zone: Dbm, cand: Node, alpha: np.ndarray, verdict: bool) -> None:
        try:
            regions.check_scale(alpha)
        except regions.OracleScaleError:
            return
        if self.opts.lu:
            expected = regions.closure_inclusion_lu(zone, self._plus_of(cand), alpha)
        else:
            expected = regions.closure_inclusion(zone, cand.zone, alpha)
        self.stats.oracle_checks += 1
        if expected != verdict:
            raise regions.OracleDisagreement(
                f"inclusion test said {verdict}, regions say {expected}: {zone} vs node {cand.id} {cand.zone}, a={alpha}"
            )

    def _find_subsumer(self, node: Node) -> Optional[Node]:
        """Stored node of the same state that covers ``node``, if any.

        All candidates are tested in one vectorized pass; the statistics
        count only the tests a sequential scan in ``opts.scan`` order would make.
        """
        bucket = self.store.get(node.state)
        if bucket is None:
            return None
        k = len(bucket.nodes)
        Z = bucket.Z[:k]
        if self.opts.inclusion == "convex":
            mask = np.all(node.zone.m <= Z, axis=(1, 2))
        else:
            L, U = bucket.L[:k], bucket.U[:k]
            target = extra_lu_plus_raw(Z, L, U) if self.opts.lu else Z
            K = inclusion_thresholds(node.zone.m, np.maximum(L, U))
            mask = ~below_thresholds(K, target)
        hits = np.flatnonzero(mask)
        if self.opts.scan == "newest":
            first = int(hits[-1]) if len(hits) else -1
            scanned = range(k - 1, max(first, 0) - 1, -1)
        else:
            first = int(hits[0]) if len(hits) else -1
            scanned = range(0, first + 1 if first >= 0 else k)
        self.stats.subsumption_tests += len(scanned)
        if self.opts.oracle and self.opts.inclusion == "closure":
            for j in scanned:
                cand = bucket.nodes[j]
                self._oracle_check(node.zone, cand, cand.alpha, bool(mask[j]))
        return bucket.nodes[first] if first >= 0 else None

    # bound propagation -----------------------------------------------------

    def _contribution(self, child: Node):
        return maxedge(child.guard_lu, child.resets, child.L, child.U)

    def recompute(self, node: Node):
        L, U = empty_bounds(self.n)
        for c in node.children:
            cL, cU = self._contribution(c)
            np.maximum(L, cL, out=L)
            np.maximum(U, cU, out=U)
        return L, U

    def _set_bounds(self, node: Node, L, U) -> Optional[bool]:
        """Store new bounds; None if unchanged, else whether it was a pure increase."""
        if np.array_equal(L, node.L) and np.array_equal(U, node.U):
            return None
        grew = bool(np.all(L >= node.L) and np.all(U >= node.U))
        node.L, node.U = L, U
        if node.slot >= 0:
            self.store[node.state].sync(node)
        node.updates += 1
        self.stats.propagations += 1
        if node.updates > self.opts.update_limit:
            raise SearchDivergence(
                f"bounds of node {node.id} {self.net.describe_state(node.state)} changed "
                f"{node.updates} times; last L={L.tolist()} U={U.tolist()}"
            )
        return grew

    def propagate(self, node: Optional[Node], child: Optional[Node] = None, grew: bool = False) -> None:
        """Re-establish bound invariants above ``node``.

        A task ``(n, c, grew)`` says child ``c`` of ``n`` changed; when the
        change was a pure increase, ``n`` only needs a max with that
        child's contribution instead of a pass over all children.
        """
        if self.opts.bounds == "static" or node is None:
            return
        work = [(node, child, grew)]
        while work:
            n, c, inc = work.pop()
            if n.status != EXPANDED:
                continue
            if c is not None and inc:
                cL, cU = self._contribution(c)
                L, U = np.maximum(n.L, cL), np.maximum(n.U, cU)
            else:
                L, U = self.recompute(n)
            changed = self._set_bounds(n, L, U)
            if changed is None:
                continue
            tasks = []
            for t in n.dependents.values():
                tg = self._set_bounds(t, n.L, n.U)
                if tg is not None and t.parent is not None:
                    tasks.append((t.parent, t, tg))
            if n.parent is not None:
                work.append((n.parent, n, changed))
            work.extend(reversed(tasks))

    # the algorithm ---------------------------------------------------------

    def _mark_tentative(self, node: Node, sub: Node) -> None:
        node.status = TENTATIVE
        node.subsumer = sub
        sub.dependents[node.id] = node
        self.tentative[node.id] = node
        node.L, node.U = sub.L, sub.U
        self.propagate(node.parent, node, False)

    def _expand(self, node: Node) -> None:
        node.status = EXPANDED
        bucket = self.store.get(node.state)
        if bucket is None:
            bucket = self.store[node.state] = _Bucket(self.n + 1)
        bucket.add(node)
        self.stats.stored += 1
        for succ in product_successors(self.net, node.state, node.zone):
            node.children.append(
                self._new_node(succ.state, succ.zone, node, succ.label, succ.guard, succ.resets)
            )
        if self.opts.bounds == "onthefly":
            L, U = self.recompute(node)
            changed = self._set_bounds(node, L, U)
            if changed is not None and node.parent is not None:
                self.propagate(node.parent, node, changed)

    def explore(self, start: Node) -> Optional[Node]:
        """Depth-first exploration below ``start``; returns a target node if found."""
        dfs = [start]
        while dfs:
            node = dfs.pop()
            if node.status != NEW:
                continue
            self.stats.visited += 1
            if self.net.is_target(node.state):
                return node
            sub = self._find_subsumer(node)
            if sub is not None:
                self._mark_tentative(node, sub)
                continue
            self._expand(node)
            dfs.extend(c for c in reversed(node.children) if c.status == NEW)
        return None

    def resolve(self) -> int:
        """One pass over tentative nodes; reopen those no longer covered."""
        reopened = 0
        for t in list(self.tentative.values()):
            if t.status != TENTATIVE:
                continue
            sub = t.subsumer
            if self.covered(t, sub):
                continue
            del sub.dependents[t.id]
            del self.tentative[t.id]
            t.subsumer = None
            t.status = NEW
            t.L, t.U = empty_bounds(self.n)
            self.propagate(t.parent, t, False)
            self.main_stack.append(t)
            reopened += 1
        self.stats.reopenings += reopened
        return reopened

    def run(self) -> Verdict:
        t0 = time.perf_counter()
        net = self.net
        self.root = self._new_node(net.initial_state(), initial_zone(net))
        self.main_stack = [self.root]
        hit = None
        while self.main_stack:
            node = self.main_stack.pop()
            hit = self.explore(node)
            if hit is not None:
                break
            self.resolve()
        self.stats.ms = (time.perf_counter() - t0) * 1000.0
        if hit is None:
            return Verdict(False, None, self.stats, self)
        trace = extract_trace(hit)
        replay_trace(net, trace)
        return Verdict(True, trace, self.stats, self)

    # checks ------------------------------------------------------------------

    def audit(self, oracle: bool = True) -> "Audit":
        """Check the tree invariants at quiescence."""
        report = Audit()
        for node in self.nodes:
            if node.status == EXPANDED and self.opts.bounds == "onthefly":
                report.expanded += 1
                L, U = self.recompute(node)
                if not (np.array_equal(L, node.L) and np.array_equal(U, node.U)):
                    report.failures.append(f"node {node.id}: bounds are not the max over children")
            elif node.status == TENTATIVE:
                report.tentative += 1
                sub = node.subsumer
                if sub is None or sub.status != EXPANDED:
                    report.failures.append(f"node {node.id}: subsumer is not an expanded node")
                    continue
                if not (np.array_equal(node.L, sub.L) and np.array_equal(node.U, sub.U)):
                    report.failures.append(f"node {node.id}: bounds differ from subsumer {sub.id}")
                if node.children:
                    report.failures.append(f"node {node.id}: tentative node has children")
                if oracle:
                    self._audit_pair(node, sub, report)
            if self.opts.bounds == "onthefly" and node.status in (EXPANDED, TENTATIVE):
                sL, sU = self.static.of_state(node.state.locs)
                if np.any(node.L > sL) or np.any(node.U > sU):
                    report.failures.append(f"node {node.id}: bounds exceed the static analysis")
        return report

    def _audit_pair(self, node: Node, sub: Node, report: "Audit") -> None:
        alpha = sub.alpha
        try:
            regions.check_scale(alpha)
        except regions.OracleScaleError:
            report.pairs_skipped += 1
            return
        if self.opts.inclusion == "convex":
            ok = dbm_included(node.zone, sub.zone)
        elif self.opts.lu:
            ok = regions.closure_inclusion_lu(node.zone, self._plus_of(sub), alpha)
        else:
            ok = regions.closure_inclusion(node.zone, sub.zone, alpha)
        report.pairs_checked += 1
        if not ok:
            report.failures.append(f"node {node.id}: regions refute subsumption by {sub.id}")


@dataclass
class Audit:
    expanded: int = 0
    tentative: int = 0
    pairs_checked: int = 0
    pairs_skipped: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run(net: Network, opts: Options | str = Options()) -> Verdict:
    """Decide whether a target state is reachable."""
    if isinstance(opts, str):
        if opts not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {opts!r}; choose from {', '.join(ALGORITHMS)}")
        opts = ALGORITHMS[opts]
    return Search(net, opts).run()


def extract_trace(node: Node) -> list[tuple[Label, DiscreteState]]:
    """Edge labels and states from the root down to ``node``."""
    out = []
    while node.parent is not None:
        out.append((node.label, node.state))
        node = node.parent
    out.reverse()
    return out


def replay_trace(net: Network, trace) -> Dbm:
    """Recompute exact zones along ``trace``; raise unless it ends nonempty at a target."""
    state = net.initial_state()
    zone = initial_zone(net)
    for step, (label, expected) in enumerate(trace):
        guard, resets, target = move_target(net, state, label)
        if target != expected:
            raise ReplayError(f"step {step}: move leads to {target}, trace says {expected}")
        zone = zone_successor(zone, guard, resets)
        if is_empty(zone):
            raise ReplayError(f"step {step}: zone became empty after {net.describe_label(label)}")
        state = target
    if not net.is_target(state):
        raise ReplayError(f"trace ends in non-target state {net.describe_state(state)}")
    return zone
