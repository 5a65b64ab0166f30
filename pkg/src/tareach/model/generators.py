"""Benchmark families, emitted as model text and parsed back.

Going through text keeps the generators honest about the format: anything
they produce can be written with ``tareach gen`` and re-read by ``check``.
"""

from __future__ import annotations

from itertools import combinations

from tareach.model.network import Network
from tareach.model.parser import parse_model


def _need(n: int, least: int, family: str) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < least:
        raise ValueError(f"{family} needs an integer size >= {least}, got {n!r}")


# Fischer -----------------------------------------------------------------


def fischer_text(n: int, set_bound: int = 1, wait_bound: int = 1) -> str:
    """Fischer's protocol; correct exactly when ``set_bound <= wait_bound``."""
    _need(n, 2, "fischer")
    lines = [f"system fischer{n}"]
    lines += [f"clock x{i}" for i in range(1, n + 1)]
    lines.append(f"int id 0 {n} 0")
    for i in range(1, n + 1):
        x = f"x{i}"
        lines += [
            "",
            f"process P{i}",
            "location idle initial",
            f"location req invariant: {x} <= {set_bound}",
            "location wait",
            "location cs",
            f"edge idle -> req guard: id == 0 do: {x} := 0",
            f"edge req -> wait guard: {x} <= {set_bound} do: {x} := 0, id := {i}",
            f"edge wait -> cs guard: {x} > {wait_bound} && id == {i}",
            f"edge wait -> req guard: id == 0 do: {x} := 0",
            "edge cs -> idle do: id := 0",
        ]
    pairs = [f"P{i}.cs && P{j}.cs" for i, j in combinations(range(1, n + 1), 2)]
    lines += ["", "query reachable: " + " || ".join(pairs)]
    return "\n".join(lines) + "\n"


def gen_fischer(n: int) -> Network:
    return parse_model(fischer_text(n))


def gen_fischer_buggy(n: int) -> Network:
    """Fischer with the set phase allowed to outlast the wait: mutex breaks."""
    return parse_model(fischer_text(n, set_bound=2, wait_bound=1).replace(f"fischer{n}", f"fischer_buggy{n}", 1))


# CSMA/CD -----------------------------------------------------------------

SIGMA = 26
LAMBDA = 808


def csma_text(n: int, sigma: int = SIGMA, lam: int = LAMBDA) -> str:
    """CSMA/CD: one bus and ``n`` senders.

    The bus broadcasts ``cd`` on collision.  The query asks for a collision
    with at most one sender transmitting, which the protocol rules out.
    """
    _need(n, 2, "csma")
    lines = [f"system csma{n}", "clock y"]
    lines += [f"clock x{i}" for i in range(1, n + 1)]
    lines += ["chan begin", "chan end", "chan busy", "chan cd broadcast"]
    lines += [
        "",
        "process Bus",
        "location idle initial",
        "location active",
        f"location collision invariant: y < {sigma}",
        "edge idle -> active sync: begin? do: y := 0",
        "edge active -> idle sync: end? do: y := 0",
        f"edge active -> active guard: y >= {sigma} sync: busy!",
        f"edge active -> collision guard: y < {sigma} sync: begin? do: y := 0",
        f"edge collision -> idle guard: y < {sigma} sync: cd! do: y := 0",
    ]
    for i in range(1, n + 1):
        x = f"x{i}"
        lines += [
            "",
            f"process S{i}",
            "location wait initial",
            f"location transm invariant: {x} <= {lam}",
            f"location retry invariant: {x} < {2 * sigma}",
            f"edge wait -> transm sync: begin! do: {x} := 0",
            f"edge wait -> retry sync: busy? do: {x} := 0",
            f"edge wait -> wait sync: cd? do: {x} := 0",
            f"edge transm -> wait guard: {x} == {lam} sync: end! do: {x} := 0",
            f"edge transm -> retry sync: cd? do: {x} := 0",
            f"edge retry -> transm guard: {x} < {2 * sigma} sync: begin! do: {x} := 0",
            f"edge retry -> retry sync: busy? do: {x} := 0",
            f"edge retry -> retry sync: cd? do: {x} := 0",
        ]
    # at most one sender in transm: every pair has a non-transmitting member
    conj = ["Bus.collision"]
    disjuncts = []
    for i in range(1, n + 1):
        lits = conj + [f"!S{j}.transm" for j in range(1, n + 1) if j != i]
        disjuncts.append(" && ".join(lits))
    lines += ["", "query reachable: " + " || ".join(disjuncts)]
    return "\n".join(lines) + "\n"


def gen_csma(n: int) -> Network:
    return parse_model(csma_text(n))


# FDDI --------------------------------------------------------------------

SA = 20
TD = 1


def fddi_text(n: int, sa: int = SA, td: int = TD) -> str:
    """FDDI token ring with ``n`` stations and ``3n + 2`` clocks.

    Each station owns a synchronous-transmission timer ``z`` and two token
    rotation timers ``a``/``b`` used in alternate rounds.  The ring owns a
    hop clock ``t`` and a watchdog ``w`` reset whenever station 1 gets the
    token.  The query asks for two stations in synchronous mode at once,
    or for the watchdog to see an overlong rotation.
    """
    _need(n, 3, "fddi")
    ttrt = 50 * n
    late = n * (sa + td) + 2 * ttrt
    lines = [f"system fddi{n}", "clock t", "clock w"]
    for i in range(1, n + 1):
        lines += [f"clock z{i}", f"clock a{i}", f"clock b{i}"]
    for i in range(1, n + 1):
        lines += [f"chan tt{i}", f"chan rt{i}"]
    lines += ["", "process Ring"]
    for i in range(1, n + 1):
        init = " initial" if i == 1 else ""
        lines.append(f"location to{i}{init} invariant: t <= {td}")
        lines.append(f"location at{i}")
    lines.append("location late")
    for i in range(1, n + 1):
        nxt = i % n + 1
        lines.append(f"edge to{i} -> at{i} guard: t == {td} sync: tt{i}!{' do: w := 0' if i == 1 else ''}")
        lines.append(f"edge at{i} -> to{nxt} sync: rt{i}? do: t := 0")
    lines.append(f"edge to1 -> late guard: w > {late}")
    for i in range(1, n + 1):
        z, a, b = f"z{i}", f"a{i}", f"b{i}"
        lines += [
            "",
            f"process St{i}",
            "location idleA initial",
            f"location syncA invariant: {z} <= {sa}",
            f"location asyncA invariant: {b} <= {ttrt}",
            "location idleB",
            f"location syncB invariant: {z} <= {sa}",
            f"location asyncB invariant: {a} <= {ttrt}",
            f"edge idleA -> syncA sync: tt{i}? do: {z} := 0, {a} := 0",
            f"edge syncA -> idleB guard: {z} == {sa} && {b} >= {ttrt} sync: rt{i}!",
            f"edge syncA -> asyncA guard: {z} == {sa} && {b} < {ttrt}",
            f"edge asyncA -> idleB sync: rt{i}!",
            f"edge idleB -> syncB sync: tt{i}? do: {z} := 0, {b} := 0",
            f"edge syncB -> idleA guard: {z} == {sa} && {a} >= {ttrt} sync: rt{i}!",
            f"edge syncB -> asyncB guard: {z} == {sa} && {a} < {ttrt}",
            f"edge asyncB -> idleA sync: rt{i}!",
        ]
    pairs = []
    for i, j in combinations(range(1, n + 1), 2):
        for pi in ("syncA", "syncB"):
            for pj in ("syncA", "syncB"):
                pairs.append(f"St{i}.{pi} && St{j}.{pj}")
    lines += ["", "query reachable: " + " || ".join(["Ring.late"] + pairs)]
    return "\n".join(lines) + "\n"


def gen_fddi(n: int) -> Network:
    return parse_model(fddi_text(n))


# small examples that isolate where on-the-fly bounds help -----------------

BIG = 10_000


def fig1_text(accepting: bool = True) -> str:
    """The four-location automaton with a short ``q1``/``q2`` cycle."""
    return "\n".join(
        [
            "system fig1",
            "clock x",
            "clock y",
            "",
            "process A",
            "location q0 initial",
            "location q1",
            "location q2",
            f"location q3{' accepting' if accepting else ''}",
            "edge q0 -> q1 guard: x <= 5",
            "edge q1 -> q2",
            "edge q2 -> q3 guard: x <= 14 do: y := 0",
            "edge q2 -> q1 guard: y >= 5 do: x := 0",
            "edge q0 -> q3 guard: y >= 1000000",
        ]
    ) + "\n"


def gen_fig1(accepting: bool = True) -> Network:
    return parse_model(fig1_text(accepting))


def paper_a1_text(n: int = 1) -> str:
    """A big guard behind a send nobody ever receives."""
    return "\n".join(
        [
            "system paper_a1",
            "clock x",
            "clock y",
            "chan a",
            "",
            "process A",
            "location q0 initial invariant: x <= 1",
            "location q1",
            "location q2",
            "edge q0 -> q0 guard: x == 1 do: x := 0",
            f"edge q0 -> q1 guard: y >= {BIG} sync: a!",
            "edge q0 -> q2 guard: y > 10",
            "",
            "query reachable: A.q1",
        ]
    ) + "\n"


def paper_a2_text(n: int = 1) -> str:
    """A big guard reachable only through an edge the invariant kills."""
    return "\n".join(
        [
            "system paper_a2",
            "clock x",
            "clock y",
            "",
            "process A",
            "location q0 initial invariant: x <= 10",
            "location q1",
            "location q2",
            "location q3",
            "edge q0 -> q0 guard: x == 10 do: x := 0",
            "edge q0 -> q1 guard: y >= 20",
            "edge q0 -> q2 guard: x > 10",
            f"edge q2 -> q3 guard: y >= {BIG}",
            "",
            "query reachable: A.q3",
        ]
    ) + "\n"


def paper_a3_text(n: int = 1) -> str:
    """A big guard behind an integer test that never passes."""
    return "\n".join(
        [
            "system paper_a3",
            "clock x",
            "clock y",
            "int n 0 10 0",
            "",
            "process A",
            "location q0 initial invariant: x <= 10",
            "location q1",
            "location q2",
            "edge q0 -> q0 guard: x == 10 && y >= 10 do: x := 0",
            "edge q0 -> q1",
            f"edge q0 -> q2 guard: n == 10 && y >= {BIG}",
            f"edge q1 -> q2 guard: n == 10 && y >= {BIG}",
            "",
            "query reachable: A.q2",
        ]
    ) + "\n"


def gen_paper_a1(n: int = 1) -> Network:
    return parse_model(paper_a1_text(n))


def gen_paper_a2(n: int = 1) -> Network:
    return parse_model(paper_a2_text(n))


def gen_paper_a3(n: int = 1) -> Network:
    return parse_model(paper_a3_text(n))


FAMILIES = {
    "fischer": (fischer_text, 2),
    "fischer-buggy": (lambda n: fischer_text(n, set_bound=2, wait_bound=1), 2),
    "csma": (csma_text, 2),
    "fddi": (fddi_text, 3),
    "paper-a1": (paper_a1_text, 1),
    "paper-a2": (paper_a2_text, 1),
    "paper-a3": (paper_a3_text, 1),
    "fig1": (lambda n: fig1_text(), 1),
}


def family_text(family: str, n: int) -> str:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    make, least = FAMILIES[family]
    _need(n, least, family)
    return make(n)
