"""Reader and writer for the line-oriented ``.ta`` model format.

Example::

    system fig1
    clock x
    clock y
    process A
    location q0 initial
    location q1 invariant: x <= 5
    edge q0 -> q1 guard: x <= 5 && y > 1 do: x := 0
    query reachable: A.q1

Declarations (``clock``, ``int``, ``chan``) must precede the first
``process``.  Location invariants are folded into edge guards at
successor computation time, so they must be upper bounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from tareach.model.network import (
    Channel,
    Edge,
    IntLiteral,
    IntVar,
    Location,
    LocLiteral,
    Network,
    Process,
    Query,
    Sync,
)

_OPS = ("<=", ">=", "==", "!=", "<", ">", "=")
_KEYWORDS = {"guard", "sync", "do", "invariant"}
_TOKEN = re.compile(r"\s*(->|:=|<=|>=|==|!=|&&|\|\||[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?|\d+|[<>=!?:,+\-()*/])")


class ModelError(Exception):
    """Base class for model-file errors; carries a 1-based position."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        where = f"line {self.line}, col {self.col}: " if self.line else ""
        return f"{where}{self.kind}: {self.message}"


class ModelSyntaxError(ModelError):
    kind = "syntax error"


class UnknownIdentifierError(ModelError):
    kind = "unknown identifier"


class DiagonalConstraintError(ModelError):
    kind = "diagonal constraint"


class InvariantError(ModelError):
    kind = "invalid invariant"


class IntRangeError(ModelError):
    kind = "out of range"


class DuplicateNameError(ModelError):
    kind = "duplicate name"


class _Line:
    """Token cursor over one source line."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[tuple[str, int]] = []
        pos = 0
        body = text.rstrip()
        while pos < len(body):
            m = _TOKEN.match(body, pos)
            if not m:
                col = pos + len(body[pos:]) - len(body[pos:].lstrip()) + 1
                raise ModelSyntaxError(f"unexpected character {body[col - 1]!r}", lineno, col)
            self.toks.append((m.group(1), m.start(1) + 1))
            pos = m.end()
        self.i = 0
        self.end_col = len(body) + 1

    def peek(self, k: int = 0) -> Optional[str]:
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    @property
    def col(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end_col

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def next(self, what: str = "token") -> str:
        if self.at_end():
            raise ModelSyntaxError(f"expected {what}, found end of line", self.lineno, self.col)
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        col = self.col
        got = self.next(repr(tok))
        if got != tok:
            raise ModelSyntaxError(f"expected {tok!r}, found {got!r}", self.lineno, col)

    def ident(self, what: str = "identifier") -> str:
        col = self.col
        tok = self.next(what)
        if not re.fullmatch(r"[A-Za-z_]\w*", tok):
            raise ModelSyntaxError(f"expected {what}, found {tok!r}", self.lineno, col)
        return tok

    def integer(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.next()
            sign = -1
        col = self.col
        tok = self.next("integer")
        if not tok.isdigit():
            raise ModelSyntaxError(f"expected integer, found {tok!r}", self.lineno, col)
        return sign * int(tok)

    def at_clause(self) -> bool:
        return self.peek() in _KEYWORDS and self.peek(1) == ":"

    def done(self) -> None:
        if not self.at_end():
            raise ModelSyntaxError(f"unexpected {self.peek()!r}", self.lineno, self.col)

    def error(self, cls, message: str, col: Optional[int] = None):
        return cls(message, self.lineno, self.col if col is None else col)


@dataclass
class _ProcBuilder:
    name: str
    lineno: int
    locations: list[Location] = field(default_factory=list)
    loc_lines: list[int] = field(default_factory=list)
    edges: list[tuple] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.name: Optional[str] = None
        self.clocks: list[str] = []
        self.ints: list[IntVar] = []
        self.channels: list[Channel] = []
        self.procs: list[_ProcBuilder] = []
        self.query_line: Optional[_Line] = None
        self.names: dict[str, str] = {}

    def _declare(self, ln: _Line, name: str, kind: str, col: int) -> None:
        if name in self.names:
            raise DuplicateNameError(f"{name!r} already declared as {self.names[name]}", ln.lineno, col)
        self.names[name] = kind

    def parse(self) -> Network:
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            text = raw.split("#", 1)[0]
            if not text.strip():
                continue
            ln = _Line(text, lineno)
            col = ln.col
            head = ln.ident("keyword")
            handler = getattr(self, f"_kw_{head}", None)
            if handler is None:
                raise ModelSyntaxError(f"unknown keyword {head!r}", lineno, col)
            handler(ln)
        if self.name is None:
            raise ModelSyntaxError("missing 'system' declaration", 1, 1)
        if not self.procs:
            raise ModelSyntaxError("model declares no process", 1, 1)
        return self._build()

    # declarations ---------------------------------------------------------

    def _kw_system(self, ln: _Line) -> None:
        if self.name is not None:
            raise ln.error(ModelSyntaxError, "second 'system' declaration", 1)
        self.name = ln.ident("system name")
        ln.done()

    def _no_process_yet(self, ln: _Line, what: str) -> None:
        if self.procs:
            raise ln.error(ModelSyntaxError, f"{what} declarations must precede processes", 1)

    def _kw_clock(self, ln: _Line) -> None:
        self._no_process_yet(ln, "clock")
        while True:
            col = ln.col
            name = ln.ident("clock name")
            self._declare(ln, name, "clock", col)
            self.clocks.append(name)
            if ln.at_end():
                return
            ln.expect(",")

    def _kw_int(self, ln: _Line) -> None:
        self._no_process_yet(ln, "int")
        col = ln.col
        name = ln.ident("variable name")
        self._declare(ln, name, "int", col)
        lo = ln.integer()
        hi = ln.integer()
        col = ln.col
        init = ln.integer()
        ln.done()
        if lo > hi:
            raise IntRangeError(f"empty range [{lo}, {hi}] for {name}", ln.lineno, col)
        if not lo <= init <= hi:
            raise IntRangeError(f"initial value {init} outside [{lo}, {hi}]", ln.lineno, col)
        self.ints.append(IntVar(name, lo, hi, init))

    def _kw_chan(self, ln: _Line) -> None:
        self._no_process_yet(ln, "chan")
        col = ln.col
        name = ln.ident("channel name")
        self._declare(ln, name, "channel", col)
        broadcast = False
        if not ln.at_end():
            col = ln.col
            if ln.ident() != "broadcast":
                raise ln.error(ModelSyntaxError, "expected 'broadcast'", col)
            broadcast = True
        ln.done()
        self.channels.append(Channel(name, broadcast))

    def _kw_process(self, ln: _Line) -> None:
        col = ln.col
        name = ln.ident("process name")
        self._declare(ln, name, "process", col)
        ln.done()
        self.procs.append(_ProcBuilder(name, ln.lineno))

    def _current(self, ln: _Line, what: str) -> _ProcBuilder:
        if not self.procs:
            raise ln.error(ModelSyntaxError, f"{what} outside a process", 1)
        return self.procs[-1]

    def _kw_location(self, ln: _Line) -> None:
        proc = self._current(ln, "location")
        col = ln.col
        name = ln.ident("location name")
        if any(loc.name == name for loc in proc.locations):
            raise DuplicateNameError(f"location {name!r} already in {proc.name}", ln.lineno, col)
        initial = accepting = False
        invariant: tuple = ()
        while not ln.at_end():
            if ln.at_clause():
                col = ln.col
                if ln.ident() != "invariant":
                    raise ln.error(ModelSyntaxError, "only 'invariant:' may follow a location", col)
                ln.expect(":")
                clock_atoms, int_atoms = self._conjunction(ln)
                if int_atoms:
                    raise InvariantError("invariants may only constrain clocks", ln.lineno, col)
                for _, op, _ in clock_atoms:
                    if op not in ("<", "<="):
                        raise InvariantError(f"invariant atoms must be upper bounds, got {op!r}", ln.lineno, col)
                invariant = clock_atoms
                continue
            col = ln.col
            flag = ln.ident("location flag")
            if flag == "initial":
                initial = True
            elif flag == "accepting":
                accepting = True
            else:
                raise ln.error(ModelSyntaxError, f"unknown location flag {flag!r}", col)
        proc.locations.append(Location(name, initial, accepting, invariant))
        proc.loc_lines.append(ln.lineno)

    def _kw_edge(self, ln: _Line) -> None:
        proc = self._current(ln, "edge")
        scol = ln.col
        src = ln.ident("source location")
        ln.expect("->")
        dcol = ln.col
        dst = ln.ident("target location")
        guard: tuple = ()
        int_guard: tuple = ()
        sync = None
        resets: tuple = ()
        updates: tuple = ()
        seen = set()
        while not ln.at_end():
            col = ln.col
            if not ln.at_clause():
                raise ln.error(ModelSyntaxError, f"expected 'guard:', 'sync:' or 'do:', found {ln.peek()!r}")
            kw = ln.ident()
            if kw in seen or kw == "invariant":
                raise ln.error(ModelSyntaxError, f"unexpected clause {kw!r}", col)
            seen.add(kw)
            ln.expect(":")
            if kw == "guard":
                guard, int_guard = self._conjunction(ln)
            elif kw == "sync":
                sync = self._sync(ln)
            else:
                resets, updates = self._assignments(ln)
        proc.edges.append((src, scol, dst, dcol, guard, int_guard, sync, resets, updates, ln.lineno))

    def _kw_query(self, ln: _Line) -> None:
        if self.query_line is not None:
            raise ln.error(ModelSyntaxError, "second query", 1)
        col = ln.col
        if ln.ident() != "reachable":
            raise ln.error(ModelSyntaxError, "expected 'reachable'", col)
        ln.expect(":")
        self.query_line = ln

    # clauses --------------------------------------------------------------

    def _lookup(self, ln: _Line, name: str, col: int) -> tuple[str, int]:
        kind = self.names.get(name)
        if kind == "clock":
            return kind, self.clocks.index(name) + 1
        if kind == "int":
            return kind, [v.name for v in self.ints].index(name)
        if kind == "channel":
            return kind, [c.name for c in self.channels].index(name)
        raise UnknownIdentifierError(f"{name!r} is not a declared clock, int or channel", ln.lineno, col)

    def _conjunction(self, ln: _Line) -> tuple[tuple, tuple]:
        clock_atoms = []
        int_atoms = []
        if ln.peek() == "true":
            ln.next()
            return (), ()
        while True:
            col = ln.col
            name = ln.ident("clock or variable")
            if ln.peek() in ("-", "+"):
                if ln.peek(1) and re.fullmatch(r"[A-Za-z_]\w*", ln.peek(1)):
                    raise DiagonalConstraintError(
                        "constraints over clock differences are not supported", ln.lineno, col
                    )
                raise ln.error(ModelSyntaxError, "arithmetic is not allowed in guards")
            kind, idx = self._lookup(ln, name, col)
            ocol = ln.col
            op = ln.next("comparison")
            if op not in _OPS:
                raise ModelSyntaxError(f"expected comparison, found {op!r}", ln.lineno, ocol)
            op = "==" if op == "=" else op
            ccol = ln.col
            c = ln.integer()
            if ln.peek() in ("-", "+") and ln.peek(1) and re.fullmatch(r"[A-Za-z_]\w*", ln.peek(1)):
                raise DiagonalConstraintError("constraints over clock differences are not supported", ln.lineno, col)
            if kind == "clock":
                if op == "!=":
                    raise ModelSyntaxError("'!=' is not a clock constraint", ln.lineno, ocol)
                if c < 0:
                    raise IntRangeError("clock constants must be nonnegative", ln.lineno, ccol)
                clock_atoms.append((idx, op, c))
            elif kind == "int":
                int_atoms.append((idx, op, c))
            else:
                raise ModelSyntaxError(f"{name!r} is a channel", ln.lineno, col)
            if ln.at_end() or ln.at_clause():
                return tuple(clock_atoms), tuple(int_atoms)
            ln.expect("&&")

    def _sync(self, ln: _Line) -> Sync:
        col = ln.col
        name = ln.ident("channel")
        kind, idx = self._lookup(ln, name, col)
        if kind != "channel":
            raise ModelSyntaxError(f"{name!r} is not a channel", ln.lineno, col)
        dcol = ln.col
        d = ln.next("'!' or '?'")
        if d not in ("!", "?"):
            raise ModelSyntaxError(f"expected '!' or '?', found {d!r}", ln.lineno, dcol)
        return Sync(idx, d == "!")

    def _assignments(self, ln: _Line) -> tuple[tuple, tuple]:
        resets = []
        updates = []
        while True:
            col = ln.col
            name = ln.ident("assignment target")
            kind, idx = self._lookup(ln, name, col)
            ln.expect(":=")
            if kind == "clock":
                ccol = ln.col
                if ln.integer() != 0:
                    raise ModelSyntaxError("clocks can only be reset to 0", ln.lineno, ccol)
                resets.append(idx)
            elif kind == "int":
                var = self.ints[idx]
                if ln.peek() == name:
                    ln.next()
                    scol = ln.col
                    sign = ln.next("'+' or '-'")
                    if sign not in ("+", "-"):
                        raise ModelSyntaxError(f"expected '+' or '-', found {sign!r}", ln.lineno, scol)
                    updates.append((idx, sign, ln.integer()))
                else:
                    vcol = ln.col
                    if ln.peek() and re.fullmatch(r"[A-Za-z_]\w*", ln.peek()):
                        raise ModelSyntaxError(f"only {name} := c or {name} := {name} +/- c are supported", ln.lineno, vcol)
                    c = ln.integer()
                    if not var.lo <= c <= var.hi:
                        raise IntRangeError(f"{c} outside [{var.lo}, {var.hi}] for {name}", ln.lineno, vcol)
                    updates.append((idx, "=", c))
            else:
                raise ModelSyntaxError(f"{name!r} is a channel", ln.lineno, col)
            if ln.at_end() or ln.at_clause():
                return tuple(resets), tuple(updates)
            ln.expect(",")

    def _query(self, ln: _Line, procs: list[Process]) -> Query:
        disjuncts = []
        conj = []
        while True:
            col = ln.col
            positive = True
            if ln.peek() == "!":
                ln.next()
                positive = False
                col = ln.col
            tok = ln.next("query literal")
            if "." in tok:
                pname, lname = tok.split(".", 1)
                pidx = next((i for i, p in enumerate(procs) if p.name == pname), None)
                if pidx is None:
                    raise UnknownIdentifierError(f"no process {pname!r}", ln.lineno, col)
                try:
                    lidx = procs[pidx].loc_index(lname)
                except KeyError:
                    raise UnknownIdentifierError(f"no location {lname!r} in {pname}", ln.lineno, col) from None
                conj.append(LocLiteral(pidx, lidx, positive))
            else:
                if not positive:
                    raise ModelSyntaxError("negation applies to locations only", ln.lineno, col)
                if not re.fullmatch(r"[A-Za-z_]\w*", tok):
                    raise ModelSyntaxError(f"expected query literal, found {tok!r}", ln.lineno, col)
                kind, idx = self._lookup(ln, tok, col)
                if kind != "int":
                    raise ModelSyntaxError(f"queries may only compare ints, not {kind} {tok!r}", ln.lineno, col)
                ocol = ln.col
                op = ln.next("comparison")
                if op not in _OPS:
                    raise ModelSyntaxError(f"expected comparison, found {op!r}", ln.lineno, ocol)
                conj.append(IntLiteral(idx, "==" if op == "=" else op, ln.integer()))
            if ln.at_end():
                disjuncts.append(tuple(conj))
                return Query(tuple(disjuncts))
            sep = ln.next()
            if sep == "||":
                disjuncts.append(tuple(conj))
                conj = []
            elif sep != "&&":
                raise ModelSyntaxError(f"expected '&&' or '||', found {sep!r}", ln.lineno, ln.toks[ln.i - 1][1])

    # assembly -------------------------------------------------------------

    def _build(self) -> Network:
        procs = []
        for pb in self.procs:
            if not pb.locations:
                raise ModelSyntaxError(f"process {pb.name} has no location", pb.lineno, 1)
            initial = [i for i, loc in enumerate(pb.locations) if loc.initial]
            if len(initial) != 1:
                line = pb.loc_lines[initial[1]] if len(initial) > 1 else pb.lineno
                raise ModelSyntaxError(
                    f"process {pb.name} needs exactly one initial location, has {len(initial)}", line, 1
                )
            index = {loc.name: i for i, loc in enumerate(pb.locations)}
            edges = []
            for src, scol, dst, dcol, guard, int_guard, sync, resets, updates, lineno in pb.edges:
                if src not in index:
                    raise UnknownIdentifierError(f"no location {src!r} in {pb.name}", lineno, scol)
                if dst not in index:
                    raise UnknownIdentifierError(f"no location {dst!r} in {pb.name}", lineno, dcol)
                edges.append(Edge(index[src], index[dst], guard, int_guard, sync, resets, updates))
            procs.append(Process(pb.name, tuple(pb.locations), tuple(edges), initial[0]))
        query = self._query(self.query_line, procs) if self.query_line is not None else None
        return Network(self.name, tuple(self.clocks), tuple(self.ints), tuple(self.channels), tuple(procs), query)


def parse_model(text: str) -> Network:
    """Parse model text; raises a :class:`ModelError` subclass on bad input."""
    return _Parser(text).parse()


def load_model(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# printing -------------------------------------------------------------------


def _fmt_clock_atoms(net: Network, atoms) -> list[str]:
    return [f"{net.clocks[x - 1]} {op} {c}" for x, op, c in atoms]


def _fmt_int_atoms(net: Network, atoms) -> list[str]:
    return [f"{net.ints[v].name} {op} {c}" for v, op, c in atoms]


def print_model(net: Network) -> str:
    """Render ``net`` in the model format; ``parse_model`` inverts it."""
    out = [f"system {net.name}"]
    out += [f"clock {c}" for c in net.clocks]
    out += [f"int {v.name} {v.lo} {v.hi} {v.init}" for v in net.ints]
    out += [f"chan {c.name}{' broadcast' if c.broadcast else ''}" for c in net.channels]
    for p in net.processes:
        out.append("")
        out.append(f"process {p.name}")
        for loc in p.locations:
            line = f"location {loc.name}"
            if loc.initial:
                line += " initial"
            if loc.accepting:
                line += " accepting"
            if loc.invariant:
                line += " invariant: " + " && ".join(_fmt_clock_atoms(net, loc.invariant))
            out.append(line)
        for e in p.edges:
            line = f"edge {p.locations[e.src].name} -> {p.locations[e.dst].name}"
            atoms = _fmt_clock_atoms(net, e.guard) + _fmt_int_atoms(net, e.int_guard)
            if atoms:
                line += " guard: " + " && ".join(atoms)
            if e.sync is not None:
                line += f" sync: {net.channels[e.sync.channel].name}{'!' if e.sync.send else '?'}"
            assigns = [f"{net.clocks[x - 1]} := 0" for x in e.resets]
            for v, kind, c in e.updates:
                name = net.ints[v].name
                assigns.append(f"{name} := {c}" if kind == "=" else f"{name} := {name} {kind} {c}")
            if assigns:
                line += " do: " + ", ".join(assigns)
            out.append(line)
    if net.query is not None:
        conjs = []
        for conj in net.query.disjuncts:
            lits = []
            for lit in conj:
                if isinstance(lit, LocLiteral):
                    p = net.processes[lit.process]
                    lits.append(f"{'' if lit.positive else '!'}{p.name}.{p.locations[lit.location].name}")
                else:
                    lits.append(f"{net.ints[lit.var].name} {lit.op} {lit.const}")
            conjs.append(" && ".join(lits))
        out.append("")
        out.append("query reachable: " + " || ".join(conjs))
    return "\n".join(out) + "\n"
