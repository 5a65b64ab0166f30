import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from tareach.dbm import Dbm, canonicalize, is_empty
from tareach.weights import Weight

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


weights = st.one_of(
    st.builds(Weight, st.booleans(), st.integers(-50, 50)),
    st.just(Weight.lt(float("inf"))),
)
finite_weights = st.builds(Weight, st.booleans(), st.integers(-50, 50))


@st.composite
def zones(draw, nclocks=2, cmax=4, nonempty=True):
    """Canonical zones from random edge sets; rejected when empty if asked."""
    edges = {}
    n = nclocks + 1
    for x in range(n):
        for y in range(n):
            if x != y and draw(st.booleans()):
                edges[x, y] = Weight(draw(st.booleans()), draw(st.integers(-cmax, cmax)))
    z = canonicalize(Dbm.from_edges(nclocks, edges))
    if nonempty:
        from hypothesis import assume

        assume(not is_empty(z))
    return z


def alphas(nclocks=2, amax=4, allow_none=True):
    elem = st.integers(0, amax)
    if allow_none:
        elem = st.one_of(elem, st.just(float("-inf")))
    return st.lists(elem, min_size=nclocks, max_size=nclocks).map(tuple)


def random_network_text(rng, nproc=2, nclocks=2, nlocs=3, nedges=7, cmax=3, name="rand"):
    """A small random network in the model format.

    Constants stay below ``cmax`` so every search stays at oracle scale.
    Integer updates are plain assignments, so no run leaves the range.
    """
    ops = ["<", "<=", ">", ">=", "=="]
    clocks = [f"c{i}" for i in range(nclocks)]
    lines = [f"system {name}", "clock " + ", ".join(clocks), "int n 0 2 0", "chan h", "chan b broadcast"]
    for p in range(nproc):
        lines += ["", f"process P{p}"]
        for l in range(nlocs):
            line = f"location l{l}" + (" initial" if l == 0 else "")
            if rng.random() < 0.3:
                line += f" invariant: {clocks[rng.integers(nclocks)]} <= {rng.integers(1, cmax + 1)}"
            lines.append(line)
        for k in range(nedges):
            src, dst = rng.integers(nlocs, size=2)
            src = 0 if k == 0 else src  # keep the initial location live
            atoms = []
            for c in clocks:
                if rng.random() < 0.4:
                    atoms.append(f"{c} {ops[rng.integers(len(ops))]} {rng.integers(0, cmax + 1)}")
            if rng.random() < 0.2:
                atoms.append(f"n == {rng.integers(0, 3)}")
            line = f"edge l{src} -> l{dst}"
            if atoms:
                line += " guard: " + " && ".join(atoms)
            r = rng.random()
            if r < 0.15:
                line += " sync: h!"
            elif r < 0.3:
                line += " sync: h?"
            elif r < 0.38:
                line += " sync: b!"
            elif r < 0.46:
                line += " sync: b?"
            assigns = [f"{c} := 0" for c in clocks if rng.random() < 0.35]
            if rng.random() < 0.25:
                assigns.append(f"n := {rng.integers(0, 3)}")
            if assigns:
                line += " do: " + ", ".join(assigns)
            lines.append(line)
    target = rng.integers(nproc)
    lines += ["", f"query reachable: P{target}.l{nlocs - 1} && n == {rng.integers(0, 3)}"]
    return "\n".join(lines) + "\n"


# acceptance reporting: one line per criterion at the end of the run

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _CRITERIA[n] = (title, report.outcome, detail, getattr(report, "duration", 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcome, detail, secs = _CRITERIA[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"{verdict} criterion {n} ({title}) [{secs:.1f}s]"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
