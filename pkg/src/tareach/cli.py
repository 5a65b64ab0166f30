"""Command-line front end.

``tareach check FILE`` exits 0 when no target is reachable, 1 when one is,
2 on usage or model errors, and 3 when the search aborts (node budget,
bound divergence, or an oracle disagreement).  ``tareach gen FAMILY N``
prints a model.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

from tareach.model.generators import FAMILIES, family_text
from tareach.model.network import ModelRangeError
from tareach.model.parser import ModelError, load_model
from tareach.regions import OracleDisagreement
from tareach.search import ALGORITHMS, Search, SearchDivergence

EXIT_UNREACHABLE = 0
EXIT_REACHABLE = 1
EXIT_USAGE = 2
EXIT_ABORTED = 3

TSV_FIELDS = ("model", "algo", "verdict", "visited", "stored", "reopenings", "ms")


@dataclasses.dataclass
class RunReport:
    model: str
    algo: str
    verdict: str
    visited: int
    stored: int
    subsumption_tests: int
    reopenings: int
    ms: float

    def text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self._items())

    def tsv(self) -> str:
        row = dict(self._items())
        return "\t".join(str(row[k]) for k in TSV_FIELDS)

    def _items(self):
        for k, v in self.__dict__.items():
            yield k, (f"{v:.3f}" if k == "ms" else v)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tareach", description="Timed-automata reachability checker.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide reachability of the model's targets")
    c.add_argument("file")
    c.add_argument("--algo", choices=list(ALGORITHMS), default="closure-lu")
    c.add_argument("--oracle", action="store_true", help="cross-check subsumption by region enumeration")
    c.add_argument("--trace", action="store_true", help="print a witness path when reachable")
    c.add_argument("--stats-format", choices=("text", "tsv"), default="text")

    g = sub.add_parser("gen", help="print a benchmark model")
    g.add_argument("family", choices=list(FAMILIES))
    g.add_argument("n", type=int)
    return p


def cmd_check(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        net = load_model(args.file)
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except ModelError as e:
        print(f"{args.file}: {e}", file=err)
        return EXIT_USAGE

    opts = ALGORITHMS[args.algo]
    if args.oracle:
        opts = dataclasses.replace(opts, oracle=True)
    search = Search(net, opts)
    t0 = time.perf_counter()
    try:
        verdict = search.run()
    except ModelRangeError as e:
        print(f"{args.file}: {e}", file=err)
        return EXIT_USAGE
    except (SearchDivergence, OracleDisagreement) as e:
        print(f"aborted: {e}", file=err)
        return EXIT_ABORTED
    ms = (time.perf_counter() - t0) * 1000.0

    st = verdict.stats
    report = RunReport(
        net.name, args.algo, "reachable" if verdict.reachable else "unreachable",
        st.visited, st.stored, st.subsumption_tests, st.reopenings, ms,
    )
    print(report.tsv() if args.stats_format == "tsv" else report.text(), file=out)
    if args.oracle and args.stats_format == "text":
        print(f"oracle_checks={st.oracle_checks}", file=out)
    if args.trace and verdict.reachable:
        print("trace:", file=out)
        for i, (label, state) in enumerate(verdict.trace, 1):
            print(f"  {i}. {net.describe_label(label)} -> {net.describe_state(state)}", file=out)
    return EXIT_REACHABLE if verdict.reachable else EXIT_UNREACHABLE


def cmd_gen(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        text = family_text(args.family, args.n)
    except ValueError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    out.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "check":
        return cmd_check(args)
    return cmd_gen(args)


if __name__ == "__main__":
    sys.exit(main())
