import subprocess
import sys

import pytest

from tareach import cli
from tareach.model import parse_model
from tareach.model.generators import family_text


@pytest.fixture
def models(tmp_path):
    paths = {}
    for name, text in [
        ("fig1", family_text("fig1", 1)),
        ("fischer3", family_text("fischer", 3)),
        ("buggy", family_text("fischer-buggy", 2)),
    ]:
        p = tmp_path / f"{name}.ta"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def check(capsys, *argv):
    code = cli.main(["check", *argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestCheck:
    def test_fig1_reachable(self, models, capsys):
        code, out, _ = check(capsys, models["fig1"], "--algo", "closure-lu")
        assert code == 1
        stats = dict(line.split("=", 1) for line in out.splitlines())
        assert stats["verdict"] == "reachable"
        assert int(stats["visited"]) <= 5

    def test_unreachable_has_no_trace(self, models, capsys):
        code, out, _ = check(capsys, models["fischer3"], "--algo", "closure-lu", "--trace")
        assert code == 0
        assert "trace" not in out

    def test_trace_printed(self, models, capsys):
        code, out, _ = check(capsys, models["buggy"], "--trace")
        assert code == 1
        steps = [l for l in out.splitlines() if l.startswith("  ")]
        assert steps and "->" in steps[0]

    @pytest.mark.parametrize("algo", list(cli.ALGORITHMS))
    def test_exit_codes_every_algo(self, models, capsys, algo):
        assert check(capsys, models["fischer3"], "--algo", algo)[0] == cli.EXIT_UNREACHABLE
        assert check(capsys, models["buggy"], "--algo", algo)[0] == cli.EXIT_REACHABLE

    def test_tsv_row(self, models, capsys):
        _, out, _ = check(capsys, models["fischer3"], "--stats-format", "tsv")
        row = out.rstrip("\n").split("\t")
        assert len(row) == len(cli.TSV_FIELDS)
        assert row[:3] == ["fischer3", "closure-lu", "unreachable"]

    def test_tsv_deterministic_apart_from_time(self, models, capsys):
        rows = []
        for _ in range(2):
            _, out, _ = check(capsys, models["fischer3"], "--stats-format", "tsv")
            rows.append(out.split("\t")[:-1])
        assert rows[0] == rows[1]

    def test_oracle_flag(self, models, capsys):
        code, out, _ = check(capsys, models["fischer3"], "--oracle")
        assert code == 0
        assert "oracle_checks=" in out

    def test_unknown_flag(self, models, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["check", models["fig1"], "--bogus"])
        assert info.value.code == cli.EXIT_USAGE

    def test_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.ta"
        bad.write_text("system s\nclock x\nprocess A\nlocation a initial\nedge a -> a guard: x - x < 1\n")
        code, out, err = check(capsys, str(bad))
        assert code == 2 and "line 5" in err and out == ""

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = check(capsys, str(tmp_path / "absent.ta"))
        assert code == 2 and err


class TestGen:
    def test_fischer(self, capsys):
        assert cli.main(["gen", "fischer", "3"]) == 0
        net = parse_model(capsys.readouterr().out)
        assert len(net.processes) == 3

    def test_fddi_clocks(self, capsys):
        cli.main(["gen", "fddi", "3"])
        assert parse_model(capsys.readouterr().out).nclocks == 11

    def test_bad_size(self, capsys):
        assert cli.main(["gen", "fischer", "1"]) == 2
        assert "fischer" in capsys.readouterr().err

    def test_bad_family(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["gen", "nope", "2"])
        assert info.value.code == 2

    def test_byte_identical(self, capsys):
        cli.main(["gen", "csma", "3"])
        a = capsys.readouterr().out
        cli.main(["gen", "csma", "3"])
        assert capsys.readouterr().out == a


def test_console_entry_point(tmp_path):
    p = tmp_path / "fig1.ta"
    p.write_text(family_text("fig1", 1))
    done = subprocess.run([sys.executable, "-m", "tareach.cli", "check", str(p)], capture_output=True, text=True)
    assert done.returncode == 1
    assert "verdict=reachable" in done.stdout


def test_range_error_is_a_model_error(tmp_path, capsys):
    p = tmp_path / "r.ta"
    p.write_text("system r\nint n 0 1 0\nprocess A\nlocation a initial\nedge a -> a do: n := n + 1\n")
    code, _, err = check(capsys, str(p))
    assert code == cli.EXIT_USAGE and "leaves" in err
