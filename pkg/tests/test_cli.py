import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from braitenberg.actuation import ALL_BITS, WheelCommand, decide, parse_term, pattern_matches
from braitenberg.circuits import data_path
from braitenberg.cli import main, write_atomic
from braitenberg.sim import CSV_HEADER

DATA = data_path("")


def cli(*args):
    return main([str(a) for a in args])


def test_help_lists_subcommands_and_flags():
    out = subprocess.run([sys.executable, "-m", "braitenberg", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for word in ("compile", "simulate", "regress", "synth", "analyze",
                 "--out", "--plot", "--dt", "--delta", "--duration"):
        assert word in out.stdout


def test_no_subcommand_is_usage_error(capsys):
    assert cli() == 2


def test_compile_writes_three_artifacts(tmp_path):
    assert cli("compile", DATA / "opportunist.behavior", "--out", tmp_path) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["opportunist.actions", "opportunist.circuit", "opportunist.trace"]
    assert "term ABC -> L-R- <- RLA, LRA" in (tmp_path / "opportunist.trace").read_text()


def test_compile_missing_file(tmp_path, capsys):
    assert cli("compile", tmp_path / "missing.behavior") == 2
    assert "file not found" in capsys.readouterr().err


def test_compile_broken_spec_names_row(tmp_path, capsys):
    for f in ("opportunist.circuit", "opportunist.templates"):
        (tmp_path / f).write_text((DATA / f).read_text())
    text = re.sub(r"^1010\s+L\+R-\s+LRS\n", "", (DATA / "opportunist.behavior").read_text(), flags=re.M)
    (tmp_path / "broken.behavior").write_text(text)
    out = tmp_path / "out"
    assert cli("compile", tmp_path / "broken.behavior", "--out", out) != 0
    err = capsys.readouterr().err
    assert "LRS" in err and "broken.behavior:" in err
    assert not out.exists()


def test_simulate_csv_header(tmp_path):
    assert cli("simulate", "suspicious", "--out", tmp_path) == 0
    assert (tmp_path / "suspicious.csv").read_text().splitlines()[0] == ",".join(CSV_HEADER)


def test_simulate_plot_two_polylines(tmp_path):
    assert cli("simulate", "wandering", "--plot", "--out", tmp_path) == 0
    root = ET.parse(tmp_path / "wandering.svg").getroot()
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 2
    assert {p.get("id"): p.get("stroke") for p in lines} == {"vehicle": "red", "mate": "black"}


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli("simulate", "following", "--out", a) == 0
    assert cli("simulate", "following", "--out", b) == 0
    assert (a / "following.csv").read_bytes() == (b / "following.csv").read_bytes()


def test_simulate_overrides(tmp_path):
    assert cli("simulate", "suspicious", "--duration", 17, "--dt", 0.1, "--delta", 0.5, "--out", tmp_path) == 0
    rows = (tmp_path / "suspicious.csv").read_text().splitlines()
    assert len(rows) == 18
    assert rows[1].split(",")[6] == "0.5"  # first decision raised vl by the overridden delta


def test_simulate_with_spec(tmp_path):
    assert cli("simulate", "following", "--spec", DATA / "opportunist.behavior", "--out", tmp_path) == 0


def test_simulate_unknown_scenario(capsys):
    assert cli("simulate", "nope") == 2
    assert "suspicious, following, wandering" in capsys.readouterr().err


def test_regress_passes(capsys):
    assert cli("regress", DATA / "opportunist.circuit") == 0
    assert "6/6 properties pass" in capsys.readouterr().out


def test_regress_mutant_fails(tmp_path, capsys):
    text = (DATA / "opportunist.circuit").read_text().replace("\n4  1  input", "\n4  2  input")
    (tmp_path / "m.circuit").write_text(text)
    assert cli("regress", tmp_path / "m.circuit", "--lines") == 1
    assert "RLD,fail" in capsys.readouterr().out


def test_synth_equivalent_to_law(capsys):
    assert cli("synth", DATA / "opportunist.actions", "--ascii") == 0
    terms = {}
    for line in capsys.readouterr().out.splitlines():
        cmd, _, body = line.partition(": ")
        terms[WheelCommand.parse(cmd)] = [parse_term(t) for t in body.split(" + ")]
    for bits in ALL_BITS:
        hits = [c for c, cubes in terms.items() if any(pattern_matches(q, bits) for q in cubes)]
        assert hits == [decide(bits)]


def test_synth_pretty_notation(capsys):
    assert cli("synth", DATA / "priority_law.actions") == 0
    captured = capsys.readouterr()
    assert "(L⁻,R⁻): ABC" in captured.out
    assert "1001" in captured.err


def test_analyze_golden_suspicious(tmp_path, capsys):
    assert cli("simulate", "suspicious", "--out", tmp_path) == 0
    capsys.readouterr()
    code = cli("analyze", tmp_path / "suspicious.csv", DATA / "scenarios" / "suspicious.scenario", "--lines")
    out = capsys.readouterr().out
    assert code == 0
    assert "escape,pass" in out and "caution,pass" in out


def test_analyze_failure_exit_one(tmp_path, capsys):
    assert cli("simulate", "suspicious", "--delta", 0.01, "--out", tmp_path) == 0
    code = cli("analyze", tmp_path / "suspicious.csv", DATA / "scenarios" / "suspicious.scenario")
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_analyze_bad_csv(tmp_path, capsys):
    (tmp_path / "x.csv").write_text("nope\n")
    assert cli("analyze", tmp_path / "x.csv", DATA / "scenarios" / "suspicious.scenario") == 2


def test_write_atomic_leaves_nothing_on_failure(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    with pytest.raises(OSError):
        write_atomic({tmp_path / "a.txt": "a", blocker / "b.txt": "b"})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["blocker"]
