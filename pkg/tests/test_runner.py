import csv
import json
import subprocess
import sys
import textwrap

import pytest

from randtaylor.precision import CancellationError, precision_retry
from randtaylor.runner import ConfigError, main, parse_config, run
from randtaylor.runner.report import Report, fmt, params


def write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text))
    return p


def test_unknown_tag_is_a_config_error():
    with pytest.raises(ConfigError) as info:
        parse_config("[experiment]\ntag = thm9\n", "x.ini")
    assert "x.ini:2" in str(info.value) and "[tag]" in str(info.value)


def test_expressions_in_values():
    cfg = parse_config("[experiment]\ntag = bessel\nradii = 1, 2*pi\nR = 10\n")
    assert cfg.get_list("experiment", "radii") == pytest.approx([1.0, 6.283185307179586])
    assert cfg.get("experiment", "R", int) == 10


def test_radii_must_increase():
    cfg = parse_config("[experiment]\ntag = thm1\nradii = 400, 200\n", "c.ini")
    with pytest.raises(ConfigError) as info:
        cfg.increasing("experiment", "radii")
    assert "c.ini:3" in str(info.value)


def test_missing_beta_names_the_key(tmp_path, capsys):
    cfg = write(tmp_path, """
        [experiment]
        tag = thm2
        radii = 200, 400

        [sequence]
        kind = power-phase
        """)
    code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 2
    assert "beta" in capsys.readouterr().err


def test_thm6_pattern_exits_zero(tmp_path):
    cfg = write(tmp_path, """
        [experiment]
        tag = thm6
        length = 4096
        max_period = 16

        [sequence]
        kind = integer-model
        model = periodic
        pattern = 1, 2
        """)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "out" / "thm6" / "verdicts.csv")))
    assert rows[0]["tag"] == "periodic" and rows[0]["period"] == "2"


def test_failed_rule_exits_one(tmp_path):
    cfg = write(tmp_path, """
        [experiment]
        tag = witness
        radii = 1000, 5000
        a = 1/2
        delta = 0.4
        half_width = 0.05

        [sequence]
        kind = literal
        values = 1
        periodic = true
        """)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 1
    summary = json.loads((tmp_path / "out" / "witness" / "summary.json").read_text())
    assert summary["all_pass"] is False and summary["failed"]


def test_cap_exceeded_becomes_a_failed_row(tmp_path):
    cfg = write(tmp_path, """
        [experiment]
        tag = lemma3
        radii = 3000
        thetas = 0

        [sequence]
        kind = literal
        values = 1, -1
        periodic = true

        [precision]
        start = 64
        cap = 256
        """)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 1
    rows = list(csv.DictReader(open(tmp_path / "out" / "lemma3" / "rows.csv")))
    assert rows[0]["pass"] == "false" and "cap 256" in rows[0]["reason"]


def test_precision_retry_records_final_precision():
    class Attempt:
        def __init__(self, p):
            self.precision_bits = p
            self.cancelled = p < 256
            self.error_bound = 0.0

    assert precision_retry(Attempt, 64, 4096).precision_bits == 256
    with pytest.raises(CancellationError):
        precision_retry(Attempt, 64, 128)


def test_report_formatting(tmp_path):
    assert fmt(0.1) == "0.1" and fmt(True) == "true" and fmt(1 - 2j) == "1.0-2.0j"
    assert params(r=200.0, bins=8) == "r=200.0; bins=8"
    rep = Report("demo", tmp_path)
    rep.row("x=1", 1.0, 1.0, 0.0, True, "equal")
    rep.table("t", ["a"], [[1.5]])
    rep.close(0.1)
    assert (tmp_path / "demo" / "t.csv").read_text() == "a\n1.5\n"
    assert json.loads((tmp_path / "demo" / "summary.json").read_text())["all_pass"] is True


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "[experiment]\ntag = bessel\nradii = 1, 5\n")
    out = subprocess.run([sys.executable, "-m", "randtaylor.runner", "run", "--config", str(cfg), "--out",
                          str(tmp_path / "o")], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr


def test_run_returns_the_report(tmp_path):
    rep = run(write(tmp_path, "[experiment]\ntag = bessel\nradii = 1\n"), tmp_path / "o")
    assert rep.all_pass and (tmp_path / "o" / "bessel" / "rows.csv").exists()
