"""The acceptance suite: every shipped config run through the CLI, then checked against independent oracles.

Each experiment is run three times (two single-threaded runs and one with 8
threads) so that the reproducibility criterion can compare the CSV bytes.
"""

import csv
import filecmp
import json
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest

from randtaylor.runner import load_config, run

CONFIGS = sorted((Path(__file__).resolve().parents[1] / "configs" / "acceptance").glob("*.ini"))
TAGS = {p.stem: load_config(p).tag for p in CONFIGS}


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance")
    out = {}
    for label, threads in (("first", 1), ("second", 1), ("threaded", 8)):
        for cfg in CONFIGS:
            run(cfg, base / label, threads=threads)
        out[label] = base / label
    return out


def rows(runs, tag, table="rows"):
    with open(runs["first"] / tag / f"{table}.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def summary(runs, tag):
    return json.loads((runs["first"] / tag / "summary.json").read_text())


def param(row, key):
    for item in row["params"].split("; "):
        k, _, v = item.partition("=")
        if k == key:
            return v
    return None


def zero_angles(runs, tag, table):
    z = rows(runs, tag, table)
    return np.array([float(r["arg"]) for r in z if float(r["modulus"]) > 0])


def sector_counts(angles, bins):
    edges = -math.pi + 2 * math.pi * np.arange(bins + 1) / bins
    return [int(np.sum((angles > lo) & (angles <= hi))) for lo, hi in zip(edges[:-1], edges[1:])]


def near_fraction(angles, rays, width=0.2):
    d = np.min([np.abs((angles - c + math.pi) % (2 * math.pi) - math.pi) for c in rays], axis=0)
    return float(np.mean(d <= width))


@pytest.mark.criterion(1, "closed forms: e^z, e^-z, cosh")
def test_closed_forms(runs):
    assert summary(runs, "closed-forms")["all_pass"]
    rr = rows(runs, "closed-forms")
    for r in rr:
        if param(r, "family") in ("exp", "cosh") and param(r, "what") is None and param(r, "precision_bits"):
            assert param(r, "precision_bits") == "128"
            assert float(r["observed"]) <= 1e-12
    alt = next(r for r in rr if param(r, "family") == "exp(-z)")
    assert float(alt["observed"]) == pytest.approx(-20.0, abs=1e-12)
    assert param(alt, "final_bits") == "128"
    z = rows(runs, "closed-forms", "cosh_zeros")
    got = np.array([complex(float(r["re"]), float(r["im"])) for r in z])
    want = [1j * math.pi * (k + 0.5) for k in range(-3, 3)]
    assert len(got) == 6
    assert max(np.min(np.abs(got - w)) for w in want) <= 1e-6
    assert abs(np.sum(1 / got)) <= 1e-9
    assert any(param(r, "family") == "exp" and param(r, "r") == "10.0" and r["observed"] == "0" for r in rr)


@pytest.mark.criterion(2, "Parseval identity for every family at R = 1e4")
def test_parseval(runs):
    rr = rows(runs, "parseval")
    assert len(rr) >= 7
    for r in rr:
        assert param(r, "R") == "10000"
        lhs, rhs = float(r["observed"]), float(r["predicted"])
        assert abs(lhs - rhs) <= 1e-10 * rhs


@pytest.mark.criterion(3, "Bessel check of the Lebesgue variance")
def test_bessel(runs):
    rr = rows(runs, "bessel")
    assert {float(param(r, "r")) for r in rr} == {1.0, 5.0, 10.0, 20.0}
    for r in rr:
        radius = float(param(r, "r"))
        with mpmath.workdps(50):
            # sum r^{2n} / (n!)^2 summed directly
            want = float(mpmath.nsum(lambda n: mpmath.mpf(radius) ** (2 * n) / mpmath.factorial(n) ** 2, [0, mpmath.inf]))
        assert float(r["observed"]) == pytest.approx(want, rel=1e-10)


def _uniform_protocol(runs, tag, radii, final):
    worst = []
    for radius in radii:
        angles = zero_angles(runs, tag, f"zeros_r{radius}")
        expected = radius * (math.pi / 4) / (2 * math.pi)
        counts = sector_counts(angles, 8)
        worst.append(max(abs(c - expected) / expected for c in counts))
        if radius == final:
            assert all(abs(c - expected) <= 0.2 * expected for c in counts), counts
    assert all(b <= a for a, b in zip(worst[:-1], worst[1:])), worst
    assert summary(runs, tag)["all_pass"]


@pytest.mark.criterion(4, "quadratic phase: uniform zero sectors at r = 200, 400, 800")
def test_thm1(runs):
    _uniform_protocol(runs, "thm1", [200, 400, 800], 800)


@pytest.mark.criterion(5, "power phase 3/2: uniform zero sectors at r = 200, 400")
def test_thm2(runs):
    _uniform_protocol(runs, "thm2", [200, 400], 400)


@pytest.mark.criterion(6, "diagonal Gaussian mass at R = 1e4")
def test_lemma5(runs):
    diag = next(r for r in rows(runs, "lemma5") if param(r, "what") == "diagonal")
    R = 10_000
    oracle = math.sqrt(math.pi * R) - 1
    assert float(diag["observed"]) >= 1.7 * math.sqrt(R)
    assert float(diag["observed"]) >= oracle > 170


@pytest.mark.criterion(7, "Weyl-sum closed forms up to block length 1e4")
def test_weyl(runs):
    rr = rows(runs, "weyl")
    kinds = {param(r, "kind") for r in rr}
    assert kinds == {"zero-lag", "linear", "quadratic"}
    assert max(int(param(r, "block_length")) for r in rr) == 10_000
    assert all(float(r["deviation"]) <= 1e-9 for r in rr)


@pytest.mark.criterion(8, "saddle-point error trend for beta = 3/2")
def test_saddle(runs):
    table = rows(runs, "saddle", "saddle")
    meds = []
    for R in (10**4, 10**5, 10**6):
        errs = [float(r["rel_err"]) for r in table if int(r["R"]) == R]
        assert len(errs) == 32
        meds.append(float(np.median(errs)))
    assert meds[0] >= meds[1] >= meds[2]


@pytest.mark.criterion(9, "Gaussian spectrum {0, pi}: zeros at +-pi/2 and indicator")
def test_thm4(runs):
    for seed in range(5):
        angles = zero_angles(runs, "thm4", f"zeros_seed{seed}_r200")
        assert len(angles) > 0
        assert near_fraction(angles, [math.pi / 2, -math.pi / 2]) >= 0.9
    ind = [r for r in rows(runs, "thm4") if param(r, "r") == "500.0"]
    assert len(ind) == 5 * 8
    for r in ind:
        theta = float(param(r, "theta"))
        assert abs(float(r["observed"]) - abs(math.cos(theta))) <= 0.05


@pytest.mark.criterion(10, "moving-average sign sequence: witness over the thick grid")
def test_thm3(runs):
    table = rows(runs, "thm3", "witness")
    assert max(int(r["R"]) for r in table) <= 10**5
    groups = {}
    for r in table:
        groups.setdefault((r["seed"], r["a"]), []).append(float(r["max_abs_w"]) >= int(r["R"]) ** 0.2)
    assert len(groups) == 5 * 3
    assert all(sum(v) / len(v) >= 0.9 for v in groups.values())


@pytest.mark.criterion(11, "almost-periodic cos(n pi/2): zeros on the real rays, bounded Lindelof sums")
def test_thm5(runs):
    angles = zero_angles(runs, "thm5", "zeros_r200")
    assert near_fraction(angles, [0.0, math.pi]) >= 0.9
    lin = [r for r in rows(runs, "thm5") if param(r, "what") == "lindelof"]
    assert {param(r, "r") for r in lin} == {"10.0", "20.0", "40.0"}
    assert all(float(r["observed"]) <= 1.0 for r in lin)


@pytest.mark.criterion(12, "periodic patterns and full-support integer models")
def test_thm6(runs):
    cfg = load_config(next(p for p in CONFIGS if TAGS[p.stem] == "thm6"))
    verdicts = rows(runs, "thm6", "verdicts")
    periodic = [r for r in verdicts if r["seed"] == ""]
    patterns = {s.partition(".")[2]: [int(v) for v in cfg.sections[s]["pattern"].split(",")]
                for s in cfg.sections if cfg.sections[s].get("model") == "periodic"}
    assert max(len(p) for p in patterns.values()) == 16
    for r in periodic:
        pat = patterns[r["model"]]
        n = len(pat)
        minimal = min(p for p in range(1, n + 1) if n % p == 0 and pat == pat[:p] * (n // p))
        assert r["tag"] == "periodic" and int(r["period"]) == minimal
    random = [r for r in verdicts if r["seed"] != ""]
    assert {r["model"] for r in random} >= {"iid-binary", "markov-sticky"}
    assert len(random) == 20 * len({r["model"] for r in random})
    assert all(r["tag"] == "full_support" and float(r["coverage"]) >= 0.9 for r in random)
    assert summary(runs, "thm6")["all_pass"]


@pytest.mark.criterion(13, "negative control: xi = 1 fails the witness at a = 1/2, no zeros")
def test_control(runs):
    table = rows(runs, "control", "witness")
    assert all(float(r["a"]) == 0.5 for r in table)
    assert sum(float(r["max_abs_w"]) >= int(r["R"]) ** 0.2 for r in table) < 0.9 * len(table)
    zeros = [r for r in rows(runs, "control") if param(r, "what") == "zeros"]
    assert len(zeros) == 3 and all(r["observed"] == "0" for r in zeros)


@pytest.mark.criterion(14, "byte-identical CSVs across runs and thread counts")
def test_reproducible(runs):
    first = sorted(p.relative_to(runs["first"]) for p in runs["first"].rglob("*.csv"))
    assert len(first) > 13
    for other in ("second", "threaded"):
        names = sorted(p.relative_to(runs[other]) for p in runs[other].rglob("*.csv"))
        assert names == first
        for rel in first:
            assert filecmp.cmp(runs["first"] / rel, runs[other] / rel, shallow=False), f"{other}: {rel}"


@pytest.mark.parametrize("stem", sorted(TAGS))
def test_every_preset_passes(runs, stem):
    assert summary(runs, TAGS[stem])["all_pass"]
