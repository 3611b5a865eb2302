"""Experiment presets: each turns a config into report rows and data tables.

Every preset builds its list of independent tasks in a fixed order, hands it
to ``ctx.map`` (which may run them on threads) and consumes the results in
that same order, so the output does not depend on the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median

import mpmath
import numpy as np

from .. import expsums as ex
from ..dichotomy import dichotomy_check
from ..entire_fn import indicator_estimate, lemma3_check, log_abs_f
from ..precision import CancellationError, precision_retry
from ..reals import mp_workprec
from ..sequences import (AlmostPeriodic, GaussianStationary, IntegerModel, PhasePolynomial, PhaseSequence,
                         alternating, constant_one, cosh_sequence)
from ..spectra import (SpectralMeasure, SpectrumSet, angular_density, reflect, supporting_function,
                       variance_on_circle)
from ..zeros import ValidationError, angular_histogram, l1loc_diagnostic, lindelof_sum, zeros_in_disk
from .config import ExperimentConfig
from .report import Report, params

TWO_PI = 2.0 * math.pi


@dataclass
class RunContext:
    threads: int = 1
    precision_bits: int | None = None  # command-line override of the starting precision
    _pool: object = None

    def map(self, fn, items) -> list:
        items = list(items)
        if self._pool is None or len(items) < 2:
            return [fn(x) for x in items]
        return list(self._pool.map(fn, items))

    def start_bits(self, cfg: ExperimentConfig, default: int = 128) -> int:
        if self.precision_bits is not None:
            return int(self.precision_bits)
        return cfg.get("precision", "start", int, default)


# --- helpers -------------------------------------------------------------------


def sequence_spectrum(seq) -> SpectrumSet:
    """The closed support sigma of a sequence's spectral measure, where it is known."""
    if isinstance(seq, GaussianStationary):
        return seq.rho.support()
    if isinstance(seq, AlmostPeriodic):
        return SpectrumSet(points=[float(f) for f in seq.frequencies])
    return SpectrumSet.full()


def _spectrum(cfg: ExperimentConfig, seq) -> SpectrumSet:
    return cfg.spectrum() if "spectrum" in cfg.sections else sequence_spectrum(seq)


def _seeded(cfg: ExperimentConfig, section: str, seed: int):
    sec = dict(cfg.sections[section])
    sec["seed"] = str(seed)
    sub = ExperimentConfig(cfg.tag, {**cfg.sections, section: sec}, cfg.path, cfg.lines)
    return sub.sequence(section)


def _zeros_table(zs):
    return [[z.real, z.imag, abs(z), float(np.angle(z)), res] for z, res in zip(zs.zeros, zs.residuals)]


ZERO_HEADER = ["re", "im", "modulus", "arg", "residual"]
HIST_HEADER = ["r", "theta_lo", "theta_hi", "observed", "predicted", "deviation"]


def _fraction_near(zs, angles, width: float) -> float:
    nz = zs.nonzero()
    if len(nz) == 0:
        return 0.0
    a = np.angle(nz)
    d = np.full(len(a), np.inf)
    for c in angles:
        d = np.minimum(d, np.abs((a - c + math.pi) % TWO_PI - math.pi))
    return float(np.mean(d <= width))


def _zeros_or_reason(seq, r, prec=None):
    try:
        return zeros_in_disk(seq, r, prec), ""
    except (ValidationError, CancellationError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


# --- closed forms ----------------------------------------------------------------


def closed_forms(cfg, rep: Report, ctx: RunContext):
    p = ctx.start_bits(cfg, 128)
    tol = cfg.threshold("value_tol", 1e-12)
    zero_tol = cfg.threshold("zero_tol", 1e-6)
    lin_tol = cfg.threshold("lindelof_tol", 1e-9)
    n_theta = cfg.get("experiment", "thetas", int, 16)
    thetas = [-math.pi + TWO_PI * k / n_theta for k in range(n_theta)]
    exp_radii = cfg.increasing("experiment", "exp_radii", float, [1, 10, 20])
    cosh_radii = cfg.increasing("experiment", "cosh_radii", float, [1, 5, 10])
    zr = cfg.get("experiment", "zeros_radius", float, 10.0)
    alt_r = cfg.get("experiment", "alternating_radius", float, 20.0)
    alt_start = cfg.get("precision", "alternating_start", int, 64)
    one, cosh = constant_one(), cosh_sequence()

    def exp_task(r):
        worst, bad = 0.0, ""
        for th in thetas:
            res = log_abs_f(one, r, th, p)
            if res.cancelled:
                bad = f"cancelled at theta={th!r}"
                worst = math.inf
                break
            worst = max(worst, abs(res.value - r * math.cos(th)))
        return worst, bad

    for r, (worst, bad) in zip(exp_radii, ctx.map(exp_task, exp_radii)):
        rep.row(params(family="exp", r=r, precision_bits=p, thetas=n_theta), worst, 0.0, worst,
                worst <= tol, f"max |log|F| - r cos(theta)| <= {tol}", bad)

    def cosh_task(r):
        worst, bad = 0.0, ""
        for th in thetas:
            with mp_workprec(200):
                exact = float(mpmath.log(abs(mpmath.cosh(mpmath.mpf(r) * mpmath.expjpi(mpmath.mpf(th) / mpmath.pi)))))
            try:
                res = precision_retry(lambda q: log_abs_f(cosh, r, th, q), p, 4096)
            except CancellationError as exc:
                return math.inf, str(exc)
            worst = max(worst, abs(res.value - exact))
        return worst, bad

    for r, (worst, bad) in zip(cosh_radii, ctx.map(cosh_task, cosh_radii)):
        rep.row(params(family="cosh", r=r, precision_bits=p, thetas=n_theta), worst, 0.0, worst,
                worst <= tol, f"max |log|cosh z| - oracle| <= {tol}", bad)

    # e^{-z}: the start precision is deliberately too low for theta = 0
    try:
        res = precision_retry(lambda q: log_abs_f(alternating(), alt_r, 0.0, q), alt_start, 4096)
        dev = abs(res.value + alt_r)
        rep.row(params(family="exp(-z)", r=alt_r, theta=0.0, start_bits=alt_start, final_bits=res.precision_bits),
                res.value, -alt_r, dev, dev <= tol, f"|log|F| + r| <= {tol} after precision retry")
    except CancellationError as exc:
        rep.row(params(family="exp(-z)", r=alt_r, start_bits=alt_start), "", -alt_r, "", False,
                "precision retry succeeds", str(exc))

    zs_exp, why = _zeros_or_reason(one, zr)
    rep.row(params(family="exp", r=zr), len(zs_exp) if zs_exp is not None else "", 0, "", zs_exp is not None and len(zs_exp) == 0,
            "no zeros in the disk", why)

    zs, why = _zeros_or_reason(cosh, zr)
    if zs is None:
        rep.row(params(family="cosh", r=zr), "", "", "", False, "zeros located", why)
        return
    k_max = int(math.floor(zr / math.pi - 0.5))
    expected = np.array([1j * math.pi * (k + 0.5) for k in range(-k_max - 1, k_max + 1)])
    dist = max((float(np.min(np.abs(zs.zeros - e))) for e in expected), default=0.0)
    rep.row(params(family="cosh", r=zr, what="count"), len(zs), len(expected), len(zs) - len(expected),
            len(zs) == len(expected), "zero count equals the number of i pi (k + 1/2) in the disk")
    rep.row(params(family="cosh", r=zr, what="location"), dist, 0.0, dist, dist <= zero_tol and len(zs) == len(expected),
            f"every i pi (k + 1/2) has a computed zero within {zero_tol}")
    lin = lindelof_sum(zs)
    rep.row(params(family="cosh", r=zr, what="lindelof"), abs(lin), 0.0, abs(lin), abs(lin) <= lin_tol,
            f"|sum 1/z| <= {lin_tol}")
    rep.table("cosh_zeros", ZERO_HEADER, _zeros_table(zs))


# --- exponential sums ---------------------------------------------------------------


def parseval(cfg, rep, ctx):
    R = cfg.get("experiment", "R", int, 10000)
    tol = cfg.threshold("rel_tol", 1e-10)
    fams = cfg.sequences()

    def task(item):
        lhs, rhs = ex.parseval_sides(item[1], R)
        return lhs, rhs

    for (name, _), (lhs, rhs) in zip(fams, ctx.map(task, fams)):
        rel = abs(lhs - rhs) / rhs if rhs else abs(lhs)
        rep.row(params(family=name, R=R), lhs, rhs, rel, rel <= tol, f"relative Parseval gap <= {tol}")


def bessel(cfg, rep, ctx):
    radii = cfg.increasing("experiment", "radii", float, [1, 5, 10, 20])
    thetas = cfg.get_list("experiment", "thetas", float, [0.0, 1.0])
    tol = cfg.threshold("rel_tol", 1e-10)
    rho = SpectralMeasure.lebesgue(1.0)
    tasks = [(r, th) for r in radii for th in thetas]

    def task(item):
        r, th = item
        with mp_workprec(140):
            exact = float(mpmath.besseli(0, 2 * mpmath.mpf(r)))
        return variance_on_circle(rho, r, th), exact

    for (r, th), (val, exact) in zip(tasks, ctx.map(task, tasks)):
        rel = abs(val - exact) / exact
        rep.row(params(r=r, theta=th), val, exact, rel, rel <= tol, f"relative error against I0(2r) <= {tol}")


def weyl(cfg, rep, ctx):
    R = cfg.get("experiment", "R", int, 10000)
    lengths = cfg.increasing("experiment", "block_lengths", int, [10, 100, 1000, 10000])
    lags = cfg.get_list("experiment", "lags", int, [1, 7, 100])
    alpha = cfg.get("experiment", "linear_coefficient", str, "(sqrt(5)-1)/2")
    q = cfg.get("experiment", "quadratic_coefficient", str, "sqrt(2)")
    start = cfg.get("experiment", "block_start", int, -37)
    tol = cfg.threshold("rel_tol", 1e-9)
    lin = PhasePolynomial({1: alpha})
    quad = PhasePolynomial({2: q})
    tasks = [("zero-lag", L, 0) for L in lengths]
    tasks += [(kind, L, T) for kind in ("linear", "quadratic") for L in lengths for T in lags]

    def oracle(kind, L, T):
        M1, M2 = start, start + L
        if kind == "zero-lag":
            return mpmath.mpc(L)
        if kind == "linear":
            return L * mpmath.expjpi(2 * mpmath.mpf(lin.coefficients[1].mpf(200)) * T)
        # q((n+R)^2 - (n+R-T)^2) = q T (2R - T) + 2 q T n: a geometric progression
        qq = quad.coefficients[2].mpf(200)
        a = qq * T * (2 * R - T)
        b = 2 * qq * T
        ratio = mpmath.expjpi(2 * b)
        first = mpmath.expjpi(2 * (a + b * M1))
        return first * (ratio**L - 1) / (ratio - 1)

    def task(item):
        kind, L, T = item
        f = quad if kind != "linear" else lin
        got = ex.weyl_sum(f, T, R, start, start + L)
        with mp_workprec(200):
            want = complex(oracle(kind, L, T))
        return got, want

    for (kind, L, T), (got, want) in zip(tasks, ctx.map(task, tasks)):
        rel = abs(got - want) / abs(want)
        rep.row(params(kind=kind, R=R, block_length=L, lag=T), abs(got), abs(want), rel,
                rel <= tol, f"relative error against the geometric closed form <= {tol}")


def lemma5(cfg, rep, ctx):
    R = cfg.get("experiment", "R", int, 10000)
    m = cfg.get("experiment", "m", int, 1)
    ratio = cfg.threshold("diagonal_ratio", 1.7)
    diag = ex.gaussian_mass(R) / 1.0
    oracle = math.sqrt(math.pi * R) - 1.0
    rep.row(params(R=R, what="diagonal"), diag, ratio * math.sqrt(R), diag / math.sqrt(R), diag >= ratio * math.sqrt(R),
            f"sum exp(-n^2/R) >= {ratio} sqrt(R)")
    rep.row(params(R=R, what="gaussian-oracle"), diag, oracle, diag - oracle, diag >= oracle,
            "sum exp(-n^2/R) >= sqrt(pi R) - 1")
    names = [s for s in cfg.sections if s.startswith("sequence.")]
    for sec in names:
        seq = cfg.sequence(sec)
        expect = cfg.get(sec, "expect_certified", bool, True)
        if not isinstance(seq, PhaseSequence):
            raise cfg.error(sec, "kind", "lemma5 needs a phase sequence")
        rec = ex.lemma5_decomposition(seq, R, m)
        rep.row(params(family=sec.partition(".")[2], R=R, m=m, what="certificate"), rec.offdiagonal_bound, rec.diagonal,
                rec.diagonal - rec.offdiagonal_bound, rec.certified == expect,
                "diagonal exceeds the off-diagonal bound" if expect else "no certificate (expected for a zero phase)")
        rep.table(f"blocks_{sec.partition('.')[2]}", ["T", "block_max"], list(zip(rec.lags.tolist(), rec.block_max.tolist())))
    scan_radii = cfg.increasing("experiment", "scan_radii", int, [])
    if scan_radii:
        seq = cfg.sequence("sequence.scan") if "sequence.scan" in cfg.sections else cfg.sequence(names[0])
        lags = cfg.get_list("experiment", "scan_lags", int, [1, 2, 3, 5, 8])

        def task(R_):
            return float(np.max(ex.weyl_block_scan(seq, R_, lags))) / math.sqrt(R_)

        vals = ctx.map(task, scan_radii)
        ok = all(b <= a for a, b in zip(vals[:-1], vals[1:]))
        rep.row(params(what="weyl-scan", radii=" ".join(map(str, scan_radii))), " ".join(fmt_list(vals)), "", "",
                ok, "max block |S_T| / sqrt(R) non-increasing in R")
        rep.table("weyl_scan", ["R", "max_block_over_sqrtR"], list(zip(scan_radii, vals)))


def fmt_list(vals):
    return [repr(float(v)) for v in vals]


def saddle(cfg, rep, ctx):
    radii = cfg.increasing("experiment", "radii", int, [10**4, 10**5, 10**6])
    n_theta = cfg.get("experiment", "thetas", int, 32)
    seq = cfg.sequence()
    thetas = [k / n_theta for k in range(n_theta)]
    rows = ctx.map(lambda R: ex.saddle_comparison(seq, R, thetas), radii)
    meds = []
    table = []
    for R, rr in zip(radii, rows):
        med = median(r["rel_err"] for r in rr)
        meds.append(med)
        table.extend([r["R"], r["theta"], r["direct_abs"], r["saddle_abs"], r["rel_err"]] for r in rr)
        rep.row(params(R=R, what="median-rel-err", thetas=n_theta), med, "", "", True, "report only")
    ok = all(b <= a for a, b in zip(meds[:-1], meds[1:]))
    rep.row(params(what="trend", radii=" ".join(map(str, radii))), " ".join(fmt_list(meds)), "", "", ok,
            "median relative error non-increasing in R")
    rep.table("saddle", ["R", "theta", "direct_abs", "saddle_abs", "rel_err"], table)
    shift_R = cfg.get("experiment", "shift_R", int, 0)
    if shift_R:
        n_shift = cfg.get("experiment", "shift_thetas", int, 16)
        th = [k / n_shift for k in range(n_shift)]
        res = ctx.map(lambda t: ex.parseval_shift_scan(seq, shift_R, t), th)
        passed = sum(r["pass"] for r in res)
        rep.row(params(R=shift_R, what="parseval-shift", thetas=n_shift), passed, n_shift / 2, "", passed > n_shift / 2,
                "shift-window maximum clears 0.9 x the Parseval level for a majority of theta")
        rep.table("parseval_shift", ["R", "theta", "max_abs_w", "threshold", "pass"],
                  [[r["R"], r["theta"], r["max_abs_w"], r["threshold"], r["pass"]] for r in res])


def _grid_from(cfg):
    if cfg.has("experiment", "radii"):
        return cfg.increasing("experiment", "radii", int)
    return ex.ThickGrid(cfg.get("experiment", "grid_delta", float, 0.5), cfg.get("experiment", "j_lo", int),
                        cfg.get("experiment", "j_hi", int))


def _witness_runs(cfg, rep, ctx, seeds, expect_pass: bool):
    grid = _grid_from(cfg)
    radii = [int(R) for R in (grid.radii if isinstance(grid, ex.ThickGrid) else grid)]
    a_list = cfg.get_list("experiment", "a", float, [0.0, 0.25, 0.5])
    delta = cfg.get("experiment", "delta", float, 0.2)
    half = cfg.get("experiment", "half_width", float, 0.125)
    frac_min = cfg.threshold("min_pass_fraction", 0.9)
    seqs = {s: (_seeded(cfg, "sequence", s) if s is not None else cfg.sequence()) for s in seeds}
    tasks = [(s, a, R) for s in seeds for a in a_list for R in radii]
    res = ctx.map(lambda t: ex.witness_scan(seqs[t[0]], [t[2]], t[1], delta, half)[0], tasks)
    table = []
    i = 0
    for s in seeds:
        for a in a_list:
            chunk = res[i : i + len(radii)]
            i += len(radii)
            frac = sum(r["pass"] for r in chunk) / len(chunk)
            table.extend([s if s is not None else "", a, r["R"], r["theta_star"], r["max_abs_w"], r["threshold"], r["pass"]]
                         for r in chunk)
            seed_kw = {} if s is None else {"seed": s}
            if expect_pass:
                rep.row(params(**seed_kw, a=a, delta=delta, radii=len(radii)), frac, frac_min, frac - frac_min,
                        frac >= frac_min, f"fraction of radii with max |W_R| >= R^delta is >= {frac_min}")
            else:
                rep.row(params(**seed_kw, a=a, delta=delta, radii=len(radii), what="negative-control"), frac, frac_min,
                        frac - frac_min, frac < frac_min, f"witness fails: passing fraction < {frac_min}")
    rep.table("witness", ["seed", "a", "R", "theta_star", "max_abs_w", "threshold", "pass"], table)


def witness(cfg, rep, ctx):
    seeds = cfg.get_list("experiment", "seeds", int, []) or [None]
    _witness_runs(cfg, rep, ctx, seeds, cfg.get("experiment", "expect_pass", bool, True))


def thm3(cfg, rep, ctx):
    seeds = cfg.get_list("experiment", "seeds", int, [0, 1, 2, 3, 4])
    _witness_runs(cfg, rep, ctx, seeds, True)


def lemma3(cfg, rep, ctx):
    seq = cfg.sequence()
    radii = cfg.increasing("experiment", "radii", int, [10**3, 10**4])
    thetas = cfg.get_list("experiment", "thetas", float, [0.0, 0.125, 0.25, 0.5])
    scale = cfg.threshold("discrepancy_scale", 1.0)
    p = ctx.start_bits(cfg, 128)
    cap = cfg.get("precision", "cap", int, 4096)
    tasks = [(R, th) for R in radii for th in thetas]

    def task(t):
        try:
            return lemma3_check(seq, t[0], t[1], p, cap), ""
        except CancellationError as exc:
            return None, str(exc)

    for (R, th), (rec, why) in zip(tasks, ctx.map(task, tasks)):
        allowed = scale * math.log(R) / math.sqrt(R)
        if rec is None:
            rep.row(params(R=R, theta=th), "", "", "", False, "log|F| resolved below the precision cap", why)
            continue
        rep.row(params(R=R, theta=th), rec.lhs, rec.rhs, rec.discrepancy, rec.discrepancy <= allowed,
                f"||F|/mu - |W_R|| <= {scale} ln(R)/sqrt(R)")


# --- zeros ---------------------------------------------------------------------------


def _histogram_rows(rep, zs, bins, sigma_star, tol, final: bool):
    hist = angular_histogram(zs, bins, sigma_star)
    worst = max(abs(h.deviation) for h in hist if h.predicted > 0)
    if final:
        for h in hist:
            rep.row(params(r=zs.r, theta_lo=h.theta1, theta_hi=h.theta2), h.observed, h.predicted, h.deviation,
                    abs(h.deviation) <= tol, f"|observed - predicted| <= {tol} predicted")
    return hist, worst


def _uniform_zeros(cfg, rep, ctx):
    seq = cfg.sequence()
    radii = cfg.increasing("experiment", "radii", float)
    bins = cfg.get("experiment", "bins", int, 8)
    tol = cfg.threshold("max_rel_deviation", 0.2)
    sigma_star = reflect(_spectrum(cfg, seq))
    results = ctx.map(lambda r: _zeros_or_reason(seq, r), radii)
    worst_list, hist_rows = [], []
    for i, (r, (zs, why)) in enumerate(zip(radii, results)):
        if zs is None:
            rep.row(params(r=r), "", "", "", False, "zeros located and validated", why)
            worst_list.append(math.inf)
            continue
        hist, worst = _histogram_rows(rep, zs, bins, sigma_star, tol, i == len(radii) - 1)
        worst_list.append(worst)
        hist_rows.extend([h.r, h.theta1, h.theta2, h.observed, h.predicted, h.deviation] for h in hist)
        rep.row(params(r=r, what="max-deviation", D=zs.D, precision_bits=zs.precision_bits, method=zs.method),
                worst, 0.0, worst, True, "report only")
        rep.table(f"zeros_r{int(r)}", ZERO_HEADER, _zeros_table(zs))
    ok = all(b <= a for a, b in zip(worst_list[:-1], worst_list[1:]))
    rep.row(params(what="trend", radii=" ".join(fmt_list(radii))), " ".join(fmt_list(worst_list)), "", "", ok,
            "max relative sector deviation non-increasing in r")
    rep.table("histogram", HIST_HEADER, hist_rows)


def zeros_histogram(cfg, rep, ctx):
    _uniform_zeros(cfg, rep, ctx)


def _concentration(cfg, rep, ctx, seeds):
    r = cfg.get("experiment", "radius", float, 200.0)
    width = cfg.get("experiment", "angular_width", float, 0.2)
    frac_min = cfg.threshold("min_fraction", 0.9)
    bins = cfg.get("experiment", "bins", int, 8)
    seqs = [(_seeded(cfg, "sequence", s) if s is not None else cfg.sequence()) for s in seeds]
    sigma_star = reflect(_spectrum(cfg, seqs[0]))
    dens = angular_density(sigma_star)
    rays = [a for a, _ in dens.atoms]
    results = ctx.map(lambda s: _zeros_or_reason(s, r), seqs)
    hist_rows = []
    for s, (zs, why) in zip(seeds, results):
        tag = "" if s is None else s
        seed_kw = {} if s is None else {"seed": s}
        if zs is None:
            rep.row(params(**seed_kw, r=r), "", "", "", False, "zeros located and validated", why)
            continue
        frac = _fraction_near(zs, rays, width)
        rep.row(params(**seed_kw, r=r, zeros=len(zs), D=zs.D, precision_bits=zs.precision_bits), frac, frac_min,
                frac - frac_min, frac >= frac_min and len(zs) > 0,
                f"fraction of zeros within {width} of the predicted rays >= {frac_min}")
        hist = angular_histogram(zs, bins, dens)
        hist_rows.extend([tag, h.r, h.theta1, h.theta2, h.observed, h.predicted, h.deviation] for h in hist)
        rep.table(f"zeros_seed{tag}_r{int(r)}" if tag != "" else f"zeros_r{int(r)}", ZERO_HEADER, _zeros_table(zs))
    rep.table("histogram", ["seed"] + HIST_HEADER, hist_rows)
    return seqs, sigma_star


def thm1(cfg, rep, ctx):
    _uniform_zeros(cfg, rep, ctx)


def thm2(cfg, rep, ctx):
    cfg.get("sequence", "beta")  # the power-phase experiment: a missing beta is a config error
    _uniform_zeros(cfg, rep, ctx)


def thm4(cfg, rep, ctx):
    seeds = cfg.get_list("experiment", "seeds", int, [0, 1, 2, 3, 4])
    seqs, sigma_star = _concentration(cfg, rep, ctx, seeds)
    r_ind = cfg.get("experiment", "indicator_radius", float, 500.0)
    angles = cfg.get_list("experiment", "indicator_angles", float,
                          [math.pi * (2 * k + 1) / 8 for k in range(-4, 4)])
    tol = cfg.threshold("indicator_tol", 0.05)
    p = ctx.start_bits(cfg, 128)
    cap = cfg.get("precision", "cap", int, 4096)
    tasks = [(i, th) for i in range(len(seeds)) for th in angles]

    def task(t):
        try:
            return indicator_estimate(seqs[t[0]], t[1], [r_ind], p, cap)[0], ""
        except CancellationError as exc:
            return None, str(exc)

    for (i, th), (pt, why) in zip(tasks, ctx.map(task, tasks)):
        h = float(supporting_function(sigma_star, th))
        if pt is None:
            rep.row(params(seed=seeds[i], theta=th, r=r_ind), "", h, "", False, "indicator resolved", why)
            continue
        dev = pt.normalized - h
        rep.row(params(seed=seeds[i], theta=th, r=r_ind, precision_bits=pt.precision_bits), pt.normalized, h, dev,
                abs(dev) <= tol, f"|log|F|/r - h(theta)| <= {tol}")


def thm5(cfg, rep, ctx):
    seqs, _ = _concentration(cfg, rep, ctx, [None])
    radii = cfg.increasing("experiment", "lindelof_radii", float, [10, 20, 40])
    bound = cfg.threshold("lindelof_bound", 1.0)
    results = ctx.map(lambda r: _zeros_or_reason(seqs[0], r), radii)
    for r, (zs, why) in zip(radii, results):
        if zs is None:
            rep.row(params(r=r, what="lindelof"), "", bound, "", False, "zeros located and validated", why)
            continue
        s = lindelof_sum(zs)
        rep.row(params(r=r, what="lindelof", zeros=len(zs)), abs(s), bound, abs(s) - bound, abs(s) <= bound,
                f"|sum 1/z| <= {bound}")


def _minimal_period(pattern) -> int:
    n = len(pattern)
    for p in range(1, n + 1):
        if n % p == 0 and all(pattern[i] == pattern[i % p] for i in range(n)):
            return p
    return n


def thm6(cfg, rep, ctx):
    seeds = cfg.get_list("experiment", "seeds", int, [0])
    length = cfg.get("experiment", "length", int, 1 << 14)
    max_period = cfg.get("experiment", "max_period", int, 64)
    bandwidth = cfg.get("experiment", "bandwidth", int, 64)
    tau = cfg.get("experiment", "tau", float, 0.2)
    cutoff = cfg.threshold("coverage", 0.9)
    tasks = []
    for sec in [s for s in cfg.sections if s == "sequence" or s.startswith("sequence.")]:
        seq0 = cfg.sequence(sec)
        if not isinstance(seq0, IntegerModel):
            raise cfg.error(sec, "kind", "thm6 needs integer-model sequences")
        if seq0.model == "periodic":
            tasks.append((sec, None))
        else:
            tasks.extend((sec, s) for s in seeds)

    def task(t):
        sec, s = t
        seq = cfg.sequence(sec) if s is None else _seeded(cfg, sec, s)
        return seq, dichotomy_check(seq, length, max_period, None, bandwidth, tau, cutoff)

    table = []
    for (sec, s), (seq, v) in zip(tasks, ctx.map(task, tasks)):
        name = sec.partition(".")[2] or sec
        if seq.model == "periodic":
            want = _minimal_period(list(seq.pattern))
            ok = v.tag == "periodic" and v.period == want and v.evidence.get("verified", False)
            rep.row(params(model=name, pattern=" ".join(map(str, seq.pattern.tolist()))), v.period, want,
                    v.evidence.get("mass_near_roots_of_unity", ""), ok,
                    "periodic verdict with the minimal period and all spectral mass at roots of unity")
        else:
            ok = v.tag == "full_support" and v.coverage >= cutoff
            rep.row(params(model=name, seed=s), v.coverage, cutoff, v.coverage - cutoff, ok,
                    f"full_support verdict with coverage >= {cutoff}")
        table.append([name, "" if s is None else s, v.tag, v.period, v.coverage])
    rep.table("verdicts", ["model", "seed", "tag", "period", "coverage"], table)


def l1loc(cfg, rep, ctx):
    seq = cfg.sequence()
    t_list = cfg.increasing("experiment", "t", float)
    r0 = cfg.get("experiment", "annulus_inner", float, 0.5)
    r1 = cfg.get("experiment", "annulus_outer", float, 1.0)
    grid = (cfg.get("experiment", "grid_radial", int, 4), cfg.get("experiment", "grid_angular", int, 64))
    cap = cfg.get("precision", "cap", int, 1024)
    sigma_star = reflect(_spectrum(cfg, seq))
    rows = ctx.map(lambda t: l1loc_diagnostic(seq, [t], sigma_star, (r0, r1), grid, cap)[0], t_list)
    for row in rows:
        rep.row(params(t=row.t, cells=row.cells, flagged=row.flagged, fallback=row.fallback), row.discrepancy, 0.0,
                row.discrepancy, True, "report only")
    d = [row.discrepancy for row in rows]
    ok = all(b <= a for a, b in zip(d[:-1], d[1:]))
    rep.row(params(what="trend", t=" ".join(fmt_list(t_list))), " ".join(fmt_list(d)), "", "", ok,
            "discrepancy non-increasing in t")


def control(cfg, rep, ctx):
    """Constant multipliers: the witness must fail and no zeros may appear."""
    _witness_runs(cfg, rep, ctx, [None], False)
    seq = cfg.sequence()
    radii = cfg.increasing("experiment", "zero_radii", float, [10, 50, 100])
    for r, (zs, why) in zip(radii, ctx.map(lambda r: _zeros_or_reason(seq, r), radii)):
        n = len(zs) if zs is not None else ""
        rep.row(params(r=r, what="zeros"), n, 0, "", zs is not None and len(zs) == 0, "empty zero set", why)


PRESETS = {
    "closed-forms": closed_forms,
    "parseval": parseval,
    "bessel": bessel,
    "weyl": weyl,
    "lemma3": lemma3,
    "lemma5": lemma5,
    "saddle": saddle,
    "witness": witness,
    "zeros-histogram": zeros_histogram,
    "l1loc": l1loc,
    "thm1": thm1,
    "thm2": thm2,
    "thm3": thm3,
    "thm4": thm4,
    "thm5": thm5,
    "thm6": thm6,
    "control": control,
}
