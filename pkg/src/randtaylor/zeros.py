"""Zeros of truncated Taylor sections: location, sector counts, histograms, Lindelöf sums.

Roots of ``P_D`` are found in the scaled variable ``w = z / r``.  The degree D
is not taken from the tail budget alone: a probe of ``|P_D|`` on the circle
checks that the discarded tail is far below the smallest value of the section
there (so by Rouché the zeros in the disk are those of F), and after root
finding every zero in the disk must survive a Newton step on a 20% longer
section.  Either failure raises D.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter1d

from . import _aberth
from ._aberth import NearZeroError, TaylorSection, circle_path, sector_path
from .entire_fn import log_abs_f
from .precision import CancellationError, precision_retry
from .sequences import MultiplierSequence
from .spectra import AngularDensity, SpectrumSet, angular_density, predicted_sector_count, supporting_function
from .taylor import log_tail_majorant, truncation_degree

__all__ = [
    "truncation_degree",
    "ZeroSet",
    "SectorCountRecord",
    "ValidationError",
    "zeros_in_disk",
    "sector_count",
    "angular_histogram",
    "lindelof_sum",
    "L1locRow",
    "l1loc_diagnostic",
    "write_histogram_csv",
]

MAX_DEGREE = 4000
RESIDUAL_TOL = 1e-6
STABILITY_TOL = 1e-6
_PROBES = 256
_ROUCHE_MARGIN = math.log(1e8)
_NUDGES = 8
_PRECISION_RETRIES = 3


class ValidationError(RuntimeError):
    """Root finding disagreed with the argument principle or did not converge."""


@dataclass
class ZeroSet:
    r: float
    D: int
    zeros: np.ndarray  # complex, |z| <= r, origin zeros included
    residuals: np.ndarray  # |P(z)| / sum |terms| at each zero
    method: str
    precision_bits: int = 53
    origin_multiplicity: int = 0
    winding: int = 0
    winding_radius: float = 0.0
    notes: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.zeros)

    @property
    def count(self) -> int:
        return len(self.zeros)

    def nonzero(self) -> np.ndarray:
        return self.zeros[self.zeros != 0]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "modulus", "arg", "residual"])
            for z, res in zip(self.zeros, self.residuals):
                w.writerow([repr(z.real), repr(z.imag), repr(abs(z)), repr(float(np.angle(z))), repr(float(res))])


@dataclass(frozen=True)
class SectorCountRecord:
    r: float
    theta1: float
    theta2: float
    observed: int
    predicted: float
    deviation: float  # (observed - predicted) / predicted, or observed when nothing is predicted


# --- choosing D and the engine --------------------------------------------------


def _probe(seq, r, D, start_bits=128, cap=8192):
    """Values of log|Q| on |w| = 1 at adaptive precision; returns (log|Q|, log majorant, ok, bits)."""
    w = np.exp(2j * np.pi * (np.arange(_PROBES) + 0.5) / _PROBES)
    p = start_bits
    while True:
        sec = TaylorSection(seq, r, D, p)
        _, la, lm = sec.evaluate(w)
        ok = sec.reliable(la, lm)
        if np.mean(ok) >= 0.97 or 2 * p > cap:
            return la, lm, ok, p
        p *= 2


def _envelope_min(la: np.ndarray, ok: np.ndarray) -> float:
    """Smallest local maximum (window of 3 probes) of log|Q|, ignoring isolated dips at nearby zeros."""
    vals = np.where(ok, la, -np.inf)
    env = maximum_filter1d(vals, size=3, mode="wrap")
    return float(np.min(env))


def _choose(seq, r, precision_bits, eps):
    """Pick D (Rouché margin on the circle) and the working precision."""
    B = max(seq.bound, 1e-300)
    D = truncation_degree(r, eps, B)
    bits = 128
    while True:
        if D > MAX_DEGREE:
            raise ValidationError(f"truncation degree {D} exceeds the cap {MAX_DEGREE}")
        la, lm, ok, bits = _probe(seq, r, D, bits)
        target = _envelope_min(la, ok) - _ROUCHE_MARGIN
        if log_tail_majorant(r, D, B) - r <= target:
            break
        # jump to the degree whose tail meets the margin seen on this probe, then re-probe
        D_next = D + 1
        while D_next <= MAX_DEGREE and log_tail_majorant(r, D_next, B) - r > target:
            D_next += 1
        D = D_next
    if precision_bits is not None:
        return D, int(precision_bits)
    sel = ok & np.isfinite(la)
    lost = float(np.max(lm[sel] - la[sel])) / math.log(2.0) if np.any(sel) else 0.0
    # the interior of the disk can cancel a little more than the circle
    if lost <= 16.0:
        return D, 53
    return D, int(32 * math.ceil((64 + lost + 32) / 32))


def _winding_circle(section: TaylorSection, rho: float = 1.0):
    """Winding on |w| = rho with radial nudges when a zero sits on the circle."""
    last = None
    for k in range(_NUDGES + 1):
        radius = rho * (1.0 - k * 1e-6)
        try:
            n = _aberth.winding_number(section, circle_path(radius), 4 * section.degree + 64)
            return n + section.origin, radius
        except NearZeroError as exc:
            last = exc
    raise ValidationError(f"argument principle failed after {_NUDGES} radial nudges: {last}")


def _residuals(section: TaylorSection, w: np.ndarray) -> np.ndarray:
    if len(w) == 0:
        return np.zeros(0)
    _, la, lm = section.evaluate(w)
    return np.exp(la - lm)


def _stable_roots(seq, r, D, prec):
    """Roots in the disk, raising D until a 20% longer section leaves them in place."""
    while True:
        if D > MAX_DEGREE:
            raise ValidationError(f"truncation degree {D} exceeds the cap {MAX_DEGREE}")
        sec = TaylorSection(seq, r, D, prec)
        w, method, conv = _aberth.find_roots(sec)
        inside = np.abs(w) <= 1.0
        if not np.all(conv[inside]) and method != "eigen":
            raise ValidationError(f"root finder did not converge for {int(np.sum(~conv[inside]))} zeros in the disk")
        w_in = w[inside]
        longer = TaylorSection(seq, r, math.ceil(1.2 * D) + 1, prec)
        moved = r * np.abs(longer.newton_ratio(w_in)) if len(w_in) else np.zeros(0)
        if np.all(moved <= STABILITY_TOL):
            return sec, w_in, method
        D = math.ceil(1.25 * D)


def zeros_in_disk(seq: MultiplierSequence, r: float, precision_bits: int | None = None,
                  eps: float = 1e-2 * 2.0**-53) -> ZeroSet:
    """Validated zeros of the Taylor section in ``|z| <= r``.

    ``precision_bits`` forces the working precision (53 or less means double);
    by default it follows from the cancellation seen on the circle.
    """
    r = float(r)
    if r <= 0:
        raise ValueError("r must be positive")
    D, prec = _choose(seq, r, precision_bits, eps)
    for attempt in range(_PRECISION_RETRIES + 1):
        sec, w_in, method = _stable_roots(seq, r, D, prec)
        D = sec.D
        winding, radius = _winding_circle(sec)
        count = len(w_in) + sec.origin
        if winding == count:
            break
        # approximations outside the disk can stall where the working precision runs
        # out and leave a zero inside uncaptured; more bits cure that
        if precision_bits is not None or attempt == _PRECISION_RETRIES:
            raise ValidationError(f"root finder found {count} zeros, argument principle counts {winding}")
        prec = 128 if prec <= 53 else 2 * prec
    res = _residuals(sec, w_in)
    if np.any(~(res <= RESIDUAL_TOL)):
        raise ValidationError(f"residual {float(np.nanmax(res)):.3e} above {RESIDUAL_TOL} at a zero in the disk")
    k0 = sec.origin
    z = np.concatenate([np.zeros(k0, dtype=complex), r * w_in])
    resid = np.concatenate([np.zeros(k0), res])
    order = np.lexsort((np.abs(z), np.round(np.angle(z), 12)))
    return ZeroSet(r, D, z[order], resid[order], method, prec, k0, winding, r * radius)


def sector_count(seq: MultiplierSequence, r: float, theta1: float, theta2: float,
                 precision_bits: int | None = None, eps: float = 1e-2 * 2.0**-53) -> int:
    """Zeros of the section in the closed sector ``theta1 <= arg z <= theta2``, ``|z| <= r``.

    Zeros at the origin are not in any sector.  A full turn counts the whole
    disk (origin zeros included).
    """
    theta1, theta2 = float(theta1), float(theta2)
    if not theta1 < theta2 <= theta1 + 2.0 * math.pi + 1e-12:
        raise ValueError("need theta1 < theta2 <= theta1 + 2 pi")
    r = float(r)
    D, prec = _choose(seq, r, precision_bits, eps)
    sec = TaylorSection(seq, r, D, prec)
    if theta2 - theta1 >= 2.0 * math.pi - 1e-12:
        return _winding_circle(sec)[0]
    last = None
    for k in range(_NUDGES + 1):
        rho = 1.0 - k * 1e-6
        try:
            return _aberth.winding_number(sec, sector_path(rho, theta1, theta2), 4 * sec.degree + 64)
        except NearZeroError as exc:
            last = exc
    raise ValidationError(f"sector boundary meets a zero after {_NUDGES} radial nudges: {last}")


# --- statistics of a zero set --------------------------------------------------------


def angular_histogram(zs: ZeroSet, bins: int, spectrum: SpectrumSet | AngularDensity | None = None,
                      start: float = -math.pi) -> list[SectorCountRecord]:
    """Counts of nonzero zeros in ``bins`` equal sectors ``(start + k 2pi/B, start + (k+1) 2pi/B]``.

    ``spectrum`` is the set whose angular density predicts the zeros (for a
    sequence with spectrum sigma that is ``reflect(sigma)``); it defaults to
    the full circle.  Edges that hit an atom of the density are all turned by
    half a bin.
    """
    bins = int(bins)
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if spectrum is None:
        spectrum = SpectrumSet.full()
    dens = spectrum if isinstance(spectrum, AngularDensity) else angular_density(spectrum)
    width = 2.0 * math.pi / bins
    edges = start + width * np.arange(bins + 1)
    if any(dens.atom_near(e, 1e-9) is not None for e in edges[:-1]):
        edges = edges + 0.5 * width
    nz = zs.nonzero()
    ang = np.angle(nz)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rel = np.mod(ang - lo, 2.0 * math.pi)
        obs = int(np.sum((rel > 0) & (rel <= width)))
        pred = predicted_sector_count(dens, zs.r, float(lo), float(hi))
        dev = (obs - pred) / pred if pred > 0 else float(obs)
        out.append(SectorCountRecord(zs.r, float(lo), float(hi), obs, pred, dev))
    return out


def write_histogram_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "theta_lo", "theta_hi", "observed", "predicted", "deviation"])
        for rec in records:
            w.writerow([rec.r, repr(rec.theta1), repr(rec.theta2), rec.observed, repr(rec.predicted), repr(rec.deviation)])


def lindelof_sum(zs: ZeroSet) -> complex:
    """``sum 1/z`` over the zeros in the disk; zeros at the origin are skipped with a warning."""
    if zs.origin_multiplicity:
        warnings.warn(f"{zs.origin_multiplicity} zero(s) at the origin excluded from the Lindelöf sum", stacklevel=2)
    nz = zs.nonzero()
    return complex(np.sum(1.0 / nz)) if len(nz) else 0j


# --- L1_loc diagnostic ------------------------------------------------------------


@dataclass(frozen=True)
class L1locRow:
    t: float
    discrepancy: float
    cells: int
    flagged: int  # cells where log|F| only has an upper bound at the precision cap
    fallback: int  # cells evaluated in multiprecision


def _log_abs_grid(seq, R, w, cap):
    """log|F(R w)| on points w (|w| <= 1): double where trustworthy, certified summation otherwise."""
    B = max(seq.bound, 1e-300)
    D = truncation_degree(R, 1e-20, B)
    sec = TaylorSection(seq, R, D)
    _, la, lm = sec.evaluate(w)
    tail = log_tail_majorant(R, D, B) - R
    ok = sec.reliable(la, lm) & (la > tail + math.log(1e8))
    with np.errstate(divide="ignore"):
        vals = R + la + sec.origin * np.log(np.abs(w))
    flagged = 0
    redo = np.nonzero(~ok)[0]
    for i in redo:
        theta = float(np.angle(w[i]))
        rad = R * float(abs(w[i]))
        try:
            res = precision_retry(lambda p: log_abs_f(seq, rad, theta, p), 128, cap, max_error=1e-6)
            vals[i] = res.value
        except CancellationError as exc:
            vals[i] = exc.last.upper_bound
            flagged += 1
    return vals, flagged, len(redo)


def l1loc_diagnostic(seq: MultiplierSequence, t_list, spectrum: SpectrumSet, annulus=(0.5, 1.0),
                     grid=(4, 64), cap: int = 1024) -> list[L1locRow]:
    """Mean of ``|log|F(t z)|/t - H(z)|`` over a polar grid in the annulus, for each t.

    ``H`` is the Minkowski functional of ``spectrum`` (pass ``reflect(sigma)``
    for a sequence with spectrum sigma).  Grid points are cell centres in
    radius and angle.
    """
    t_list = [float(t) for t in t_list]
    if any(b <= a for a, b in zip(t_list[:-1], t_list[1:])):
        raise ValueError("t_list must be increasing")
    r0, r1 = float(annulus[0]), float(annulus[1])
    if not 0 < r0 < r1:
        raise ValueError("annulus needs 0 < r0 < r1")
    n_rad, n_ang = int(grid[0]), int(grid[1])
    rad = r0 + (r1 - r0) * (np.arange(n_rad) + 0.5) / n_rad
    ang = -math.pi + 2.0 * math.pi * (np.arange(n_ang) + 0.5) / n_ang
    rr, aa = np.meshgrid(rad, ang, indexing="ij")
    rr, aa = rr.ravel(), aa.ravel()
    H = rr * supporting_function(spectrum, aa)
    w = (rr / r1) * np.exp(1j * aa)
    out = []
    for t in t_list:
        vals, flagged, fallback = _log_abs_grid(seq, t * r1, w, cap)
        disc = float(np.mean(np.abs(vals / t - H)))
        out.append(L1locRow(t, disc, len(w), flagged, fallback))
    return out
