"""Certified evaluation of log|F(r e^{i theta})| for F(z) = sum xi(n) z^n / n!."""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2

from .expsums import w_r_direct
from .precision import precision_retry
from .reals import mpfr_context
from .sequences import MultiplierSequence
from .taylor import log_tail_majorant, scaled_magnitudes_mp, truncation_degree


@dataclass(frozen=True)
class LogAbsResult:
    """``value = log|F|`` with ``|value - log|F|| <= error_bound`` unless ``cancelled``.

    When the computed sum does not exceed its own error bound the result is
    flagged ``cancelled``: ``error_bound`` is infinite and ``upper_bound``
    still bounds log|F| from above.
    """

    value: float
    error_bound: float
    precision_bits: int
    terms_used: int
    cancelled: bool
    log_majorant: float
    upper_bound: float

    @property
    def cancellation_bits(self) -> float:
        """Bits lost between the term majorant and the result."""
        return (self.log_majorant - self.upper_bound) / math.log(2.0)


def log_abs_f(seq: MultiplierSequence, r: float, theta: float, precision_bits: int = 128) -> LogAbsResult:
    """log|F(r e^{i theta})| summed at ``precision_bits`` with a running error bound.

    Terms are ``xi(n) e^{i n theta} exp(n ln r - ln n! - r)`` for n <= D, so
    magnitudes stay below 1; the final value adds back ``r``.  The bound covers
    rounding of every term, summation, the error of the multipliers themselves
    and the tail beyond D.
    """
    p = int(precision_bits)
    if p < 64:
        raise ValueError("precision_bits must be at least 64")
    r = float(r)
    if r < 0:
        raise ValueError("r must be non-negative")
    theta = float(theta)
    bound = max(seq.bound, 1e-300)
    if r == 0:
        x0 = complex(seq.values(0, 1)[0])
        v = math.log(abs(x0)) if x0 != 0 else -math.inf
        return LogAbsResult(v, 0.0, p, 1, x0 == 0, v, v)
    D = truncation_degree(r, 2.0 ** (-p), bound)
    vals, val_err = seq.mp_values(0, D + 1, p)
    mags, rel = scaled_magnitudes_mp(r, D, p)
    u = 2.0 ** (1 - p)
    with mpfr_context(p):
        th = gmpy2.mpfr(theta)
        acc = gmpy2.mpc(0)
        absum = 0.0
        err = 0.0
        for n in range(D + 1):
            x = vals[n]
            if x == 0:
                continue
            ang = n * th
            term = x * mags[n] * gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
            acc += term
            t_abs = float(abs(term))
            absum += t_abs
            # cos/sin of a rounded angle, the three complex products
            err += t_abs * (rel[n] + u * (2.0 * abs(n * theta) + 12.0)) + val_err * float(mags[n])
        err += absum * (D + 1) * u * 1.5  # accumulated rounding of the running sum
        err += math.exp(log_tail_majorant(r, D, bound) - r) if D + 2 > r else math.inf
        err *= 1.0 + 1e-6
        mod = abs(acc)
        log_mod = float(gmpy2.log(mod)) if mod > 0 else -math.inf
    log_err = math.log(err) if err > 0 else -math.inf
    log_majorant = r + (math.log(absum) if absum > 0 else -math.inf)
    upper = r + _log_add(log_mod, log_err)
    if not (mod > 0) or log_err >= log_mod:
        return LogAbsResult(r + log_mod if mod > 0 else -math.inf, math.inf, p, D + 1, True, log_majorant, upper)
    ratio = math.exp(log_err - log_mod)
    ebound = -math.log1p(-ratio) if ratio < 1 else math.inf
    return LogAbsResult(r + log_mod, ebound, p, D + 1, False, log_majorant, upper)


def _log_add(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = max(a, b), min(a, b)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass(frozen=True)
class IndicatorPoint:
    r: float
    normalized: float  # log|F(r e^{i theta})| / r
    error_bound: float  # on the normalized value
    precision_bits: int


def indicator_estimate(seq: MultiplierSequence, theta: float, r_list, precision_bits: int = 128,
                       cap: int | None = None) -> list[IndicatorPoint]:
    """``log|F(r e^{i theta})| / r`` along ``r_list``; with ``cap`` the precision is raised on cancellation."""
    r_list = [float(r) for r in r_list]
    if any(b <= a for a, b in zip(r_list[:-1], r_list[1:])):
        raise ValueError("r_list must be increasing")
    out = []
    for r in r_list:
        if cap is None:
            res = log_abs_f(seq, r, theta, precision_bits)
        else:
            res = precision_retry(lambda p, r=r: log_abs_f(seq, r, theta, p), precision_bits, cap)
        out.append(IndicatorPoint(r, res.value / r, res.error_bound / r, res.precision_bits))
    return out


def mu(R: float) -> float:
    """``e^R / sqrt(2 pi R)`` (overflows for R > ~709; use :func:`log_mu` there)."""
    return math.exp(log_mu(R))


def log_mu(R: float) -> float:
    return float(R) - 0.5 * math.log(2.0 * math.pi * float(R))


@dataclass(frozen=True)
class Lemma3Record:
    R: int
    theta: float
    lhs: float  # |F(R e(theta))| / mu(R)
    rhs: float  # |W_R(theta)|
    discrepancy: float
    error_bound: float  # relative, on lhs


def lemma3_check(seq: MultiplierSequence, R: int, theta: float, precision_bits: int = 128,
                 cap: int | None = None) -> Lemma3Record:
    """Compare ``|F(R e(theta))| / mu(R)`` with ``|W_R(theta)|``; theta in cycles."""
    R = int(R)
    ang = 2.0 * math.pi * float(theta)
    if cap is None:
        res = log_abs_f(seq, R, ang, precision_bits)
    else:
        res = precision_retry(lambda p: log_abs_f(seq, R, ang, p), precision_bits, cap)
    lhs = math.exp(res.value - log_mu(R))
    rhs = abs(w_r_direct(seq, R, theta))
    return Lemma3Record(R, float(theta), lhs, rhs, abs(lhs - rhs), math.expm1(res.error_bound))
