"""Scaled Taylor coefficients and truncation of F(z) = sum xi(n) z^n / n! on |z| <= r."""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
import numpy as np
from scipy.special import gammaln

from .reals import mpfr_context


def log_scaled_magnitudes(r: float, D: int) -> np.ndarray:
    """``n ln r - ln n! - r`` for n = 0..D (the log of |term| / |xi(n)| at |z| = r, scaled by e^-r)."""
    n = np.arange(D + 1, dtype=float)
    if r == 0:
        out = np.full(D + 1, -np.inf)
        out[0] = 0.0
        return out
    return n * math.log(r) - gammaln(n + 1.0) - r


def log_tail_majorant(r: float, D: int, bound: float = 1.0) -> float:
    """log of ``bound * r^(D+1)/(D+1)! / (1 - r/(D+2))``, a majorant of ``sum_{n>D} bound r^n/n!``."""
    if D + 2 <= r:
        return math.inf
    if r == 0:
        return -math.inf
    return (
        math.log(bound)
        + (D + 1) * math.log(r)
        - math.lgamma(D + 2.0)
        - math.log1p(-r / (D + 2.0))
    )


def truncation_degree(r: float, eps: float, bound: float = 1.0) -> int:
    """Smallest ``D = ceil(r + k sqrt(r))``, integer k >= 1, whose tail is at most ``eps e^r / sqrt(2 pi r)``."""
    r = float(r)
    if r < 0:
        raise ValueError("r must be non-negative")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    rr = max(r, 1.0)
    target = math.log(eps) + rr - 0.5 * math.log(2.0 * math.pi * rr)
    k = 1
    while True:
        D = math.ceil(r + k * math.sqrt(rr))
        if log_tail_majorant(r, D, bound) <= target:
            return D
        k += 1


@lru_cache(maxsize=64)
def scaled_magnitudes_mp(r_key: float, D: int, prec: int):
    """``exp(n ln r - lnGamma(n+1) - r)`` at ``prec`` bits with per-term relative error bounds."""
    u = 2.0 ** (1 - prec)
    mags, rel = [], []
    with mpfr_context(prec):
        r = gmpy2.mpfr(r_key)
        lr = gmpy2.log(r)
        for n in range(D + 1):
            lg = gmpy2.lngamma(gmpy2.mpfr(n + 1))
            x = n * lr - lg - r
            mags.append(gmpy2.exp(x))
            # ln r, n ln r, lnGamma, two subtractions and exp each add one rounding
            rel.append(u * (3.0 * n * abs(float(lr)) + 2.0 * abs(float(lg)) + 2.0 * float(r) + abs(float(x)) + 4.0))
    return mags, rel
