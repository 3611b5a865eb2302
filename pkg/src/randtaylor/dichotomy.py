"""Periodic or full spectral support: a finite-sample check for integer-valued stationary sequences."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.ndimage import uniform_filter1d

from .sequences import MultiplierSequence

# relative level (against the variance) below which the periodogram counts as empty
NOISE_FLOOR = 1e-10


def detect_period(sample, max_period: int) -> int | None:
    """Least N <= max_period with sample[n + N] == sample[n] over the trailing 75% of the sample."""
    x = np.asarray(sample)
    if x.dtype.kind not in "iub":
        if not np.all(x == np.round(x)):
            raise ValueError("sample must be integer-valued")
        x = x.astype(np.int64)
    P = int(max_period)
    if P < 1:
        raise ValueError("max_period must be positive")
    if len(x) < 4 * P:
        raise ValueError(f"sample of length {len(x)} is shorter than 4 * max_period = {4 * P}")
    tail = x[len(x) // 4 :]
    for N in range(1, P + 1):
        if np.array_equal(tail[N:], tail[:-N]):
            return N
    return None


@dataclass
class Periodogram:
    angles: np.ndarray  # in (-pi, pi], increasing
    smoothed: np.ndarray  # moving average of |DFT|^2 / N; its mean is the sample variance
    threshold: float
    mean: float  # the atom at angle 0 removed before the transform
    variance: float

    @property
    def above(self) -> np.ndarray:
        return self.smoothed >= self.threshold

    @property
    def coverage(self) -> float:
        return float(np.mean(self.above)) if self.variance > 0 else 0.0

    def arcs(self) -> list[tuple[float, float]]:
        """Maximal runs of bins above threshold as (start, end) angles, wrapping through pi."""
        up = self.above if self.variance > 0 else np.zeros(len(self.angles), dtype=bool)
        n = len(up)
        if n == 0 or not np.any(up):
            return []
        step = 2.0 * math.pi / n
        if np.all(up):
            return [(-math.pi, math.pi)]
        # rotate so the scan starts just after a gap
        first_gap = int(np.argmin(up))
        order = np.roll(np.arange(n), -first_gap)
        out, start = [], None
        for i in order:
            if up[i] and start is None:
                start = i
            if not up[i] and start is not None:
                prev = (i - 1) % n
                out.append((float(self.angles[start] - step / 2), float(self.angles[prev] + step / 2)))
                start = None
        if start is not None:
            prev = order[-1]
            out.append((float(self.angles[start] - step / 2), float(self.angles[prev] + step / 2)))
        return out

    def mass_near(self, centres, half_width: float) -> float:
        """Fraction of periodogram mass within ``half_width`` of any of ``centres``."""
        total = float(np.sum(self.smoothed))
        if total <= 0:
            return 1.0
        d = np.full(len(self.angles), np.inf)
        for c in centres:
            diff = np.abs((self.angles - c + math.pi) % (2.0 * math.pi) - math.pi)
            d = np.minimum(d, diff)
        return float(np.sum(self.smoothed[d <= half_width]) / total)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["arc_start", "arc_end"])
            for a, b in self.arcs():
                w.writerow([repr(a), repr(b)])


def periodogram(sample, window: int, bandwidth: int, tau: float = 0.2) -> Periodogram:
    """Smoothed periodogram of the last ``window`` values after removing the mean.

    The threshold is ``tau`` times the median smoothed level, but never below
    ``NOISE_FLOOR`` times the variance, so that rounding noise in an exactly
    periodic signal does not count as support.
    """
    x = np.asarray(sample, dtype=float)
    N = int(window)
    if N < 2 or N > len(x):
        raise ValueError(f"window must lie in [2, {len(x)}]")
    b = max(int(bandwidth), 1)
    x = x[-N:]
    mean = float(np.mean(x))
    y = x - mean
    var = float(np.mean(y * y))
    power = np.abs(np.fft.fft(y)) ** 2 / N
    smooth = uniform_filter1d(power, size=b, mode="wrap")
    ang = 2.0 * math.pi * np.fft.fftfreq(N)
    ang[ang == -math.pi] = math.pi
    order = np.argsort(ang)
    thr = max(float(tau) * float(np.median(smooth)), NOISE_FLOOR * var)
    return Periodogram(ang[order], smooth[order], thr, mean, var)


def periodogram_support(sample, window: int, bandwidth: int, tau: float = 0.2):
    """``(coverage, arcs, mean)``: the fraction of the circle where the smoothed periodogram clears its threshold."""
    pg = periodogram(sample, window, bandwidth, tau)
    return pg.coverage, pg.arcs(), pg.mean


@dataclass
class DichotomyVerdict:
    tag: str  # periodic | full_support | inconclusive
    period: int | None
    coverage: float
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def dichotomy_check(seq: MultiplierSequence, length: int = 1 << 14, max_period: int = 64,
                    window: int | None = None, bandwidth: int = 64, tau: float = 0.2,
                    coverage_cutoff: float = 0.9) -> DichotomyVerdict:
    """Classify a realized integer sequence as periodic, of full spectral support, or neither."""
    if not getattr(seq, "is_integer_valued", False):
        raise TypeError(f"{seq.kind} sequences are not integer-valued")
    sample = np.rint(seq.values(0, int(length)).real).astype(np.int64)
    window = len(sample) if window is None else int(window)
    period = detect_period(sample, max_period)
    evidence = {"recurrence_order": period, "threshold_tau": tau, "window": window, "bandwidth": bandwidth,
                "sample_length": len(sample)}
    if period is not None:
        # a window holding whole periods puts every spike on an exact DFT bin
        w = (min(window, len(sample) - len(sample) // 4) // period) * period
        pg = periodogram(sample, w, bandwidth, tau)
        roots = 2.0 * math.pi * np.arange(period) / period
        half = (bandwidth / 2 + 1) * 2.0 * math.pi / w
        near = pg.mass_near(roots, half)
        tail = sample[len(sample) // 4 :]
        verified = bool(np.array_equal(tail[period:], tail[:-period]))
        evidence.update({"mass_near_roots_of_unity": near, "verified": verified, "mean": pg.mean,
                         "threshold": pg.threshold})
        if verified and near >= 1.0 - 1e-6:
            return DichotomyVerdict("periodic", period, pg.coverage, evidence)
        return DichotomyVerdict("inconclusive", period, pg.coverage, evidence)
    pg = periodogram(sample, window, bandwidth, tau)
    evidence.update({"mean": pg.mean, "threshold": pg.threshold, "arcs": len(pg.arcs())})
    tag = "full_support" if pg.coverage >= coverage_cutoff else "inconclusive"
    return DichotomyVerdict(tag, None, pg.coverage, evidence)
