"""Gaussian-windowed exponential sums W_R, their windowed L2 averages, and Weyl sums.

``W_R(theta) = sum_{|n|<=N} xi(n+R) e(n theta) exp(-n^2 / 2R)`` with
``e(t) = exp(2 pi i t)`` and theta in cycles.  ``N`` defaults to
``round(sqrt(R) ln R)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .reals import cis_cycles
from .sequences import MultiplierSequence, PhasePolynomial, PhaseSequence, PowerPhase

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def default_N(R: int) -> int:
    return int(round(math.sqrt(R) * math.log(R)))


def _resolve_N(R: int, N: int | None) -> int:
    R = int(R)
    if R < 2:
        raise ValueError("R must be at least 2")
    N = default_N(R) if N is None else int(N)
    if N >= R:
        raise ValueError(f"N = {N} >= R = {R} would need negative indices")
    return N


def coefficients(seq: MultiplierSequence, R: int, N: int | None = None) -> np.ndarray:
    """``c_n = xi(n+R) exp(-n^2/2R)`` for n = -N..N."""
    N = _resolve_N(R, N)
    n = np.arange(-N, N + 1, dtype=float)
    return seq.values(R - N, R + N + 1) * np.exp(-(n * n) / (2.0 * R))


def w_r_direct(seq: MultiplierSequence, R: int, theta: float, N: int | None = None) -> complex:
    """Direct compensated evaluation of W_R at one theta (cycles)."""
    N = _resolve_N(R, N)
    c = coefficients(seq, R, N)
    n = np.arange(-N, N + 1)
    th = Fraction(float(theta))
    # n*theta mod 1 exactly: theta is a binary fraction
    frac = np.array([float((k * th) % 1) for k in n.tolist()]) if th.denominator > 1 else np.zeros(len(n))
    terms = c * cis_cycles(frac)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _pad_to_grid(c: np.ndarray, N: int, G: int) -> np.ndarray:
    x = np.zeros(G, dtype=complex)
    idx = np.arange(-N, N + 1) % G
    np.add.at(x, idx, c)
    return x


def w_r_grid(seq: MultiplierSequence, R: int, G: int, N: int | None = None) -> np.ndarray:
    """W_R(k/G) for k = 0..G-1 via one inverse FFT; requires G >= 4N + 2."""
    N = _resolve_N(R, N)
    G = int(G)
    if G < 4 * N + 2:
        raise ValueError(f"grid size {G} < 4N + 2 = {4 * N + 2}")
    c = coefficients(seq, R, N)
    return G * np.fft.ifft(_pad_to_grid(c, N, G))


def parseval_sides(seq: MultiplierSequence, R: int, G: int | None = None, N: int | None = None) -> tuple[float, float]:
    """``(mean_k |W_R(k/G)|^2, sum_n |xi(n+R)|^2 exp(-n^2/R))``; equal up to rounding."""
    N = _resolve_N(R, N)
    G = 4 * N + 2 if G is None else G
    w = w_r_grid(seq, R, G, N)
    c = coefficients(seq, R, N)
    return float(np.mean(np.abs(w) ** 2)), math.fsum(np.abs(c) ** 2)


# --- the bump g -------------------------------------------------------------


def bump(u):
    """``g(u) = (2/3)(1 + cos 2 pi u)^2`` on [-1/2, 1/2], zero outside; integral 1."""
    u = np.asarray(u, dtype=float)
    val = (2.0 / 3.0) * (1.0 + np.cos(2.0 * np.pi * u)) ** 2
    return np.where(np.abs(u) <= 0.5, val, 0.0)


def bump_hat(s):
    """Fourier transform ``integral g(u) e(-s u) du``; equals ``4 sin(pi s) / (pi s (s^2-1)(s^2-4))``."""
    s = np.asarray(s, dtype=float)
    return (
        np.sinc(s)
        + (2.0 / 3.0) * (np.sinc(s - 1.0) + np.sinc(s + 1.0))
        + (1.0 / 6.0) * (np.sinc(s - 2.0) + np.sinc(s + 2.0))
    )


def _hat_decay_constant() -> float:
    f = lambda u: -(u * u) * abs(float(bump_hat(u)))  # noqa: E731
    grid = np.linspace(0.0, 12.0, 24001)
    vals = grid**2 * np.abs(bump_hat(grid))
    i = int(np.argmax(vals))
    res = optimize.minimize_scalar(f, bounds=(grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]), method="bounded",
                                   options={"xatol": 1e-12})
    best = max(float(vals[i]), -float(res.fun))
    # beyond 12, u^2 |g_hat| <= 4 u / (pi (u^2-1)(u^2-4)) < 0.0008, far below the peak
    return best * (1.0 + 1e-9)


#: sup over u of u^2 |g_hat(u)|, so |g_hat(u)| <= min(1, HAT_DECAY / u^2)
HAT_DECAY = _hat_decay_constant()


# --- windowed L2 average ----------------------------------------------------


def x_r(seq: MultiplierSequence, R: int, a: float, m: int, N: int | None = None) -> float:
    """``integral |W_R(theta)|^2 g(m (theta - a)) d theta`` by composite 16-point Gauss-Legendre.

    The window [a - 1/2m, a + 1/2m] is cut into ``2N + 1`` panels; for each
    Gauss node the values across panels form an arithmetic progression, so
    ``|W_R|^2`` at all nodes costs 16 FFTs of size ``m (2N + 1)``.
    """
    N = _resolve_N(R, N)
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    c = coefficients(seq, R, N)
    if not np.any(c):
        return 0.0
    panels = 2 * N + 1
    size = m * panels
    step = 1.0 / size
    n = np.arange(-N, N + 1)
    x = np.zeros(size, dtype=complex)
    total = 0.0
    for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
        off = 0.5 * (node + 1.0)  # position inside a panel, in (0, 1)
        theta0 = a - 0.5 / m + off * step
        x[:] = 0.0
        np.add.at(x, n % size, c * np.exp(2j * np.pi * ((n * theta0) % 1.0)))
        w = size * np.fft.ifft(x)[:panels]
        u = (np.arange(panels) + off) * step * m - 0.5  # m (theta - a)
        total += 0.5 * weight * step * math.fsum(np.abs(w) ** 2 * bump(u))
    return total


def x_r_coefficient(seq: MultiplierSequence, R: int, a: float, m: int, N: int | None = None) -> float:
    """Same quantity in coefficient space: ``(1/m) sum_k g_hat(k/m) e(k a) sum_n c_{n+k} conj(c_n)``."""
    N = _resolve_N(R, N)
    c = coefficients(seq, R, N)
    size = 1 << (4 * N + 2).bit_length()
    f = np.fft.fft(c, size)
    acf = np.fft.ifft(np.abs(f) ** 2)  # acf[k] = sum_n c_{n+k} conj(c_n)
    k = np.arange(-2 * N, 2 * N + 1)
    terms = bump_hat(k / m) * np.exp(2j * np.pi * ((k * a) % 1.0)) * acf[k % size]
    return float(math.fsum(terms.real)) / m


# --- Weyl sums --------------------------------------------------------------


def _phase_fn(f):
    if isinstance(f, PhaseSequence):
        return f.phase
    if isinstance(f, (PhasePolynomial, PowerPhase)):
        return f
    raise TypeError("phase function must be a PhasePolynomial, PowerPhase or phase sequence")


def phase_differences(f, R: int, T: int, M1: int, M2: int, bits: int = 64) -> np.ndarray:
    """``frac(f(n+R) - f(n+R-T))`` for M1 <= n < M2, differenced in exact fixed point."""
    fn = _phase_fn(f)
    a = fn.fixed(range(M1 + R, M2 + R), bits)
    b = fn.fixed(range(M1 + R - T, M2 + R - T), bits)
    mask = (1 << bits) - 1
    return np.array([math.ldexp((x - y) & mask, -bits) for x, y in zip(a, b)])


def weyl_sum(f, T: int, R: int, M1: int, M2: int) -> complex:
    """``S_T(M1, M2) = sum_{M1 <= n < M2} e(f(n+R) - f(n+R-T))``."""
    T, R, M1, M2 = int(T), int(R), int(M1), int(M2)
    if not M1 < M2:
        raise ValueError("need M1 < M2")
    if T == 0:
        return complex(M2 - M1)
    terms = cis_cycles(np.mod(phase_differences(f, R, T, M1, M2), 1.0))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


@dataclass(frozen=True)
class Lemma5Record:
    R: int
    m: int
    N: int
    diagonal: float
    offdiagonal_bound: float
    block_length: int
    lags: np.ndarray
    block_max: np.ndarray  # per lag T: max over blocks of the largest prefix |S_T|

    @property
    def certified(self) -> bool:
        """True when the diagonal provably dominates: X_R >= diagonal - offdiagonal_bound > 0."""
        return self.diagonal > self.offdiagonal_bound


def gaussian_mass(R: int, N: int | None = None) -> float:
    """``sum_{|n|<=N} exp(-n^2/R)``."""
    N = _resolve_N(R, N)
    n = np.arange(-N, N + 1, dtype=float)
    return math.fsum(np.exp(-(n * n) / R))


def lemma5_decomposition(seq: PhaseSequence, R: int, m: int, T_max: int | None = None,
                         N: int | None = None) -> Lemma5Record:
    """Split X_R for a unimodular phase sequence into its diagonal and a bound on the rest.

    ``X_R = diagonal + (1/m) sum_{T != 0} g_hat(T/m) e(Ta) sum_n c_n conj(c_{n-T})``.
    Each inner sum is a Weyl sum with the smooth weight
    ``w_n = exp(-(n^2 + (n-T)^2) / 2R)``; cutting n into blocks of length
    ``ceil(sqrt R)`` and summing by parts bounds it by
    ``sum_blocks 2 max_block(w) max_prefix |S_T|``.  ``|g_hat(T/m)| <= min(1, C0 m^2/T^2)``
    and the +T and -T terms have equal modulus.  Lags above ``T_max`` are bounded
    trivially by the weight mass (default: all lags up to 2N are scanned).
    """
    if not isinstance(seq, PhaseSequence):
        raise TypeError("lemma5_decomposition needs a unimodular phase sequence")
    N = _resolve_N(R, N)
    R, m = int(R), int(m)
    diagonal = gaussian_mass(R, N) / m
    T_top = 2 * N
    T_max = T_top if T_max is None else min(int(T_max), T_top)
    L = max(1, math.ceil(math.sqrt(R)))
    bits = 64
    fn = seq.phase
    phases = np.array(fn.fixed(range(R - N, R + N + 1), bits), dtype=np.uint64)
    n_all = np.arange(-N, N + 1)
    lags = np.arange(1, T_max + 1)
    block_max = np.zeros(len(lags))
    bound = 0.0
    for i, T in enumerate(lags):
        n = n_all[T:]  # n - T must stay >= -N
        dphi = phases[T:] - phases[: len(phases) - T]  # uint64 wrap-around is reduction mod 1
        u = cis_cycles(np.ldexp(dphi.astype(np.float64), -bits) % 1.0)
        wts = np.exp(-(n.astype(float) ** 2 + (n - T).astype(float) ** 2) / (2.0 * R))
        nb = math.ceil(len(n) / L)
        pad = nb * L - len(n)
        up = np.concatenate([u, np.zeros(pad)]).reshape(nb, L)
        wp = np.concatenate([wts, np.zeros(pad)]).reshape(nb, L)
        pref = np.max(np.abs(np.cumsum(up, axis=1)), axis=1)
        block_max[i] = float(np.max(pref))
        inner = float(np.sum(2.0 * np.max(wp, axis=1) * pref))
        ghat = min(1.0, HAT_DECAY * m * m / float(T * T))
        bound += 2.0 * ghat * inner / m
    for T in range(T_max + 1, T_top + 1):
        # trivial bound: |sum w_n u_n| <= sum w_n
        n = n_all[T:].astype(float)
        inner = math.fsum(np.exp(-(n**2 + (n - T) ** 2) / (2.0 * R)))
        bound += 2.0 * min(1.0, HAT_DECAY * m * m / float(T * T)) * inner / m
    return Lemma5Record(R, m, N, diagonal, bound, L, lags, block_max)


def weyl_block_scan(f, R: int, T_list, block: int | None = None, N: int | None = None) -> np.ndarray:
    """For each lag T, the largest |S_T| over consecutive blocks of length ``block`` covering |n| <= N."""
    N = _resolve_N(R, N)
    L = max(1, math.ceil(math.sqrt(R))) if block is None else int(block)
    out = []
    for T in T_list:
        best = 0.0
        for start in range(-N, N + 1, L):
            stop = min(start + L, N + 1)
            best = max(best, abs(weyl_sum(f, int(T), int(R), start, stop)))
        out.append(best)
    return np.array(out)


# --- saddle-point asymptotic for beta = 3/2 --------------------------------


def saddle_terms(R: int) -> list[int]:
    """Integer frequencies k with |k - M| <= ln(R)/2, M = 1.5 sqrt(R)."""
    M = 1.5 * math.sqrt(R)
    h = 0.5 * math.log(R)
    return list(range(math.ceil(M - h), math.floor(M + h) + 1))


def saddle_w_r(R: int, theta: float) -> complex:
    """Saddle-point asymptotic of ``sum_n e((n+R)^{3/2} + (n+R) theta) exp(-n^2/2R)``.

    Written over the integer frequencies k near ``M = 1.5 sqrt(R)``:
    ``(2 e(1/8) R^{1/4} / sqrt 3) sum_k e(kR - (4/27)(k - theta)^3) exp(-(8/9)(k - M - theta)^2)``.
    ``e(kR) = 1`` for integer R and the cubic phase is reduced mod 1 exactly
    (theta is a binary fraction).  This carries the unimodular factor ``e(R theta)``
    relative to :func:`w_r_direct`.
    """
    R = int(R)
    if R < math.exp(4):
        raise ValueError("R must be at least e^4")
    th = Fraction(float(theta))
    M = 1.5 * math.sqrt(R)
    total = 0j
    for k in saddle_terms(R):
        ph = (-Fraction(4, 27) * (k - th) ** 3) % 1
        total += complex(cis_cycles(float(ph))) * math.exp(-(8.0 / 9.0) * (k - M - float(th)) ** 2)
    pre = 2.0 * complex(cis_cycles(0.125)) * R**0.25 / math.sqrt(3.0)
    return pre * total


def to_shifted_convention(R: int, theta: float, w: complex) -> complex:
    """Multiply a W_R value by ``e(R theta)`` (the convention of :func:`saddle_w_r`)."""
    frac = float((int(R) * Fraction(float(theta))) % 1)
    return complex(w * cis_cycles(frac))


def saddle_comparison(seq: MultiplierSequence, R: int, thetas) -> list[dict]:
    """Rows (R, theta, direct_abs, saddle_abs, rel_err) with rel_err = |saddle - direct| / |direct|."""
    rows = []
    for th in thetas:
        d = to_shifted_convention(R, th, w_r_direct(seq, R, th))
        s = saddle_w_r(R, th)
        rows.append({"R": int(R), "theta": float(th), "direct_abs": abs(d), "saddle_abs": abs(s),
                     "rel_err": abs(s - d) / abs(d)})
    return rows


def parseval_shift_scan(seq: MultiplierSequence, R: int, theta: float, grid_power: int | None = None) -> dict:
    """Max of |W_R(theta + t)| over t in [0, 9/(8M)] against ``0.9 (2 R^{1/4}/sqrt 3) sqrt(sum_m exp(-(16/9)(m - theta)^2))``."""
    R = int(R)
    N = _resolve_N(R, None)
    M = 1.5 * math.sqrt(R)
    span = 9.0 / (8.0 * M)
    G = 1 << max((4 * N + 2).bit_length(), int(grid_power or 0), math.ceil(math.log2(256 / span)))
    w = np.abs(w_r_grid(seq, R, G, N))
    k0 = math.ceil(theta * G)
    k1 = math.floor((theta + span) * G)
    idx = np.arange(k0, k1 + 1) % G
    peak = float(np.max(w[idx]))
    h = 0.5 * math.log(R)
    ms = np.arange(math.ceil(-h), math.floor(h) + 1)
    ref = 0.9 * (2.0 * R**0.25 / math.sqrt(3.0)) * math.sqrt(math.fsum(np.exp(-(16.0 / 9.0) * (ms - theta) ** 2)))
    return {"R": R, "theta": float(theta), "max_abs_w": peak, "threshold": ref, "pass": peak >= ref}


# --- thick grids and witness scans -----------------------------------------


@dataclass(frozen=True)
class ThickGrid:
    """Radii ``R_j = round(exp(j^delta))`` for j_lo <= j <= j_hi."""

    delta: float
    j_lo: int
    j_hi: int

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.j_lo < 1 or self.j_hi < self.j_lo:
            raise ValueError("bad j-range")
        r = self.radii
        if any(b <= a for a, b in zip(r[:-1], r[1:])):
            raise ValueError("radii are not strictly increasing on this j-range")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.j_lo, self.j_hi + 1)

    @property
    def radii(self) -> np.ndarray:
        j = self.indices.astype(float)
        return np.array([int(round(math.exp(x**self.delta))) for x in j], dtype=object)

    def ratios(self) -> np.ndarray:
        """R_{j+1}/R_j - 1 along the grid."""
        r = self.radii.astype(float)
        return r[1:] / r[:-1] - 1.0


def witness_scan(seq: MultiplierSequence, grid, a: float, delta: float, half_width: float,
                 threads: int = 1) -> list[dict]:
    """For each R in ``grid`` (a ThickGrid or list of radii), max |W_R| over |theta - a| <= half_width.

    The scan uses the FFT grid with spacing <= 1/(8N); the row passes when the
    max reaches ``R^delta``.
    """
    radii = [int(R) for R in (grid.radii if isinstance(grid, ThickGrid) else grid)]

    def one(R):
        R = int(R)
        N = default_N(R)
        G = 1 << (8 * N).bit_length()
        G = max(G, 4 * N + 2)
        w = np.abs(w_r_grid(seq, R, G, N))
        k = np.arange(math.ceil((a - half_width) * G), math.floor((a + half_width) * G) + 1)
        vals = w[k % G]
        i = int(np.argmax(vals))
        thr = R ** float(delta)
        return {"R": R, "theta_star": float((k[i] / G) % 1.0), "max_abs_w": float(vals[i]),
                "threshold": thr, "pass": bool(vals[i] >= thr)}

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(one, radii))
    return [one(R) for R in radii]


def write_rows(rows: list[dict], path, columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)
