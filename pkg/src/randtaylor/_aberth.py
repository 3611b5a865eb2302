"""Taylor sections as polynomials on the unit disk, Aberth iteration and winding numbers.

With ``z = r w`` the section ``P_D(z) = sum_{n<=D} xi(n) z^n/n!`` becomes
``e^r Q(w) w^k`` where ``k`` is the order of the zero at the origin and
``Q(w) = sum_m c_{m+k} w^m``, ``c_n = xi(n) exp(n ln r - ln n! - r)``.  All
coefficient magnitudes are below one, but they span e^-r..1, so the double
engine works with logarithms throughout; the multiprecision engine evaluates
with FLINT ball arithmetic, whose radii double as rounding bounds.
"""

from __future__ import annotations

import math
import threading

import numpy as np
from flint import acb, acb_poly, arb, ctx

from .reals import mpfr_context
from .sequences import MultiplierSequence
from .taylor import log_scaled_magnitudes, scaled_magnitudes_mp

_CHUNK = 128
_EPS = 2.0**-52
# FLINT keeps its working precision in a process-wide context
_FLINT_LOCK = threading.Lock()


class NearZeroError(ArithmeticError):
    """The path passes (numerically) through a zero of the section."""


class TaylorSection:
    """``Q(w)`` for a sequence, radius and degree; ``prec=None`` selects double arithmetic."""

    def __init__(self, seq: MultiplierSequence, r: float, D: int, prec: int | None = None):
        self.r = float(r)
        self.D = int(D)
        self.prec = None if prec is None or prec <= 53 else int(prec)
        vals = seq.values(0, self.D + 1)
        nz = np.nonzero(vals)[0]
        if nz.size == 0:
            raise ValueError(f"all multipliers xi(0..{self.D}) vanish")
        self.origin = int(nz[0])
        top = int(nz[-1])
        self.degree = top - self.origin
        v = vals[self.origin : top + 1]
        L = log_scaled_magnitudes(self.r, top)[self.origin :]
        keep = v != 0
        self._m = np.arange(self.degree + 1)[keep].astype(float)
        self._logc = L[keep] + np.log(np.abs(v[keep])) + 1j * np.angle(v[keep])
        self._logabs = self._logc.real
        self.coef_error = 0.0
        if self.prec is not None:
            mp_vals, err = seq.mp_values(self.origin, top + 1, self.prec)
            mags, _ = scaled_magnitudes_mp(self.r, top, self.prec)
            with mpfr_context(self.prec):
                coeffs = [x * mags[self.origin + i] for i, x in enumerate(mp_vals)]
            with _FLINT_LOCK:
                old, ctx.prec = ctx.prec, self.prec
                try:
                    self._poly = acb_poly([acb(_to_arb(c.real), _to_arb(c.imag)) for c in coeffs])
                    self._dpoly = self._poly.derivative()
                finally:
                    ctx.prec = old
            self.coef_error = err

    def as_double(self) -> "TaylorSection":
        twin = object.__new__(TaylorSection)
        twin.__dict__.update(self.__dict__)
        twin.prec, twin.coef_error = None, 0.0
        twin.__dict__.pop("_poly", None)
        twin.__dict__.pop("_dpoly", None)
        return twin

    @property
    def log_noise_rel(self) -> float:
        """log of the relative rounding floor of an evaluation (against the term majorant)."""
        bits = 52 if self.prec is None else self.prec
        floor = -bits * math.log(2.0) + math.log(self.degree + 16)
        if self.coef_error > 0:
            floor = max(floor, math.log(self.coef_error)) + math.log(2.0)
        return floor

    # -- double engine ------------------------------------------------------

    def _log_sums(self, w: np.ndarray):
        """For each w: (S, S1, A, M) with Q = e^M S, w Q' = e^M S1, sum |c_m w^m| = e^M A."""
        w = np.where(w == 0, 1e-300 + 0j, w)
        out_S = np.empty(len(w), dtype=complex)
        out_S1 = np.empty(len(w), dtype=complex)
        out_A = np.empty(len(w))
        out_M = np.empty(len(w))
        for s in range(0, len(w), _CHUNK):
            lw = np.log(w[s : s + _CHUNK])
            X = self._logc[None, :] + self._m[None, :] * lw[:, None]
            M = np.max(X.real, axis=1)
            T = np.exp(X - M[:, None])
            out_S[s : s + _CHUNK] = T.sum(axis=1)
            out_S1[s : s + _CHUNK] = (T * self._m[None, :]).sum(axis=1)
            out_A[s : s + _CHUNK] = np.abs(T).sum(axis=1)
            out_M[s : s + _CHUNK] = M
        return out_S, out_S1, out_A, out_M

    def log_majorant(self, w: np.ndarray) -> np.ndarray:
        """``log sum_m |c_m| |w|^m``."""
        w = np.where(w == 0, 1e-300 + 0j, np.asarray(w, dtype=complex))
        out = np.empty(len(w))
        for s in range(0, len(w), _CHUNK):
            X = self._logabs[None, :] + self._m[None, :] * np.log(np.abs(w[s : s + _CHUNK]))[:, None]
            M = np.max(X, axis=1)
            out[s : s + _CHUNK] = M + np.log(np.exp(X - M[:, None]).sum(axis=1))
        return out

    # -- multiprecision engine ----------------------------------------------

    def _flint_eval(self, w: np.ndarray, derivative: bool):
        with _FLINT_LOCK:
            old, ctx.prec = ctx.prec, self.prec
            try:
                pts = [acb(complex(x)) for x in w]
                # pointwise Horner: FLINT's fast multipoint evaluation loses too much accuracy
                vals = [self._poly(x) for x in pts]
                ratio = None
                if derivative:
                    dvals = [self._dpoly(x) for x in pts]
                    # midpoints only: far outside the disk the balls may be wide, but the
                    # iteration there just needs a direction
                    ratio = np.array([complex(a.mid() / b.mid()) if b.mid() != 0 else complex("inf")
                                      for a, b in zip(vals, dvals)])
                args = np.empty(len(w))
                logs = np.empty(len(w))
                for i, v in enumerate(vals):
                    m = v.mid()
                    if v.contains(0) or abs(v.rad()) * 1e4 >= abs(m):
                        args[i], logs[i] = 0.0, np.nan
                    else:
                        args[i] = float(m.arg())
                        logs[i] = float(abs(m).log())
            finally:
                ctx.prec = old
        return ratio, args, logs

    # -- common interface ---------------------------------------------------

    def newton_ratio(self, w) -> np.ndarray:
        """``Q(w) / Q'(w)``."""
        return self.newton_step(w)[0]

    def newton_step(self, w):
        """``(Q/Q', |Q| / sum |c_m w^m|)`` at each w."""
        w = np.asarray(w, dtype=complex)
        if self.prec is None:
            S, S1, A, _ = self._log_sums(w)
            with np.errstate(divide="ignore", invalid="ignore"):
                return w * S / S1, np.abs(S) / A
        ratio, _, logs = self._flint_eval(w, True)
        return ratio, np.exp(logs - self.log_majorant(w))

    def evaluate(self, w):
        """``(arg Q(w), log|Q(w)|, log majorant)`` for each w."""
        w = np.asarray(w, dtype=complex)
        if self.prec is None:
            S, _, A, M = self._log_sums(w)
            with np.errstate(divide="ignore"):
                return np.angle(S), M + np.log(np.abs(S)), M + np.log(A)
        _, args, logs = self._flint_eval(w, False)
        return args, logs, self.log_majorant(w)

    def reliable(self, log_abs: np.ndarray, log_major: np.ndarray, margin: float = 1e4) -> np.ndarray:
        """Values clear of the rounding floor; NaN marks a ball that straddles zero."""
        return log_abs - log_major > self.log_noise_rel + math.log(margin)


def _to_arb(x) -> arb:
    """Exact conversion of an MPFR number."""
    m, e = x.as_mantissa_exp()
    return arb(int(m)) * arb(2) ** int(e)


# --- root finding ------------------------------------------------------------


def newton_polygon_guesses(section: TaylorSection) -> np.ndarray:
    """Starting points on circles whose radii come from the upper convex hull of log|c_m|."""
    pts = list(zip(section._m.tolist(), section._logabs.tolist()))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    out = []
    for k, ((m0, a0), (m1, a1)) in enumerate(zip(hull[:-1], hull[1:])):
        cnt = int(round(m1 - m0))
        rad = math.exp((a0 - a1) / (m1 - m0))
        ang = 2.0 * math.pi * np.arange(cnt) / cnt + 0.7 + 2.0 * math.pi * k * 0.6180339887
        out.append(rad * np.exp(1j * ang))
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def aberth(section: TaylorSection, z0: np.ndarray, max_iter: int = 600, tol: float = 4e-15):
    """Simultaneous Aberth-Ehrlich iteration; returns (roots, converged mask, iterations)."""
    z = np.array(z0, dtype=complex)
    n = len(z)
    active = np.ones(n, dtype=bool)
    floor = 4.0 * math.exp(section.log_noise_rel)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        N, resid = section.newton_step(z[idx])
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            S = np.sum(1.0 / diff, axis=1)
            corr = N / (1.0 - N * S)
        bad = ~np.isfinite(corr)
        if np.any(bad):
            # coincident approximations: nudge apart deterministically
            corr[bad] = 1e-8 * (1.0 + np.abs(z[idx[bad]])) * np.exp(1j * (idx[bad] + 1.0))
        z[idx] -= corr
        # converged: tiny step, or the value is already at the rounding floor
        done = (np.abs(corr) <= tol * np.maximum(np.abs(z[idx]), 1e-12)) | (resid <= floor)
        active[idx[done]] = False
    return z, ~active, it


def polish(section: TaylorSection, z: np.ndarray, steps: int = 2) -> np.ndarray:
    z = np.array(z, dtype=complex)
    for _ in range(steps):
        step = section.newton_ratio(z)
        ok = np.isfinite(step) & (np.abs(step) < 1e-3 * np.maximum(np.abs(z), 1e-3))
        z[ok] -= step[ok]
    return z


def eigen_roots(section: TaylorSection) -> np.ndarray:
    """Companion-matrix roots from coefficients rescaled by their largest modulus (double only)."""
    m = section._m.astype(int)
    c = np.zeros(section.degree + 1, dtype=complex)
    c[m] = np.exp(section._logc - np.max(section._logabs))
    return np.roots(c[::-1])


def find_roots(section: TaylorSection):
    """All roots of Q; returns (roots, method, converged mask)."""
    if section.degree == 0:
        return np.zeros(0, dtype=complex), "trivial", np.zeros(0, dtype=bool)
    z0 = newton_polygon_guesses(section)
    if section.prec is not None:
        # double iterates are cheap and land close enough for a few MPFR steps
        z0, _, _ = aberth(section.as_double(), z0)
    z, conv, _ = aberth(section, z0)
    method = "aberth-mp" if section.prec else "aberth-double"
    if not np.all(conv) and section.prec is None and section.degree <= 500:
        ze = eigen_roots(section)
        if len(ze) == section.degree:
            z, method = ze, "eigen"
            conv = np.ones(len(z), dtype=bool)
    return polish(section, z), method, conv


# --- winding numbers -----------------------------------------------------------


def _wrap(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def winding_number(section: TaylorSection, path, n_init: int, max_rounds: int = 60) -> int:
    """Winding of Q along the closed path ``w = path(t)``, t in [0, 1], with |step in arg| < pi/4."""
    t = np.linspace(0.0, 1.0, max(int(n_init), 16) + 1)
    arg, la, lm = section.evaluate(path(t))
    if not np.all(section.reliable(la, lm)):
        raise NearZeroError("section vanishes to working precision on the path")
    for _ in range(max_rounds):
        d = _wrap(np.diff(arg))
        bad = np.nonzero(np.abs(d) >= np.pi / 4)[0]
        if bad.size == 0:
            total = float(np.sum(d)) / (2.0 * np.pi)
            k = int(round(total))
            if abs(total - k) > 1e-6:
                raise NearZeroError(f"winding {total} is not an integer")
            return k
        if np.min(t[bad + 1] - t[bad]) < 1e-14:
            raise NearZeroError("phase changes too fast: zero on the path")
        tm = 0.5 * (t[bad] + t[bad + 1])
        am, lam, lmm = section.evaluate(path(tm))
        if not np.all(section.reliable(lam, lmm)):
            raise NearZeroError("section vanishes to working precision on the path")
        t = np.insert(t, bad + 1, tm)
        arg = np.insert(arg, bad + 1, am)
    raise NearZeroError("phase tracking did not settle")


def circle_path(radius: float, start: float = 0.0):
    return lambda t: radius * np.exp(1j * (start + 2.0 * np.pi * np.asarray(t)))


def sector_path(radius: float, theta1: float, theta2: float):
    """Out along theta1, counter-clockwise arc to theta2, back to the origin."""

    def path(t):
        t = np.asarray(t, dtype=float)
        s = 3.0 * t
        out = np.empty(t.shape, dtype=complex)
        a = s <= 1.0
        b = (s > 1.0) & (s <= 2.0)
        c = s > 2.0
        out[a] = radius * s[a] * np.exp(1j * theta1)
        out[b] = radius * np.exp(1j * (theta1 + (s[b] - 1.0) * (theta2 - theta1)))
        out[c] = radius * (3.0 - s[c]) * np.exp(1j * theta2)
        return out

    return path
