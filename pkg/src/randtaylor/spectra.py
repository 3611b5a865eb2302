"""Spectra on the unit circle, spectral measures and the zero densities they predict.

Angles are radians, normalized to (-pi, pi].  A spectrum is a finite union of
closed arcs and isolated points; a spectral measure is a finite sum of atoms
plus a piecewise-constant density on arcs (density is per radian).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .reals import Real, as_real

PI = math.pi
TAU = 2.0 * math.pi
_ANGLE_TOL = 1e-12


def wrap_angle(t):
    """Map angles to (-pi, pi]."""
    w = np.mod(np.asarray(t, dtype=float) + PI, TAU) - PI
    w = np.where(w <= -PI, w + TAU, w)
    return float(w) if np.ndim(w) == 0 else w


def _circ_dist(a, b):
    return abs(wrap_angle(a - b))


@dataclass(frozen=True)
class Arc:
    """Closed arc starting at ``start`` (in (-pi, pi]) sweeping counter-clockwise by ``length``."""

    start: float
    length: float

    @property
    def end(self) -> float:
        return wrap_angle(self.start + self.length)

    @property
    def is_full(self) -> bool:
        return self.length >= TAU - _ANGLE_TOL

    def contains(self, theta) -> np.ndarray:
        if self.is_full:
            return np.ones_like(np.asarray(theta, dtype=float), dtype=bool)
        off = np.mod(np.asarray(theta, dtype=float) - self.start, TAU)
        return (off <= self.length + _ANGLE_TOL) | (off >= TAU - _ANGLE_TOL)


def arc_from_endpoints(alpha: float, beta: float) -> Arc:
    """Arc from ``alpha`` counter-clockwise to ``beta`` (``beta - alpha`` may be up to 2 pi)."""
    length = float(beta) - float(alpha)
    if length < 0 or length > TAU + _ANGLE_TOL:
        raise ValueError(f"arc [{alpha}, {beta}] must satisfy 0 <= beta - alpha <= 2 pi")
    return Arc(wrap_angle(alpha), min(length, TAU))


def _merge_arcs(arcs: list[Arc]) -> list[Arc]:
    arcs = [a for a in arcs if a.length >= 0]
    if any(a.is_full for a in arcs):
        return [Arc(-PI + 0.0, TAU)]
    if not arcs:
        return []
    # unroll to the line, merge, then fold arcs that wrap back onto the first one
    items = sorted((a.start, a.start + a.length) for a in arcs)
    merged = [list(items[0])]
    for s, e in items[1:]:
        if s <= merged[-1][1] + _ANGLE_TOL:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    if len(merged) > 1 and merged[-1][1] >= merged[0][0] + TAU - _ANGLE_TOL:
        last = merged.pop()
        merged[0] = [last[0], max(merged[0][1] + TAU, last[1])]
    out = []
    for s, e in merged:
        if e - s >= TAU - _ANGLE_TOL:
            return [Arc(-PI + 0.0, TAU)]
        out.append(Arc(wrap_angle(s), e - s))
    return sorted(out, key=lambda a: a.start)


class SpectrumSet:
    """Closed subset of the circle: finitely many arcs and isolated points."""

    def __init__(self, arcs=(), points=()):
        arcs = [a if isinstance(a, Arc) else arc_from_endpoints(*a) for a in arcs]
        self.arcs: tuple[Arc, ...] = tuple(_merge_arcs(arcs))
        pts = []
        for p in points:
            p = wrap_angle(float(p))
            if any(a.contains(p) for a in self.arcs):
                continue
            if all(_circ_dist(p, q) > _ANGLE_TOL for q in pts):
                pts.append(p)
        self.points: tuple[float, ...] = tuple(sorted(pts))
        if not self.arcs and not self.points:
            raise ValueError("spectrum must be non-empty")

    @classmethod
    def full(cls) -> "SpectrumSet":
        return cls(arcs=[Arc(-PI + 0.0, TAU)])

    @property
    def is_full(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0].is_full

    def __repr__(self):
        arcs = ", ".join(f"[{a.start:.6g}, +{a.length:.6g}]" for a in self.arcs)
        return f"SpectrumSet(arcs=[{arcs}], points={list(self.points)})"

    def __eq__(self, other):
        if not isinstance(other, SpectrumSet):
            return NotImplemented
        if len(self.arcs) != len(other.arcs) or len(self.points) != len(other.points):
            return False
        ok = all(
            _circ_dist(a.start, b.start) < 1e-9 and abs(a.length - b.length) < 1e-9
            for a, b in zip(self.arcs, other.arcs)
        )
        return ok and all(_circ_dist(p, q) < 1e-9 for p, q in zip(self.points, other.points))

    def elements(self) -> list[tuple[float, float]]:
        """Support pieces as (start, length) sorted by start; points have length 0."""
        items = [(a.start, a.length) for a in self.arcs] + [(p, 0.0) for p in self.points]
        return sorted(items)

    def contains(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        hit = np.zeros(theta.shape, dtype=bool)
        for a in self.arcs:
            hit |= a.contains(theta)
        for p in self.points:
            hit |= np.abs(wrap_angle(theta - p)) <= _ANGLE_TOL
        return hit

    def rotate(self, phi: float) -> "SpectrumSet":
        return SpectrumSet(
            arcs=[Arc(wrap_angle(a.start + phi), a.length) for a in self.arcs],
            points=[p + phi for p in self.points],
        )


def supporting_function(sigma: SpectrumSet, theta):
    """``h(theta) = max_{t in sigma} cos(theta - t)``; vectorized over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    best = np.full(theta.shape, -np.inf)
    for p in sigma.points:
        best = np.maximum(best, np.cos(theta - p))
    for a in sigma.arcs:
        if a.is_full:
            best = np.ones_like(theta)
            continue
        inside = a.contains(theta)
        edge = np.maximum(np.cos(theta - a.start), np.cos(theta - (a.start + a.length)))
        best = np.maximum(best, np.where(inside, 1.0, edge))
    return float(best) if best.ndim == 0 else best


def minkowski(sigma: SpectrumSet, z) -> float:
    """``H(z) = max over the convex hull of Re(z * conj(lambda))`` = ``|z| h(arg z)``."""
    z = complex(z)
    if z == 0:
        return 0.0
    return abs(z) * supporting_function(sigma, math.atan2(z.imag, z.real))


def reflect(sigma: SpectrumSet) -> SpectrumSet:
    """Mirror image in the real axis (t -> -t)."""
    return SpectrumSet(
        arcs=[Arc(wrap_angle(-(a.start + a.length)), a.length) for a in sigma.arcs],
        points=[-p for p in sigma.points],
    )


@dataclass(frozen=True)
class AngularDensity:
    """Measure ``ds = (h'' + h) dtheta``: unit density on the arcs plus atoms at gap bisectors."""

    atoms: tuple[tuple[float, float], ...]
    arcs: tuple[Arc, ...]
    @property
    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + sum(a.length for a in self.arcs)

    def atom_near(self, theta: float, tol: float = 1e-9):
        for ang, m in self.atoms:
            if _circ_dist(ang, theta) <= tol:
                return ang, m
        return None

    def mass_between(self, theta1: float, theta2: float) -> float:
        """Mass of the half-open sector (theta1, theta2], with 0 <= theta2 - theta1 <= 2 pi."""
        width = theta2 - theta1
        if width < 0 or width > TAU + _ANGLE_TOL:
            raise ValueError("need theta1 <= theta2 <= theta1 + 2 pi")
        total = 0.0
        for ang, m in self.atoms:
            off = (ang - theta1) % TAU
            if 0 < off <= width or (off == 0 and width >= TAU - _ANGLE_TOL):
                total += m
        for a in self.arcs:
            total += _arc_overlap(a, theta1, width)
        return total

    def cumulative(self, theta: float) -> float:
        """``s(theta)``: mass of (-pi, theta], right-continuous, for theta in (-pi, pi]."""
        return self.mass_between(-PI, float(theta))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "start", "end_or_mass"])
            for ang, m in self.atoms:
                w.writerow(["atom", repr(ang), repr(m)])
            for a in self.arcs:
                w.writerow(["arc", repr(a.start), repr(a.start + a.length)])


def _arc_overlap(arc: Arc, theta1: float, width: float) -> float:
    if arc.is_full:
        return width
    # overlap on the line of [theta1, theta1+width] with the arc and its 2pi translates
    s0 = theta1 + ((arc.start - theta1) % TAU)
    total = 0.0
    for s in (s0 - TAU, s0, s0 + TAU):
        lo, hi = max(s, theta1), min(s + arc.length, theta1 + width)
        if hi > lo:
            total += hi - lo
    return total


def angular_density(sigma: SpectrumSet) -> AngularDensity:
    """Zero density of functions with indicator ``h_sigma``.

    Between consecutive support pieces separated by a gap of width ``D`` the
    supporting function switches from one cosine to another at the gap
    bisector, and ``h'`` jumps by ``2 sin(D/2)`` there; that jump is an atom.
    """
    elems = sigma.elements()
    if sigma.is_full:
        return AngularDensity(atoms=(), arcs=sigma.arcs)
    atoms = []
    for i, (start, length) in enumerate(elems):
        end = start + length
        nxt_start = elems[(i + 1) % len(elems)][0]
        gap = (nxt_start - end) % TAU
        if len(elems) == 1:
            gap = TAU - length
        if gap <= _ANGLE_TOL:
            continue
        mass = 2.0 * math.sin(gap / 2.0)
        if mass > 1e-15:
            atoms.append((wrap_angle(end + gap / 2.0), mass))
    atoms.sort()
    return AngularDensity(atoms=tuple(atoms), arcs=sigma.arcs)


def predicted_sector_count(sigma_or_density, r: float, theta1: float, theta2: float) -> float:
    """Zero count predicted in the sector theta1 < arg z <= theta2, |z| <= r."""
    dens = sigma_or_density if isinstance(sigma_or_density, AngularDensity) else angular_density(sigma_or_density)
    if not theta1 < theta2:
        raise ValueError("need theta1 < theta2")
    for t in (theta1, theta2):
        hit = dens.atom_near(t)
        if hit is not None:
            raise ValueError(f"sector edge {t} coincides with a density atom at {hit[0]}")
    return dens.mass_between(theta1, theta2) * r / TAU


class SpectralMeasure:
    """Non-negative measure on the circle: atoms plus constant-level density arcs.

    ``atoms`` is a list of (angle, mass); ``density`` a list of ((alpha, beta), level)
    with ``alpha < beta`` and ``beta - alpha <= 2 pi``.  Angles and masses accept
    anything :class:`~randtaylor.reals.Real` accepts (``"pi/2"``, ``0.5``, ...).
    """

    def __init__(self, atoms=(), density=()):
        ats = []
        for t, a in atoms:
            t, a = as_real(t), as_real(a)
            if float(a) <= 0:
                raise ValueError("atom masses must be positive")
            if any(_circ_dist(float(t), float(u)) < _ANGLE_TOL for u, _ in ats):
                raise ValueError(f"duplicate atom at angle {t}")
            ats.append((t, a))
        self.atoms: tuple[tuple[Real, Real], ...] = tuple(ats)
        dens = []
        for (alpha, beta), level in density:
            level = float(level)
            if level < 0:
                raise ValueError("density level must be non-negative")
            if level == 0:
                continue
            alpha, beta = float(alpha), float(beta)
            if not alpha < beta <= alpha + TAU + _ANGLE_TOL:
                raise ValueError(f"bad density arc [{alpha}, {beta}]")
            dens.append(((alpha, beta), level))
        self.density: tuple[tuple[tuple[float, float], float], ...] = tuple(dens)
        if self.total_mass <= 0:
            raise ValueError("spectral measure has zero mass")

    @classmethod
    def lebesgue(cls, mass: float = 1.0) -> "SpectralMeasure":
        """Uniform measure of total ``mass``; ``mass=1`` gives normalized Lebesgue."""
        return cls(density=[((-PI, PI), mass / TAU)])

    @property
    def total_mass(self) -> float:
        return sum(float(a) for _, a in self.atoms) + sum(lv * (b - a) for (a, b), lv in self.density)

    def density_at(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        for (a, b), lv in self.density:
            out += np.where(arc_from_endpoints(a, b).contains(omega), lv, 0.0)
        return out

    def support(self) -> SpectrumSet:
        return SpectrumSet(arcs=[ab for ab, _ in self.density], points=[float(t) for t, _ in self.atoms])

    def __repr__(self):
        return f"SpectralMeasure(atoms={[(str(t), str(a)) for t, a in self.atoms]}, density={list(self.density)})"


def spectral_fourier(rho: SpectralMeasure, m: int) -> complex:
    """``rho_hat(m) = integral of exp(-i m t) d rho(t)``."""
    m = int(m)
    total = sum(float(a) * complex(math.cos(m * float(t)), -math.sin(m * float(t))) for t, a in rho.atoms)
    for (alpha, beta), lv in rho.density:
        if m == 0:
            total += lv * (beta - alpha)
        else:
            total += lv * (np.exp(-1j * m * beta) - np.exp(-1j * m * alpha)) / (-1j * m)
    return complex(total)


class QuadratureError(RuntimeError):
    pass


def variance_on_circle(rho: SpectralMeasure, r: float, theta: float, log: bool = False, rtol: float = 1e-10):
    """``integral of exp(2 r cos(theta + t)) d rho(t)``, the variance of F on |z| = r.

    With ``log=True`` the natural log is returned, which stays finite when the
    value itself overflows.
    """
    r, theta = float(r), float(theta)
    exps = [2.0 * r * math.cos(theta + float(t)) for t, _ in rho.atoms]
    peak = max(exps) if exps else -np.inf
    for (alpha, beta), _ in rho.density:
        peak = max(peak, 2.0 * r * float(supporting_function(SpectrumSet(arcs=[(alpha, beta)]), -theta)))
    total = sum(float(a) * math.exp(e - peak) for (t, a), e in zip(rho.atoms, exps))
    for (alpha, beta), lv in rho.density:
        total += lv * _peaked_integral(r, theta, alpha, beta, peak, rtol)
    if total <= 0:
        return -np.inf if log else 0.0
    return math.log(total) + peak if log else math.exp(math.log(total) + peak)


def _peaked_integral(r, theta, alpha, beta, shift, rtol):
    """``integral over [alpha, beta] of exp(2 r cos(theta + t) - shift) dt``."""

    def f(t):
        return math.exp(2.0 * r * math.cos(theta + t) - shift)

    # split at the peak t = -theta (mod 2 pi) and a few widths around it
    width = 1.0 / math.sqrt(max(2.0 * r, 1.0))
    breaks = {alpha, beta}
    for k in range(-2, 3):
        c = -theta + k * TAU
        for d in (-8 * width, -2 * width, 0.0, 2 * width, 8 * width):
            if alpha < c + d < beta:
                breaks.add(c + d)
    pts = sorted(breaks)
    total, err = 0.0, 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol * 1e-2, limit=200)
        total += val
        err += e
    if err > rtol * max(abs(total), 1e-300):
        raise QuadratureError(f"quadrature reached relative error {err / max(abs(total), 1e-300):.3g} > {rtol:g}")
    return total
