"""Multiplier sequences xi(n) feeding the Taylor series F(z) = sum xi(n) z^n / n!.

Every family is an immutable descriptor.  Deterministic kinds are evaluated
exactly (phases reduced mod 1 in integer fixed point before exponentiating);
random kinds draw from streams keyed by ``(seed, stream, block)`` so any
window of indices can be regenerated independently of how it was requested.
"""

from __future__ import annotations

import csv
import math
import threading
from abc import ABC, abstractmethod
from functools import reduce

import gmpy2
import mpmath
import numpy as np
from scipy.sparse.csgraph import connected_components

from .reals import Real, as_real, cis_fixed, mp_cis_fixed, mp_workprec, mpfr_context
from .spectra import SpectralMeasure

BLOCK = 4096
VALUE_BITS = 64

# stream ids keep unrelated random draws apart under one user seed
_STREAM_ATOMS, _STREAM_DENSITY, _STREAM_IID, _STREAM_MARKOV, _STREAM_NOISE = 1, 2, 3, 4, 5


def _block_key(b: int) -> int:
    return 2 * b if b >= 0 else -2 * b - 1


def _rng(seed: int, stream: int, block: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), stream, _block_key(block)]))


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    z = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return (z[0] + 1j * z[1]) / math.sqrt(2.0)


def _nbits(n: int) -> int:
    return max(1, abs(int(n)).bit_length())


class SequenceRangeError(IndexError):
    pass


# --- phase functions -------------------------------------------------------


class PhasePolynomial:
    """``Q(x) = sum_k q_k x^k`` in cycles; ``coefficients`` maps degree to coefficient."""

    def __init__(self, coefficients):
        if not isinstance(coefficients, dict):
            # a plain list is read as q_2, q_3, ...
            coefficients = {k + 2: q for k, q in enumerate(coefficients)}
        if not coefficients:
            raise ValueError("phase polynomial needs at least one coefficient")
        if any(int(k) < 1 for k in coefficients):
            raise ValueError("phase polynomial degrees must be >= 1 (constant terms are irrelevant)")
        self.coefficients: dict[int, Real] = {int(k): as_real(q) for k, q in sorted(coefficients.items())}
        self.degree = max(self.coefficients)
        self._rational = all(q.is_rational for q in self.coefficients.values())
        if self._rational:
            den = reduce(math.lcm, (q.exact.denominator for q in self.coefficients.values()), 1)
            self._den = den
            self._nums = {k: q.exact.numerator * (den // q.exact.denominator) for k, q in self.coefficients.items()}

    def __repr__(self):
        return f"PhasePolynomial({ {k: str(q) for k, q in self.coefficients.items()} })"

    def fixed(self, ns, bits: int) -> list[int]:
        """``floor(frac(Q(n)) * 2**bits)`` for each n (exact for rational coefficients)."""
        ns = [int(n) for n in ns]
        mask = (1 << bits) - 1
        if not ns:
            return []
        if self._rational:
            den = self._den
            out = []
            for n in ns:
                v = sum(a * n**k for k, a in self._nums.items()) % den
                out.append((v << bits) // den)
            return out
        big = max(_nbits(n) for n in ns)
        work = bits + self.degree * big + 16
        fixed = {k: q.fixed(work) for k, q in self.coefficients.items()}
        wmask = (1 << work) - 1
        shift = work - bits
        return [((sum(f * n**k for k, f in fixed.items()) & wmask) >> shift) & mask for n in ns]

    def to_config(self) -> dict[str, str]:
        return {f"q{k}": str(q) for k, q in self.coefficients.items()}


class PowerPhase:
    """``f(x) = x**beta`` in cycles, for x >= 0."""

    def __init__(self, beta):
        self.beta = as_real(beta)
        if float(self.beta) <= 1:
            raise ValueError(f"beta must exceed 1, got {self.beta}")
        ex = self.beta.exact
        self.is_integer_power = ex is not None and ex.denominator == 1

    def __repr__(self):
        return f"PowerPhase({self.beta})"

    def fixed(self, ns, bits: int) -> list[int]:
        mask = (1 << bits) - 1
        out = []
        ex = self.beta.exact
        for n in ns:
            n = int(n)
            if n < 0:
                raise ValueError("power phase is defined for n >= 0 only")
            if n == 0:
                out.append(0)
            elif ex is not None:
                a, b = ex.numerator, ex.denominator
                root, _ = gmpy2.iroot(gmpy2.mpz(n) ** a << (b * bits), b)
                out.append(int(root) & mask)
            else:
                prec = bits + int(float(self.beta) * _nbits(n)) + 48
                with mp_workprec(prec):
                    v = mpmath.power(n, self.beta.mpf(prec))
                    out.append(int(mpmath.floor(mpmath.ldexp(v, bits))) & mask)
        return out

    def to_config(self) -> dict[str, str]:
        return {"beta": str(self.beta)}


# --- sequence descriptors --------------------------------------------------


class MultiplierSequence(ABC):
    """Descriptor of xi: Z_+ -> C.

    ``values(start, stop)`` returns complex128 values; ``mp_values`` returns gmpy2
    ``mpc`` values together with a bound on their absolute error.
    """

    kind: str = ""
    seed: int | None = None
    is_integer_valued = False
    is_phase = False

    def __init__(self):
        self._cache = np.zeros(0, dtype=complex)
        self._lock = threading.Lock()

    @property
    @abstractmethod
    def bound(self) -> float:
        """Upper bound on |xi(n)|."""

    @property
    def max_index(self) -> int | None:
        """Largest valid index, or None if unbounded."""
        return None

    @abstractmethod
    def _compute(self, start: int, stop: int) -> np.ndarray: ...

    def _check(self, start: int, stop: int) -> None:
        if start < 0 or stop < start:
            raise SequenceRangeError(f"bad index range [{start}, {stop})")
        top = self.max_index
        if top is not None and stop > top + 1:
            raise SequenceRangeError(f"indices up to {stop - 1} requested but sequence is realized only to {top}")

    def values(self, start: int, stop: int) -> np.ndarray:
        start, stop = int(start), int(stop)
        self._check(start, stop)
        cache = self._cache
        if stop <= len(cache):
            return cache[start:stop].copy()
        return self._compute(start, stop)

    def __getitem__(self, n: int) -> complex:
        return complex(self.values(n, n + 1)[0])

    def realize(self, length: int) -> np.ndarray:
        """Values on [0, length), cached on the descriptor."""
        with self._lock:
            if len(self._cache) < length:
                self._cache = self._compute(0, int(length))
                self._cache.setflags(write=False)
            return self._cache[:length]

    def mp_values(self, start: int, stop: int, prec: int) -> tuple[list, float]:
        """Values as gmpy2 ``mpc`` at ``prec`` bits and an absolute error bound.

        The default treats the double values as exact, which they are for
        the realized random kinds (the realization *is* the sequence).
        """
        vals = self.values(start, stop)
        with mpfr_context(prec):
            return [gmpy2.mpc(complex(v)) for v in vals], 0.0

    @abstractmethod
    def to_config(self) -> dict[str, str]: ...

    def __repr__(self):
        body = ", ".join(f"{k}={v}" for k, v in self.to_config().items() if k != "kind")
        return f"<{self.kind} {body}>"


class PhaseSequence(MultiplierSequence):
    """``xi(n) = e(f(n))`` for a phase function f (polynomial or power)."""

    is_phase = True

    def __init__(self, phase, kind: str):
        super().__init__()
        self.phase = phase
        self.kind = kind

    @property
    def bound(self) -> float:
        return 1.0

    def _compute(self, start, stop):
        return cis_fixed(self.phase.fixed(range(start, stop), VALUE_BITS), VALUE_BITS)

    def mp_values(self, start, stop, prec):
        self._check(start, stop)
        bits = prec + 8
        vals = mp_cis_fixed(self.phase.fixed(range(start, stop), bits), bits, prec)
        return vals, 2.0 ** (-prec + 3)

    def to_config(self):
        return {"kind": self.kind, **self.phase.to_config()}


def polynomial_phase_seq(q: PhasePolynomial | dict | list) -> PhaseSequence:
    """``xi(n) = e(Q(n))`` with ``Q`` of degree >= 2."""
    q = q if isinstance(q, PhasePolynomial) else PhasePolynomial(q)
    if q.degree < 2:
        raise ValueError(f"polynomial phase needs degree >= 2, got {q.degree}")
    return PhaseSequence(q, "polynomial-phase")


def power_phase_seq(beta) -> PhaseSequence:
    """``xi(n) = e(n**beta)``, beta > 1.  Integer beta gives xi == 1 (negative control)."""
    return PhaseSequence(PowerPhase(beta), "power-phase")


class GaussianStationary(MultiplierSequence):
    """Stationary complex Gaussian sequence with spectral measure ``rho``, realized on [0, n_max].

    Atoms contribute ``sqrt(a_j) zeta_j exp(i t_j n)``; density arcs are
    synthesized on a uniform grid of at least ``8 * n_max`` frequencies.
    """

    kind = "gaussian-stationary"

    def __init__(self, rho: SpectralMeasure, n_max: int, seed: int):
        super().__init__()
        if rho.total_mass <= 0:
            raise ValueError("spectral measure has zero mass")
        self.rho = rho
        self.n_max = int(n_max)
        self.seed = int(seed)
        rng = _rng(self.seed, _STREAM_ATOMS)
        self.atom_weights = _complex_normal(rng, len(rho.atoms)) if rho.atoms else np.zeros(0, dtype=complex)
        self._density_part = None
        self._bound = None

    @property
    def max_index(self):
        return self.n_max

    @property
    def grid_size(self) -> int:
        return 1 << max(3, (8 * (self.n_max + 1) - 1).bit_length())

    def _density(self) -> np.ndarray:
        if self._density_part is None:
            part = np.zeros(self.n_max + 1, dtype=complex)
            if self.rho.density:
                k = self.grid_size
                omega = -math.pi + 2.0 * math.pi * (np.arange(k) + 0.5) / k
                z = np.concatenate([_complex_normal(_rng(self.seed, _STREAM_DENSITY, b), min(BLOCK, k - b * BLOCK))
                                    for b in range((k + BLOCK - 1) // BLOCK)])
                w = np.sqrt(self.rho.density_at(omega) * 2.0 * math.pi / k) * z
                n = np.arange(self.n_max + 1)
                # sum_k w_k exp(i omega_k n) via one inverse FFT
                shift = np.exp(1j * math.pi * n * (1.0 / k - 1.0))
                part = shift * (k * np.fft.ifft(w))[: self.n_max + 1]
            self._density_part = part
        return self._density_part

    def _atomic(self, n: np.ndarray) -> np.ndarray:
        out = np.zeros(len(n), dtype=complex)
        for (t, a), zeta in zip(self.rho.atoms, self.atom_weights):
            c = t.cycles_fixed(VALUE_BITS)
            out += math.sqrt(float(a)) * zeta * cis_fixed([c * int(j) for j in n], VALUE_BITS)
        return out

    def _compute(self, start, stop):
        n = np.arange(start, stop)
        return self._atomic(n) + self._density()[start:stop]

    @property
    def bound(self) -> float:
        if self._bound is None:
            self._bound = float(np.max(np.abs(self.realize(self.n_max + 1))))
        return self._bound

    def mp_values(self, start, stop, prec):
        self._check(start, stop)
        bits = prec + 8
        dens = self._density()[start:stop]
        with mpfr_context(prec + 8):
            acc = [gmpy2.mpc(complex(d)) for d in dens]
            err = 0.0
            for (t, a), zeta in zip(self.rho.atoms, self.atom_weights):
                amp = gmpy2.sqrt(a.gmpy(prec + 8)) * gmpy2.mpc(complex(zeta))
                c = t.cycles_fixed(bits + _nbits(stop) + 8)
                extra = _nbits(stop) + 8
                ph = mp_cis_fixed([(c * n) >> extra for n in range(start, stop)], bits, prec)
                acc = [x + amp * p for x, p in zip(acc, ph)]
                err += abs(complex(amp)) * 2.0 ** (-prec + 4)
        return acc, err

    def to_config(self):
        atoms = ", ".join(f"{t}:{a}" for t, a in self.rho.atoms)
        dens = ", ".join(f"{al!r}:{be!r}:{lv!r}" for (al, be), lv in self.rho.density)
        cfg = {"kind": self.kind}
        if atoms:
            cfg["atoms"] = atoms
        if dens:
            cfg["density"] = dens
        cfg.update(n_max=str(self.n_max), seed=str(self.seed))
        return cfg


def gaussian_stationary_seq(rho: SpectralMeasure, n_max: int, seed: int) -> GaussianStationary:
    return GaussianStationary(rho, n_max, seed)


class MovingAverage(MultiplierSequence):
    """``xi(n) = sum_j kernel[j] * eta(n - j)`` with i.i.d. bounded innovations eta."""

    kind = "moving-average"

    def __init__(self, kernel, base: str, seed: int):
        super().__init__()
        self.kernel = np.asarray([float(k) for k in kernel])
        if self.kernel.size == 0 or not np.any(self.kernel):
            raise ValueError("kernel must contain a non-zero entry")
        if base not in ("sign", "uniform"):
            raise ValueError(f"base must be 'sign' or 'uniform', got {base!r}")
        self.base = base
        self.seed = int(seed)
        self.is_integer_valued = base == "sign" and bool(np.all(self.kernel == np.round(self.kernel)))

    @property
    def bound(self) -> float:
        return float(np.sum(np.abs(self.kernel)))

    @property
    def dependence_range(self) -> int:
        """Lags beyond this have exactly zero correlation."""
        return len(self.kernel) - 1

    def innovations(self, start: int, stop: int) -> np.ndarray:
        """eta(k) for start <= k < stop (negative k allowed)."""
        out = np.empty(stop - start)
        b0, b1 = start // BLOCK, (stop - 1) // BLOCK
        for b in range(b0, b1 + 1):
            rng = _rng(self.seed, _STREAM_NOISE, b)
            if self.base == "sign":
                blk = np.where(rng.integers(0, 2, BLOCK) == 1, 1.0, -1.0)
            else:
                blk = rng.uniform(-1.0, 1.0, BLOCK)
            lo, hi = max(start, b * BLOCK), min(stop, (b + 1) * BLOCK)
            out[lo - start : hi - start] = blk[lo - b * BLOCK : hi - b * BLOCK]
        return out

    def _compute(self, start, stop):
        lag = len(self.kernel) - 1
        eta = self.innovations(start - lag, stop)
        return np.convolve(eta, self.kernel, mode="valid").astype(complex)

    def to_config(self):
        return {
            "kind": self.kind,
            "kernel": ", ".join(repr(float(k)) for k in self.kernel),
            "base": self.base,
            "seed": str(self.seed),
        }


def moving_average_seq(kernel, base: str = "sign", seed: int = 0) -> MovingAverage:
    return MovingAverage(kernel, base, seed)


class AlmostPeriodic(MultiplierSequence):
    """``xi(n) = sum_k c_k exp(i lambda_k n)``, a finite exponential sum."""

    kind = "almost-periodic"

    def __init__(self, pairs):
        super().__init__()
        pairs = list(pairs)
        if not pairs:
            raise ValueError("almost-periodic sequence needs at least one (frequency, amplitude) pair")
        self.frequencies = tuple(as_real(lam) for lam, _ in pairs)
        self.amplitudes = tuple(complex(c) if not isinstance(c, (str, Real)) else complex(float(as_real(c))) for _, c in pairs)
        self._amp_exprs = tuple(str(c) if isinstance(c, (str, Real)) else None for _, c in pairs)
        for i, lam in enumerate(self.frequencies):
            if not -math.pi < float(lam) <= math.pi + 1e-15:
                raise ValueError(f"frequency {lam} outside (-pi, pi]")
            for mu in self.frequencies[:i]:
                if abs(float(lam) - float(mu)) < 1e-14:
                    raise ValueError(f"duplicate frequency {lam}")

    @property
    def bound(self) -> float:
        return float(sum(abs(c) for c in self.amplitudes))

    def _compute(self, start, stop):
        out = np.zeros(stop - start, dtype=complex)
        for lam, c in zip(self.frequencies, self.amplitudes):
            f = lam.cycles_fixed(VALUE_BITS)
            out += c * cis_fixed([f * n for n in range(start, stop)], VALUE_BITS)
        return out

    def mp_values(self, start, stop, prec):
        self._check(start, stop)
        bits = prec + 8
        extra = _nbits(stop) + 8
        with mpfr_context(prec + 8):
            acc = [gmpy2.mpc(0) for _ in range(stop - start)]
            err = 0.0
            for lam, c, cexpr in zip(self.frequencies, self.amplitudes, self._amp_exprs):
                amp = gmpy2.mpc(as_real(cexpr).gmpy(prec + 8)) if cexpr is not None else gmpy2.mpc(c)
                f = lam.cycles_fixed(bits + extra)
                ph = mp_cis_fixed([(f * n) >> extra for n in range(start, stop)], bits, prec)
                acc = [x + amp * p for x, p in zip(acc, ph)]
                err += abs(c) * 2.0 ** (-prec + 4)
        return acc, err

    def to_config(self):
        amps = [e if e is not None else repr(c.real) for e, c in zip(self._amp_exprs, self.amplitudes)]
        cfg = {"kind": self.kind, "frequencies": ", ".join(str(f) for f in self.frequencies), "amplitudes": ", ".join(amps)}
        if any(c.imag for c in self.amplitudes):
            cfg["amplitudes_imag"] = ", ".join(repr(c.imag) for c in self.amplitudes)
        return cfg


def almost_periodic_seq(pairs) -> AlmostPeriodic:
    """From (frequency, amplitude) pairs; frequencies in radians, e.g. ``("pi/2", 0.5)``."""
    return AlmostPeriodic(pairs)


class IntegerModel(MultiplierSequence):
    """Integer-valued stationary sequences: periodic patterns, i.i.d. draws, finite Markov chains."""

    kind = "integer-model"
    is_integer_valued = True

    def __init__(self, model: str, params: dict, seed: int | None = None):
        super().__init__()
        self.model = model
        self.seed = None if seed is None else int(seed)
        if model == "periodic":
            self.pattern = np.asarray([int(v) for v in params["pattern"]], dtype=np.int64)
            if self.pattern.size == 0:
                raise ValueError("pattern must be non-empty")
        elif model == "iid":
            self.alphabet = np.asarray([int(v) for v in params["alphabet"]], dtype=np.int64)
            if self.alphabet.size == 0:
                raise ValueError("alphabet must be non-empty")
            p = params.get("probabilities")
            p = np.full(self.alphabet.size, 1.0 / self.alphabet.size) if p is None else np.asarray(p, dtype=float)
            if p.shape != self.alphabet.shape or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ValueError("probabilities must be non-negative, sum to 1 and match the alphabet")
            self.probabilities = p
        elif model == "markov":
            t = np.asarray(params["transition"], dtype=float)
            if t.ndim != 2 or t.shape[0] != t.shape[1] or np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1) > 1e-12):
                raise ValueError("transition must be a square row-stochastic matrix")
            ncomp, _ = connected_components(t > 0, directed=True, connection="strong")
            if ncomp != 1:
                raise ValueError("Markov chain is reducible")
            self.transition = t
            self.outputs = np.asarray([int(v) for v in params.get("outputs", range(t.shape[0]))], dtype=np.int64)
            if self.outputs.size != t.shape[0]:
                raise ValueError("outputs must have one integer per state")
            w, v = np.linalg.eig(t.T)
            pi = np.real(v[:, np.argmin(np.abs(w - 1.0))])
            self.stationary = pi / pi.sum()
        else:
            raise ValueError(f"unknown integer model {model!r}")
        if model != "periodic" and self.seed is None:
            raise ValueError(f"{model} model needs a seed")

    @property
    def bound(self) -> float:
        src = {"periodic": "pattern", "iid": "alphabet", "markov": "outputs"}[self.model]
        return float(np.max(np.abs(getattr(self, src))))

    def integers(self, start: int, stop: int) -> np.ndarray:
        if self.model == "periodic":
            return self.pattern[np.arange(start, stop) % self.pattern.size]
        if self.model == "iid":
            out = np.empty(stop - start, dtype=np.int64)
            for b in range(start // BLOCK, (stop - 1) // BLOCK + 1):
                blk = _rng(self.seed, _STREAM_IID, b).choice(self.alphabet, size=BLOCK, p=self.probabilities)
                lo, hi = max(start, b * BLOCK), min(stop, (b + 1) * BLOCK)
                out[lo - start : hi - start] = blk[lo - b * BLOCK : hi - b * BLOCK]
            return out
        return self.outputs[self._markov_states(stop)[start:stop]]

    def _markov_states(self, stop: int) -> np.ndarray:
        # the chain is sequential; each block draws its uniforms from its own stream
        cum = np.cumsum(self.transition, axis=1)
        nblocks = (stop + BLOCK - 1) // BLOCK
        states = np.empty(nblocks * BLOCK, dtype=np.int64)
        s = int(np.searchsorted(np.cumsum(self.stationary), _rng(self.seed, _STREAM_MARKOV, -1).uniform(), side="right"))
        s = min(s, len(self.stationary) - 1)
        for b in range(nblocks):
            u = _rng(self.seed, _STREAM_MARKOV, b).uniform(size=BLOCK)
            for i in range(BLOCK):
                states[b * BLOCK + i] = s
                s = min(int(np.searchsorted(cum[s], u[i], side="right")), len(cum) - 1)
        return states

    def _compute(self, start, stop):
        return self.integers(start, stop).astype(complex)

    def to_config(self):
        cfg = {"kind": self.kind, "model": self.model}
        if self.model == "periodic":
            cfg["pattern"] = ", ".join(str(v) for v in self.pattern)
        elif self.model == "iid":
            cfg["alphabet"] = ", ".join(str(v) for v in self.alphabet)
            cfg["probabilities"] = ", ".join(repr(float(p)) for p in self.probabilities)
        else:
            cfg["transition"] = "; ".join(" ".join(repr(float(x)) for x in row) for row in self.transition)
            cfg["outputs"] = ", ".join(str(v) for v in self.outputs)
        if self.seed is not None:
            cfg["seed"] = str(self.seed)
        return cfg


def integer_stationary_seq(model: str, params: dict, seed: int | None = None) -> IntegerModel:
    return IntegerModel(model, params, seed)


class Literal(MultiplierSequence):
    """Explicit values; repeated if ``periodic``, else zero after the listed ones."""

    kind = "literal"

    def __init__(self, values, periodic: bool = False):
        super().__init__()
        self.listed = np.asarray([complex(v) for v in values], dtype=complex)
        if self.listed.size == 0:
            raise ValueError("literal sequence needs at least one value")
        self.periodic = bool(periodic)
        self.is_integer_valued = bool(np.all(self.listed.imag == 0) and np.all(self.listed.real == np.round(self.listed.real)))

    @property
    def bound(self) -> float:
        return float(np.max(np.abs(self.listed)))

    def _compute(self, start, stop):
        n = np.arange(start, stop)
        if self.periodic:
            return self.listed[n % self.listed.size]
        out = np.zeros(stop - start, dtype=complex)
        inside = n < self.listed.size
        out[inside] = self.listed[n[inside]]
        return out

    def to_config(self):
        cfg = {"kind": self.kind, "values": ", ".join(repr(v.real) for v in self.listed)}
        if np.any(self.listed.imag):
            cfg["values_imag"] = ", ".join(repr(v.imag) for v in self.listed)
        cfg["periodic"] = "true" if self.periodic else "false"
        return cfg


def literal_seq(values, periodic: bool = False) -> Literal:
    return Literal(values, periodic)


def constant_one() -> Literal:
    """xi == 1, so F = exp(z)."""
    return Literal([1], periodic=True)


def alternating() -> Literal:
    """xi(n) = (-1)**n, so F = exp(-z)."""
    return Literal([1, -1], periodic=True)


def cosh_sequence() -> Literal:
    """1, 0, 1, 0, ..., so F = cosh z."""
    return Literal([1, 0], periodic=True)


# --- statistics and I/O ----------------------------------------------------


def autocovariance(seq: MultiplierSequence, m: int, window: int) -> complex:
    """``(1/N) sum_{n=1}^{N} xi(n) conj(xi(n+m))``."""
    m, window = int(m), int(window)
    if m < 0 or window < 1:
        raise ValueError("need lag m >= 0 and window N >= 1")
    top = seq.max_index
    if top is not None and window + m > top:
        raise SequenceRangeError(f"realization of length {top + 1} too short for N={window}, m={m}")
    x = seq.values(1, window + m + 1)
    return complex(np.mean(x[:window] * np.conj(x[m : m + window])))


def write_csv(seq: MultiplierSequence, path, start: int, stop: int) -> None:
    vals = seq.values(start, stop)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "re", "im"])
        for n, v in zip(range(start, stop), vals):
            w.writerow([n, repr(float(v.real)), repr(float(v.imag))])


def _split(text: str, sep: str = ",") -> list[str]:
    return [t.strip() for t in str(text).split(sep) if t.strip()]


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


class ConfigKeyError(KeyError):
    """A required key is missing or unparsable; ``key`` names it."""

    def __init__(self, key: str, message: str):
        super().__init__(key)
        self.key = key
        self.message = message

    def __str__(self):
        return f"{self.key}: {self.message}"


def _need(cfg: dict, key: str) -> str:
    if key not in cfg:
        raise ConfigKeyError(key, "required key missing")
    return cfg[key]


def sequence_from_config(cfg: dict) -> MultiplierSequence:
    """Inverse of ``to_config``; keys are strings as they appear in the config file."""
    kind = _need(cfg, "kind").strip()
    try:
        if kind == "polynomial-phase":
            coeffs = {int(k[1:]): v for k, v in cfg.items() if k.startswith("q") and k[1:].isdigit()}
            if not coeffs:
                raise ConfigKeyError("q2", "polynomial-phase needs coefficients q2, q3, ...")
            return polynomial_phase_seq(PhasePolynomial(coeffs))
        if kind == "power-phase":
            return power_phase_seq(_need(cfg, "beta"))
        if kind == "gaussian-stationary":
            atoms = [tuple(_split(a, ":")) for a in _split(cfg.get("atoms", ""))]
            dens = []
            for d in _split(cfg.get("density", "")):
                al, be, lv = _split(d, ":")
                dens.append(((float(Real(al)), float(Real(be))), float(Real(lv))))
            rho = SpectralMeasure(atoms=atoms, density=dens)
            return gaussian_stationary_seq(rho, int(_need(cfg, "n_max")), int(_need(cfg, "seed")))
        if kind == "moving-average":
            kernel = [float(Real(k)) for k in _split(_need(cfg, "kernel"))]
            return moving_average_seq(kernel, cfg.get("base", "sign").strip(), int(_need(cfg, "seed")))
        if kind == "almost-periodic":
            freqs = _split(_need(cfg, "frequencies"))
            amps = _split(_need(cfg, "amplitudes"))
            if len(freqs) != len(amps):
                raise ConfigKeyError("amplitudes", "needs one amplitude per frequency")
            if "amplitudes_imag" in cfg:
                imag = [float(Real(v)) for v in _split(cfg["amplitudes_imag"])]
                amps = [complex(float(Real(a)), b) for a, b in zip(amps, imag)]
            return almost_periodic_seq(list(zip(freqs, amps)))
        if kind == "integer-model":
            model = _need(cfg, "model").strip()
            seed = int(cfg["seed"]) if "seed" in cfg else None
            if model == "periodic":
                params = {"pattern": [int(v) for v in _split(_need(cfg, "pattern"))]}
            elif model == "iid":
                params = {"alphabet": [int(v) for v in _split(_need(cfg, "alphabet"))]}
                if "probabilities" in cfg:
                    params["probabilities"] = [float(Real(p)) for p in _split(cfg["probabilities"])]
            else:
                rows = [[float(Real(x)) for x in row.split()] for row in _split(_need(cfg, "transition"), ";")]
                params = {"transition": rows}
                if "outputs" in cfg:
                    params["outputs"] = [int(v) for v in _split(cfg["outputs"])]
            return integer_stationary_seq(model, params, seed)
        if kind == "literal":
            vals = [float(Real(v)) for v in _split(_need(cfg, "values"))]
            if "values_imag" in cfg:
                vals = [complex(a, float(Real(b))) for a, b in zip(vals, _split(cfg["values_imag"]))]
            return literal_seq(vals, _parse_bool(cfg.get("periodic", "false")))
    except ConfigKeyError:
        raise
    except (ValueError, SyntaxError, ZeroDivisionError) as exc:
        raise ConfigKeyError(kind, str(exc)) from exc
    raise ConfigKeyError("kind", f"unknown sequence kind {kind!r}")

