"""Exact and extended-precision real constants, and phase reduction mod 1.

Phases ``e(t) = exp(2*pi*i*t)`` of the multiplier sequences are evaluated at
indices up to ~1e7 where ``t`` is of size 1e14 or more.  Double precision
loses the fractional part there, so phases are reduced mod 1 with integer
fixed-point arithmetic first: a phase is represented by the integer
``floor(frac(t) * 2**bits)``.
"""

from __future__ import annotations

import ast
import math
import operator
import threading
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi


# mpmath keeps one precision for the whole process, so every precision change
# is serialized through this lock (gmpy2 contexts are already per thread)
_MP_LOCK = threading.RLock()


@contextmanager
def mp_workprec(prec: int):
    """``mpmath.workprec`` that is safe to use from several threads."""
    with _MP_LOCK, mpmath.workprec(int(prec)):
        yield


def mpfr_context(prec: int):
    """Context manager setting the MPFR working precision to ``prec`` bits."""
    return gmpy2.context(gmpy2.get_context(), precision=int(prec))

_MP_CONSTANTS = {"pi": lambda: mpmath.mp.pi, "e": lambda: mpmath.mp.e, "phi": lambda: mpmath.mp.phi}
_MP_FUNCTIONS = {
    "sqrt": mpmath.sqrt,
    "cbrt": mpmath.cbrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


class _Irrational(Exception):
    pass


def _eval_exact(node):
    if isinstance(node, ast.Expression):
        return _eval_exact(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        # decimal literals are read as the decimal they spell, not the binary double
        return Fraction(str(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_exact(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval_exact(node.left), _eval_exact(node.right)
        if isinstance(node.op, ast.Pow):
            if right.denominator != 1:
                raise _Irrational
            return left ** int(right)
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, (ast.Name, ast.Call)):
        raise _Irrational
    raise ValueError(f"unsupported syntax in real expression: {ast.dump(node)}")


def _eval_mp(node):
    if isinstance(node, ast.Expression):
        return _eval_mp(node.body)
    if isinstance(node, ast.Constant):
        return mpmath.mpf(str(node.value))
    if isinstance(node, ast.UnaryOp):
        v = _eval_mp(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval_mp(node.left), _eval_mp(node.right))
    if isinstance(node, ast.Name):
        if node.id not in _MP_CONSTANTS:
            raise ValueError(f"unknown constant {node.id!r}")
        return _MP_CONSTANTS[node.id]()
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _MP_FUNCTIONS:
            raise ValueError("unknown function in real expression")
        return _MP_FUNCTIONS[node.func.id](*[_eval_mp(a) for a in node.args])
    raise ValueError(f"unsupported syntax in real expression: {ast.dump(node)}")


def _eval_pi_linear(node):
    """Evaluate to (a, b) meaning a + b*pi with rational a, b; raise _Irrational otherwise."""
    if isinstance(node, ast.Expression):
        return _eval_pi_linear(node.body)
    if isinstance(node, ast.Name) and node.id == "pi":
        return Fraction(0), Fraction(1)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return _eval_exact(node), Fraction(0)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        a, b = _eval_pi_linear(node.operand)
        return (-a, -b) if isinstance(node.op, ast.USub) else (a, b)
    if isinstance(node, ast.BinOp):
        (a1, b1), (a2, b2) = _eval_pi_linear(node.left), _eval_pi_linear(node.right)
        if isinstance(node.op, ast.Add):
            return a1 + a2, b1 + b2
        if isinstance(node.op, ast.Sub):
            return a1 - a2, b1 - b2
        if isinstance(node.op, ast.Mult) and (b1 == 0 or b2 == 0):
            return a1 * a2, a1 * b2 + b1 * a2
        if isinstance(node.op, ast.Div) and b2 == 0 and a2 != 0:
            return a1 / a2, b1 / a2
    raise _Irrational


class Real:
    """A real constant given by an expression such as ``"sqrt(2)"`` or ``"3/2"``.

    Rational expressions are kept exactly as :class:`fractions.Fraction`;
    everything else is re-evaluated with mpmath at whatever precision is
    requested, so ``fixed(bits)`` is correct for any ``bits``.
    """

    __slots__ = ("expr", "exact", "_tree", "_float")

    def __init__(self, expr):
        if isinstance(expr, Real):
            expr = expr.expr
        if isinstance(expr, Fraction):
            expr = f"{expr.numerator}/{expr.denominator}"
        elif isinstance(expr, (int, np.integer)):
            expr = str(int(expr))
        elif isinstance(expr, (float, np.floating)):
            expr = repr(float(expr))
        self.expr = str(expr).strip()
        self._tree = ast.parse(self.expr, mode="eval")
        try:
            self.exact = _eval_exact(self._tree)
        except _Irrational:
            self.exact = None
        self._float = float(self.exact) if self.exact is not None else float(self.mpf(80))

    def __repr__(self):
        return f"Real({self.expr!r})"

    def __str__(self):
        return self.expr

    def __float__(self):
        return self._float

    def __eq__(self, other):
        return isinstance(other, Real) and self.expr == other.expr

    def __hash__(self):
        return hash(self.expr)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    @property
    def pi_multiple(self) -> Fraction | None:
        """``q`` with value == q*pi exactly, if the expression has that form."""
        try:
            a, b = _eval_pi_linear(self._tree)
        except _Irrational:
            return None
        return b if a == 0 else None

    def cycles_fixed(self, bits: int) -> int:
        """``floor(value / (2 pi) * 2**bits)``, exact when the value is a rational multiple of pi."""
        q = self.pi_multiple
        if q is not None:
            half = q / 2
            return (half.numerator << bits) // half.denominator
        mag = max(0, int(abs(self._float)).bit_length())
        prec = bits + mag + 64
        v = _mp_value(self.expr, prec)
        with mp_workprec(prec):
            return int(mpmath.floor(mpmath.ldexp(v / (2 * mpmath.mp.pi), bits)))

    def mpf(self, prec: int) -> mpmath.mpf:
        if self.exact is not None:
            with mp_workprec(prec):
                return mpmath.mpf(self.exact.numerator) / self.exact.denominator
        return _mp_value(self.expr, prec)

    def gmpy(self, prec: int) -> gmpy2.mpfr:
        """Value as an MPFR number with ``prec`` bits (relative error <= 2**-prec)."""
        if self.exact is not None:
            with mpfr_context(prec):
                return gmpy2.mpfr(gmpy2.mpq(self.exact.numerator, self.exact.denominator))
        v = _mp_value(self.expr, prec + 16)
        with mpfr_context(prec):
            return gmpy2.mpfr(mpmath.nstr(v, int(prec * 0.30103) + 12, strip_zeros=False))

    def fixed(self, bits: int) -> int:
        """``floor(value * 2**bits)``; exact for rationals, else within one unit."""
        if self.exact is not None:
            return (self.exact.numerator << bits) // self.exact.denominator
        mag = max(0, int(abs(self._float)).bit_length())
        v = _mp_value(self.expr, bits + mag + 64)
        with mp_workprec(bits + mag + 64):
            return int(mpmath.floor(mpmath.ldexp(v, bits)))


@lru_cache(maxsize=256)
def _mp_value(expr: str, prec: int) -> mpmath.mpf:
    with mp_workprec(prec + 10):
        v = _eval_mp(ast.parse(expr, mode="eval"))
    return v


def as_real(x) -> Real:
    return x if isinstance(x, Real) else Real(x)


_QUARTER_TURNS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def cis_cycles(frac) -> np.ndarray:
    """``e(t) = exp(2 pi i t)`` for reduced ``t`` in [0, 1); quarter turns are exact."""
    frac = np.asarray(frac, dtype=float)
    ang = TWO_PI * frac
    out = np.cos(ang) + 1j * np.sin(ang)
    four = 4.0 * frac
    quarter = four == np.floor(four)
    if np.any(quarter):
        out = np.where(quarter, _QUARTER_TURNS[np.mod(four, 4).astype(int)], out)
    return out


def cis_fixed(phases, bits: int) -> np.ndarray:
    """``e(p / 2**bits)`` for integer fixed-point phases ``p`` (any size)."""
    mask = (1 << bits) - 1
    if bits > 53:
        shift = bits - 60 if bits > 60 else 0
        frac = np.array([math.ldexp((int(p) & mask) >> shift, shift - bits) for p in phases], dtype=float)
    else:
        frac = np.array([math.ldexp(int(p) & mask, -bits) for p in phases], dtype=float)
    # rounding can land exactly on 1.0
    frac = np.where(frac >= 1.0, 0.0, frac)
    return cis_cycles(frac)


def mp_cis_fixed(phases, bits: int, prec: int) -> list:
    """``e(p / 2**bits)`` as gmpy2 ``mpc`` values at ``prec`` bits; quarter turns exact."""
    mask = (1 << bits) - 1
    qmask = (1 << (bits - 2)) - 1
    out = []
    with mpfr_context(prec + 8):
        two_pi = 2 * gmpy2.const_pi()
        for p in phases:
            p = int(p) & mask
            if p & qmask == 0:
                out.append(gmpy2.mpc(complex(_QUARTER_TURNS[p >> (bits - 2)])))
                continue
            ang = two_pi * gmpy2.mpfr(p) / (gmpy2.mpz(1) << bits)
            out.append(gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang)))
    return out
