import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randtaylor.entire_fn import indicator_estimate, lemma3_check, log_abs_f, log_mu
from randtaylor.precision import CancellationError, precision_retry
from randtaylor.sequences import alternating, constant_one, cosh_sequence, polynomial_phase_seq
from randtaylor.taylor import log_tail_majorant, truncation_degree


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 60), st.floats(-math.pi, math.pi))
def test_exponential_within_its_error_bound(r, theta):
    res = log_abs_f(constant_one(), r, theta, 128)
    assert abs(res.value - r * math.cos(theta)) <= res.error_bound + 1e-13


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 20), st.floats(-math.pi, math.pi))
def test_exponential_is_exact_at_moderate_radius(r, theta):
    res = log_abs_f(constant_one(), r, theta, 128)
    assert not res.cancelled
    assert res.value == pytest.approx(r * math.cos(theta), abs=1e-12)


def test_cosh_matches_mpmath():
    for r, th in [(1, 0.3), (5, 1.2), (10, -2.0)]:
        with mpmath.workdps(50):
            want = float(mpmath.log(abs(mpmath.cosh(r * mpmath.exp(1j * mpmath.mpf(th))))))
        res = precision_retry(lambda p: log_abs_f(cosh_sequence(), r, th, p), 128, 4096)
        assert res.value == pytest.approx(want, abs=1e-12)


def test_alternating_needs_a_precision_raise():
    assert log_abs_f(alternating(), 20, 0.0, 64).cancelled
    res = precision_retry(lambda p: log_abs_f(alternating(), 20, 0.0, p), 64, 4096)
    assert res.precision_bits == 128
    assert res.value == pytest.approx(-20.0, abs=1e-12)


def test_constant_succeeds_at_the_start_precision():
    res = precision_retry(lambda p: log_abs_f(constant_one(), 20, 0.0, p), 64, 4096)
    assert res.precision_bits == 64


def test_cap_exceeded_is_reported():
    with pytest.raises(CancellationError) as info:
        precision_retry(lambda p: log_abs_f(alternating(), 3000, 0.0, p), 64, 256)
    assert info.value.last is not None and info.value.last.cancelled


def test_truncation_tail_is_small():
    for r in (10, 200, 1000):
        D = truncation_degree(r, 1e-20)
        assert D > r
        assert log_tail_majorant(r, D) <= math.log(1e-20) + r - 0.5 * math.log(2 * math.pi * r)


def test_indicator_of_exponential():
    pts = indicator_estimate(constant_one(), 1.0, [50, 100, 200], 128, 4096)
    assert pts[-1].precision_bits > 128
    assert all(p.normalized == pytest.approx(math.cos(1.0), abs=1e-12) for p in pts)
    with pytest.raises(ValueError):
        indicator_estimate(constant_one(), 1.0, [100, 50])


@pytest.mark.parametrize("R", [1000, 10000])
def test_lemma3_discrepancy_is_small(R):
    seq = polynomial_phase_seq({2: "sqrt(2)"})
    rec = lemma3_check(seq, R, 0.1, 128, 4096)
    assert rec.discrepancy <= math.log(R) / math.sqrt(R)


def test_log_mu():
    assert log_mu(100.0) == pytest.approx(100 - 0.5 * math.log(200 * math.pi))
