import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randtaylor.reals import Real
from randtaylor.sequences import (ConfigKeyError, PhasePolynomial, SequenceRangeError, alternating, autocovariance,
                                  constant_one, gaussian_stationary_seq, integer_stationary_seq, moving_average_seq,
                                  polynomial_phase_seq, power_phase_seq, sequence_from_config)
from randtaylor.spectra import SpectralMeasure


def test_constant_and_alternating():
    assert np.all(constant_one().values(0, 5) == 1)
    assert np.array_equal(alternating().values(0, 4).real, [1, -1, 1, -1])


def test_quadratic_phase_matches_direct_evaluation():
    seq = polynomial_phase_seq({2: "sqrt(2)"})
    n = np.arange(50)
    want = np.exp(2j * math.pi * ((math.sqrt(2) * n.astype(float) ** 2) % 1.0))
    assert np.allclose(seq.values(0, 50), want, atol=1e-9)


def test_rational_phase_is_exactly_periodic():
    seq = polynomial_phase_seq({2: "1/3"})
    v = seq.values(0, 30)
    assert np.array_equal(v[:27], v[3:30])


def test_large_index_phase_uses_exact_reduction():
    seq = power_phase_seq("3/2")
    n = 10**6 + 3
    with mpmath.workprec(200):
        frac = float(mpmath.frac(mpmath.mpf(n) ** mpmath.mpf(1.5)))
    assert seq[n] == pytest.approx(complex(math.cos(2 * math.pi * frac), math.sin(2 * math.pi * frac)), abs=1e-12)


def test_degree_one_phase_polynomial_is_allowed_but_not_as_a_sequence_family():
    assert PhasePolynomial({1: "1/4"}).degree == 1
    with pytest.raises(ValueError):
        polynomial_phase_seq(PhasePolynomial({1: "1/4"}))


def test_gaussian_realization_is_seeded():
    rho = SpectralMeasure(atoms=[("0", "0.5"), ("pi", "0.5")])
    a = gaussian_stationary_seq(rho, 500, 7).values(0, 500)
    b = gaussian_stationary_seq(rho, 500, 7).values(0, 500)
    c = gaussian_stationary_seq(rho, 500, 8).values(0, 500)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_gaussian_two_atoms_is_a_plus_b_alternating():
    rho = SpectralMeasure(atoms=[("0", "0.5"), ("pi", "0.5")])
    v = gaussian_stationary_seq(rho, 100, 1).values(0, 100)
    assert np.allclose(v[2:], v[:-2], atol=1e-12)


def test_gaussian_realization_is_finite():
    seq = gaussian_stationary_seq(SpectralMeasure.lebesgue(1.0), 100, 0)
    with pytest.raises(SequenceRangeError):
        seq.values(0, 102)


def test_moving_average_sign_is_integer_valued():
    seq = moving_average_seq([1, 1], "sign", 3)
    v = seq.values(0, 1000).real
    assert seq.is_integer_valued
    assert set(np.unique(v)) <= {-2.0, 0.0, 2.0}


def test_moving_average_covariance_is_finite_range():
    seq = moving_average_seq([1, 1], "sign", 0)
    assert abs(autocovariance(seq, 0, 200000) - 2.0) < 0.05
    assert abs(autocovariance(seq, 1, 200000) - 1.0) < 0.05
    assert abs(autocovariance(seq, 3, 200000)) < 0.05


def test_markov_model_uses_its_outputs():
    seq = integer_stationary_seq("markov", {"transition": [[0.7, 0.3], [0.4, 0.6]], "outputs": [-1, 1]}, 2)
    assert set(np.unique(seq.values(0, 500).real)) == {-1.0, 1.0}


@pytest.mark.parametrize("cfg", [
    {"kind": "polynomial-phase", "q2": "sqrt(2)"},
    {"kind": "power-phase", "beta": "3/2"},
    {"kind": "moving-average", "kernel": "1, 1", "seed": "4"},
    {"kind": "almost-periodic", "frequencies": "pi/2, -pi/2", "amplitudes": "1/2, 1/2"},
    {"kind": "integer-model", "model": "periodic", "pattern": "1, 2"},
    {"kind": "gaussian-stationary", "atoms": "0:0.5, pi:0.5", "n_max": "64", "seed": "2"},
])
def test_config_round_trip(cfg):
    seq = sequence_from_config(cfg)
    again = sequence_from_config(seq.to_config())
    assert np.array_equal(seq.values(0, 64), again.values(0, 64))


def test_missing_key_is_named():
    with pytest.raises(ConfigKeyError) as info:
        sequence_from_config({"kind": "power-phase"})
    assert info.value.key == "beta"


def test_almost_periodic_is_cosine():
    seq = sequence_from_config({"kind": "almost-periodic", "frequencies": "pi/2, -pi/2", "amplitudes": "1/2, 1/2"})
    assert np.allclose(seq.values(0, 8).real, [1, 0, -1, 0, 1, 0, -1, 0], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=0, max_value=3, max_denominator=50), st.integers(0, 10**9))
def test_phase_values_are_unimodular(q, n):
    seq = polynomial_phase_seq({2: Real(q)})
    assert abs(seq[n]) == pytest.approx(1.0)


def test_two_atom_gaussian_covariance_holds_over_the_ensemble():
    # atoms at +-pi/2 make xi(n + 2) = -xi(n) in every realization, so a single
    # realization gives -mean|xi|^2; the covariance cos(pi) = -1 is an ensemble mean
    rho = SpectralMeasure(atoms=[("pi/2", "0.5"), ("-pi/2", "0.5")])
    single = gaussian_stationary_seq(rho, 2000, 0)
    x = single.values(1, 1001)
    assert autocovariance(single, 2, 1000) == pytest.approx(-np.mean(np.abs(x) ** 2), rel=1e-12)
    mean = np.mean([autocovariance(gaussian_stationary_seq(rho, 200, s), 2, 100) for s in range(400)])
    assert abs(mean.real + 1.0) < 0.15 and abs(mean.imag) < 0.15
