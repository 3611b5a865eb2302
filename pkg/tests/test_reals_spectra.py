import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randtaylor.reals import Real, cis_cycles
from randtaylor.spectra import (SpectralMeasure, SpectrumSet, angular_density, minkowski, predicted_sector_count,
                                reflect, spectral_fourier, supporting_function, variance_on_circle)


def test_rational_expressions_stay_exact():
    q = Real("3/2")
    assert q.is_rational and q.exact == Fraction(3, 2)
    assert q.fixed(10) == 1536


def test_irrational_fixed_point_matches_mpmath():
    s = Real("sqrt(2)")
    assert not s.is_rational
    with mpmath.workprec(300):
        want = int(mpmath.floor(mpmath.sqrt(2) * mpmath.mpf(2) ** 200))
    assert abs(s.fixed(200) - want) <= 1


def test_pi_multiples_reduce_exactly():
    assert Real("pi/2").pi_multiple == Fraction(1, 2)
    assert Real("pi/2").cycles_fixed(8) == 64


def test_quarter_turns_are_exact():
    assert np.array_equal(cis_cycles([0.0, 0.25, 0.5, 0.75]), np.array([1, 1j, -1, -1j]))


def test_supporting_function_two_points():
    sigma = SpectrumSet(points=[0.0, math.pi])
    assert supporting_function(sigma, 0.0) == pytest.approx(1.0)
    assert supporting_function(sigma, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert supporting_function(sigma, math.pi / 4) == pytest.approx(math.cos(math.pi / 4))


def test_full_circle_has_unit_support():
    assert np.all(supporting_function(SpectrumSet.full(), np.linspace(-3, 3, 7)) == 1.0)
    assert minkowski(SpectrumSet.full(), 3 - 4j) == pytest.approx(5.0)


def test_two_atoms_give_atoms_at_the_gap_bisectors():
    dens = angular_density(SpectrumSet(points=[0.0, math.pi]))
    angles = sorted(a for a, _ in dens.atoms)
    assert angles == pytest.approx([-math.pi / 2, math.pi / 2])
    assert all(m == pytest.approx(2.0) for _, m in dens.atoms)
    assert dens.total_mass == pytest.approx(4.0)


def test_full_density_is_uniform():
    dens = angular_density(SpectrumSet.full())
    assert dens.total_mass == pytest.approx(2 * math.pi)
    assert predicted_sector_count(dens, 800, 0.0, math.pi / 4) == pytest.approx(100.0)


def test_sector_edge_on_an_atom_is_rejected():
    with pytest.raises(ValueError):
        predicted_sector_count(SpectrumSet(points=[0.0, math.pi]), 10, 0.0, math.pi / 2)


def test_reflection():
    s = reflect(SpectrumSet(points=[0.3], arcs=[(1.0, 2.0)]))
    assert s == SpectrumSet(points=[-0.3], arcs=[(-2.0, -1.0)])


@pytest.mark.parametrize("r", [1, 5, 10, 20])
def test_lebesgue_variance_is_bessel(r):
    got = variance_on_circle(SpectralMeasure.lebesgue(1.0), r, 0.7)
    assert got == pytest.approx(float(mpmath.besseli(0, 2 * r)), rel=1e-10)


def test_atom_fourier_coefficients():
    rho = SpectralMeasure(atoms=[("0", "0.5"), ("pi", "0.5")])
    assert spectral_fourier(rho, 0) == pytest.approx(1.0)
    assert spectral_fourier(rho, 1) == pytest.approx(0.0, abs=1e-15)
    assert spectral_fourier(rho, 2) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi), min_size=1, max_size=5), st.floats(-math.pi, math.pi))
def test_supporting_function_bounds(points, theta):
    h = supporting_function(SpectrumSet(points=points), theta)
    assert -1.0 - 1e-12 <= h <= 1.0 + 1e-12
    assert h >= max(math.cos(theta - p) for p in points) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi), min_size=2, max_size=5))
def test_density_mass_matches_perimeter_of_hull(points):
    # total mass of h'' + h is the perimeter of the convex hull of the spectrum
    sigma = SpectrumSet(points=points)
    pts = sorted(sigma.points)
    if len(pts) < 2:
        return
    z = np.exp(1j * np.array(pts))
    perim = float(np.sum(np.abs(np.diff(np.append(z, z[0])))))
    assert angular_density(sigma).total_mass == pytest.approx(perim, rel=1e-9, abs=1e-9)


def test_extended_precision_is_thread_safe():
    from concurrent.futures import ThreadPoolExecutor

    from randtaylor.reals import mp_workprec

    def cosh_log(r):
        with mp_workprec(60 if r % 2 else 400):
            return float(mpmath.log(mpmath.cosh(mpmath.mpf(r) / 3)))

    serial = [cosh_log(r) for r in range(200)]
    with ThreadPoolExecutor(8) as pool:
        assert list(pool.map(cosh_log, range(200))) == serial
    exprs = ["sqrt(2)", "sqrt(3)", "(sqrt(5)-1)/2", "pi/7"] * 25
    want = [Real(e).fixed(300) for e in exprs]
    with ThreadPoolExecutor(8) as pool:
        assert list(pool.map(lambda e: Real(e).fixed(300), exprs)) == want
