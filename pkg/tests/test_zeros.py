import math
import warnings

import numpy as np
import pytest

from randtaylor._aberth import TaylorSection, circle_path, find_roots, sector_path, winding_number
from randtaylor.sequences import constant_one, cosh_sequence, literal_seq, polynomial_phase_seq
from randtaylor.spectra import SpectrumSet
from randtaylor.zeros import (ValidationError, angular_histogram, l1loc_diagnostic, lindelof_sum, sector_count,
                              zeros_in_disk)


def cosh_zeros(r):
    k = int(math.floor(r / math.pi - 0.5))
    return np.array([1j * math.pi * (j + 0.5) for j in range(-k - 1, k + 1)])


def test_cosh_zeros_are_exact():
    zs = zeros_in_disk(cosh_sequence(), 10)
    assert len(zs) == 6
    for want in cosh_zeros(10):
        assert np.min(np.abs(zs.zeros - want)) < 1e-6
    assert np.all(zs.residuals <= 1e-6)
    assert zs.winding == 6


def test_cosh_lindelof_sum_vanishes():
    assert abs(lindelof_sum(zeros_in_disk(cosh_sequence(), 10))) < 1e-9


@pytest.mark.parametrize("r", [10, 50])
def test_exponential_has_no_zeros(r):
    assert len(zeros_in_disk(constant_one(), r)) == 0


def test_polynomial_with_zeros_at_the_origin():
    # 2 z^2/2! + 6 z^3/3! = z^2 (1 + z)
    zs = zeros_in_disk(literal_seq([0, 0, 2, 6]), 2.0)
    assert zs.origin_multiplicity == 2
    assert sorted(np.round(zs.zeros.real, 12).tolist()) == [-1.0, 0.0, 0.0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert lindelof_sum(zs) == pytest.approx(-1.0)
    assert caught


def test_sector_count_of_cosh():
    assert sector_count(cosh_sequence(), 10, math.pi / 4, 3 * math.pi / 4) == 3
    assert sector_count(cosh_sequence(), 10, -math.pi / 4, math.pi / 4) == 0


def test_sector_through_a_zero_is_rejected():
    # the ray arg z = pi/2 carries every zero of cosh, so radial nudges cannot help
    with pytest.raises(ValidationError):
        sector_count(cosh_sequence(), 10, 0.0, math.pi / 2)


def test_histogram_of_cosh_against_uniform():
    recs = angular_histogram(zeros_in_disk(cosh_sequence(), 10), 4, start=-3 * math.pi / 4)
    assert [h.observed for h in recs] == [3, 0, 3, 0]
    assert all(h.predicted == pytest.approx(10 / 4) for h in recs)


def test_histogram_shifts_edges_off_atoms():
    zs = zeros_in_disk(cosh_sequence(), 10)
    recs = angular_histogram(zs, 4, SpectrumSet(points=[0.0, math.pi]))
    assert sum(h.observed for h in recs) == 6
    assert sum(h.predicted for h in recs) == pytest.approx(4 * 10 / (2 * math.pi))


def test_quadratic_phase_zero_count_and_balance():
    seq = polynomial_phase_seq({2: "sqrt(2)"})
    zs = zeros_in_disk(seq, 200)
    assert len(zs) == zs.winding
    recs = angular_histogram(zs, 8)
    assert max(abs(h.deviation) for h in recs) < 0.2


def test_winding_matches_root_finder():
    sec = TaylorSection(polynomial_phase_seq({2: "sqrt(2)"}), 30.0, 90)
    roots, method, conv = find_roots(sec)
    assert np.all(conv)
    inside = int(np.sum(np.abs(roots) < 1.0))
    assert winding_number(sec, circle_path(1.0, 0.01), 256) == inside


def test_sector_path_closes():
    path = sector_path(1.0, 0.2, 1.0)
    pts = path(np.array([0.0, 1.0]))
    assert abs(pts[0] - pts[1]) < 1e-15


def test_l1loc_exponential_is_exact():
    rows = l1loc_diagnostic(constant_one(), [10, 20], SpectrumSet(points=[0.0]), grid=(2, 16))
    assert all(r.discrepancy < 1e-6 for r in rows)


def test_l1loc_cosh_decreases():
    rows = l1loc_diagnostic(cosh_sequence(), [20, 40, 80], SpectrumSet(points=[0.0, math.pi]), grid=(2, 32))
    d = [r.discrepancy for r in rows]
    assert d[0] > d[1] > d[2]


def test_full_circle_sector_equals_disk_count():
    seq = polynomial_phase_seq({2: "sqrt(2)"})
    assert sector_count(seq, 40, -math.pi, math.pi) == len(zeros_in_disk(seq, 40))
