import math

import numpy as np
import pytest

from fqtorus.rootfind import WeightedPointSet
from fqtorus.spectrum import (ERROR_CONSTANT, CoverageError, SpectrumTable, bohr_coefficient,
                              difference_residual, kappa_hat_points, spectrum_scan)
from fqtorus.suites import example2_vanishes
from fqtorus.trigpoly import LaurentPoly

INTEGERS = WeightedPointSet(np.arange(-100.0, 101.0), np.ones(201, dtype=np.int64), 100.0)


def test_bohr_on_integers():
    assert bohr_coefficient(INTEGERS, 0.0) == pytest.approx(201 / 200, abs=1e-15)
    assert bohr_coefficient(INTEGERS, 1.0) == pytest.approx(201 / 200, abs=1e-12)
    assert abs(bohr_coefficient(INTEGERS, 0.5)) <= 1 / 200 + 1e-15


def test_bohr_vectorised_matches_scalar():
    ys = np.array([0.0, 0.1, 0.5, math.sqrt(2)])
    vec = bohr_coefficient(INTEGERS, ys)
    for y, v in zip(ys, vec):
        assert v == pytest.approx(bohr_coefficient(INTEGERS, y), abs=1e-14)


def test_bohr_empty_is_zero():
    empty = WeightedPointSet(np.empty(0), np.empty(0, dtype=np.int64), 10.0)
    assert bohr_coefficient(empty, 0.3) == 0


def test_triangle_bound(ex1):
    bound = ex1["pts"].total_mass / (2 * ex1["pts"].window_radius)
    ys = np.random.default_rng(0).uniform(-5, 5, 200)
    assert np.abs(bohr_coefficient(ex1["pts"], ys)).max() <= bound + 1e-12


def test_hermitian_symmetry(ex1):
    for k in [(1, 0), (2, 1), (3, -1)]:
        a = kappa_hat_points(ex1["pts"], ex1["map"], k).value
        b = kappa_hat_points(ex1["pts"], ex1["map"], (-k[0], -k[1])).value
        assert abs(a - b.conjugate()) < 1e-12


def test_points_route_examples(ex1):
    c, s = ex1["map"].M[:, 0]
    e0 = kappa_hat_points(ex1["pts"], ex1["map"], (0, 0))
    assert abs(e0.value - (c + s)) < 0.02
    assert e0.error_estimate == ERROR_CONSTANT / 500
    assert e0.y == 0
    assert abs(kappa_hat_points(ex1["pts"], ex1["map"], (1, -2)).value) < 0.05


def test_trivial_lattice(map_sqrt2):
    # zeros of z_1 - 1 pulled back: the lattice Z / cos(theta)
    c = map_sqrt2.M[0, 0]
    n = np.arange(-math.floor(500 * c), math.floor(500 * c) + 1)
    pts = WeightedPointSet(n / c, np.ones(n.size, dtype=np.int64), 500.0)
    assert abs(kappa_hat_points(pts, map_sqrt2, (1, 0)).value - c) < 0.02
    scan = spectrum_scan(pts, map_sqrt2, 3, 0.05)
    assert {k for k, null in scan.null_mask.items() if not null} == {(a, 0) for a in range(-3, 4)}


def test_cross_validation(ex1, ex2):
    for ex in (ex1, ex2):
        R = ex["pts"].window_radius
        for k, v in ex["table"].items():
            if max(map(abs, k)) <= 4:
                assert abs(kappa_hat_points(ex["pts"], ex["map"], k).value - v) <= 5 / R + 1e-6


def test_window_doubling(ex1):
    # |k_R - k_2R| <= C / R; report the smallest C that works
    half = ex1["pts"].restrict(250.0)
    ks = [(a, b) for a in range(-3, 4) for b in range(-3, 4)]
    gaps = [abs(kappa_hat_points(half, ex1["map"], k).value
                - kappa_hat_points(ex1["pts"], ex1["map"], k).value) for k in ks]
    fitted = max(gaps) * 250.0
    assert fitted <= ERROR_CONSTANT


def test_difference_residual_examples(ex1, ex2):
    res, k = difference_residual(ex1["P"], {k: v for k, v in ex1["table"].items()
                                            if max(map(abs, k)) <= 4})
    assert res < 1e-8 and max(map(abs, k)) <= 5
    res2, _ = difference_residual(ex2["P"], ex2["table"])
    assert res2 < 1e-8


def test_difference_residual_random_control(ex1):
    rng = np.random.default_rng(7)
    table = {k: rng.random() for k in ex1["table"]}
    res, _ = difference_residual(ex1["P"], table)
    assert res > 0.1


def test_difference_residual_accepts_table(ex1):
    table = SpectrumTable.from_values(ex1["table"], ex1["map"])
    assert difference_residual(ex1["P"], table)[0] < 1e-8
    assert table[(1, 1)] == ex1["table"][(1, 1)]


def test_coverage_error():
    P = LaurentPoly.from_dict({(1, 0): 1, (-1, 0): 1})
    with pytest.raises(CoverageError, match="missing"):
        difference_residual(P, {(0, 0): 1.0})


def test_scan_example1(ex1):
    scan = spectrum_scan(ex1["pts"], ex1["map"], 4, 0.05)
    for k, null in scan.null_mask.items():
        if k[0] * k[1] < 0:
            assert null, k
    assert not scan.null_mask[(0, 0)]
    assert "empirical" in scan.note
    for e in scan.table.entries:
        assert abs(e.y - ex1["map"].frequencies([e.k])[0, 0]) < 1e-12


def test_scan_example2(ex2):
    scan = spectrum_scan(ex2["pts"], ex2["map"], 4, 0.05)
    for k, null in scan.null_mask.items():
        if example2_vanishes(k):
            assert null, k
    # entries carrying visible mass in the integral route are not null here
    for k, null in scan.null_mask.items():
        if abs(ex2["table"][k]) > 0.1:
            assert not null, k
