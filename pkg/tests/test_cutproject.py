import math

import numpy as np
import pytest

from fqtorus import cutproject as cp
from fqtorus.spectrum import kappa_hat_points

# Brute-force double-loop enumeration of the strip for golden theta.
ORACLE_COUNTS = {(1.0, 200.0): 401, (0.5, 200.0): 201, (1.0, 50.0): 99, (0.5, 50.0): 51}
A_GOLDEN = ((0, 1), (1, 1))


@pytest.mark.parametrize("ell, R", sorted(ORACLE_COUNTS))
def test_counts_match_enumeration(ell, R):
    assert cp.generate(cp.CutProjectConfig(cp.GOLDEN, ell, R)).total_mass == ORACLE_COUNTS[(ell, R)]


def test_density_and_halving():
    full = cp.generate(cp.CutProjectConfig(cp.GOLDEN, 1.0, 50.0))
    half = cp.generate(cp.CutProjectConfig(cp.GOLDEN, 0.5, 50.0))
    assert abs(full.density - 1.0) < 0.02
    assert len(half) / len(full) == pytest.approx(0.5, abs=0.03)
    big = cp.generate(cp.CutProjectConfig(cp.GOLDEN, 1.0, 200.0))
    assert abs(big.density - 1.0) < 0.02


def test_tiny_window_keeps_origin():
    pts = cp.generate(cp.CutProjectConfig(cp.GOLDEN, 1e-9, 50.0))
    assert pts.points.tolist() == [0.0]


def test_points_lie_in_strip():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 1.0, 30.0)
    s, c = math.sin(cfg.theta), math.cos(cfg.theta)
    # recover (m, n) from lambda = m c + n s by checking the lattice box
    rng = np.arange(-40, 41)
    m, n = np.meshgrid(rng, rng, indexing="ij")
    par, perp = m * c + n * s, m * s - n * c
    for x in cp.generate(cfg).points:
        i = np.argmin(np.abs(par - x))
        assert abs(par.flat[i] - x) < 1e-12 and abs(perp.flat[i]) < 0.5


def test_rational_slope_flags_coincidences():
    pts = cp.generate(cp.CutProjectConfig(1.0, 3.0, 10.0))
    assert pts.multiplicities.max() > 1
    assert pts.flagged and pts.flagged[0]["reason"] == "coincident projections"


def test_closed_form_values():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 1.0, 200.0)
    assert cp.kappa_coeff_closed_form(cfg, (0, 0)) == 1.0
    assert cp.kappa_coeff_closed_form(cp.CutProjectConfig(cp.GOLDEN, 0.3, 10.0), (0, 0)) == 0.3
    s = cp.GOLDEN / math.sqrt(1 + cp.GOLDEN ** 2)
    assert cp.kappa_coeff_closed_form(cfg, (1, 0)) == pytest.approx(
        math.sin(math.pi * s) / (math.pi * s), abs=1e-14)


def test_closed_form_is_window_integral():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 0.7, 10.0)
    s, c = math.sin(cfg.theta), math.cos(cfg.theta)
    t, w = np.polynomial.legendre.leggauss(40)
    t, w = 0.35 * t, 0.35 * w
    for k in [(1, 0), (2, -3), (-1, 4)]:
        integral = np.sum(w * np.exp(2j * np.pi * t * (-k[0] * s + k[1] * c)))
        assert cp.kappa_coeff_closed_form(cfg, k) == pytest.approx(integral.real, abs=1e-12)
        assert abs(integral.imag) < 1e-12


def test_closed_form_vs_bohr_mean():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 1.0, 200.0)
    pts = cp.generate(cfg)
    for a in range(-4, 5):
        for b in range(-4, 5):
            got = kappa_hat_points(pts, cfg.cmap, (a, b)).value
            assert abs(got - cp.kappa_coeff_closed_form(cfg, (a, b))) < 5 / 200 + 0.01


def test_dilation_golden():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 1.0, 200.0, alpha=cp.GOLDEN, A=A_GOLDEN)
    v = cp.dilation_check(cp.generate(cfg), cp.GOLDEN, 1e-9, margin=1.0)
    assert v.closed and v.tested > 100


def test_dilation_fails_for_sqrt2():
    pts = cp.generate(cp.CutProjectConfig(math.sqrt(2), 1.0, 200.0))
    v = cp.dilation_check(pts, cp.GOLDEN, 1e-9, margin=1.0)
    assert not v.closed and v.violations


def test_dilation_alpha_one():
    pts = cp.generate(cp.CutProjectConfig(math.sqrt(2), 1.0, 50.0))
    assert cp.dilation_check(pts, 1.0).closed


def test_dilation_identity_validated():
    with pytest.raises(ValueError, match="psi"):
        cp.CutProjectConfig(math.sqrt(2), 1.0, 10.0, alpha=cp.GOLDEN, A=A_GOLDEN)


def test_config_validation():
    with pytest.raises(ValueError):
        cp.CutProjectConfig(cp.GOLDEN, 0.0, 10.0)
    with pytest.raises(ValueError):
        cp.CutProjectConfig(cp.GOLDEN, 1.0, -1.0)
    assert cp.CutProjectConfig(cp.GOLDEN, 1.0, 10.0).irrational()
    assert not cp.CutProjectConfig(1.5, 1.0, 10.0).irrational()


def test_spectrum_gap_shrinks():
    cfg = cp.CutProjectConfig(cp.GOLDEN, 1.0, 200.0)
    ks = [(a, b) for a in range(-20, 21) for b in range(-20, 21)]
    ys = np.sort([cfg.cmap.frequencies([k])[0, 0] for k in ks
                  if abs(cp.kappa_coeff_closed_form(cfg, k)) > 0.01])
    assert np.diff(ys).min() < 0.05
