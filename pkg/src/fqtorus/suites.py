"""End-to-end reproductions of the three worked examples.

Each suite returns a list of Check records, one per measured quantity,
with the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import cutproject as cp
from .rootfind import real_roots
from .spectrum import difference_residual, kappa_hat_points
from .torus_core import CompactificationMap, check_rational_independence
from .torus_curve import (homotopy_density, kappa_hat_table, trace_components,
                          transversality)
from .trigpoly import LaurentPoly, is_self_dual, is_stable_sampled, pullback


@dataclass
class Check:
    name: str
    measured: object
    expected: object
    tol: float | None
    passed: bool

    def __post_init__(self):
        self.passed = bool(self.passed)

    def to_json(self) -> dict:
        return asdict(self)


def example1_poly() -> LaurentPoly:
    return LaurentPoly.from_dict({(1, 1): 2, (1, 0): 1, (0, 1): 1, (0, 0): 2})


def example2_poly(delta: float = 0.5) -> LaurentPoly:
    return LaurentPoly.from_dict({(1, 0): 1, (-1, 0): -1, (0, 1): -delta, (0, -1): delta})


def _rel(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a - b) / abs(b)


def _common(P, cmap, R, kmax, threads):
    pts = real_roots(pullback(P, cmap), -R, R, threads=threads)
    comps = trace_components(P, cmap)
    hom, dens = homotopy_density(comps, cmap)
    table = kappa_hat_table(comps, cmap, kmax)
    return pts, comps, hom, dens, table


def verify_example1(tan_theta: float = math.sqrt(2), R: float = 500.0, kmax: int = 5,
                    threads: int = 1) -> list[Check]:
    cmap = CompactificationMap.from_tan(tan_theta)
    th = cmap.theta
    target = abs(math.cos(th) + math.sin(th))
    P = example1_poly()
    pts, comps, hom, dens, table = _common(P, cmap, R, kmax, threads)
    out = []
    sd = is_self_dual(P)
    out.append(Check("self-dual", sd.to_json(), {"shift": [1, 1], "unit": [1, 0]}, None,
                     bool(sd) and sd.shift == (1, 1)))
    st = is_stable_sampled(P, 64)
    out.append(Check("no zero sampled in open bidisk", st.root_found, False, None, not st.root_found))
    ind = check_rational_independence(cmap)
    out.append(Check("slope irrational up to bound", ind.to_json(), True, None, ind.independent))
    out.append(Check("empirical density of real roots", pts.density, target, 0.01,
                     _rel(pts.density, target) < 0.01))
    out.append(Check("component count", len(comps), 1, None, len(comps) == 1))
    w = [list(c.winding) for c in comps]
    out.append(Check("winding vector", w, "+-(1,-1)", None,
                     len(comps) == 1 and tuple(abs(v) for v in comps[0].winding) == (1, 1)
                     and comps[0].winding[0] == -comps[0].winding[1]))
    out.append(Check("homotopy density vs empirical", dens, pts.density, 0.01,
                     _rel(dens, pts.density) < 0.01))
    out.append(Check("transversality margin", min(transversality(c, cmap) for c in comps), "> 0",
                     None, min(transversality(c, cmap) for c in comps) > 0))
    quad = max(abs(v) for k, v in table.items() if k[0] * k[1] < 0)
    out.append(Check("max |kappa_hat| with k1 k2 < 0", quad, 0.0, 1e-8, quad < 1e-8))
    inner = {k: v for k, v in table.items() if max(map(abs, k)) <= kmax}
    res, arg = difference_residual(P, inner)
    out.append(Check("difference equation residual", res, 0.0, 1e-8, res < 1e-8))
    out.append(Check("kappa_hat(0) vs homotopy density", abs(table[(0, 0)] - dens), 0.0, 1e-6,
                     abs(table[(0, 0)] - dens) < 1e-6))
    out.append(_crossval(pts, cmap, table, R))
    return out


def _crossval(pts, cmap, table, R, kmax: int = 4) -> Check:
    gap = max(abs(kappa_hat_points(pts, cmap, k).value - v)
              for k, v in table.items() if max(map(abs, k)) <= kmax)
    tol = 5.0 / R + 1e-6
    return Check("points vs integral kappa_hat, |k| <= 4", gap, 0.0, tol, gap <= tol)


def example2_vanishes(k) -> bool:
    k1, k2 = k
    return (k2 > -k1 >= 1) or (k2 < -k1 <= 0)


def verify_example2(tan_theta: float = 1 / math.sqrt(2), delta: float = 0.5, R: float = 500.0,
                    kmax: int = 5, threads: int = 1) -> list[Check]:
    cmap = CompactificationMap.from_tan(tan_theta)
    target = 2 * abs(math.cos(cmap.theta))
    P = example2_poly(delta)
    pts, comps, hom, dens, table = _common(P, cmap, R, kmax, threads)
    out = []
    out.append(Check("component count", len(comps), 2, None, len(comps) == 2))
    out.append(Check("winding vectors", [list(c.winding) for c in comps], "+-(0,1) each", None,
                     all(c.winding in ((0, 1), (0, -1)) for c in comps)))
    out.append(Check("homotopy density", dens, target, 1e-9, abs(dens - target) < 1e-9))
    out.append(Check("homotopy density vs empirical", dens, pts.density, 0.01,
                     _rel(dens, pts.density) < 0.01))
    van = max(abs(v) for k, v in table.items() if example2_vanishes(k))
    out.append(Check("max |kappa_hat| on the vanishing set", van, 0.0, 1e-8, van < 1e-8))
    res, _ = difference_residual(P, table)
    out.append(Check("difference equation residual", res, 0.0, 1e-8, res < 1e-8))
    out.append(_crossval(pts, cmap, table, R))
    return out


def verify_example3(tan_theta: float = cp.GOLDEN, ell: float = 1.0, R: float = 200.0,
                    kmax: int = 4) -> list[Check]:
    cfg = cp.CutProjectConfig(tan_theta, ell, R)
    pts = cp.generate(cfg)
    cmap = cfg.cmap
    out = []
    out.append(Check("density", pts.density, ell, 0.02, _rel(pts.density, ell) < 0.02))
    ks = [(a, b) for a in range(-kmax, kmax + 1) for b in range(-kmax, kmax + 1)]
    gap = max(abs(kappa_hat_points(pts, cmap, k).value - cp.kappa_coeff_closed_form(cfg, k))
              for k in ks)
    out.append(Check("closed form vs Bohr mean", gap, 0.0, 0.02, gap < 0.02))
    alpha = tan_theta
    dil = cp.dilation_check(pts, alpha, 1e-9, margin=ell)
    out.append(Check("dilation alpha Lambda in Lambda", len(dil.violations), 0, 1e-9, dil.closed))
    # finite-kmax evidence that the projected spectrum accumulates
    big = [(a, b) for a in range(-20, 21) for b in range(-20, 21)]
    ys = np.sort([cmap.frequencies([k])[0, 0] for k in big
                  if abs(cp.kappa_coeff_closed_form(cfg, k)) > 0.01])
    g = float(np.diff(ys).min())
    out.append(Check("min gap of projected spectrum, kmax 20", g, "< 0.05", None, g < 0.05))
    return out


SUITES = {1: verify_example1, 2: verify_example2, 3: verify_example3}
