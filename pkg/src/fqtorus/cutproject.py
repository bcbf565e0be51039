"""One-dimensional cut-and-project sets from Z^2 with a strip window."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rootfind import WeightedPointSet
from .torus_core import CompactificationMap, check_rational_independence

GOLDEN = (1 + math.sqrt(5)) / 2
BOUNDARY_GUARD = 1e-12


@dataclass(frozen=True)
class CutProjectConfig:
    """Lambda = {m cos t + n sin t : |m sin t - n cos t| < ell / 2} for (m, n) in Z^2."""

    tan_theta: float
    ell: float
    R: float
    alpha: float | None = None
    A: tuple[tuple[int, int], tuple[int, int]] | None = None

    def __post_init__(self):
        if self.ell <= 0:
            raise ValueError("window length ell must be positive")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.alpha is not None and self.A is not None:
            cmap = self.cmap
            M = cmap.M[:, 0]
            x = np.linspace(-3.0, 3.0, 13)
            lhs = np.outer(self.alpha * x, M)
            rhs = np.outer(x, M) @ np.array(self.A, dtype=float).T
            d = lhs - rhs
            if np.abs(d - np.round(d)).max() > 1e-10:
                raise ValueError("psi(alpha x) != A psi(x) on test points")

    @property
    def theta(self) -> float:
        return math.atan(self.tan_theta)

    @property
    def cmap(self) -> CompactificationMap:
        return CompactificationMap.from_tan(self.tan_theta)

    def irrational(self, bound: int = 10**6) -> bool:
        return check_rational_independence(self.cmap, bound).independent


def generate(cfg: CutProjectConfig) -> WeightedPointSet:
    s, c = math.sin(cfg.theta), math.cos(cfg.theta)
    # |m c + n s| <= R and |m s - n c| < ell / 2 imply |m|, |n| <= R + ell / 2
    K = int(math.ceil(cfg.R + cfg.ell / 2)) + 1
    rng = np.arange(-K, K + 1)
    m, n = np.meshgrid(rng, rng, indexing="ij")
    m, n = m.ravel(), n.ravel()
    par = m * c + n * s
    perp = m * s - n * c
    keep = (np.abs(perp) < cfg.ell / 2 - BOUNDARY_GUARD) & (np.abs(par) <= cfg.R)
    x = np.sort(par[keep])
    if x.size == 0:
        return WeightedPointSet(x, np.empty(0, dtype=np.int64), cfg.R)
    # coincident projections only happen for rational slopes
    new = np.concatenate([[True], np.diff(x) > 1e-12])
    starts = np.flatnonzero(new)
    mult = np.diff(np.append(starts, x.size))
    pts = WeightedPointSet(x[starts], mult, cfg.R)
    if np.any(mult > 1):
        pts.flagged.append({"reason": "coincident projections", "max_multiplicity": int(mult.max())})
    return pts


def kappa_coeff_closed_form(cfg: CutProjectConfig, k) -> float:
    """kappa(zeta_k) = integral over (-ell/2, ell/2) of zeta_k(t (-sin, cos)) dt."""
    s, c = math.sin(cfg.theta), math.cos(cfg.theta)
    u = math.pi * cfg.ell * (-k[0] * s + k[1] * c)
    return cfg.ell * (1.0 if u == 0 else math.sin(u) / u)


@dataclass
class DilationVerdict:
    closed: bool
    tested: int
    violations: list[float]


def dilation_check(pts: WeightedPointSet, alpha: float, tol: float = 1e-9,
                   margin: float = 0.0) -> DilationVerdict:
    """Check alpha * lambda is again a point, for lambda with |alpha lambda| <= R - margin."""
    lam = pts.points
    if len(lam) == 0:
        return DilationVerdict(True, 0, [])
    test = lam[np.abs(alpha * lam) <= pts.window_radius - margin]
    target = alpha * test
    idx = np.clip(np.searchsorted(lam, target), 1, max(len(lam) - 1, 1))
    near = np.minimum(np.abs(lam[idx - 1] - target), np.abs(lam[np.minimum(idx, len(lam) - 1)] - target))
    bad = test[near >= tol]
    return DilationVerdict(bad.size == 0, int(test.size), bad.tolist())
