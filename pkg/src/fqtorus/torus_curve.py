"""Tracing the real zero curve of a self-dual Laurent polynomial on T^2.

Coordinates on the torus are theta in [0, 1)^2 with z_j = exp(2 pi i theta_j).
Components are traced in the universal cover R^2 so that the lift after one
traversal gives the winding vector directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .torus_core import (CompactificationMap, LatticeSubgroup, annihilator_basis,
                         projective_index)
from .trigpoly import LaurentPoly, eval_torus_grad, is_self_dual

REALNESS_TOL = 1e-10
SINGULAR_GRAD = 1e-8
WINDING_TOL = 0.01


class CurveError(RuntimeError):
    pass


class NotSelfDualError(CurveError):
    pass


class SingularCurveError(CurveError):
    pass


class TrivialHomotopyError(CurveError):
    pass


class QuadratureError(CurveError):
    pass


@dataclass(frozen=True)
class RealForm:
    """r(theta) = Re(nu exp(-pi i a.theta) P(theta)); real-valued, same zeros as P on T^2."""

    P: LaurentPoly
    shift: tuple[int, ...]
    nu: complex

    def _q(self, theta):
        theta = np.asarray(theta, dtype=float)
        val, grad = eval_torus_grad(self.P, theta)
        a = np.asarray(self.shift, dtype=float)
        ph = self.nu * np.exp(-1j * np.pi * (theta @ a))
        q = ph * val
        dq = ph[..., None] * (grad - 1j * np.pi * val[..., None] * a)
        return q, dq

    def __call__(self, theta) -> np.ndarray:
        return self._q(theta)[0].real

    def value_and_grad(self, theta) -> tuple[np.ndarray, np.ndarray]:
        q, dq = self._q(theta)
        return q.real, dq.real

    def imag_part(self, theta) -> np.ndarray:
        return self._q(theta)[0].imag


def real_form(P: LaurentPoly, samples: int = 100, seed: int = 0) -> RealForm:
    duality = is_self_dual(P)
    if not duality:
        raise NotSelfDualError("polynomial is not self-dual")
    if P.m != 2:
        raise ValueError("curve tracing is implemented for m = 2")
    nu0 = np.sqrt(np.conj(duality.unit))
    theta = np.random.default_rng(seed).random((samples, P.m))
    scale = max(1.0, float(np.abs(P.coeffs).sum()))
    for nu in (nu0, -nu0):
        form = RealForm(P, duality.shift, complex(nu))
        if np.abs(form.imag_part(theta)).max() < REALNESS_TOL * scale:
            return form
    raise NotSelfDualError("not effectively self-dual: no branch of nu gives a real form")


@dataclass
class CurveComponent:
    """One closed component of Z_r(P), sampled along its lift to R^2.

    ``lifted`` runs from a start point to the same point translated by
    ``winding``; ``samples`` are the same points reduced mod 1.
    """

    lifted: np.ndarray
    lift_displacement: np.ndarray
    winding: tuple[int, int]
    orientation: int
    step: float
    form: RealForm = field(repr=False)
    _quad_cache: dict = field(default_factory=dict, repr=False)

    @property
    def samples(self) -> np.ndarray:
        return self.lifted - np.floor(self.lifted)

    def tangents(self) -> np.ndarray:
        _, g = self.form.value_and_grad(self.lifted)
        t = np.stack([-g[:, 1], g[:, 0]], axis=1)
        t /= np.linalg.norm(t, axis=1, keepdims=True)
        # align with the traversal direction
        chord = np.gradient(self.lifted, axis=0)
        sgn = np.sign(np.sum(t * chord, axis=1))
        return t * np.where(sgn == 0, 1.0, sgn)[:, None]

    def quadrature(self, nodes: int = 8) -> tuple[np.ndarray, np.ndarray]:
        """Nodes on the curve and the vector weights d(theta) for Gauss-Legendre on each chord.

        Each chord between consecutive samples is pushed onto the curve along
        its normal; the map tau -> curve point is smooth, so the rule keeps its
        full order.
        """
        if nodes in self._quad_cache:
            return self._quad_cache[nodes]
        t, w = np.polynomial.legendre.leggauss(nodes)
        t = 0.5 * (t + 1.0)
        w = 0.5 * w
        P0 = self.lifted[:-1]
        chord = self.lifted[1:] - P0
        L = np.linalg.norm(chord, axis=1, keepdims=True)
        normal = np.stack([-chord[:, 1], chord[:, 0]], axis=1) / L
        base = P0[:, None, :] + t[None, :, None] * chord[:, None, :]
        nrm = np.broadcast_to(normal[:, None, :], base.shape)
        sigma = np.zeros(base.shape[:2])
        for _ in range(50):
            pts = base + sigma[..., None] * nrm
            r, g = self.form.value_and_grad(pts)
            dn = np.sum(g * nrm, axis=-1)
            delta = r / dn
            sigma -= delta
            if np.abs(delta).max() < 1e-15:
                break
        pts = base + sigma[..., None] * nrm
        r, g = self.form.value_and_grad(pts)
        dn = np.sum(g * nrm, axis=-1)
        dsig = -np.sum(g * chord[:, None, :], axis=-1) / dn
        dtheta = chord[:, None, :] + dsig[..., None] * nrm
        out = (pts.reshape(-1, 2), (dtheta * w[None, :, None]).reshape(-1, 2))
        self._quad_cache[nodes] = out
        return out


def _correct(form: RealForm, x: np.ndarray, tol: float, max_iter: int = 30):
    for _ in range(max_iter):
        r, g = form.value_and_grad(x)
        gg = float(g @ g)
        if gg < SINGULAR_GRAD**2:
            raise SingularCurveError(f"singular point on Z_r(P) near {x % 1.0}")
        dx = (r / gg) * g
        x = x - dx
        if abs(r) < tol or np.linalg.norm(dx) < tol:
            return x, True
    r, _ = form.value_and_grad(x)
    return x, abs(r) < 1e3 * tol


def _tangent(form: RealForm, x: np.ndarray) -> np.ndarray:
    _, g = form.value_and_grad(x)
    nrm = math.hypot(g[0], g[1])
    if nrm < SINGULAR_GRAD:
        raise SingularCurveError(f"singular point on Z_r(P) near {x % 1.0}")
    return np.array([-g[1], g[0]]) / nrm


def _find_seeds(form: RealForm, grid: int) -> np.ndarray:
    """Points of Z_r(P) where r changes sign along grid edges of [0, 1]^2."""
    u = np.linspace(0.0, 1.0, grid + 1)
    T1, T2 = np.meshgrid(u, u, indexing="ij")
    R = form(np.stack([T1, T2], axis=-1))
    seeds = []
    for axis in (0, 1):
        a = R[:-1, :] if axis == 0 else R[:, :-1]
        b = R[1:, :] if axis == 0 else R[:, 1:]
        for i, j in zip(*np.nonzero(np.sign(a) * np.sign(b) <= 0)):
            start = np.array([u[i], u[j]])
            d = np.zeros(2)
            d[axis] = u[1] - u[0]
            f = lambda s: float(form(start + s * d))
            fa, fb = f(0.0), f(1.0)
            if fa == 0.0:
                s = 0.0
            elif fb == 0.0:
                s = 1.0
            elif fa * fb < 0:
                s = brentq(f, 0.0, 1.0, xtol=1e-14)
            else:
                continue
            seeds.append(start + s * d)
    if not seeds:
        return np.empty((0, 2))
    return np.array(seeds)


def _trace_one(form: RealForm, start: np.ndarray, step: float, corrector_tol: float,
               max_steps: int) -> CurveComponent:
    x0, ok = _correct(form, start, corrector_tol)
    if not ok:
        raise CurveError("seed corrector failed")
    pts = [x0]
    x = x0
    t = _tangent(form, x)
    travelled = 0.0
    h = step
    for _ in range(max_steps):
        # predictor-corrector with step halving when the corrector struggles
        while True:
            x_new, ok = _correct(form, x + h * t, corrector_tol)
            moved = np.linalg.norm(x_new - x)
            t_new = _tangent(form, x_new)
            if ok and moved < 1.5 * h and float(t_new @ t) > 0.9:
                break
            h *= 0.5
            if h < 1e-9:
                raise CurveError("step size underflow while tracing")
        travelled += moved
        x, t = x_new, t_new
        disp = x - x0
        w = np.round(disp)
        if travelled > 4 * step and np.linalg.norm(disp - w) < step:
            lifted = np.array(pts + [x0 + w])
            return CurveComponent(lifted, disp, (int(w[0]), int(w[1])), 1, step, form)
        pts.append(x)
        h = min(step, 2 * h)
    raise CurveError(f"component did not close within {max_steps} steps")


def trace_components(P: LaurentPoly, cmap: CompactificationMap | None = None,
                     seed_grid: int = 64, step: float = 1e-3,
                     corrector_tol: float = 1e-12, max_steps: int | None = None
                     ) -> list[CurveComponent]:
    """All closed components of Z_r(P) in T^2, oriented to carry nonnegative mass.

    The orientation convention uses the normal frame of ``cmap`` when given,
    so that the integral of xi_N over each component is >= 0.
    """
    form = real_form(P)
    if max_steps is None:
        max_steps = int(50 / step)
    seeds = _find_seeds(form, seed_grid)
    comps: list[CurveComponent] = []
    remaining = np.ones(len(seeds), dtype=bool)
    while remaining.any():
        i = int(np.flatnonzero(remaining)[0])
        comp = _trace_one(form, seeds[i], step, corrector_tol, max_steps)
        tree = cKDTree(np.mod(comp.samples, 1.0), boxsize=1.0)
        dist, _ = tree.query(np.mod(seeds, 1.0))
        remaining &= dist > 2 * step
        remaining[i] = False
        comps.append(comp)
    if cmap is not None:
        comps = [orient(c, cmap) for c in comps]
    return comps


def orient(comp: CurveComponent, cmap: CompactificationMap) -> CurveComponent:
    """Reverse the traversal if its xi_N mass is negative."""
    N = np.asarray(cmap.N[:, 0])
    mass = float(N @ np.asarray(comp.winding, dtype=float))
    if mass >= 0:
        return comp
    lifted = comp.lifted[::-1].copy()
    w = (-comp.winding[0], -comp.winding[1])
    return CurveComponent(lifted, -comp.lift_displacement, w, -comp.orientation,
                          comp.step, comp.form)


def transversality(comp: CurveComponent, cmap: CompactificationMap) -> float:
    """min over samples of |det[t | M]| with t the unit tangent."""
    t = comp.tangents()
    M = cmap.M[:, 0]
    return float(np.abs(t[:, 0] * M[1] - t[:, 1] * M[0]).min())


@dataclass
class HomotopyData:
    winding: tuple[int, int]
    index: int
    annihilator: list[list[int]]
    density: float

    def to_json(self) -> dict:
        return {"winding": list(self.winding), "index": self.index,
                "E": self.annihilator, "density_contribution": self.density}


def homotopy_density(comps: list[CurveComponent], cmap: CompactificationMap
                     ) -> tuple[list[HomotopyData], float]:
    """Per-component |S_1/S| |det E^T M| with S generated by the winding vector."""
    out = []
    for c in comps:
        if c.winding == (0, 0):
            raise TrivialHomotopyError("component not transverse to any coordinate; homotopy trivial")
        S = LatticeSubgroup(2, (c.winding,))
        E = annihilator_basis(S)
        idx = projective_index(S)
        Em = np.array(E, dtype=float)
        dens = idx * abs(float(np.linalg.det(Em.T @ cmap.M)))
        out.append(HomotopyData(c.winding, idx, E, dens))
    return out, float(sum(h.density for h in out))


def kappa_hat_integral(comps: list[CurveComponent], cmap: CompactificationMap, k,
                       nodes: int = 8, tol: float = 1e-10) -> complex:
    """Sum over components of the integral of exp(-2 pi i k.theta) xi_N.

    Two Gauss-Legendre orders are compared; their gap is the error estimate.
    """
    N = np.asarray(cmap.N[:, 0])
    k = np.asarray(k, dtype=float)
    vals = []
    for n in (nodes, nodes + 4):
        total = 0j
        for c in comps:
            pts, dth = c.quadrature(n)
            total += np.sum(np.exp(-2j * np.pi * (pts @ k)) * (dth @ N))
        vals.append(total)
    err = abs(vals[1] - vals[0])
    if err > tol:
        raise QuadratureError(f"quadrature not converged: estimated error {err:.3e}")
    return complex(vals[1])


def kappa_hat_table(comps, cmap, kmax: int, nodes: int = 8) -> dict[tuple[int, int], complex]:
    """kappa_hat_integral on the box |k|_inf <= kmax, sharing the quadrature nodes."""
    N = np.asarray(cmap.N[:, 0])
    ks = [(a, b) for a in range(-kmax, kmax + 1) for b in range(-kmax, kmax + 1)]
    K = np.array(ks, dtype=float)
    total = np.zeros(len(ks), dtype=complex)
    for c in comps:
        pts, dth = c.quadrature(nodes + 4)
        total += np.exp(-2j * np.pi * (K @ pts.T)) @ (dth @ N)
    return dict(zip(ks, total))
