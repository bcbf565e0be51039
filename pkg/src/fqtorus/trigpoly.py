"""Laurent polynomials on T^m and exponential polynomials on R."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .torus_core import CompactificationMap

TWO_PI_I = 2j * math.pi
FREQ_MERGE_TOL = 1e-12
CANCEL_TOL = 1e-14


class ZeroPolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentPoly:
    """Sum of c_k z^k over finitely many exponent vectors k in Z^m."""

    m: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]

    def __post_init__(self):
        merged: dict[tuple[int, ...], complex] = {}
        for k, c in self.terms:
            k = tuple(int(v) for v in k)
            if len(k) != self.m:
                raise ValueError(f"exponent {k} has wrong length for m = {self.m}")
            merged[k] = merged.get(k, 0j) + complex(c)
        terms = tuple(sorted((k, c) for k, c in merged.items() if c != 0))
        if not terms:
            raise ZeroPolynomialError("zero polynomial")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_dict(cls, coeffs: Mapping[tuple[int, ...], complex]) -> "LaurentPoly":
        m = len(next(iter(coeffs)))
        return cls(m, tuple(coeffs.items()))

    @property
    def exponents(self) -> np.ndarray:
        return np.array([k for k, _ in self.terms], dtype=np.int64)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return dict(self.terms)

    def to_json(self) -> dict:
        return {"m": self.m,
                "terms": [{"exp": list(k), "re": c.real, "im": c.imag} for k, c in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPoly":
        return cls(int(data["m"]), tuple(
            (tuple(t["exp"]), complex(t.get("re", 0.0), t.get("im", 0.0))) for t in data["terms"]))


@dataclass(frozen=True)
class ExpPoly1D:
    """p(x) = sum_j c_j exp(2 pi i y_j x) with y_1 < ... < y_d."""

    freqs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.freqs, dtype=float).ravel()
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if y.shape != c.shape:
            raise ValueError("freqs and coeffs differ in length")
        y, c = _merge_frequencies(y, c)
        y.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "freqs", y)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, complex]]) -> "ExpPoly1D":
        terms = list(terms)
        return cls(np.array([t[0] for t in terms], dtype=float),
                   np.array([t[1] for t in terms], dtype=complex))

    @property
    def d(self) -> int:
        return len(self.freqs)

    @property
    def bandwidth(self) -> float:
        return float(self.freqs[-1] - self.freqs[0])

    def __call__(self, x):
        return eval_entire(self, x)

    def derivative(self) -> "ExpPoly1D | None":
        c = TWO_PI_I * self.freqs * self.coeffs
        keep = c != 0
        if not keep.any():
            return None
        return ExpPoly1D(self.freqs[keep], c[keep])

    def shifted(self, s: float) -> "ExpPoly1D":
        """x -> p(x - s)."""
        return ExpPoly1D(self.freqs, self.coeffs * np.exp(-TWO_PI_I * self.freqs * s))

    def to_json(self) -> dict:
        return {"terms": [{"freq": float(y), "re": c.real, "im": c.imag}
                          for y, c in zip(self.freqs, self.coeffs)]}

    @classmethod
    def from_json(cls, data: dict) -> "ExpPoly1D":
        return cls.from_terms((t["freq"], complex(t.get("re", 0.0), t.get("im", 0.0)))
                              for t in data["terms"])


def _merge_frequencies(y: np.ndarray, c: np.ndarray, tol: float = FREQ_MERGE_TOL):
    order = np.argsort(y, kind="stable")
    y, c = y[order], c[order]
    out_y: list[float] = []
    out_c: list[complex] = []
    for yj, cj in zip(y, c):
        if out_y and yj - out_y[-1] <= tol:
            out_c[-1] += cj
        else:
            out_y.append(float(yj))
            out_c.append(complex(cj))
    keep = [i for i, cj in enumerate(out_c) if abs(cj) >= CANCEL_TOL]
    if not keep:
        raise ZeroPolynomialError("zero polynomial")
    return np.array([out_y[i] for i in keep]), np.array([out_c[i] for i in keep])


def pullback(P: LaurentPoly, cmap: CompactificationMap) -> ExpPoly1D:
    """The exponential polynomial x -> P(psi(x)); frequencies M^T k."""
    if cmap.n != 1:
        raise ValueError("pullback to an exponential polynomial on R needs n = 1")
    if cmap.m != P.m:
        raise ValueError(f"polynomial on T^{P.m} but map into T^{cmap.m}")
    return ExpPoly1D(cmap.frequencies(P.exponents)[:, 0], P.coeffs)


def eval_torus(P: LaurentPoly, theta) -> np.ndarray:
    """sum_k c_k exp(2 pi i k . theta) for theta of shape (..., m)."""
    theta = np.asarray(theta, dtype=float)
    phase = theta @ P.exponents.T.astype(float)
    return np.exp(TWO_PI_I * phase) @ P.coeffs


def eval_torus_grad(P: LaurentPoly, theta) -> tuple[np.ndarray, np.ndarray]:
    """Value and theta-gradient, gradient shape (..., m)."""
    theta = np.asarray(theta, dtype=float)
    K = P.exponents.astype(float)
    e = np.exp(TWO_PI_I * (theta @ K.T)) * P.coeffs
    return e.sum(axis=-1), TWO_PI_I * (e @ K)


def eval_entire(p: ExpPoly1D, z) -> np.ndarray:
    """Entire extension sum_j c_j exp(2 pi i y_j z); z may be complex."""
    z = np.asarray(z)
    return np.exp(TWO_PI_I * np.multiply.outer(z, p.freqs)) @ p.coeffs


def eval_entire_with_derivative(p: ExpPoly1D, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z)
    e = np.exp(TWO_PI_I * np.multiply.outer(z, p.freqs)) * p.coeffs
    return e.sum(axis=-1), TWO_PI_I * (e @ p.freqs)


@dataclass(frozen=True)
class SelfDuality:
    self_dual: bool
    shift: tuple[int, ...] | None = None
    unit: complex | None = None

    def __bool__(self) -> bool:
        return self.self_dual

    def to_json(self) -> dict:
        return {"self_dual": self.self_dual,
                "shift": list(self.shift) if self.shift is not None else None,
                "unit": None if self.unit is None else [self.unit.real, self.unit.imag]}


def is_self_dual(P: LaurentPoly, tol: float = 1e-12) -> SelfDuality:
    """Decide whether P(z^-1) = u z^-a P(z) for some a in Z^m and |u| = 1.

    Matching coefficients gives c_j = u c_{a - j}, so the support is
    symmetric under j -> a - j. That reflection reverses lexicographic
    order, which pins a to the sum of the lex-smallest and lex-largest
    exponents.
    """
    coeffs = P.as_dict()
    exps = sorted(coeffs)
    a = tuple(x + y for x, y in zip(exps[0], exps[-1]))
    u = complex(coeffs[exps[0]] / coeffs[exps[-1]])
    if abs(abs(u) - 1.0) > tol:
        return SelfDuality(False)
    for j, cj in coeffs.items():
        partner = tuple(ai - ji for ai, ji in zip(a, j))
        cp = coeffs.get(partner)
        if cp is None or abs(cj - u * cp) > tol * max(1.0, abs(cj)):
            return SelfDuality(False)
    return SelfDuality(True, a, u)


@dataclass(frozen=True)
class StabilityVerdict:
    root_found: bool
    witness: tuple[complex, complex] | None
    grid_size: tuple[int, int]
    certification: str = "sampled"

    def to_json(self) -> dict:
        w = None if self.witness is None else [[v.real, v.imag] for v in self.witness]
        return {"root_found": self.root_found, "witness": w,
                "grid_size": list(self.grid_size), "certification": self.certification}


def is_stable_sampled(P: LaurentPoly, grid_size: int | tuple[int, int] = 64,
                      tol: float = 1e-9) -> StabilityVerdict:
    """Search the open bidisk for zeros of P, slicing by z1.

    For each z1 on a polar grid (radii x angles) the polynomial in z2 is
    solved through its companion matrix. A hit with both moduli below
    1 - tol is an instability witness. Finding nothing is only evidence.
    """
    if P.m != 2:
        raise ValueError("sampled stability is implemented for m = 2")
    if isinstance(grid_size, int):
        grid_size = (grid_size, grid_size)
    nr, na = grid_size
    K = P.exponents
    # clear denominators: multiply by z^-min so every exponent is >= 0
    K = K - K.min(axis=0)
    deg2 = int(K[:, 1].max())
    radii = (np.arange(nr) + 0.5) / nr * (1.0 - tol)
    angles = 2 * np.pi * np.arange(na) / na
    scale = np.abs(P.coeffs).sum()
    best = None
    best_depth = np.inf
    for rad in radii:
        for ang in angles:
            z1 = rad * np.exp(1j * ang)
            # coefficients of the z2 polynomial, highest degree first
            poly = np.zeros(deg2 + 1, dtype=complex)
            np.add.at(poly, deg2 - K[:, 1], P.coeffs * z1 ** K[:, 0])
            nz = np.flatnonzero(np.abs(poly) > 1e-14 * scale)
            if nz.size == 0:
                return StabilityVerdict(True, (complex(z1), complex("nan")), grid_size)
            poly = poly[nz[0]:]
            if len(poly) < 2:
                continue
            for z2 in np.roots(poly):
                depth = max(rad, abs(z2))
                if abs(z2) < 1.0 - tol and depth < best_depth:
                    best, best_depth = (complex(z1), complex(z2)), depth
    # report the witness deepest inside the bidisk
    return StabilityVerdict(best is not None, best, grid_size)
