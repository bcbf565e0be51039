"""Bohr-mean Fourier coefficients of weighted point sets and spectrum tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rootfind import WeightedPointSet
from .torus_core import CompactificationMap
from .trigpoly import LaurentPoly

# error_estimate = ERROR_CONSTANT / R for windowed Bohr means
ERROR_CONSTANT = 5.0


class CoverageError(ValueError):
    pass


def bohr_coefficient(pts: WeightedPointSet, y: float | np.ndarray) -> complex | np.ndarray:
    """(1 / 2R) sum over |lambda| <= R of c(lambda) exp(-2 pi i y lambda)."""
    R = pts.window_radius
    if R <= 0:
        raise ValueError("window radius must be positive")
    keep = np.abs(pts.points) <= R
    lam = pts.points[keep]
    c = pts.multiplicities[keep].astype(float)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if lam.size == 0:
        out = np.zeros(y_arr.shape, dtype=complex)
    else:
        out = np.exp(-2j * np.pi * np.multiply.outer(y_arr, lam)) @ c / (2 * R)
    return complex(out[0]) if np.ndim(y) == 0 else out


@dataclass
class SpectrumEntry:
    k: tuple[int, ...]
    y: float
    value: complex
    R: float
    error_estimate: float


@dataclass
class SpectrumTable:
    entries: list[SpectrumEntry]
    cmap: CompactificationMap
    error_constant: float = ERROR_CONSTANT
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {e.k: e.value for e in self.entries}

    def __getitem__(self, k) -> complex:
        for e in self.entries:
            if e.k == tuple(k):
                return e.value
        raise KeyError(k)

    @classmethod
    def from_values(cls, values: dict, cmap: CompactificationMap, R: float = np.inf,
                    error: float = 0.0, **meta) -> "SpectrumTable":
        entries = [SpectrumEntry(tuple(int(v) for v in k), float(cmap.frequencies([k])[0, 0]),
                                 complex(val), R, error)
                   for k, val in sorted(values.items())]
        return cls(entries, cmap, meta=meta)


def kappa_hat_points(pts: WeightedPointSet, cmap: CompactificationMap, k) -> SpectrumEntry:
    """The windowed Bohr mean at M^T k, which converges to kappa(zeta_{-k})."""
    if cmap.n != 1:
        raise ValueError("kappa_hat_points needs n = 1")
    k = tuple(int(v) for v in k)
    y = float(cmap.frequencies([k])[0, 0])
    R = pts.window_radius
    return SpectrumEntry(k, y, bohr_coefficient(pts, y), R, ERROR_CONSTANT / R)


def difference_residual(P: LaurentPoly, table) -> tuple[float, tuple[int, ...]]:
    """max over interior k of |sum_j p_j table(k - j)|, with the maximising k.

    ``table`` is a SpectrumTable or a mapping k -> value. A k is interior
    when every k - j it needs is present.
    """
    values = table.as_dict() if isinstance(table, SpectrumTable) else dict(table)
    stencil = P.terms
    best, arg = -1.0, None
    missing: set[tuple[int, ...]] = set()
    candidates = {tuple(a + b for a, b in zip(key, j)) for key in values for j, _ in stencil}
    for k in sorted(candidates):
        need = [tuple(a - b for a, b in zip(k, j)) for j, _ in stencil]
        absent = [q for q in need if q not in values]
        if absent:
            missing.update(absent)
            continue
        r = abs(sum(c * values[q] for (j, c), q in zip(stencil, need)))
        if r > best:
            best, arg = r, k
    if arg is None:
        raise CoverageError(f"no interior k; missing e.g. {sorted(missing)[:10]}")
    return float(best), arg


@dataclass
class SpectrumScan:
    table: SpectrumTable
    null_mask: dict[tuple[int, ...], bool]
    threshold: float
    frequencies: np.ndarray
    note: str = "empirical: zero/nonzero split is thresholded at finite window and kmax"


def spectrum_scan(pts: WeightedPointSet, cmap: CompactificationMap, kmax: int,
                  zero_threshold: float) -> SpectrumScan:
    ks = [(a, b) for a in range(-kmax, kmax + 1) for b in range(-kmax, kmax + 1)]
    ys = cmap.frequencies(ks)[:, 0]
    vals = bohr_coefficient(pts, ys)
    R = pts.window_radius
    entries = [SpectrumEntry(k, float(y), complex(v), R, ERROR_CONSTANT / R)
               for k, y, v in zip(ks, ys, vals)]
    mask = {k: bool(abs(v) < zero_threshold) for k, v in zip(ks, vals)}
    freqs = np.unique(np.array([y for k, y in zip(ks, ys) if not mask[k]]))
    table = SpectrumTable(entries, cmap, meta={"kmax": kmax, "zero_threshold": zero_threshold})
    return SpectrumScan(table, mask, zero_threshold, freqs)
