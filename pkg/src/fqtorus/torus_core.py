"""Toral compactification maps and exact integer lattice arithmetic.

A compactification map sends x in R^n to frac(M x) in the torus [0, 1)^m.
The lattice helpers (projective closure index, annihilator basis) work on
Python integers only, so there is no rounding anywhere in them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

ORTHO_TOL = 1e-12
RELATION_TOL = 1e-10
DEFAULT_CF_BOUND = 10**6
DEFAULT_ENUM_BOUND = 10**3


class LatticeError(ValueError):
    pass


def _complete_frame(M: np.ndarray) -> np.ndarray:
    """Columns N with [M N] in SO(m)."""
    m, n = M.shape
    if n == m:
        return np.zeros((m, 0))
    q, _ = np.linalg.qr(M, mode="complete")
    N = q[:, n:].copy()
    if np.linalg.det(np.hstack([M, N])) < 0:
        N[:, -1] *= -1.0
    return N


@dataclass(frozen=True)
class CompactificationMap:
    """The homomorphism psi = rho_m o M from R^n onto a dense subgroup of T^m.

    ``M`` is Gram-Schmidt normalised on construction so that M^T M = I_n.
    """

    M: np.ndarray
    N: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.ndim == 1:
            M = M[:, None]
        if M.ndim != 2 or M.shape[0] < M.shape[1] or M.shape[1] < 1:
            raise ValueError(f"M must be m x n with m >= n >= 1, got shape {M.shape}")
        q, r = np.linalg.qr(M)
        if np.any(np.abs(np.diag(r)) < 1e-14):
            raise ValueError("columns of M are linearly dependent")
        # QR flips signs arbitrarily; keep each column pointing the way the caller gave it
        q = q * np.sign(np.diag(r))
        # an already orthonormal M is kept bit for bit so JSON round trips are exact
        if np.abs(M.T @ M - np.eye(M.shape[1])).max() <= 4 * np.finfo(float).eps:
            q = M
        q.setflags(write=False)
        N = _complete_frame(q)
        N.setflags(write=False)
        object.__setattr__(self, "M", q)
        object.__setattr__(self, "N", N)

    @property
    def m(self) -> int:
        return self.M.shape[0]

    @property
    def n(self) -> int:
        return self.M.shape[1]

    @classmethod
    def from_angle(cls, theta: float) -> "CompactificationMap":
        return cls(np.array([[math.cos(theta)], [math.sin(theta)]]))

    @classmethod
    def from_tan(cls, tan_theta: float) -> "CompactificationMap":
        """First-quadrant angle (or fourth, for negative slope) with the given tangent."""
        if math.isinf(tan_theta):
            return cls(np.array([[0.0], [1.0]]))
        return cls.from_angle(math.atan(tan_theta))

    @property
    def theta(self) -> float:
        if self.m != 2 or self.n != 1:
            raise ValueError("theta is only defined for m = 2, n = 1")
        return math.atan2(self.M[1, 0], self.M[0, 0])

    def frequencies(self, exponents) -> np.ndarray:
        """M^T k for each row k of ``exponents``."""
        return np.asarray(exponents, dtype=float) @ self.M

    def check_invariants(self, tol: float = ORTHO_TOL) -> None:
        gram = self.M.T @ self.M
        if np.max(np.abs(gram - np.eye(self.n))) > tol:
            raise AssertionError("M^T M != I")
        full = np.hstack([self.M, self.N])
        if np.max(np.abs(full.T @ full - np.eye(self.m))) > tol:
            raise AssertionError("[M N] not orthogonal")
        if abs(np.linalg.det(full) - 1.0) > tol:
            raise AssertionError("[M N] not special orthogonal")

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "M": self.M.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "CompactificationMap":
        M = np.array(data["M"], dtype=float)
        if M.ndim == 1:
            M = M[:, None]
        if M.shape != (data["m"], data["n"]):
            raise ValueError(f"M has shape {M.shape}, header says ({data['m']}, {data['n']})")
        return cls(M)


def project(cmap: CompactificationMap, x) -> np.ndarray:
    """Fractional part of M x. Accepts a single point or an array of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    if cmap.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        y = x[..., None] * cmap.M[:, 0]
    else:
        y = x @ cmap.M.T
    y = y - np.floor(y)
    # frac can round up to exactly 1.0
    return np.where(y >= 1.0, 0.0, y)


def circular_distance(a, b) -> np.ndarray:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return np.abs(d - np.round(d))


# ---------------------------------------------------------------------------
# rational independence

@dataclass(frozen=True)
class IndependenceVerdict:
    independent: bool
    bound: int
    relation: tuple[int, ...] | None = None
    residual: float | None = None
    method: str = "enumeration"

    def to_json(self) -> dict:
        return {
            "independent_up_to_bound": self.independent,
            "bound": self.bound,
            "relation": list(self.relation) if self.relation else None,
            "residual": self.residual,
            "method": self.method,
        }


def _convergents(x: float, bound: int):
    """Continued-fraction convergents p/q of x with max(|p|, q) <= bound."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    rest = x
    for _ in range(200):
        a = math.floor(rest)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if max(abs(p1), q1) > bound:
            return
        yield p1, q1
        frac = rest - a
        if frac < 1e-300:
            return
        rest = 1.0 / frac


def _normalize_relation(k: Sequence[int]) -> tuple[int, ...]:
    g = reduce(math.gcd, (abs(v) for v in k))
    k = [v // g for v in k]
    for v in k:
        if v != 0:
            if v < 0:
                k = [-u for u in k]
            break
    return tuple(int(v) for v in k)


def check_rational_independence(cmap: CompactificationMap, bound: int | None = None,
                                tol: float = RELATION_TOL) -> IndependenceVerdict:
    """Look for an integer k, 0 < |k|_inf <= bound, with |M^T k| < tol.

    For m = 2, n = 1 the search walks the continued fraction of the slope,
    since convergents are the best approximations. Otherwise the box is
    enumerated directly, which costs (2 bound + 1)^m evaluations.
    """
    M = cmap.M
    if cmap.m == 2 and cmap.n == 1:
        bound = DEFAULT_CF_BOUND if bound is None else bound
        if bound < 1:
            raise ValueError("bound must be >= 1")
        a, b = M[:, 0]
        for i, v in enumerate((a, b)):
            if abs(v) < tol:
                k = [0, 0]
                k[i] = 1
                return IndependenceVerdict(False, bound, tuple(k), abs(v), "continued-fraction")
        # k1 a + k2 b = 0  <=>  k1 / k2 = -b / a, so k = (p, q) for a convergent p / q
        for p, q in _convergents(-b / a, bound):
            k = (p, q)
            res = abs(k[0] * a + k[1] * b)
            if res < tol:
                return IndependenceVerdict(False, bound, _normalize_relation(k), float(res),
                                           "continued-fraction")
        return IndependenceVerdict(True, bound, None, None, "continued-fraction")

    bound = DEFAULT_ENUM_BOUND if bound is None else bound
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rng = np.arange(-bound, bound + 1)
    m = cmap.m
    # enumerate the box one leading slice at a time to bound memory
    for lead in itertools.product(range(-bound, bound + 1), repeat=max(m - 2, 0)):
        grid = np.stack(np.meshgrid(rng, rng, indexing="ij"), axis=-1).reshape(-1, 2)
        ks = np.hstack([np.tile(lead, (grid.shape[0], 1)), grid]) if lead else grid
        ks = ks[np.any(ks != 0, axis=1)]
        res = np.linalg.norm(ks @ M, axis=1)
        hit = np.flatnonzero(res < tol)
        if hit.size:
            j = hit[np.argmin(np.abs(ks[hit]).max(axis=1))]
            return IndependenceVerdict(False, bound, _normalize_relation(ks[j].tolist()),
                                       float(res[j]))
    return IndependenceVerdict(True, bound)


# ---------------------------------------------------------------------------
# exact lattice arithmetic

def _int_matrix(rows) -> list[list[int]]:
    out = []
    for r in rows:
        row = []
        for v in r:
            iv = int(v)
            if iv != v:
                raise LatticeError(f"non-integer entry {v!r}")
            row.append(iv)
        out.append(row)
    return out


def integer_rank(rows: list[list[int]]) -> int:
    """Rank over Q by fraction-free elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, len(a)):
            if a[i][c]:
                f, g = a[i][c], a[rank][c]
                a[i] = [g * x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


@dataclass(frozen=True)
class LatticeSubgroup:
    """Subgroup of Z^m spanned by Q-independent integer generators."""

    m: int
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gens = tuple(tuple(r) for r in _int_matrix(self.generators))
        for g in gens:
            if len(g) != self.m:
                raise LatticeError(f"generator {g} is not in Z^{self.m}")
        if integer_rank([list(g) for g in gens]) != len(gens):
            raise LatticeError("generators are not linearly independent over Q")
        object.__setattr__(self, "generators", gens)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @classmethod
    def from_generators(cls, generators) -> "LatticeSubgroup":
        gens = [list(g) for g in generators]
        if not gens:
            raise LatticeError("no generators")
        return cls(len(gens[0]), tuple(tuple(g) for g in gens))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hermite(A: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular U with A U = [H | 0], H lower-echelon.

    Returns (A U, U). A is r x m. The last m - rank(A) columns of U are a
    basis of the integer kernel of A.
    """
    r = len(A)
    m = len(A[0]) if r else 0
    H = [list(row) for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def col_op(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for mat in (H, U):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    piv_col = 0
    for row in range(r):
        if piv_col >= m:
            break
        for j in range(piv_col + 1, m):
            x, y = H[row][piv_col], H[row][j]
            if y == 0:
                continue
            g, s, t = _xgcd(x, y)
            # det [[s, -y/g], [t, x/g]] = (s x + t y) / g = 1
            col_op(piv_col, j, s, t, -y // g, x // g)
        if H[row][piv_col] != 0:
            if H[row][piv_col] < 0:
                for mat in (H, U):
                    for line in mat:
                        line[piv_col] = -line[piv_col]
            piv_col += 1
    return H, U


def smith_diagonal(A: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix."""
    a = [list(row) for row in A]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        done = False
            if not done:
                continue
            # divisibility condition on the remaining block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def projective_index(S: LatticeSubgroup) -> int:
    """|S_1 / S| where S_1 = {k : a k in S for some positive integer a}."""
    if S.rank == 0:
        raise LatticeError("rank-0 subgroup has no projective index")
    if S.rank == 1:
        return reduce(math.gcd, (abs(v) for v in S.generators[0]))
    # S_1/S is the torsion of Z^m / S, i.e. the product of invariant factors
    return math.prod(smith_diagonal([list(g) for g in S.generators]))


def annihilator_basis(S: LatticeSubgroup) -> list[list[int]]:
    """Columns of E spanning {k in Z^m : k . s = 0 for every generator s}.

    Returned as an m x (m - rank) nested list; empty columns when rank = m.
    """
    gens = [list(g) for g in S.generators]
    if S.rank == 0:
        return [[int(i == j) for j in range(S.m)] for i in range(S.m)]
    _, U = column_hermite(gens)
    k = S.m - S.rank
    E = [row[S.rank:] for row in U]
    # canonical sign: first nonzero entry of each column positive
    for c in range(k):
        col = [E[i][c] for i in range(S.m)]
        lead = next(v for v in col if v != 0)
        if lead < 0:
            for i in range(S.m):
                E[i][c] = -E[i][c]
    for g in gens:
        for c in range(k):
            assert sum(g[i] * E[i][c] for i in range(S.m)) == 0
    return E


def annihilator_density(S: LatticeSubgroup, cmap: CompactificationMap) -> float:
    """|S_1/S| |det E^T M|, the density contribution of one homotopy class."""
    E = np.array(annihilator_basis(S), dtype=float).reshape(S.m, -1)
    if E.shape[1] != cmap.n:
        raise LatticeError(f"annihilator rank {E.shape[1]} != n = {cmap.n}")
    return projective_index(S) * abs(float(np.linalg.det(E.T @ cmap.M)))
