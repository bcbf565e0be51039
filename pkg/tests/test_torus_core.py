import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqtorus.torus_core import (CompactificationMap, LatticeError, LatticeSubgroup,
                                annihilator_basis, check_rational_independence,
                                circular_distance, project, projective_index, smith_diagonal)


def S(*gens):
    return LatticeSubgroup.from_generators(gens)


def test_constructor_normalises_columns():
    cmap = CompactificationMap([[3.0], [4.0]])
    np.testing.assert_allclose(cmap.M[:, 0], [0.6, 0.8], atol=1e-15)
    cmap.check_invariants()
    assert np.linalg.det(np.hstack([cmap.M, cmap.N])) == pytest.approx(1.0, abs=1e-12)


def test_three_by_two_frame():
    cmap = CompactificationMap([[1.0, 0.2], [math.sqrt(2), 1.0], [math.pi, -1.0]])
    cmap.check_invariants()
    assert cmap.N.shape == (3, 1)


def test_project_examples(map_sqrt2):
    np.testing.assert_array_equal(project(map_sqrt2, 0.0), [0.0, 0.0])
    np.testing.assert_allclose(project(map_sqrt2, 1.0), [1 / math.sqrt(3), math.sqrt(2 / 3)],
                               atol=1e-12)
    v = project(map_sqrt2, math.sqrt(3))
    # sqrt3 cos(theta) = 1 exactly, so the first coordinate sits at 0 on the circle
    assert circular_distance(v[0], 0.0) < 1e-12
    # sqrt3 sin(theta) = sqrt3 sqrt(2/3) = sqrt2
    assert v[1] == pytest.approx(math.sqrt(2) - 1, abs=1e-12)


def test_project_is_homomorphism(map_sqrt2):
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-1e3, 1e3, (2, 1000))
    lhs = project(map_sqrt2, x + y)
    rhs = project(map_sqrt2, x) + project(map_sqrt2, y)
    assert circular_distance(lhs, rhs).max() < 1e-10


def test_json_roundtrip(map_sqrt2):
    back = CompactificationMap.from_json(map_sqrt2.to_json())
    np.testing.assert_allclose(back.M, map_sqrt2.M, atol=1e-15)
    assert "N" not in map_sqrt2.to_json()


@pytest.mark.parametrize("M, bound, relation", [
    ([1, math.sqrt(2)], 1000, None),
    ([1, 2], 10, (2, -1)),
    ([1, 1], 10, (1, -1)),
])
def test_rational_independence(M, bound, relation):
    v = check_rational_independence(CompactificationMap(M), bound)
    assert v.relation == relation
    assert v.independent == (relation is None)
    assert v.bound == bound


def test_independence_oracle_sqrt2_convergents():
    # no q <= 1000 brings |q sqrt2 - p| under 1e-10; the best is near 1/(2 sqrt2 q)
    qs = np.arange(1, 1001)
    best = np.abs(qs * math.sqrt(2) - np.round(qs * math.sqrt(2))).min()
    assert best > 1e-4


def test_independence_enumeration_m3():
    v = check_rational_independence(CompactificationMap([1.0, 2.0, 3.0]), 3)
    k = np.array(v.relation)
    assert not v.independent
    assert abs(k @ np.array([1.0, 2.0, 3.0])) < 1e-12
    assert check_rational_independence(
        CompactificationMap([1.0, math.sqrt(2), math.sqrt(3)]), 6).independent


@pytest.mark.parametrize("gens, index", [([(1, -1)], 1), ([(2, 4)], 2), ([(0, 3)], 3),
                                         ([(2, 0, 0), (0, 3, 6)], 6), ([(1, 1), (1, -1)], 2)])
def test_projective_index(gens, index):
    assert projective_index(S(*gens)) == index


def test_rank_zero_rejected():
    with pytest.raises(LatticeError):
        projective_index(LatticeSubgroup(2, ()))


def test_dependent_generators_rejected():
    with pytest.raises(LatticeError):
        S((1, 2), (2, 4))


@pytest.mark.parametrize("gens, E", [([(1, -1)], [[1], [1]]), ([(0, 1)], [[1], [0]]),
                                     ([(2, -2)], [[1], [1]]), ([(2, 4)], [[2], [-1]])])
def test_annihilator_examples(gens, E):
    assert annihilator_basis(S(*gens)) == E


def test_annihilator_full_rank_is_empty():
    assert annihilator_basis(S((1, 0), (0, 1))) == [[], []]


def test_smith_diagonal_known():
    assert smith_diagonal([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


vectors = st.lists(st.integers(-30, 30), min_size=3, max_size=3).filter(any)


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_annihilator_exact_and_saturated(w):
    s = S(tuple(w))
    E = np.array(annihilator_basis(s), dtype=object)
    assert E.shape == (3, 2)
    assert all(v == 0 for v in E.T.dot(np.array(w, dtype=object)))
    # saturated: the 2x2 minors of E have gcd 1 exactly when E spans the full annihilator
    minors = [int(E[i, 0] * E[j, 1] - E[j, 0] * E[i, 1]) for i in range(3) for j in range(i + 1, 3)]
    assert math.gcd(*minors) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50))
def test_index_times_covolume(a, b):
    # rank 1: covolume of <w> is |w|, of its saturation |w| / gcd
    if a == b == 0:
        return
    w = (a, b)
    g = math.gcd(a, b)
    prim = (a // g, b // g)
    assert projective_index(S(w)) * math.hypot(*prim) == pytest.approx(math.hypot(*w))
    assert projective_index(S(w)) == g


unimodular = st.sampled_from([
    np.array([[1, 0], [0, 1]]), np.array([[0, 1], [1, 0]]), np.array([[1, 1], [0, 1]]),
    np.array([[2, 1], [1, 1]]), np.array([[1, -3], [0, 1]]), np.array([[5, 2], [2, 1]]),
])


@settings(max_examples=100, deadline=None)
@given(unimodular, st.integers(-20, 20), st.integers(-20, 20))
def test_annihilator_transforms_contragrediently(A, a, b):
    if a == b == 0:
        return
    w = np.array([a, b])
    E = np.array(annihilator_basis(S(tuple(int(v) for v in w))))
    EA = np.array(annihilator_basis(S(tuple(int(v) for v in A @ w))))
    # A^{-T} E spans the same rank-1 lattice as EA: equal up to sign
    Ainv_T = np.round(np.linalg.inv(A).T).astype(int)
    got = Ainv_T @ E
    assert (got == EA).all() or (got == -EA).all()
