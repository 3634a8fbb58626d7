import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklsolve.root_system import HyperplaneError, RootSystem, builtin

ORBIT_INVARIANT = [
    ("A1", {}, 1.0),
    ("A1^n", {"n": 2}, (1.0, 2.0)),
    ("A1^n", {"n": 3}, 0.5),
    ("A2", {}, 0.5),
    ("A2", {}, 2.0),
    ("B2", {}, (1.0, 2.0)),
    ("B2", {}, (0.5, 0.5)),
    ("I2", {"m": 5}, 1.0),
    ("I2", {"m": 6}, (0.5, 2.0)),
]


def random_points(rs, n, min_distance, radius=2.0, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x = rng.uniform(-radius, radius, rs.dimension)
        if rs.hyperplane_distance(x) >= min_distance:
            out.append(x)
    return np.array(out)


def test_reflect_examples():
    rs = builtin("A1^n", k=1, n=2)
    np.testing.assert_array_equal(rs.reflect(0, [3.0, 2.0]), [-3.0, 2.0])
    b2 = builtin("B2", k=1)
    np.testing.assert_allclose(b2.reflect(2, [2.0, 5.0]), [5.0, 2.0], atol=1e-15)
    # points on the hyperplane are fixed
    np.testing.assert_array_equal(b2.reflect(2, [1.5, 1.5]), [1.5, 1.5])


def test_reflect_bad_index():
    rs = builtin("B2", k=1)
    with pytest.raises(IndexError):
        rs.reflect(4, [1.0, 2.0])
    with pytest.raises(IndexError):
        rs.reflect(-1, [1.0, 2.0])


def test_weight_and_sqrt_weight_examples():
    rs = builtin("A1^n", k=1, n=2)
    assert rs.weight([2.0, 3.0]) == 36.0
    assert rs.sqrt_weight([2.0, 3.0]) == 6.0
    assert rs.weight([0.0, 3.0]) == 0.0
    zero = builtin("B2", k=0)
    assert zero.weight([0.3, -1.2]) == 1.0
    assert zero.sqrt_weight([0.3, -1.2]) == 1.0


def test_sqrt_weight_rank_one_scaled_root():
    # |<x, alpha>|^k with alpha = 2, x = 1.5: |3|^k
    half = RootSystem([[2.0]], [0.5])
    assert half.sqrt_weight([1.5]) == pytest.approx(np.sqrt(3.0), rel=1e-15)
    one = RootSystem([[2.0]], [1.0])
    assert one.sqrt_weight([1.5]) == pytest.approx(3.0, rel=1e-15)


def test_potential_q_examples():
    rs = builtin("A1^n", k=1, n=2)
    assert rs.potential_q([2.0, 3.0]) == pytest.approx(13 / 36, rel=1e-15)
    assert builtin("A2", k=0).potential_q([0.0, 0.0]) == 0.0
    for scale in (0.5, 1.0, 3.0):
        for k in (0.5, 2.0):
            rank1 = RootSystem([[scale]], [k])
            assert rank1.potential_q([1.7]) == pytest.approx(k**2 / 1.7**2, rel=1e-14)


def test_potential_q_on_hyperplane_raises():
    with pytest.raises(HyperplaneError):
        builtin("B2", k=1).potential_q([1.0, 1.0])


def test_hyperplane_distance_examples():
    rs = builtin("A1^n", k=1, n=2)
    assert rs.hyperplane_distance([2.0, 3.0]) == 2.0
    assert rs.hyperplane_distance([0.0, 3.0]) == 0.0
    assert builtin("B2", k=0).hyperplane_distance([1.0, 1.0]) == np.inf


def test_builtin_catalog():
    assert builtin("A1", k=1).rank_count == 1
    b2 = builtin("B2", k=(1, 2))
    assert b2.rank_count == 4
    np.testing.assert_array_equal(b2.multiplicities, [1, 1, 2, 2])
    with pytest.raises(ValueError):
        builtin("E8")
    with pytest.raises(ValueError):
        builtin("B2", k=(1, 2, 3))
    with pytest.raises(ValueError):
        builtin("I2")


def test_i2_4_matches_b2_reflections():
    i24 = builtin("I2", m=4, k=1)
    b2 = builtin("B2", k=1)

    def mats(rs):
        return sorted(tuple(np.round(rs.reflection_matrix(i), 12).ravel()) for i in range(rs.rank_count))

    assert mats(i24) == mats(b2)
    assert i24.validate().ok


@pytest.mark.parametrize("name,params,k", ORBIT_INVARIANT)
def test_builtins_closed_and_orbit_invariant(name, params, k):
    report = builtin(name, k=k, **params).validate()
    assert report.closed and report.orbit_invariant


def test_validate_detects_non_invariant_k():
    rs = RootSystem([[1, 0], [0, 1], [1, -1], [1, 1]], [1, 2, 1, 1])
    report = rs.validate()
    assert report.closed and not report.orbit_invariant


def test_constructor_invariants():
    with pytest.raises(ValueError):
        RootSystem([[0.0, 0.0]], [1.0])
    with pytest.raises(ValueError):
        RootSystem([[1.0, 0.0], [2.0, 0.0]], [1.0, 1.0])
    with pytest.raises(ValueError):
        RootSystem([[1.0, 0.0]], [-1.0])
    with pytest.raises(ValueError):
        RootSystem([[1.0, 0.0]], [1.0, 2.0])


def test_dunkl_lemma_orthogonal_roots_exact():
    rs = builtin("A1^n", k=(1.0, 3.0), n=2)
    pts = random_points(rs, 50, 0.05)
    assert np.all(rs.dunkl_lemma_residual(pts) == 0.0)


@pytest.mark.parametrize("name,params,k", ORBIT_INVARIANT)
def test_dunkl_lemma_vanishes(name, params, k):
    rs = builtin(name, k=k, **params)
    pts = random_points(rs, 100, 0.1)
    assert np.max(np.abs(rs.dunkl_lemma_residual(pts))) <= 1e-10


def test_dunkl_lemma_fails_without_orbit_invariance():
    # e1 and e2 share an orbit in B2; give them different multiplicities
    rs = RootSystem([[1, 0], [0, 1], [1, -1], [1, 1]], [1, 2, 1, 1])
    pts = random_points(rs, 20, 0.1)
    assert np.min(np.abs(rs.dunkl_lemma_residual(pts))) > 1e-3


coords = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(x=st.tuples(coords, coords), idx=st.sampled_from(ORBIT_INVARIANT[3:]), root=st.integers(0, 3))
def test_reflection_involution_and_invariance(x, idx, root):
    name, params, k = idx
    rs = builtin(name, k=k, **params)
    i = root % rs.rank_count
    x = np.array(x)
    back = rs.reflect(i, rs.reflect(i, x))
    np.testing.assert_allclose(back, x, rtol=1e-14, atol=1e-14 * max(1, np.abs(x).max()))
    y = rs.reflect(i, x)
    # on a hyperplane the weight vanishes and only roundoff remains
    if rs.hyperplane_distance(x) > 1e-3:
        assert rs.weight(y) == pytest.approx(rs.weight(x), rel=1e-10)
        assert rs.potential_q(y) == pytest.approx(rs.potential_q(x), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(x=st.tuples(coords, coords), c=st.floats(0.1, 10))
def test_potential_q_root_rescaling(x, c):
    rs = builtin("B2", k=(0.5, 2.0))
    x = np.array(x)
    if rs.hyperplane_distance(x) < 1e-3:
        return
    scaled = RootSystem(rs.positive_roots * c, rs.multiplicities)
    assert scaled.potential_q(x) == pytest.approx(rs.potential_q(x), rel=1e-12)


def test_vectorized_matches_pointwise():
    rs = builtin("I2", m=5, k=1.0)
    pts = random_points(rs, 10, 0.1)
    vec = rs.potential_q(pts)
    for p, v in zip(pts, vec):
        assert rs.potential_q(p) == pytest.approx(v, rel=1e-14)
