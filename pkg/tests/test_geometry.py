import numpy as np
import pytest

from dunklsolve.geometry import (
    INTERIOR,
    RING,
    AdmissibilityError,
    Ball,
    Box,
    EmptyInteriorError,
    Mask,
    check_admissible,
    discretize,
    reflected_images,
)
from dunklsolve.root_system import builtin

B2_BOX = Box([2.0, 0.5], [3.0, 1.0])


def test_box_unit_square_half_step():
    g = discretize(Box([0, 0], [1, 1]), 0.5)
    np.testing.assert_array_equal(g.interior_points, [[0.5, 0.5]])
    assert g.ring.size == 8


def test_box_interval_quarter_step():
    g = discretize(Box([0.0], [1.0]), 0.25)
    np.testing.assert_allclose(g.interior_points.ravel(), [0.25, 0.5, 0.75])
    np.testing.assert_allclose(sorted(g.ring_points.ravel()), [0.0, 1.0])


def test_empty_interior():
    with pytest.raises(EmptyInteriorError):
        discretize(Ball([0.3, 0.3], 0.1), 1.0)


def test_box_must_align_with_h():
    with pytest.raises(ValueError):
        discretize(Box([0, 0], [1, 1]), 0.3)
    with pytest.raises(ValueError):
        discretize(Box([0, 0], [1, 1]), 0.0)


def test_domain_spec_invariants():
    with pytest.raises(ValueError):
        Box([0, 1], [1, 1])
    with pytest.raises(ValueError):
        Box([0, 0], [np.inf, 1])
    with pytest.raises(ValueError):
        Ball([0, 0], 0.0)


@pytest.mark.parametrize(
    "domain,h",
    [
        (B2_BOX, 1 / 16),
        (Ball([2.5, 0.8], 0.4), 1 / 32),
        (Mask(lambda x: x[:, 0] + x[:, 1] < 3.4, [2.0, 0.5], [3.0, 1.0]), 1 / 32),
    ],
)
def test_grid_invariants(domain, h):
    g = discretize(domain, h)
    flat = g.labels.ravel()
    for axis in range(g.dimension):
        for step in (-1, 1):
            nb = g.neighbor(g.interior, axis, step)
            assert np.all(nb >= 0)
            assert np.all(np.isin(flat[nb], (INTERIOR, RING)))
    assert np.all(domain.contains(g.interior_points))
    assert not np.any(domain.contains(g.ring_points))
    # every ring node touches an interior node (3^d neighbourhood)
    inside = set(g.interior.tolist())
    idx = np.array(np.unravel_index(g.ring, g.shape)).T
    for i in idx:
        found = False
        for off in np.ndindex(*(3,) * g.dimension):
            j = i + np.array(off) - 1
            if np.all(j >= 0) and np.all(j < g.shape):
                found |= int(np.ravel_multi_index(tuple(j), g.shape)) in inside
        assert found


def test_box_ring_on_boundary():
    g = discretize(B2_BOX, 1 / 16)
    r = g.ring_points
    on_face = np.isclose(r, B2_BOX.lower).any(axis=1) | np.isclose(r, B2_BOX.upper).any(axis=1)
    assert on_face.all()


def test_refinement_quadruples_nodes():
    for h in (1 / 8, 1 / 16, 1 / 32):
        n1 = discretize(B2_BOX, h).interior.size
        n2 = discretize(B2_BOX, h / 2).interior.size
        assert n2 >= 4 * n1


def test_locate():
    g = discretize(B2_BOX, 1 / 4)
    assert np.allclose(g.interior_points[g.locate([2.5, 0.75])], [2.5, 0.75])
    with pytest.raises(ValueError):
        g.locate([2.6, 0.75])


def test_admissible_b2_box():
    rep = check_admissible(B2_BOX, builtin("B2", k=(1, 1)), h=1 / 32)
    assert rep.passed and rep.sign_constant and rep.reflections_disjoint
    # closest hyperplane is x2 = 0 at distance 0.5
    assert rep.min_distance == pytest.approx(0.5)
    assert rep.delta == pytest.approx(1 / 16)


@pytest.mark.parametrize(
    "box",
    [
        Box([-1, 2], [1, 3]),  # crosses x1 = 0
        Box([0, 1], [1, 2]),  # touches x1 = 0 and x1 = x2
        Box([1, 0], [2, 1]),  # touches x2 = 0
        Box([0.5, 0.2], [1.5, 1.0]),  # crosses x1 = x2
    ],
)
def test_crossing_or_touching_rejected(box):
    rep = check_admissible(box, builtin("B2", k=(1, 1)), h=1 / 16)
    assert not rep.passed
    assert rep.messages


def test_close_box_fails_delta():
    box = Box([2.0, 0.01], [3.0, 0.5])
    rep = check_admissible(box, builtin("B2", k=(1, 1)), delta=0.1)
    assert rep.sign_constant and not rep.passed
    assert rep.min_distance == pytest.approx(0.01)


def test_trivial_k_passes_vacuously():
    rep = check_admissible(Box([-1, -1], [1, 1]), builtin("B2", k=0), h=0.1)
    assert rep.passed


def test_inactive_roots_ignored():
    # k_short = 0 removes x1 = 0 and x2 = 0 from the picture
    rep = check_admissible(Box([-1, 2], [1, 3]), builtin("B2", k=(0, 1)), h=1 / 16)
    assert rep.passed


def test_reflected_images_examples():
    g = discretize(Box([1.0], [2.0]), 0.5)
    img = reflected_images(g, builtin("A1", k=1))
    np.testing.assert_allclose(img[g.locate([1.5]), 0], [-1.5])

    g = discretize(B2_BOX, 1 / 4)
    img = reflected_images(g, builtin("A1^n", k=1, n=2))
    np.testing.assert_allclose(img[g.locate([2.0 + 0.25, 0.75]), 1], [2.25, -0.75])

    b2 = builtin("B2", k=1)
    img = reflected_images(g, b2)
    np.testing.assert_allclose(img[g.locate([2.5, 0.75]), 2], [0.75, 2.5], atol=1e-15)


@pytest.mark.parametrize("rs", [builtin("B2", k=(1, 1)), builtin("B2", k=(0.5, 2)), builtin("A1^n", k=1, n=2)])
def test_images_outside_domain(rs):
    g = discretize(B2_BOX, 1 / 32)
    img = reflected_images(g, rs)
    assert not B2_BOX.contains(img.reshape(-1, 2)).any()


def test_reflected_images_raises_on_inadmissible():
    box = Box([-1.0, 1.0], [1.0, 2.0])
    g = discretize(box, 0.25)
    with pytest.raises(AdmissibilityError):
        reflected_images(g, builtin("A1^n", k=1, n=2))
