import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklsolve.convergence import empirical_orders
from dunklsolve.elliptic_solver import (
    assemble,
    green_apply,
    green_row,
    harmonic_measure_row,
    solve_schrodinger,
)
from dunklsolve.geometry import Ball, Box, discretize
from dunklsolve.root_system import builtin

B2_BOX = Box([2.0, 0.5], [3.0, 1.0])
B2 = builtin("B2", k=(1, 1))


def b2_operator(h=1 / 16, rs=B2):
    return assemble(discretize(B2_BOX, h), rs)


def test_tridiagonal_1d():
    op = assemble(discretize(Box([0.0], [1.0]), 0.25))
    expected = np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]) / 0.25**2
    np.testing.assert_array_equal(op.matrix.toarray(), expected)
    shifted = assemble(op.grid, q=3.0)
    np.testing.assert_array_equal(shifted.matrix.toarray(), expected + 3 * np.eye(3))


def test_b2_diagonal_is_stencil_plus_potential():
    h = 1 / 8
    op = b2_operator(h)
    x = op.grid.interior_points
    # q by hand: short roots |alpha| = 1, long roots |alpha|^2 = 2, k = 1
    q = 1 / x[:, 0] ** 2 + 1 / x[:, 1] ** 2 + 2 / (x[:, 0] - x[:, 1]) ** 2 + 2 / (x[:, 0] + x[:, 1]) ** 2
    np.testing.assert_allclose(op.matrix.diagonal(), 4 / h**2 + q, rtol=1e-14)


def test_linear_data_reproduced():
    op = assemble(discretize(B2_BOX, 1 / 16))
    f = lambda x: 3 * x[:, 0] - x[:, 1] + 0.5
    u = solve_schrodinger(op, f)
    assert np.max(np.abs(u.interior - f(op.grid.interior_points))) <= 1e-10
    assert u.residual <= 1e-10


def test_zero_data_zero_solution():
    u = solve_schrodinger(b2_operator())
    assert np.all(u.interior == 0)
    assert np.all(green_apply(b2_operator(), 0.0).interior == 0)


def test_poisson_1d_exact_at_nodes():
    op = assemble(discretize(Box([0.0], [1.0]), 1 / 64))
    u = solve_schrodinger(op, 0.0, 1.0)
    x = op.grid.interior_points[:, 0]
    np.testing.assert_allclose(u.interior, x * (1 - x) / 2, atol=1e-12)


def test_green_vanishes_on_ring_and_is_positive():
    op = b2_operator()
    rng = np.random.default_rng(0)
    u = green_apply(op, rng.uniform(0, 1, op.n_interior))
    assert np.all(u.ring == 0)
    assert np.all(u.interior >= 0)
    assert np.all(green_row(op, [2.5, 0.75]) > 0)


def test_green_symmetry():
    op = b2_operator()
    rng = np.random.default_rng(1)
    g1, g2 = rng.normal(size=(2, op.n_interior))
    a = green_apply(op, g1).interior @ g2
    b = g1 @ green_apply(op, g2).interior
    assert abs(a - b) <= 1e-9 * max(abs(a), abs(b))


def test_resolvent_identity():
    grid = discretize(B2_BOX, 1 / 16)
    op_q = assemble(grid, B2)
    op_0 = assemble(grid)
    g = np.cos(grid.interior_points).sum(axis=1)
    gq = green_apply(op_q, g).interior
    rhs = green_apply(op_0, g).interior - green_apply(op_0, op_q.q * gq).interior
    assert np.max(np.abs(gq - rhs)) <= 1e-9


def test_monotone_in_q():
    grid = discretize(B2_BOX, 1 / 16)
    g = np.ones(grid.interior.size)
    assert np.all(green_apply(assemble(grid, B2), g).interior <= green_apply(assemble(grid), g).interior)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.floats(0, 3))
def test_maximum_principle(seed, k):
    rng = np.random.default_rng(seed)
    op = b2_operator(1 / 8, builtin("B2", k=(k, 1.0)))
    f = rng.normal(size=op.grid.ring.size)
    u = solve_schrodinger(op, f).interior
    assert np.all(u <= max(0.0, f.max()) + 1e-12)
    assert np.all(u >= min(0.0, f.min()) - 1e-12)


def manufactured(rs, h):
    # u = exp(x1) sin(2 x2) + x1 x2^3, g = -(Lap u - q u)
    u = lambda x: np.exp(x[:, 0]) * np.sin(2 * x[:, 1]) + x[:, 0] * x[:, 1] ** 3
    lap = lambda x: -3 * np.exp(x[:, 0]) * np.sin(2 * x[:, 1]) + 6 * x[:, 0] * x[:, 1]
    op = assemble(discretize(B2_BOX, h), rs)
    x = op.grid.interior_points
    sol = solve_schrodinger(op, u, -(lap(x) - op.q * u(x)))
    return np.max(np.abs(sol.interior - u(x)))


@pytest.mark.parametrize("rs", [builtin("B2", k=0), B2, builtin("B2", k=(0.5, 2))], ids=["k0", "k11", "k052"])
def test_manufactured_second_order(rs):
    errs = [manufactured(rs, h) for h in (1 / 8, 1 / 16, 1 / 32)]
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5
    assert np.all(empirical_orders(errs) >= 1.8)


def test_harmonic_row_sums():
    grid = discretize(B2_BOX, 1 / 16)
    w0 = harmonic_measure_row(assemble(grid), [2.5, 0.75])
    assert abs(w0.sum() - 1) <= 1e-10
    assert w0.min() >= -1e-12
    wq = harmonic_measure_row(assemble(grid, B2), [2.5, 0.75])
    assert wq.sum() < 1 and wq.min() >= -1e-12


def test_harmonic_row_1d_midpoint():
    op = assemble(discretize(Box([0.0], [1.0]), 0.25))
    w = harmonic_measure_row(op, [0.5])
    order = np.argsort(op.grid.ring_points[:, 0])
    np.testing.assert_allclose(w[order], [0.5, 0.5], atol=1e-14)


def test_harmonic_row_matches_indicator_solves():
    op = b2_operator(1 / 8)
    j = op.grid.locate([2.5, 0.75])
    w = harmonic_measure_row(op, j)
    for y in range(0, op.grid.ring.size, 5):
        e = np.zeros(op.grid.ring.size)
        e[y] = 1.0
        assert solve_schrodinger(op, e).interior[j] == pytest.approx(w[y], abs=1e-13)


def test_ball_domain_solves():
    op = assemble(discretize(Ball([2.5, 0.8], 0.3), 1 / 32), B2)
    u = solve_schrodinger(op, 1.0)
    assert np.all((u.interior > 0) & (u.interior < 1))


def test_nan_input_rejected():
    op = b2_operator(1 / 8)
    with pytest.raises(ValueError):
        solve_schrodinger(op, np.nan)
    with pytest.raises(ValueError):
        solve_schrodinger(op, np.ones(3))
