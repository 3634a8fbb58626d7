"""The Dunkl Dirichlet problem: two solvers, a 1-D oracle, and the harmonic measure.

``solve_reduction`` conjugates by ``sqrt(w_k)`` and solves two Schrödinger
problems with potential ``q``::

    h = ( H^{Lap-q}(f sqrt(w)) + G^{Lap-q}(sqrt(w) Nf) ) / sqrt(w)

``solve_direct`` discretizes the Dunkl Laplacian itself, with central
differences for the drift and the exterior values ``f(sigma_alpha x)``
moved to the right-hand side.  The two share no assembly code beyond
the grid, so their agreement is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .convergence import empirical_orders, restrict
from .dunkl_core import ScalarField, apply_dunkl_laplacian
from .elliptic_solver import (
    DEFAULT_RTOL,
    SolutionField,
    _solve,
    assemble,
    harmonic_measure_row,
    green_row,
    solve_schrodinger,
    stencil_links,
)
from .expr import Expression
from .geometry import (
    AdmissibilityError,
    GridDomain,
    check_admissible,
    discretize,
    reflected_images,
)
from .root_system import RootSystem

__all__ = [
    "boundary_data",
    "DunklSolution",
    "DirectSystem",
    "HarmonicMeasure",
    "prepare_grid",
    "solve_reduction",
    "solve_direct",
    "assemble_direct",
    "classical_solve",
    "oracle_1d",
    "harmonic_measure",
    "weak_residual",
    "bump",
    "smoothness_probe",
]


def boundary_data(f, domain) -> ScalarField:
    """Wrap ``f`` as a field declared on the complement of ``domain``.

    Accepts a :class:`ScalarField`, an expression string or
    :class:`Expression`, a vectorized callable, or a constant.
    """
    d = domain.dimension
    if isinstance(f, ScalarField):
        return f.excluding(domain)
    if isinstance(f, (str, Expression)):
        return ScalarField.from_expression(f, d, excluded=domain)
    if callable(f):
        return ScalarField(f, d, excluded=domain)
    return ScalarField.constant(float(f), d, excluded=domain)


def prepare_grid(domain, rs: RootSystem, h: float, delta: float | None = None):
    """Discretize, check admissibility (``delta`` defaults to ``2h``), reflect nodes."""
    if rs.dimension != domain.dimension:
        raise ValueError(
            f"root system has dimension {rs.dimension}, domain {domain.dimension}"
        )
    report = check_admissible(domain, rs, delta=delta, h=h)
    if not report.passed:
        raise AdmissibilityError("domain is not admissible:\n" + report.summary(), report)
    grid = discretize(domain, h)
    return grid, reflected_images(grid, rs), report


@dataclass(frozen=True, eq=False)
class DunklSolution:
    """Solution on grid nodes; the Schrödinger ingredients are kept for ``reduction``."""

    field: SolutionField
    method: str
    harmonic_part: SolutionField | None = None
    green_part: SolutionField | None = None
    meta: dict = field(default_factory=dict)

    @property
    def grid(self) -> GridDomain:
        return self.field.grid

    @property
    def interior(self) -> np.ndarray:
        return self.field.interior

    @property
    def ring(self) -> np.ndarray:
        return self.field.ring

    @property
    def residual(self) -> float:
        return self.field.residual

    def at(self, point) -> float:
        return self.field.at(point)


def _reflected_data(f, images):
    n, m, d = images.shape
    if m == 0:
        return np.zeros((n, 0))
    vals = np.asarray(f(images.reshape(n * m, d)), dtype=float).reshape(n, m)
    if not np.all(np.isfinite(vals)):
        raise ValueError("boundary data is not finite at a reflected node")
    return vals


def solve_reduction(domain, rs: RootSystem, f, h: float, delta=None, rtol=DEFAULT_RTOL) -> DunklSolution:
    """Solve through the Schrödinger reduction with potential ``q``."""
    f = boundary_data(f, domain)
    grid, images, _ = prepare_grid(domain, rs, h, delta)
    op = assemble(grid, rs)
    xi, xr = grid.interior_points, grid.ring_points
    sw_i, sw_r = rs.sqrt_weight(xi), rs.sqrt_weight(xr)
    f_ring = f(xr)
    nf = np.sum(rs.n_coefficients(xi) * _reflected_data(f, images), axis=1)
    hp = solve_schrodinger(op, f_ring * sw_r, None, rtol)
    gp = solve_schrodinger(op, None, sw_i * nf, rtol)
    u = (hp.interior + gp.interior) / sw_i
    meta = {"h": grid.h, "n_interior": grid.interior.size, "n_ring": grid.ring.size}
    sol = SolutionField(grid, u, f_ring, max(hp.residual, gp.residual), meta)
    return DunklSolution(sol, "reduction", hp, gp, {"operator": op})


def classical_solve(domain, f, h: float, rtol=DEFAULT_RTOL) -> SolutionField:
    """Plain Laplace Dirichlet problem on the same grid, for ``k = 0`` comparisons."""
    grid = discretize(domain, h)
    f = boundary_data(f, domain)
    return solve_schrodinger(assemble(grid), f, None, rtol)


@dataclass(frozen=True, eq=False)
class DirectSystem:
    """``A u = B f_ring + sum_alpha C[:, alpha] f(sigma_alpha x)`` for the Dunkl Laplacian."""

    grid: GridDomain
    matrix: sp.csr_matrix
    coupling: sp.csr_matrix
    reflection_coef: np.ndarray
    images: np.ndarray
    _lu: list = field(default_factory=list, repr=False)

    def factor(self):
        if not self._lu:
            self._lu.append(spla.splu(self.matrix.tocsc()))
        return self._lu[0]


def assemble_direct(grid: GridDomain, rs: RootSystem, images=None) -> DirectSystem:
    """Strong-form discretization of ``-D_k`` on interior nodes.

    Neighbor in direction ``s e_i`` gets ``-(1/h^2 + s b_i / h)`` with drift
    ``b = sum k(alpha) alpha / <x, alpha>``; the diagonal is
    ``2d/h^2 + sum |alpha|^2 k(alpha) / <x, alpha>^2``.
    """
    if images is None:
        images = reflected_images(grid, rs)
    x = grid.interior_points
    n, d, h = x.shape[0], grid.dimension, grid.h
    a = rs.positive_roots[rs.active]
    k = rs.multiplicities[rs.active]
    coef = rs.n_coefficients(x)
    drift = (k / rs.pairings(x)) @ a  # (n, d)
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [2 * d / h**2 + coef.sum(axis=1)]
    brows, bcols, bvals = [], [], []
    for axis, step, r, ci, cr in stencil_links(grid):
        c = -(1.0 / h**2 + step * drift[:, axis] / h)
        m = ci >= 0
        rows.append(r[m])
        cols.append(ci[m])
        vals.append(c[m])
        brows.append(r[~m])
        bcols.append(cr[~m])
        bvals.append(-c[~m])
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    B = sp.csr_matrix(
        (np.concatenate(bvals), (np.concatenate(brows), np.concatenate(bcols))),
        shape=(n, grid.ring.size),
    )
    return DirectSystem(grid, A, B, coef, images)


def solve_direct(domain, rs: RootSystem, f, h: float, delta=None, rtol=DEFAULT_RTOL) -> DunklSolution:
    """Solve the nonsymmetric strong-form discretization of the Dunkl Laplacian."""
    f = boundary_data(f, domain)
    grid, images, _ = prepare_grid(domain, rs, h, delta)
    system = assemble_direct(grid, rs, images)
    f_ring = np.asarray(f(grid.ring_points), dtype=float)
    if not np.all(np.isfinite(f_ring)):
        raise ValueError("boundary data is not finite on the ring")
    rhs = system.coupling @ f_ring + np.sum(
        system.reflection_coef * _reflected_data(f, images), axis=1
    )
    u, res = _solve(system.matrix, system.factor().solve, rhs, rtol)
    meta = {"h": grid.h, "n_interior": grid.interior.size, "n_ring": grid.ring.size}
    sol = SolutionField(grid, u, f_ring, res, meta)
    return DunklSolution(sol, "direct", meta={"system": system})


# -- 1-D oracle -----------------------------------------------------------------------


def _eval_1d(f, x):
    return np.asarray(f(x[:, None]), dtype=float).reshape(-1)


def _ode_solve(k, a, b, f, n):
    x = np.linspace(a, b, n + 1)
    h = (b - a) / n
    xi = x[1:-1]
    lower = 1 / h**2 - k / (h * xi)
    upper = 1 / h**2 + k / (h * xi)
    diag = -2 / h**2 - k / xi**2
    rhs = -k / xi**2 * _eval_1d(f, -xi)
    ua, ub = _eval_1d(f, np.array([a, b]))
    rhs[0] -= lower[0] * ua
    rhs[-1] -= upper[-1] * ub
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    u = np.empty(n + 1)
    u[0], u[-1] = ua, ub
    u[1:-1] = sla.solve_banded((1, 1), ab, rhs)
    return x, u


def oracle_1d(k: float, interval, f, n: int):
    """Reference solution of the rank-one problem on ``(a, b)``, ``0 < a < b``.

    Solves ``u'' + (2k/x) u' - k (u - f(-x)) / x^2 = 0`` with ``u = f`` at
    the endpoints on ``n`` and ``2n`` intervals and Richardson-extrapolates
    to fourth order.  Returns node coordinates (``n + 1``) and values.
    ``f`` is called on ``(m, 1)`` arrays.
    """
    a, b = map(float, interval)
    if not 0 < a < b:
        raise ValueError("oracle_1d needs 0 < a < b")
    if n < 64:
        raise ValueError("oracle_1d needs n >= 64")
    x, u1 = _ode_solve(k, a, b, f, n)
    _, u2 = _ode_solve(k, a, b, f, 2 * n)
    return x, (4 * u2[::2] - u1) / 3


# -- harmonic measure -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HarmonicMeasure:
    """Discrete harmonic measure of the Dunkl problem at one interior node.

    ``boundary_weights`` sit on ring nodes; ``masses[z, j]`` sits at the
    reflected point ``images[z, j]`` (interior node ``z`` reflected in the
    ``j``-th active root) and equals ``densities * h^d``.  The ``direct_*``
    fields hold the independent measure of the strong-form solver.
    """

    grid: GridDomain
    point: np.ndarray
    node: int
    sqrt_weight_x: float
    schrodinger_weights: np.ndarray
    green: np.ndarray
    boundary_weights: np.ndarray
    masses: np.ndarray
    images: np.ndarray
    reflection_coef: np.ndarray
    direct_boundary_weights: np.ndarray
    direct_masses: np.ndarray
    roots: np.ndarray

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.grid.h**self.grid.dimension

    @property
    def boundary_mass(self) -> float:
        return float(self.boundary_weights.sum())

    @property
    def reflected_mass(self) -> np.ndarray:
        """Mass carried to each reflected copy of ``D``."""
        return self.masses.sum(axis=0)

    @property
    def total_mass(self) -> float:
        return self.boundary_mass + float(self.masses.sum())

    @property
    def direct_total_mass(self) -> float:
        return float(self.direct_boundary_weights.sum() + self.direct_masses.sum())

    @property
    def min_weight(self) -> float:
        vals = np.concatenate([self.boundary_weights, self.masses.ravel()])
        return float(vals.min())

    def pair(self, f) -> float:
        """``integral f dH(x, .)`` over the support."""
        xr = self.grid.ring_points
        out = self.boundary_weights @ np.asarray(f(xr), dtype=float)
        return float(out + np.sum(self.masses * _reflected_data(f, self.images)))

    def decomposition_residual(self, rs: RootSystem, tests: Sequence[Callable] | None = None) -> float:
        """Weak residual of the measure identity, tested against smooth functions.

        The left side rescales the strong-form solver's measure by
        ``sqrt(w(x)) / sqrt(w(y))``; the right side is the Schrödinger
        harmonic measure plus the reflected Green densities.  Returns the
        largest absolute discrepancy over ``tests`` (default: monomials of
        degree <= 2).
        """
        if tests is None:
            tests = _monomials(self.grid.dimension, 2)
        xr = self.grid.ring_points
        xi = self.grid.interior_points
        sw_r = rs.sqrt_weight(xr)
        sw_img = rs.sqrt_weight(xi)[:, None]  # w is reflection invariant
        worst = 0.0
        for phi in tests:
            pr = np.asarray(phi(xr), dtype=float)
            pm = _reflected_data(phi, self.images)
            lhs = self.sqrt_weight_x * (
                self.direct_boundary_weights @ (pr / sw_r)
                + np.sum(self.direct_masses * pm / sw_img)
            )
            rhs = self.schrodinger_weights @ pr + np.sum(
                self.green[:, None] * self.reflection_coef * pm
            )
            worst = max(worst, abs(lhs - rhs))
        return worst

    def as_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "h": self.grid.h,
            "total_mass": self.total_mass,
            "boundary_mass": self.boundary_mass,
            "reflected_mass": self.reflected_mass.tolist(),
            "min_weight": self.min_weight,
            "direct_total_mass": self.direct_total_mass,
        }


def _monomials(d, degree):
    import itertools

    out = [lambda x: np.ones(len(np.atleast_2d(x)))]
    for deg in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(d), deg):
            out.append(lambda x, c=combo: np.prod(np.atleast_2d(x)[:, list(c)], axis=1))
    return out


def harmonic_measure(domain, rs: RootSystem, x, h: float, delta=None, rtol=DEFAULT_RTOL) -> HarmonicMeasure:
    """Discrete harmonic measure at the interior node ``x``.

    Boundary weights are the Schrödinger harmonic measure rescaled by
    ``sqrt(w(y)) / sqrt(w(x))``; reflected masses at ``sigma_alpha z`` are
    ``sqrt(w(z)) / sqrt(w(x)) * |alpha|^2 k / <z, alpha>^2 * (A^-1)_{xz}``.
    """
    grid, images, _ = prepare_grid(domain, rs, h, delta)
    op = assemble(grid, rs)
    j = grid.locate(x)
    xi, xr = grid.interior_points, grid.ring_points
    sw_x = float(rs.sqrt_weight(xi[j]))
    P = harmonic_measure_row(op, j, rtol)
    G = green_row(op, j, rtol)
    coef = rs.n_coefficients(xi)
    bw = P * rs.sqrt_weight(xr) / sw_x
    masses = (G * rs.sqrt_weight(xi) / sw_x)[:, None] * coef

    system = assemble_direct(grid, rs, images)
    e = np.zeros(grid.interior.size)
    e[j] = 1.0
    At = system.matrix.T.tocsr()
    v, _ = _solve(At, spla.splu(At.tocsc()).solve, e, rtol)
    return HarmonicMeasure(
        grid=grid,
        point=xi[j],
        node=j,
        sqrt_weight_x=sw_x,
        schrodinger_weights=P,
        green=G,
        boundary_weights=bw,
        masses=masses,
        images=images,
        reflection_coef=coef,
        direct_boundary_weights=system.coupling.T @ v,
        direct_masses=v[:, None] * system.reflection_coef,
        roots=rs.active.copy(),
    )


# -- diagnostics ------------------------------------------------------------------------


def bump(lower, upper, power: int = 4) -> ScalarField:
    """``prod ((x_i - a_i)(b_i - x_i))^power`` on the box, zero outside.

    ``C^(power-1)`` with compact support; analytic gradient and Laplacian.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    p = power
    scale = ((hi - lo) / 2) ** (2 * p)

    def parts(x):
        x = np.atleast_2d(x)
        inside = np.all((x > lo) & (x < hi), axis=1)
        s = np.where(inside[:, None], (x - lo) * (hi - x), 0.0)
        ds = (hi - x) - (x - lo)
        return inside, s, ds

    def val(x):
        inside, s, _ = parts(x)
        return np.where(inside, np.prod(s**p / scale, axis=1), 0.0)

    def grad(x):
        inside, s, ds = parts(x)
        g = np.zeros_like(np.atleast_2d(x), dtype=float)
        f = s**p / scale
        for i in range(lo.size):
            fi = p * s[:, i] ** (p - 1) * ds[:, i] / scale[i]
            g[:, i] = fi * np.prod(np.delete(f, i, axis=1), axis=1)
        return np.where(inside[:, None], g, 0.0)

    def lap(x):
        inside, s, ds = parts(x)
        f = s**p / scale
        out = np.zeros(len(s))
        for i in range(lo.size):
            fii = (
                p * (p - 1) * s[:, i] ** (p - 2) * ds[:, i] ** 2 - 2 * p * s[:, i] ** (p - 1)
            ) / scale[i]
            out += fii * np.prod(np.delete(f, i, axis=1), axis=1)
        return np.where(inside, out, 0.0)

    return ScalarField(val, lo.size, grad=grad, laplacian=lap, label=f"bump{lo.tolist()}-{hi.tolist()}")


def weak_residual(solution: DunklSolution, rs: RootSystem, f, phi: ScalarField) -> float:
    """``integral h D_k(phi) w dx`` by the midpoint rule on the grid.

    The integral over the reflected copies of ``D`` is folded back into ``D``
    by the change of variables ``y = sigma_alpha z``, which turns it into
    ``phi N f``.  ``phi`` must vanish outside ``D``.
    """
    grid = solution.grid
    f = boundary_data(f, grid.domain)
    x = grid.interior_points
    images = reflected_images(grid, rs)
    nf = np.sum(rs.n_coefficients(x) * _reflected_data(f, images), axis=1)
    integrand = (solution.interior * apply_dunkl_laplacian(rs, phi, x) + phi(x) * nf) * rs.weight(x)
    return float(np.sum(integrand) * grid.h**grid.dimension)


def _second_differences(grid, values, points):
    """Discrete Laplacian of an interior field at ``points``, using ring values."""
    full = np.full(grid.labels.size, np.nan)
    full[grid.interior] = values[0]
    full[grid.ring] = values[1]
    full = full.reshape(grid.shape)
    idx = np.rint((points - grid.origin) / grid.h).astype(np.int64)
    out = -2.0 * grid.dimension * full[tuple(idx.T)]
    for ax in range(grid.dimension):
        for s in (-1, 1):
            j = idx.copy()
            j[:, ax] += s
            out = out + full[tuple(j.T)]
    return out / grid.h**2


def smoothness_probe(domain, rs: RootSystem, f_smooth, f_kinked, hs: Sequence[float], delta=None) -> dict:
    """Observed self-convergence orders of the solution and its second differences.

    For each data set, successive levels are compared at the interior nodes
    of the coarsest grid (the ladder must be nested).  Qualitative only.
    """
    hs = list(hs)
    coarse, _, _ = prepare_grid(domain, rs, hs[0], delta if delta is not None else 2 * hs[-1])
    pts = coarse.interior_points
    report = {"h": hs}
    for name, f in (("smooth", f_smooth), ("kinked", f_kinked)):
        sols = [solve_reduction(domain, rs, f, h, delta=delta if delta is not None else 2 * hs[-1]) for h in hs]
        vals = [restrict(s.interior, s.grid, pts) for s in sols]
        lap = [_second_differences(s.grid, (s.interior, s.ring), pts) for s in sols]
        du = [float(np.max(np.abs(vals[i] - vals[i + 1]))) for i in range(len(hs) - 1)]
        dl = [float(np.nanmax(np.abs(lap[i] - lap[i + 1]))) for i in range(len(hs) - 1)]
        report[name] = {
            "solution_diffs": du,
            "solution_orders": empirical_orders(du, hs[:-1]).tolist() if len(du) > 1 else [],
            "second_difference_diffs": dl,
            "second_difference_orders": empirical_orders(dl, hs[:-1]).tolist() if len(dl) > 1 else [],
        }
    return report
