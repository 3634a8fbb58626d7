"""Discrete Dirichlet problems for the Schrödinger operator ``Lap - q``.

The operator is the standard ``2d + 1`` point stencil on a
:class:`~dunklsolve.geometry.GridDomain`.  Unknowns live on interior nodes;
ring values enter through a coupling matrix, so that

    A u = B f_ring + g

with ``A = -(Lap_h - q)`` symmetric positive definite and ``B >= 0``
entrywise.  ``A^-1`` is the discrete Green operator and ``A^-1 B`` the
discrete harmonic extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import INTERIOR, RING, GridDomain
from .root_system import HyperplaneError, RootSystem

__all__ = [
    "DiscreteOperator",
    "SolutionField",
    "SolverError",
    "assemble",
    "solve_schrodinger",
    "green_apply",
    "harmonic_measure_row",
    "green_row",
    "interior_values",
    "ring_values",
    "DEFAULT_RTOL",
]

DEFAULT_RTOL = 1e-10


class SolverError(RuntimeError):
    pass


def stencil_links(grid: GridDomain):
    """Axis links out of interior nodes, one entry per direction.

    Each entry is ``(axis, step, rows, interior_pos, ring_pos)``: ``rows``
    enumerates interior positions, and the neighbor of row ``i`` is interior
    position ``interior_pos[i]`` or, when that is ``-1``, ring position
    ``ring_pos[i]``.
    """
    pos_int = -np.ones(grid.labels.size, dtype=np.int64)
    pos_int[grid.interior] = np.arange(grid.interior.size)
    pos_ring = -np.ones(grid.labels.size, dtype=np.int64)
    pos_ring[grid.ring] = np.arange(grid.ring.size)
    flat = grid.labels.ravel()
    links = []
    rows = np.arange(grid.interior.size)
    for axis in range(grid.dimension):
        for step in (-1, 1):
            nb = grid.neighbor(grid.interior, axis, step)
            if np.any(nb < 0):
                raise ValueError("interior node on the edge of the grid")
            lab = flat[nb]
            if np.any((lab != INTERIOR) & (lab != RING)):
                raise ValueError("interior node adjacent to an exterior node")
            links.append((axis, step, rows, pos_int[nb], pos_ring[nb]))
    return links


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """``A = -(Lap_h - q)`` on interior nodes, with ring coupling ``B``."""

    grid: GridDomain
    matrix: sp.csr_matrix
    coupling: sp.csr_matrix
    q: np.ndarray
    _lu: list = field(default_factory=list, repr=False)

    @property
    def h(self):
        return self.grid.h

    @property
    def n_interior(self):
        return self.matrix.shape[0]

    def factor(self):
        if not self._lu:
            self._lu.append(spla.splu(self.matrix.tocsc()))
        return self._lu[0]


def assemble(grid: GridDomain, rs: RootSystem | None = None, q=None) -> DiscreteOperator:
    """Assemble the Dirichlet-restricted ``-(Lap_h - q)``.

    ``q`` is sampled at interior nodes from ``rs.potential_q`` unless given
    explicitly (a scalar or one value per interior node).
    """
    pts = grid.interior_points
    n = pts.shape[0]
    if q is None:
        if rs is None:
            qv = np.zeros(n)
        else:
            try:
                qv = rs.potential_q(pts)
            except HyperplaneError as exc:
                raise ValueError(f"potential undefined on the grid: {exc}") from exc
    else:
        qv = np.broadcast_to(np.asarray(q, dtype=float), (n,)).copy()
    if not np.all(np.isfinite(qv)):
        raise ValueError("potential is not finite on interior nodes")
    h2 = grid.h**2
    d = grid.dimension
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [2 * d / h2 + qv]
    brows, bcols = [], []
    for _, _, r, ci, cr in stencil_links(grid):
        m = ci >= 0
        rows.append(r[m])
        cols.append(ci[m])
        vals.append(np.full(m.sum(), -1.0 / h2))
        brows.append(r[~m])
        bcols.append(cr[~m])
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    br = np.concatenate(brows)
    B = sp.csr_matrix(
        (np.full(br.size, 1.0 / h2), (br, np.concatenate(bcols))),
        shape=(n, grid.ring.size),
    )
    return DiscreteOperator(grid, A, B, qv)


@dataclass(frozen=True, eq=False)
class SolutionField:
    """Grid values of a solution, plus solve diagnostics.

    ``interior`` and ``ring`` follow the ordering of ``grid.interior`` and
    ``grid.ring``.
    """

    grid: GridDomain
    interior: np.ndarray
    ring: np.ndarray
    residual: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        """Full-grid array, ``nan`` on exterior nodes."""
        out = np.full(self.grid.labels.size, np.nan)
        out[self.grid.interior] = self.interior
        out[self.grid.ring] = self.ring
        return out.reshape(self.grid.shape)

    def points_and_values(self):
        pts = np.vstack([self.grid.interior_points, self.grid.ring_points])
        return pts, np.concatenate([self.interior, self.ring])

    def at(self, point) -> float:
        return float(self.interior[self.grid.locate(point)])


def _as_node_values(data, pts, what):
    if data is None:
        return np.zeros(len(pts))
    if callable(data):
        vals = np.asarray(data(pts), dtype=float).reshape(-1)
    else:
        vals = np.broadcast_to(np.asarray(data, dtype=float), (len(pts),)).copy()
    if vals.shape[0] != len(pts):
        raise ValueError(f"{what}: expected {len(pts)} values, got {vals.shape[0]}")
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{what} contains non-finite values")
    return vals


def ring_values(op: DiscreteOperator, f) -> np.ndarray:
    return _as_node_values(f, op.grid.ring_points, "boundary data")


def interior_values(op: DiscreteOperator, g) -> np.ndarray:
    return _as_node_values(g, op.grid.interior_points, "source")


def _solve(matrix, solve, rhs, rtol, refine=2):
    norm_b = np.linalg.norm(rhs)
    if norm_b == 0:
        return np.zeros_like(rhs), 0.0
    u = solve(rhs)
    res = np.linalg.norm(rhs - matrix @ u) / norm_b
    for _ in range(refine):
        if res <= rtol:
            break
        u = u + solve(rhs - matrix @ u)
        res = np.linalg.norm(rhs - matrix @ u) / norm_b
    if not (np.all(np.isfinite(u)) and res <= rtol):
        raise SolverError(f"linear solve reached relative residual {res:.3e} > {rtol:.1e}")
    return u, float(res)


def solve_schrodinger(op: DiscreteOperator, f=None, g=None, rtol: float = DEFAULT_RTOL) -> SolutionField:
    """Solve ``(Lap - q) u = -g`` in D with ``u = f`` on the ring.

    ``f`` and ``g`` may be callables on points, per-node arrays, scalars or
    ``None`` (zero).  With ``g = None`` this is the discrete harmonic
    extension of ``f``; with ``f = None`` the discrete Green potential of ``g``.
    """
    fr = ring_values(op, f)
    gi = interior_values(op, g)
    rhs = op.coupling @ fr + gi
    u, res = _solve(op.matrix, op.factor().solve, rhs, rtol)
    meta = {"h": op.h, "n_interior": op.n_interior, "n_ring": fr.size}
    return SolutionField(op.grid, u, fr, res, meta)


def green_apply(op: DiscreteOperator, g, rtol: float = DEFAULT_RTOL) -> SolutionField:
    """Discrete Green potential of ``g``; zero on the ring."""
    return solve_schrodinger(op, None, g, rtol)


def _unit_solve(op, node, rtol):
    j = node if isinstance(node, (int, np.integer)) else op.grid.locate(node)
    e = np.zeros(op.n_interior)
    e[j] = 1.0
    # A is symmetric, so the row of A^-1 at j is the solution with e_j
    v, _ = _solve(op.matrix.T.tocsr(), op.factor().solve, e, rtol)
    return j, v


def green_row(op: DiscreteOperator, node, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Row of ``A^-1`` at an interior node (position or coordinates).

    Entry ``y`` approximates ``G(x, y) h^d``.
    """
    return _unit_solve(op, node, rtol)[1]


def harmonic_measure_row(op: DiscreteOperator, node, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Discrete harmonic measure of ``x`` over ring nodes, from one transpose solve.

    Weight ``y`` is the value at ``x`` of the solution with boundary data the
    indicator of ring node ``y``.
    """
    _, v = _unit_solve(op, node, rtol)
    return op.coupling.T @ v
