"""Bounded domains, uniform grids, and the admissibility check.

A domain is admissible for a root system when its closure sits inside one
connected component of the complement of the active hyperplanes, at least
``delta`` away from all of them.  Boxes and balls satisfy the exterior cone
condition, so they are regular for the classical Laplacian; masks are taken
on trust.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dunkl_core import reflected_points
from .root_system import RootSystem

__all__ = [
    "Box",
    "Ball",
    "Mask",
    "GridDomain",
    "AdmissibilityReport",
    "AdmissibilityError",
    "EmptyInteriorError",
    "INTERIOR",
    "RING",
    "EXTERIOR",
    "discretize",
    "check_admissible",
    "reflected_images",
]

EXTERIOR, INTERIOR, RING = 0, 1, 2


class EmptyInteriorError(ValueError):
    pass


class AdmissibilityError(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# -- domain specs ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Box:
    """Open axis-aligned box ``prod (lower_i, upper_i)``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box corners must be vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box corners must be finite")
        if np.any(lo >= hi):
            raise ValueError("box needs lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self):
        return self.lower.size

    @property
    def bounds(self):
        return self.lower, self.upper

    def contains(self, x):
        x = np.atleast_2d(x)
        return np.all((x > self.lower) & (x < self.upper), axis=-1)

    def key_points(self):
        """Corners and face midpoints of the closed box."""
        d = self.dimension
        mid = (self.lower + self.upper) / 2
        choices = [(self.lower[i], mid[i], self.upper[i]) for i in range(d)]
        return np.array(list(itertools.product(*choices)))


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if not np.all(np.isfinite(c)) or not np.isfinite(self.radius):
            raise ValueError("ball must have finite center and radius")
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self):
        return self.center.size

    @property
    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def contains(self, x):
        x = np.atleast_2d(x)
        return np.linalg.norm(x - self.center, axis=-1) < self.radius

    def key_points(self, n=64):
        d = self.dimension
        if d == 1:
            return np.array([[self.center[0] - self.radius], [self.center[0] + self.radius]])
        if d == 2:
            t = np.linspace(0, 2 * np.pi, n, endpoint=False)
            return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        rng = np.random.default_rng(0)
        v = rng.normal(size=(n * n, d))
        return self.center + self.radius * v / np.linalg.norm(v, axis=1)[:, None]


@dataclass(frozen=True, eq=False)
class Mask:
    """Open set given by ``indicator(points) -> bool`` inside a bounding box."""

    indicator: Callable
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        box = Box(self.lower, self.upper)
        object.__setattr__(self, "lower", box.lower)
        object.__setattr__(self, "upper", box.upper)

    @property
    def dimension(self):
        return self.lower.size

    @property
    def bounds(self):
        return self.lower, self.upper

    def contains(self, x):
        x = np.atleast_2d(x)
        inside = (x > self.lower) & (x < self.upper)
        out = np.zeros(x.shape[0], dtype=bool)
        keep = np.all(inside, axis=-1)
        if np.any(keep):
            out[keep] = np.asarray(self.indicator(x[keep]), dtype=bool)
        return out

    def key_points(self):
        return np.empty((0, self.dimension))


# -- grids -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform tensor grid with every node labelled interior, ring or exterior.

    ``labels`` has the grid's full shape; ``interior`` and ``ring`` hold flat
    (C-order) node indices, and ``coords(indices)`` maps them to points.
    """

    domain: object
    h: float
    axes: tuple
    labels: np.ndarray
    interior: np.ndarray = field(init=False)
    ring: np.ndarray = field(init=False)

    def __post_init__(self):
        flat = self.labels.ravel()
        object.__setattr__(self, "interior", np.flatnonzero(flat == INTERIOR))
        object.__setattr__(self, "ring", np.flatnonzero(flat == RING))

    @property
    def dimension(self):
        return len(self.axes)

    @property
    def shape(self):
        return self.labels.shape

    @property
    def origin(self):
        return np.array([a[0] for a in self.axes])

    def coords(self, flat_index):
        idx = np.unravel_index(np.asarray(flat_index), self.shape)
        return np.stack([self.axes[i][idx[i]] for i in range(self.dimension)], axis=-1)

    @property
    def interior_points(self):
        return self.coords(self.interior)

    @property
    def ring_points(self):
        return self.coords(self.ring)

    def neighbor(self, flat_index, axis, step):
        """Flat index of the axis neighbor, or -1 off the grid."""
        idx = list(np.unravel_index(np.asarray(flat_index), self.shape))
        moved = idx[axis] + step
        ok = (moved >= 0) & (moved < self.shape[axis])
        idx[axis] = np.clip(moved, 0, self.shape[axis] - 1)
        return np.where(ok, np.ravel_multi_index(idx, self.shape), -1)

    def locate(self, point, tol=1e-9):
        """Position of ``point`` in ``interior`` (must be an interior node)."""
        point = np.asarray(point, dtype=float)
        pts = self.interior_points
        dist = np.max(np.abs(pts - point), axis=1)
        j = int(np.argmin(dist))
        if dist[j] > tol * max(1.0, self.h):
            raise ValueError(f"{point.tolist()} is not an interior grid node")
        return j


def _box_axes(lower, upper, h):
    axes = []
    for lo, hi in zip(lower, upper):
        n = (hi - lo) / h
        m = int(round(n))
        if m < 1 or abs(n - m) > 1e-9 * max(1.0, n):
            raise ValueError(
                f"box side [{lo}, {hi}] is not an integer multiple of h={h}"
            )
        axes.append(np.linspace(lo, hi, m + 1))
    return axes


def _padded_axes(lower, upper, h):
    axes = []
    for lo, hi in zip(lower, upper):
        start = np.floor(lo / h) - 1
        stop = np.ceil(hi / h) + 1
        axes.append(np.arange(start, stop + 1) * h)
    return axes


def discretize(domain, h: float) -> GridDomain:
    """Lay a uniform grid of spacing ``h`` over ``domain`` and classify nodes.

    Box faces fall on grid planes, so for boxes the ring lies on the boundary.
    Other domains get a padded grid and a ring of nearest exterior nodes.
    The ring is every non-interior node in the 3^d neighbourhood of an
    interior node.
    """
    if not (h > 0 and np.isfinite(h)):
        raise ValueError("grid spacing must be positive")
    lower, upper = domain.bounds
    axes = _box_axes(lower, upper, h) if isinstance(domain, Box) else _padded_axes(lower, upper, h)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    shape = tuple(a.size for a in axes)
    if isinstance(domain, Box):
        inside = np.zeros(shape, dtype=bool)
        inside[tuple(slice(1, -1) for _ in shape)] = True
    else:
        inside = np.asarray(domain.contains(pts)).reshape(shape)
    if not inside.any():
        raise EmptyInteriorError(f"no interior grid nodes at h={h}")
    near = np.zeros(shape, dtype=bool)
    padded = np.pad(inside, 1)
    for offset in itertools.product((-1, 0, 1), repeat=len(shape)):
        sl = tuple(slice(1 + o, 1 + o + n) for o, n in zip(offset, shape))
        near |= padded[sl]
    labels = np.full(shape, EXTERIOR, dtype=np.int8)
    labels[near] = RING
    labels[inside] = INTERIOR
    return GridDomain(domain, float(h), tuple(axes), labels)


# -- admissibility -----------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    min_distance: float
    delta: float
    sign_constant: bool
    reflections_disjoint: bool
    sign_vector: tuple
    n_samples: int
    messages: tuple = ()

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"admissibility: {status}",
            f"  min hyperplane distance: {self.min_distance:.6g} (required >= {self.delta:.6g})",
            f"  constant sign vector: {self.sign_constant} {list(self.sign_vector)}",
            f"  reflections disjoint from D: {self.reflections_disjoint}",
            f"  sampled points: {self.n_samples}",
        ]
        lines += [f"  - {m}" for m in self.messages]
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "min_distance": self.min_distance,
            "delta": self.delta,
            "sign_constant": self.sign_constant,
            "reflections_disjoint": self.reflections_disjoint,
            "sign_vector": list(self.sign_vector),
            "n_samples": self.n_samples,
            "messages": list(self.messages),
        }


def _closure_samples(domain, h):
    lower, upper = domain.bounds
    if h is None:
        h = float(np.min(upper - lower)) / 32
    if isinstance(domain, Box):
        axes = []
        for lo, hi in zip(lower, upper):
            n = max(2, int(np.ceil((hi - lo) / h)))
            axes.append(np.linspace(lo, hi, n + 1))
        mesh = np.meshgrid(*axes, indexing="ij")
        grid_pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return np.vstack([domain.key_points(), grid_pts]), grid_pts[domain.contains(grid_pts)]
    axes = _padded_axes(lower, upper, h)
    mesh = np.meshgrid(*axes, indexing="ij")
    grid_pts = np.stack([m.ravel() for m in mesh], axis=-1)
    inner = grid_pts[domain.contains(grid_pts)]
    if isinstance(domain, Ball):
        return np.vstack([domain.key_points(), inner]), inner
    # mask: heuristic, grid nodes of the set plus their ring
    g = discretize(domain, h)
    return np.vstack([g.interior_points, g.ring_points]), inner


def check_admissible(domain, rs: RootSystem, delta: float | None = None, h: float | None = None) -> AdmissibilityReport:
    """Sample the closure of ``domain`` against the active hyperplanes of ``rs``.

    ``delta`` defaults to ``2 h``.  Failures are reported, never raised.
    """
    if delta is None:
        if h is None:
            raise ValueError("give delta or a grid spacing h")
        delta = 2.0 * h
    if delta <= 0:
        raise ValueError("delta must be positive")
    if rs.dimension != domain.dimension:
        raise ValueError("root system and domain dimensions differ")
    closure, inner = _closure_samples(domain, h)
    if rs.is_trivial:
        return AdmissibilityReport(
            True, float("inf"), float(delta), True, True, (), len(closure),
            ("no active hyperplanes",),
        )
    msgs = []
    dist = rs.hyperplane_distance(closure)
    min_dist = float(dist.min())
    signs = rs.sign_vector(closure)
    sign_constant = bool(np.all(signs == signs[0]) and np.all(signs != 0))
    if not sign_constant:
        msgs.append("closure meets or crosses an active hyperplane")
    if min_dist < delta:
        msgs.append(f"closure comes within {min_dist:.6g} of a hyperplane")
    disjoint = True
    if inner.size:
        for i in rs.active:
            if np.any(domain.contains(rs.reflect(int(i), inner))):
                disjoint = False
                msgs.append(f"reflection in root {rs.positive_roots[i].tolist()} maps D into itself")
    passed = sign_constant and min_dist >= delta and disjoint
    return AdmissibilityReport(
        passed, min_dist, float(delta), sign_constant, disjoint,
        tuple(int(s) for s in signs[0]), len(closure), tuple(msgs),
    )


def reflected_images(grid: GridDomain, rs: RootSystem) -> np.ndarray:
    """Exact reflections of every interior node, shape ``(n_interior, m_active, d)``.

    Raises :class:`AdmissibilityError` if any image falls inside the domain.
    """
    images = reflected_points(rs, grid.interior_points)
    n, m, d = images.shape
    if m and np.any(grid.domain.contains(images.reshape(n * m, d))):
        raise AdmissibilityError("a reflected interior node lies inside the domain")
    return images
