"""Pointwise Dunkl Laplacian, the reflection part ``N``, and the conjugation identity.

Every operation accepts a single point ``(d,)`` or a stack ``(n, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .expr import Expression, parse
from .root_system import RootSystem

__all__ = [
    "ScalarField",
    "FieldDomainError",
    "default_step",
    "fd_gradient",
    "fd_laplacian",
    "reflected_points",
    "apply_dunkl_laplacian",
    "apply_N",
    "conjugation_residual",
]


class FieldDomainError(ValueError):
    """A field was evaluated outside the region it is declared on."""


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real-valued function on ``R^d``, optionally minus an excluded open set.

    Parameters
    ----------
    func : callable
        Vectorized: maps an ``(n, d)`` array to an ``(n,)`` array.
    dimension : int
    grad, laplacian : callable, optional
        Analytic derivatives with the same calling convention; ``grad``
        returns ``(n, d)``.  When absent, central differences are used.
    excluded : object with ``contains(points) -> bool array``, optional
        Open set where the field is undefined (a domain ``D`` for boundary
        data).  Evaluating there raises :class:`FieldDomainError`.
    """

    func: Callable
    dimension: int
    grad: Optional[Callable] = None
    laplacian: Optional[Callable] = None
    excluded: object = None
    label: str = ""

    @classmethod
    def from_expression(cls, text, d: int | None = None, excluded=None) -> "ScalarField":
        e = text if isinstance(text, Expression) else parse(text, d)
        return cls(e.evaluate, e.dimension, excluded=excluded, label=str(e))

    @classmethod
    def constant(cls, c: float, d: int, excluded=None) -> "ScalarField":
        return cls(
            lambda x: np.full(len(x), float(c)),
            d,
            grad=lambda x: np.zeros_like(x),
            laplacian=lambda x: np.zeros(len(x)),
            excluded=excluded,
            label=repr(float(c)),
        )

    @classmethod
    def linear(cls, c, offset: float = 0.0, excluded=None) -> "ScalarField":
        c = np.asarray(c, dtype=float)
        return cls(
            lambda x: x @ c + offset,
            c.size,
            grad=lambda x: np.broadcast_to(c, x.shape).copy(),
            laplacian=lambda x: np.zeros(len(x)),
            excluded=excluded,
            label=f"<{c.tolist()}, x> + {offset}",
        )

    def excluding(self, domain) -> "ScalarField":
        return ScalarField(
            self.func, self.dimension, self.grad, self.laplacian, domain, self.label
        )

    @property
    def has_derivatives(self) -> bool:
        return self.grad is not None and self.laplacian is not None

    def _points(self, x):
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[-1] != self.dimension:
            raise ValueError(
                f"field of dimension {self.dimension} evaluated at shape {pts.shape}"
            )
        if self.excluded is not None:
            bad = np.asarray(self.excluded.contains(pts))
            if np.any(bad):
                where = pts[np.flatnonzero(bad)[0]]
                raise FieldDomainError(
                    f"field {self.label or '<callable>'} is undefined at {where.tolist()} "
                    "(inside the excluded domain)"
                )
        return pts, single

    def __call__(self, x):
        pts, single = self._points(x)
        vals = np.asarray(self.func(pts), dtype=float).reshape(len(pts))
        return float(vals[0]) if single else vals

    def gradient(self, x, step=None, order=2):
        pts, single = self._points(x)
        g = np.asarray(self.grad(pts), float) if self.grad else fd_gradient(self, pts, step, order)
        return g[0] if single else g

    def laplace(self, x, step=None, order=2):
        pts, single = self._points(x)
        if self.laplacian:
            v = np.asarray(self.laplacian(pts), float).reshape(len(pts))
        else:
            v = fd_laplacian(self, pts, step, order)
        return float(v[0]) if single else v


# -- finite differences ----------------------------------------------------------


def default_step(x) -> np.ndarray:
    """``1e-4 * max(1, |x|)`` per point."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return 1e-4 * np.maximum(1.0, np.linalg.norm(x, axis=1))


def _steps(x, step):
    if step is None:
        return default_step(x)
    return np.broadcast_to(np.asarray(step, dtype=float), (len(x),))


# central stencils: offsets in units of the step, first- and second-derivative weights
_D1 = {2: ((1, 1 / 2),), 4: ((1, 2 / 3), (2, -1 / 12))}
_D2 = {2: (0, -2.0, ((1, 1.0),)), 4: (0, -5 / 2, ((1, 4 / 3), (2, -1 / 12)))}


def fd_gradient(f: Callable, x, step=None, order: int = 2) -> np.ndarray:
    """Central-difference gradient, shape ``(n, d)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = _steps(x, step)
    n, d = x.shape
    out = np.zeros((n, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        for m, w in _D1[order]:
            shift = (m * s)[:, None] * e
            out[:, i] += w * (np.asarray(f(x + shift)) - np.asarray(f(x - shift)))
    return out / s[:, None]


def fd_laplacian(f: Callable, x, step=None, order: int = 2) -> np.ndarray:
    """Central-difference Laplacian, shape ``(n,)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = _steps(x, step)
    n, d = x.shape
    _, w0, pairs = _D2[order]
    acc = d * w0 * np.asarray(f(x), dtype=float)
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        for m, w in pairs:
            shift = (m * s)[:, None] * e
            acc = acc + w * (np.asarray(f(x + shift)) + np.asarray(f(x - shift)))
    return acc / s**2


# -- Dunkl operators ----------------------------------------------------------------


def reflected_points(rs: RootSystem, x) -> np.ndarray:
    """``sigma_alpha x`` for every active root, shape ``(n, m_active, d)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    a = rs.positive_roots[rs.active]
    s = (x @ a.T) / np.sum(a * a, axis=1)
    return x[:, None, :] - 2.0 * s[:, :, None] * a[None, :, :]


def _reflected_values(rs, f, x):
    refl = reflected_points(rs, x)
    n, m, d = refl.shape
    if m == 0:
        return np.zeros((n, 0))
    return np.asarray(f(refl.reshape(n * m, d))).reshape(n, m)


def apply_N(rs: RootSystem, f, x):
    """``Nf(x) = sum |alpha|^2 k(alpha) / <x, alpha>^2 f(sigma_alpha x)``."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    coef = rs.n_coefficients(pts)
    out = np.sum(coef * _reflected_values(rs, f, pts), axis=1)
    return float(out[0]) if np.ndim(x) == 1 else out


def apply_dunkl_laplacian(rs: RootSystem, f: ScalarField, x, step=None, order: int = 2):
    """Apply the Dunkl Laplacian to ``f`` at ``x``.

    Uses the analytic gradient/Laplacian of ``f`` when present, else
    central differences (``order`` 2 or 4) with spacing ``step``.
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    a = rs.positive_roots[rs.active]
    k = rs.multiplicities[rs.active]
    p = rs.pairings(pts)
    coef = rs.n_coefficients(pts)  # raises on hyperplanes
    fx = f(pts)
    lap = f.laplace(pts, step, order)
    grad = f.gradient(pts, step, order)
    drift = 2.0 * np.sum(k * (grad @ a.T) / p, axis=1)
    jump = np.sum(coef * (fx[:, None] - _reflected_values(rs, f, pts)), axis=1)
    out = lap + drift - jump
    return float(out[0]) if np.ndim(x) == 1 else out


def conjugation_residual(rs: RootSystem, phi: ScalarField, x, step=None, order: int = 4):
    """``sqrt(w) D_k phi - [Lap(phi sqrt(w)) - q phi sqrt(w) + sqrt(w) N phi]``.

    ``Lap(phi sqrt(w))`` is taken by central differences of the product
    field (fourth order by default), so the residual measures both the
    identity and the difference truncation error.  Derivatives of ``phi``
    use the same stencil unless ``phi`` carries analytic ones.
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    sw = rs.sqrt_weight(pts)
    lhs = sw * apply_dunkl_laplacian(rs, phi, pts, step, order)

    def product(y):
        return phi(y) * rs.sqrt_weight(y)

    lap_prod = fd_laplacian(product, pts, step, order=order)
    rhs = lap_prod - rs.potential_q(pts) * phi(pts) * sw + sw * apply_N(rs, phi, pts)
    out = lhs - rhs
    return float(out[0]) if np.ndim(x) == 1 else out
