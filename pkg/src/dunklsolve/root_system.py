"""Root systems, reflections, the invariant weight and the potential ``q``.

All point-valued functions accept a single point of shape ``(d,)`` or a
stack of points of shape ``(n, d)`` and return a float or an ``(n,)``
array accordingly.  Roots are stored unnormalized; every formula carries
``|alpha|^2`` explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RootSystem",
    "ValidationReport",
    "HyperplaneError",
    "builtin",
    "BUILTIN_NAMES",
]


class HyperplaneError(ValueError):
    """Raised when a formula singular on a reflection hyperplane is evaluated on it."""


@dataclass(frozen=True)
class ValidationReport:
    closed: bool
    orbit_invariant: bool
    max_closure_defect: float
    max_multiplicity_defect: float

    @property
    def ok(self) -> bool:
        return self.closed and self.orbit_invariant


def _as_points(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    return np.atleast_2d(x), single


def _ret(values, single):
    return float(values[0]) if single else values


@dataclass(frozen=True, eq=False)
class RootSystem:
    """A positive subsystem ``R_+`` with a nonnegative multiplicity per root.

    Parameters
    ----------
    positive_roots : array_like, shape (m, d)
        Nonzero, pairwise non-parallel vectors.
    multiplicities : array_like, shape (m,)
        ``k(alpha) >= 0`` for each positive root.
    name : str, optional
    """

    positive_roots: np.ndarray
    multiplicities: np.ndarray
    name: str = "custom"
    _active: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        roots = np.array(self.positive_roots, dtype=float)
        if roots.ndim == 1:
            roots = roots[:, None]
        if roots.ndim != 2 or roots.shape[0] == 0 or roots.shape[1] == 0:
            raise ValueError("positive_roots must be a non-empty (m, d) array")
        k = np.array(self.multiplicities, dtype=float).reshape(-1)
        if k.shape[0] != roots.shape[0]:
            raise ValueError(
                f"expected {roots.shape[0]} multiplicities, got {k.shape[0]}"
            )
        if not (np.all(np.isfinite(roots)) and np.all(np.isfinite(k))):
            raise ValueError("roots and multiplicities must be finite")
        if np.any(k < 0):
            raise ValueError("multiplicities must be nonnegative")
        norms = np.linalg.norm(roots, axis=1)
        if np.any(norms == 0):
            raise ValueError("roots must be nonzero")
        unit = roots / norms[:, None]
        cos = unit @ unit.T
        np.fill_diagonal(cos, 0.0)
        if np.any(np.abs(cos) > 1 - 1e-12):
            raise ValueError("positive roots must be pairwise non-parallel")
        roots.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "positive_roots", roots)
        object.__setattr__(self, "multiplicities", k)
        object.__setattr__(self, "_active", np.flatnonzero(k > 0))

    @property
    def dimension(self) -> int:
        return self.positive_roots.shape[1]

    @property
    def rank_count(self) -> int:
        """Number of positive roots."""
        return self.positive_roots.shape[0]

    @property
    def active(self) -> np.ndarray:
        """Indices of roots with ``k(alpha) > 0``."""
        return self._active

    @property
    def is_trivial(self) -> bool:
        return self._active.size == 0

    def with_multiplicities(self, multiplicities) -> "RootSystem":
        return RootSystem(self.positive_roots, multiplicities, name=self.name)

    # -- pointwise geometry -------------------------------------------------

    def _check_index(self, i):
        if isinstance(i, (bool, np.bool_)) or not isinstance(i, (int, np.integer)):
            raise IndexError(f"root index must be an integer, got {i!r}")
        if not 0 <= i < self.rank_count:
            raise IndexError(f"root index {i} out of range 0..{self.rank_count - 1}")

    def reflect(self, i: int, x):
        """``sigma_alpha x = x - 2 <x, alpha> / |alpha|^2 alpha`` for root ``i``."""
        self._check_index(i)
        a = self.positive_roots[i]
        x = np.asarray(x, dtype=float)
        s = (x @ a) / (a @ a)
        return x - 2.0 * np.multiply.outer(s, a)

    def reflection_matrix(self, i: int) -> np.ndarray:
        self._check_index(i)
        a = self.positive_roots[i]
        return np.eye(self.dimension) - 2.0 * np.outer(a, a) / (a @ a)

    def pairings(self, x, active_only=True):
        """``<x, alpha>`` for each root, shape ``(n, m)``."""
        pts, _ = _as_points(x)
        roots = self.positive_roots[self._active] if active_only else self.positive_roots
        return pts @ roots.T

    def _guarded_pairings(self, x):
        p = self.pairings(x)
        if np.any(p == 0):
            raise HyperplaneError("point lies on an active reflection hyperplane")
        return p

    def weight(self, x):
        """``w_k(x) = prod |<x, alpha>|^(2 k(alpha))``."""
        pts, single = _as_points(x)
        k = self.multiplicities[self._active]
        vals = np.prod(np.abs(self.pairings(pts)) ** (2.0 * k), axis=1)
        return _ret(vals, single)

    def sqrt_weight(self, x):
        pts, single = _as_points(x)
        k = self.multiplicities[self._active]
        vals = np.prod(np.abs(self.pairings(pts)) ** k, axis=1)
        return _ret(vals, single)

    def potential_q(self, x):
        """``q(x) = sum (|alpha| k(alpha) / <x, alpha>)^2``."""
        pts, single = _as_points(x)
        a = self.positive_roots[self._active]
        k = self.multiplicities[self._active]
        p = self._guarded_pairings(pts)
        vals = np.sum((np.linalg.norm(a, axis=1) * k / p) ** 2, axis=1)
        return _ret(vals, single)

    def n_coefficients(self, x):
        """``|alpha|^2 k(alpha) / <x, alpha>^2`` per active root, shape ``(n, m_active)``."""
        pts, _ = _as_points(x)
        a = self.positive_roots[self._active]
        k = self.multiplicities[self._active]
        p = self._guarded_pairings(pts)
        return np.sum(a * a, axis=1) * k / p**2

    def sqrt_weight_gradient(self, x):
        """Closed form ``sqrt(w_k) * sum k(alpha) alpha / <x, alpha>``."""
        pts, single = _as_points(x)
        a = self.positive_roots[self._active]
        k = self.multiplicities[self._active]
        p = self._guarded_pairings(pts)
        g = self.sqrt_weight(pts)[:, None] * ((k / p) @ a)
        return g[0] if single else g

    def sqrt_weight_laplacian(self, x):
        """Closed form ``sqrt(w_k) * sum |alpha|^2 (k^2 - k) / <x, alpha>^2``."""
        pts, single = _as_points(x)
        a = self.positive_roots[self._active]
        k = self.multiplicities[self._active]
        p = self._guarded_pairings(pts)
        s = np.sum(np.sum(a * a, axis=1) * (k * k - k) / p**2, axis=1)
        return _ret(self.sqrt_weight(pts) * s, single)

    def dunkl_lemma_residual(self, x):
        """Double sum over root pairs minus the diagonal sum.

        Vanishes for closed root systems with orbit-invariant multiplicities.
        """
        pts, single = _as_points(x)
        a = self.positive_roots[self._active]
        k = self.multiplicities[self._active]
        p = self._guarded_pairings(pts)
        gram = a @ a.T
        c = k / p
        lhs = np.einsum("ni,ij,nj->n", c, gram, c)
        rhs = np.sum(np.diag(gram) * c * c, axis=1)
        return _ret(lhs - rhs, single)

    def hyperplane_distance(self, x):
        """Distance to the nearest active hyperplane; ``inf`` if none is active."""
        pts, single = _as_points(x)
        if self.is_trivial:
            return _ret(np.full(pts.shape[0], np.inf), single)
        a = self.positive_roots[self._active]
        d = np.abs(pts @ a.T) / np.linalg.norm(a, axis=1)
        return _ret(d.min(axis=1), single)

    def sign_vector(self, x):
        """``sign <x, alpha>`` over active roots, shape ``(n, m_active)``."""
        return np.sign(self.pairings(x)).astype(int)

    # -- algebraic validation ----------------------------------------------

    def validate(self, tol: float = 1e-10) -> ValidationReport:
        """Check closure of ``R = R_+ u -R_+`` under reflections and orbit invariance of ``k``."""
        roots = self.positive_roots
        k = self.multiplicities
        full = np.vstack([roots, -roots])
        kfull = np.concatenate([k, k])
        scale = np.max(np.linalg.norm(roots, axis=1))
        closure = 0.0
        mult = 0.0
        for i in range(self.rank_count):
            img = full @ self.reflection_matrix(i).T
            dist = np.linalg.norm(img[:, None, :] - full[None, :, :], axis=2)
            j = np.argmin(dist, axis=1)
            closure = max(closure, float(dist[np.arange(len(full)), j].max()) / scale)
            mult = max(mult, float(np.abs(kfull[j] - kfull).max()))
        return ValidationReport(
            closed=closure <= tol,
            orbit_invariant=closure <= tol and mult <= tol,
            max_closure_defect=closure,
            max_multiplicity_defect=mult,
        )


# -- catalog ------------------------------------------------------------------


def _dihedral_roots(m):
    theta = np.arange(m) * np.pi / m
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _orbit_multiplicities(k, n_orbits, name):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size == 1:
        k = np.repeat(k, n_orbits)
    if k.size != n_orbits:
        raise ValueError(f"{name} takes 1 or {n_orbits} multiplicities, got {k.size}")
    return k


def builtin(name: str, k=1.0, **params) -> RootSystem:
    """Construct a catalog root system.

    Parameters
    ----------
    name : {"A1", "A1^n", "A2", "B2", "I2"}
        ``"A1^n"`` is the product ``A1 x ... x A1`` with roots ``e_1 .. e_n``
        (pass ``n``); ``"I2"`` is the dihedral system of order ``2m``
        (pass ``m``).  ``"A1xA1"`` is accepted as ``A1^n`` with ``n = 2``.
    k : float or sequence
        One multiplicity per orbit, or a single value for all orbits.
        ``B2`` orbits are (short, long); even ``I2(m)`` orbits are
        (even-indexed, odd-indexed) roots.

    Examples
    --------
    >>> builtin("B2", k=(1, 2)).rank_count
    4
    """
    key = name.strip()
    if key == "A1":
        (kk,) = _orbit_multiplicities(k, 1, key)
        return RootSystem([[1.0]], [kk], name="A1")
    if key in ("A1^n", "A1xA1"):
        n = int(params.get("n", 2))
        if n < 1:
            raise ValueError("A1^n needs n >= 1")
        kk = _orbit_multiplicities(k, n, key)
        return RootSystem(np.eye(n), kk, name=f"A1^{n}")
    if key == "A2":
        (kk,) = _orbit_multiplicities(k, 1, key)
        s = np.sqrt(2.0)
        roots = [[s, 0.0], [-s / 2, np.sqrt(6.0) / 2], [s / 2, np.sqrt(6.0) / 2]]
        return RootSystem(roots, [kk] * 3, name="A2")
    if key == "B2":
        ks, kl = _orbit_multiplicities(k, 2, key)
        roots = [[1.0, 0.0], [0.0, 1.0], [1.0, -1.0], [1.0, 1.0]]
        return RootSystem(roots, [ks, ks, kl, kl], name="B2")
    if key == "I2":
        if "m" not in params:
            raise ValueError("I2 requires the order parameter m")
        m = int(params["m"])
        if m < 2:
            raise ValueError("I2(m) needs m >= 2")
        roots = _dihedral_roots(m)
        if m % 2:
            (kk,) = _orbit_multiplicities(k, 1, key)
            mult = np.full(m, kk)
        else:
            ke, ko = _orbit_multiplicities(k, 2, key)
            mult = np.where(np.arange(m) % 2 == 0, ke, ko)
        return RootSystem(roots, mult, name=f"I2({m})")
    raise ValueError(f"unknown root system {name!r}; choose from {BUILTIN_NAMES}")


BUILTIN_NAMES = ("A1", "A1^n", "A2", "B2", "I2")
