"""Grid ladders and empirical convergence orders."""

from __future__ import annotations

import numpy as np

__all__ = ["empirical_orders", "ladder", "restrict"]


def ladder(h0: float, levels: int) -> list[float]:
    """``[h0, h0/2, ..., h0/2**(levels-1)]``."""
    return [h0 / 2**i for i in range(levels)]


def empirical_orders(errors, hs=None) -> np.ndarray:
    """``log(e_i / e_{i+1}) / log(h_i / h_{i+1})`` for consecutive levels.

    With ``hs`` omitted the levels are assumed to halve ``h``.
    """
    e = np.asarray(errors, dtype=float)
    if hs is None:
        ratio = np.full(e.size - 1, 2.0)
    else:
        hs = np.asarray(hs, dtype=float)
        ratio = hs[:-1] / hs[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(e[:-1] / e[1:]) / np.log(ratio)


def restrict(values_fine, grid_fine, points) -> np.ndarray:
    """Pick values of a fine-grid interior field at coarse node coordinates.

    The coarse nodes must be nodes of the fine grid (nested ladders).
    """
    origin = grid_fine.origin
    idx = np.rint((np.atleast_2d(points) - origin) / grid_fine.h).astype(np.int64)
    flat = np.ravel_multi_index(tuple(idx.T), grid_fine.shape)
    pos = -np.ones(grid_fine.labels.size, dtype=np.int64)
    pos[grid_fine.interior] = np.arange(grid_fine.interior.size)
    where = pos[flat]
    if np.any(where < 0):
        raise ValueError("points are not interior nodes of the fine grid")
    return np.asarray(values_fine)[where]
