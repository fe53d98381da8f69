"""Periodic 1D finite-volume grid state and basic functionals."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class GridState:
    """Cell averages on a uniform periodic mesh.

    ``u`` holds the N cell values, ``h`` the mesh width, ``t`` the current
    time.  The periodic domain length is ``h * N``.
    """

    u: np.ndarray
    h: float
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.ndim != 1:
            raise ValueError("u must be one-dimensional")
        if self.u.size < 5:
            raise ValueError("need at least 5 cells, got %d" % self.u.size)
        self.h = float(self.h)
        if not self.h > 0.0:
            raise ValueError("mesh width must be positive, got %g" % self.h)
        self.t = float(self.t)

    @property
    def n_cells(self) -> int:
        return self.u.size

    @property
    def length(self) -> float:
        return self.h * self.u.size


def shift_prev(a: np.ndarray) -> np.ndarray:
    """a[i-1] on the periodic index ring (fast np.roll(a, 1))."""
    return np.concatenate((a[-1:], a[:-1]))


def shift_next(a: np.ndarray) -> np.ndarray:
    """a[i+1] on the periodic index ring (fast np.roll(a, -1))."""
    return np.concatenate((a[1:], a[:1]))


def total_variation(u: np.ndarray) -> float:
    """Periodic total variation: sum of |u_{j+1} - u_j| including the wrap."""
    u = np.asarray(u, dtype=float)
    return float(np.sum(np.abs(np.diff(u))) + abs(float(u[-1] - u[0])))


def mass(state: GridState) -> float:
    """Discrete integral h * sum(u)."""
    return state.h * float(np.sum(state.u))
