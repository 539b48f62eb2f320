"""Tensor-product grids with a refined band around the gap."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


def _grow(start: float, stop: float, h0: float, growth: float, h_max: float) -> list[float]:
    """Points from ``start`` towards ``stop`` with geometrically growing spacing.

    The final interval is stretched or merged so the last point is ``stop``
    exactly and no interval is thinner than half the preceding one.
    """
    direction = 1.0 if stop > start else -1.0
    length = abs(stop - start)
    pts = [0.0]
    h = h0
    while True:
        h = min(h * growth, h_max)
        if pts[-1] + 1.5 * h >= length:
            break
        pts.append(pts[-1] + h)
    pts.append(length)
    return [start + direction * p for p in pts]


def stretched_edges(lo: float, hi: float, fine_lo: float, fine_hi: float, h_fine: float,
                    growth: float = 1.08, h_max: float = 0.05) -> np.ndarray:
    """Cell edges on ``[lo, hi]``: uniform ``h_fine`` on the band, graded outside.

    The band ``[fine_lo, fine_hi]`` is split into an integer number of equal
    cells (rounded up), so its end points are always edges.
    """
    if not lo <= fine_lo < fine_hi <= hi:
        raise ValueError("the refined band must lie inside [lo, hi]")
    count = max(1, int(np.ceil((fine_hi - fine_lo) / h_fine - 1e-9)))
    band = np.linspace(fine_lo, fine_hi, count + 1)
    h = (fine_hi - fine_lo) / count
    upper = _grow(fine_hi, hi, h, growth, h_max)[1:] if fine_hi < hi else []
    lower = _grow(fine_lo, lo, h, growth, h_max)[1:] if fine_lo > lo else []
    return np.concatenate([lower[::-1], band, upper])


@dataclass(frozen=True, eq=False)
class TensorGrid:
    """Cell edges ``X`` (length nx+1) and ``Y`` (length ny+1)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        for name in ("X", "Y"):
            e = np.asarray(getattr(self, name), dtype=float)
            if e.ndim != 1 or e.size < 3 or np.any(np.diff(e) <= 0):
                raise ValueError(f"{name} must be strictly increasing with at least 2 cells")
            object.__setattr__(self, name, e)

    @classmethod
    def uniform(cls, x0, x1, nx, y0, y1, ny) -> "TensorGrid":
        return cls(np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1))

    @property
    def nx(self) -> int:
        return self.X.size - 1

    @property
    def ny(self) -> int:
        return self.Y.size - 1

    @cached_property
    def xc(self):
        return 0.5 * (self.X[1:] + self.X[:-1])

    @cached_property
    def yc(self):
        return 0.5 * (self.Y[1:] + self.Y[:-1])

    @cached_property
    def dx(self):
        return np.diff(self.X)

    @cached_property
    def dy(self):
        return np.diff(self.Y)

    @property
    def n_u(self) -> int:
        return self.ny * (self.nx + 1)

    @property
    def n_v(self) -> int:
        return (self.ny + 1) * self.nx

    @property
    def n_ext(self) -> int:
        return self.n_u + self.n_v + 2 * (self.nx + 1) + 2 * (self.ny + 1)

    @property
    def h_min(self) -> float:
        return float(min(self.dx.min(), self.dy.min()))

    @cached_property
    def cell_volumes(self) -> np.ndarray:
        return np.outer(self.dy, self.dx)

    @cached_property
    def node_volumes(self) -> np.ndarray:
        hy = np.diff(np.concatenate([[self.Y[0]], self.yc, [self.Y[-1]]]))
        hx = np.diff(np.concatenate([[self.X[0]], self.xc, [self.X[-1]]]))
        return np.outer(hy, hx)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xc, self.yc)

    @cached_property
    def ext_points(self) -> np.ndarray:
        """Coordinates of every entry of the extended velocity vector."""
        ux, uy = np.meshgrid(self.X, self.yc)
        vx, vy = np.meshgrid(self.xc, self.Y)
        parts = [
            np.stack([ux.ravel(), uy.ravel()], axis=1),
            np.stack([vx.ravel(), vy.ravel()], axis=1),
            np.stack([self.X, np.full(self.nx + 1, self.Y[0])], axis=1),
            np.stack([self.X, np.full(self.nx + 1, self.Y[-1])], axis=1),
            np.stack([np.full(self.ny + 1, self.X[0]), self.Y], axis=1),
            np.stack([np.full(self.ny + 1, self.X[-1]), self.Y], axis=1),
        ]
        return np.concatenate(parts)

    @cached_property
    def ext_component(self) -> np.ndarray:
        """0 where the entry is an x-velocity, 1 where it is a y-velocity."""
        return np.concatenate([
            np.zeros(self.n_u, dtype=np.int8),
            np.ones(self.n_v, dtype=np.int8),
            np.zeros(2 * (self.nx + 1), dtype=np.int8),
            np.ones(2 * (self.ny + 1), dtype=np.int8),
        ])

    @cached_property
    def ext_on_box(self) -> np.ndarray:
        """Entries sitting on the outer box (boundary faces and wall slots)."""
        on = np.zeros(self.n_ext, dtype=bool)
        u = on[: self.n_u].reshape(self.ny, self.nx + 1)
        u[:, 0] = u[:, -1] = True
        v = on[self.n_u: self.n_u + self.n_v].reshape(self.ny + 1, self.nx)
        v[0, :] = v[-1, :] = True
        on[self.n_u + self.n_v:] = True
        return on

    def same_as(self, other: "TensorGrid") -> bool:
        return self.X.shape == other.X.shape and self.Y.shape == other.Y.shape and \
            np.array_equal(self.X, other.X) and np.array_equal(self.Y, other.Y)
