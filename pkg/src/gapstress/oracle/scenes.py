"""Concrete oracle problems: two disks in a box, a straight channel, a local gap.

Rigid particles are handled by eliminating the velocity inside solid cells:
every face touching a solid cell carries the rigid datum of that particle.
This is the vanishing-permeability limit of a Brinkman penalization and
avoids the stiff penalty term altogether.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fields import stokes_defect
from ..geometry import GapGeometry, psi
from .grid import TensorGrid, stretched_edges
from .mac import DiscreteStokesSolution, ResolutionError, StokesOperator, solve


def default_boundary_data(points: np.ndarray) -> np.ndarray:
    """A smooth, deliberately asymmetric velocity on the outer box."""
    x, y = points[:, 0], points[:, 1]
    return np.stack([0.6 + 0.3 * y + 0.25 * x * y, 0.4 - 0.35 * x + 0.2 * x * x + 0.15 * y], axis=1)


@dataclass(frozen=True)
class BoxScene:
    """Two disks of radius ``radius`` centred at ``(0, +-(radius + eps/2))``.

    The box is ``[-half_width, half_width]^2``.  Near the gap the grid uses
    ``gap_cells`` rows across the narrowest section and horizontal spacing
    ``sqrt(eps) / x_cells_per_root``; elsewhere it coarsens geometrically up
    to ``h_max``.  ``eta`` is the Brinkman permeability; only the limit
    ``eta = 0`` (exact elimination of solid velocities) is implemented.
    """

    eps: float
    radius: float = 0.5
    half_width: float = 2.0
    mu: float = 1.0
    gap_cells: int = 8
    x_cells_per_root: float = 12.0
    x_band_roots: float = 3.0
    growth: float = 1.08
    h_max: float = 0.04
    eta: float = 0.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.eta != 0.0:
            raise NotImplementedError("only the eliminated (eta = 0) rigid limit is available")
        if 2 * self.radius + self.eps >= self.half_width:
            raise ValueError("the disks must lie strictly inside the box")
        if self.gap_cells < 6:
            raise ResolutionError("at least 6 cells are needed across the gap")

    @property
    def kappa(self) -> float:
        return 1.0 / (2.0 * self.radius)

    @property
    def centers(self) -> tuple[tuple[float, float], tuple[float, float]]:
        c = self.radius + 0.5 * self.eps
        return (0.0, c), (0.0, -c)

    def geometry(self, r0: float = 0.2) -> GapGeometry:
        return GapGeometry(2, self.eps, self.kappa, r0, self.mu)

    def grid(self) -> TensorGrid:
        L = self.half_width
        root = np.sqrt(self.eps)
        band = min(self.x_band_roots * root, 0.5 * self.radius)
        X = stretched_edges(-L, L, -band, band, root / self.x_cells_per_root,
                            self.growth, self.h_max)
        Y = stretched_edges(-L, L, -0.5 * self.eps, 0.5 * self.eps, self.eps / self.gap_cells,
                            self.growth, self.h_max)
        return TensorGrid(X, Y)

    def labels(self, grid: TensorGrid) -> np.ndarray:
        xc, yc = grid.cell_centers()
        lab = np.zeros(xc.shape, dtype=np.int64)
        for k, (cx, cy) in enumerate(self.centers, start=1):
            lab[(xc - cx) ** 2 + (yc - cy) ** 2 < self.radius**2] = k
        return lab

    def operator(self, **kwargs) -> StokesOperator:
        grid = self.grid()
        op = StokesOperator(grid, self.labels(grid), self.mu, **kwargs)
        across = _cells_across(op, 0.0, self.radius)
        if across < self.gap_cells:
            raise ResolutionError(f"only {across} cells across the gap, need {self.gap_cells}")
        return op


def _cells_across(op: StokesOperator, x: float, y_limit: float) -> int:
    g = op.grid
    col = min(max(int(np.searchsorted(g.X, x) - 1), 0), g.nx - 1)
    return int(np.count_nonzero(op.active[:, col] & (np.abs(g.yc) < y_limit)))


def box_boundary_flux(grid: TensorGrid, values: np.ndarray) -> float:
    """Outward flux of an extended velocity vector through the box."""
    u = values[: grid.n_u].reshape(grid.ny, grid.nx + 1)
    v = values[grid.n_u: grid.n_u + grid.n_v].reshape(grid.ny + 1, grid.nx)
    return float(np.dot(u[:, -1] - u[:, 0], grid.dy) + np.dot(v[-1, :] - v[0, :], grid.dx))


def compatible_box_data(grid: TensorGrid, data) -> tuple[np.ndarray, float]:
    """Sample ``data`` on the box and remove its mean normal flux.

    Returns the extended vector (zero away from the box) and the uniform
    normal velocity that was subtracted.
    """
    pts = grid.ext_points
    vals = np.asarray(data(pts), dtype=float)
    out = np.where(grid.ext_on_box, vals[np.arange(len(pts)), grid.ext_component], 0.0)
    perimeter = 2.0 * (grid.X[-1] - grid.X[0]) + 2.0 * (grid.Y[-1] - grid.Y[0])
    correction = box_boundary_flux(grid, out) / perimeter
    u = out[: grid.n_u].reshape(grid.ny, grid.nx + 1)
    v = out[grid.n_u: grid.n_u + grid.n_v].reshape(grid.ny + 1, grid.nx)
    u[:, 0] += correction
    u[:, -1] -= correction
    v[0, :] += correction
    v[-1, :] -= correction
    return out, correction


def rigid_data(op: StokesOperator, particle: int, alpha: int) -> np.ndarray:
    """Extended vector carrying ``psi_alpha`` on the faces of one particle."""
    g = op.grid
    pts = g.ext_points
    vals = psi(alpha, pts, n=2)
    out = np.zeros(g.n_ext)
    on = op.ext_label == particle
    out[on] = vals[on, g.ext_component[on]]
    return out


@dataclass(eq=False)
class BoxSolutions:
    """The decomposed box problems sharing one factorization.

    ``background`` solves with the box data and still particles;
    ``modes[i][alpha - 1]`` moves particle ``i + 1`` by ``psi_alpha``.
    """

    scene: BoxScene
    operator: StokesOperator
    background: DiscreteStokesSolution
    modes: list[list[DiscreteStokesSolution]]
    flux_correction: float
    info: dict = field(default_factory=dict)


def solve_box(scene: BoxScene, boundary_data=default_boundary_data, operator=None) -> BoxSolutions:
    """Solve the background problem and all rigid-mode problems on ``scene``."""
    op = scene.operator() if operator is None else operator
    g = op.grid
    if boundary_data is None:
        box, corr = np.zeros(g.n_ext), 0.0
    else:
        box, corr = compatible_box_data(g, boundary_data)
    data = [box]
    for particle in (1, 2):
        for alpha in (1, 2, 3):
            data.append(rigid_data(op, particle, alpha))
    sols = solve(op, np.stack(data, axis=1), description={"eps": scene.eps})
    modes = [sols[1:4], sols[4:7]]
    info = {"eps": scene.eps, "nx": g.nx, "ny": g.ny, "unknowns": sols[0].stats.unknowns,
            "method": sols[0].stats.method, "gap_cells": _cells_across(op, 0.0, scene.radius)}
    return BoxSolutions(scene, op, sols[0], modes, corr, info)


def poiseuille_channel(height: float = 1.0, length: float = 2.0, max_speed: float = 1.5,
                       mu: float = 1.0, rows: int = 16, cols: int = 24, seed: int | None = 0,
                       **kwargs) -> tuple[DiscreteStokesSolution, dict]:
    """Pressure-driven channel flow with parabolic inflow and outflow.

    The no-slip walls sit at the centres of one row of solid cells above and
    below the fluid, so the walls coincide with velocity sample lines.  With
    ``seed`` set the horizontal spacing is randomly perturbed.  Returns the
    solution and the exact profile and pressure gradient.
    """
    h = height / rows
    Y = np.linspace(-0.5 * h, height + 0.5 * h, rows + 2)
    if seed is None:
        X = np.linspace(0.0, length, cols + 1)
    else:
        rng = np.random.default_rng(seed)
        w = rng.uniform(0.5, 1.5, cols)
        X = np.concatenate([[0.0], np.cumsum(w)]) * (length / w.sum())
    grid = TensorGrid(X, Y)
    labels = np.zeros((grid.ny, grid.nx), dtype=np.int64)
    labels[0, :] = labels[-1, :] = 1

    def profile(y):
        s = np.clip(y, 0.0, height)
        return 4.0 * max_speed * s * (height - s) / height**2

    op = StokesOperator(grid, labels, mu, **kwargs)
    pts = grid.ext_points
    known = np.where(grid.ext_component == 0, profile(pts[:, 1]), 0.0)
    known[op.ext_label > 0] = 0.0
    sol = solve(op, known, description={"case": "poiseuille"})
    exact = {"profile": profile, "dpdx": -8.0 * mu * max_speed / height**2}
    return sol, exact


def disk_in_box(cells: int, radius: float = 0.3, half_width: float = 1.0, mu: float = 1.0):
    """A disk translating horizontally inside a still square box, uniform grid."""
    grid = TensorGrid.uniform(-half_width, half_width, cells, -half_width, half_width, cells)
    xc, yc = grid.cell_centers()
    labels = np.where(xc**2 + yc**2 < radius**2, 1, 0)
    op = StokesOperator(grid, labels, mu)
    known = np.where((op.ext_label == 1) & (grid.ext_component == 0), 1.0, 0.0)
    return solve(op, known, description={"case": "disk", "cells": cells})


def drag_energy(sol: DiscreteStokesSolution) -> float:
    """Dissipation of the disk-in-box flow (equals the drag for unit speed)."""
    return float(sol.operator.energy(sol.velocity))


# --- local gap problem ---------------------------------------------------------

@dataclass(frozen=True)
class GapScene:
    """The region ``Omega_R0`` between two parabolic walls, stair-stepped."""

    geometry: GapGeometry
    gap_cells: int = 8
    x_cells_per_root: float = 16.0
    growth: float = 1.08
    h_max_ratio: float = 0.05

    def __post_init__(self):
        if self.geometry.n != 2:
            raise ValueError("the gap oracle is two dimensional")
        if not self.geometry.eps > 0:
            raise ValueError("eps must be positive")
        if self.gap_cells < 8:
            raise ResolutionError("at least 8 cells are needed across the gap")

    def half_height(self, x):
        g = self.geometry
        return 0.5 * g.eps + g.kappa * np.asarray(x) ** 2

    def grid(self) -> TensorGrid:
        g = self.geometry
        R = g.r0
        root = np.sqrt(g.eps)
        top = float(self.half_height(R))
        h_max = self.h_max_ratio * R
        # one solid row beyond the walls is enough to hold the Dirichlet data
        band = min(3.0 * root, 0.5 * R)
        X = stretched_edges(-R, R, -band, band, root / self.x_cells_per_root, self.growth, h_max)
        Y = stretched_edges(-top - 0.05 * top, top + 0.05 * top, -0.5 * g.eps, 0.5 * g.eps,
                            g.eps / self.gap_cells, self.growth, h_max)
        return TensorGrid(X, Y)

    def labels(self, grid: TensorGrid) -> np.ndarray:
        xc, yc = grid.cell_centers()
        lim = self.half_height(xc)
        return np.where(yc >= lim, 1, np.where(yc <= -lim, 2, 0)).astype(np.int64)


def solve_gap(scene: GapScene, alpha: int, particle: int = 1, **kwargs):
    """Discrete correction ``w = u - u_bar`` on the local gap region.

    ``u_bar`` already meets the wall data exactly and the side data by
    construction, so ``w`` vanishes on every boundary and is driven by the
    body force ``-div sigma[u_bar, p_bar]``.  Returns the solution for ``w``.
    """
    g = scene.geometry
    grid = scene.grid()
    op = StokesOperator(grid, scene.labels(grid), g.mu, **kwargs)
    across = _cells_across(op, 0.0, np.inf)
    if across < scene.gap_cells:
        raise ResolutionError(f"only {across} cells across the gap, need {scene.gap_cells}")
    force = np.zeros(grid.n_ext)
    idx = op.unk_idx
    pts = grid.ext_points[idx]
    defect = stokes_defect(g, particle, alpha, pts)
    # the correction solves -div sigma[w] = div sigma[u_bar]
    force[idx] = defect[np.arange(idx.size), grid.ext_component[idx]]
    return solve(op, np.zeros(grid.n_ext), force,
                 description={"case": "gap", "eps": g.eps, "alpha": alpha, "particle": particle})
