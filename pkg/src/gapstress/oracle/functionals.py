"""Quantities extracted from discrete solutions: energies, boundary forces, peaks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import GapGeometry, psi
from .mac import DiscreteStokesSolution, OracleError


def energy(sol_i: DiscreteStokesSolution, sol_j: DiscreteStokesSolution) -> float:
    """Discrete ``int 2 mu e(u_i) : e(u_j)`` (the operator's strain energy form)."""
    if sol_i.operator is not sol_j.operator and not sol_i.grid.same_as(sol_j.grid):
        raise ValueError("solutions live on different grids")
    return float(sol_i.operator.energy(sol_i.velocity, sol_j.velocity))


def smoothstep(t):
    """Quintic ramp: 0 for t <= 0, 1 for t >= 1, C^2 in between."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


@dataclass(frozen=True)
class Cutoff:
    """Smooth function equal to 1 near particle 1 and 0 near particle 2 and the box.

    The particle split uses ``t = d2 / (d1 + d2)`` with ``d_i`` the distance to
    disk ``i``, ramped between ``t_lo`` and ``t_hi``; a radial ramp about the
    centre of particle 1 between ``rho_in`` and ``rho_out`` keeps it off the box.
    """

    t_lo: float = 0.2
    t_hi: float = 0.8
    rho_in: float = 0.6
    rho_out: float = 1.2

    def __call__(self, points, centers, radius):
        x = np.asarray(points, dtype=float)
        (c1, c2) = (np.asarray(c, dtype=float) for c in centers)
        r1 = np.linalg.norm(x - c1, axis=-1)
        d1 = np.maximum(r1 - radius, 0.0)
        d2 = np.maximum(np.linalg.norm(x - c2, axis=-1) - radius, 0.0)
        total = d1 + d2
        t = np.where(total > 0, d2 / np.where(total > 0, total, 1.0), 0.5)
        split = smoothstep((t - self.t_lo) / (self.t_hi - self.t_lo))
        radial = 1.0 - smoothstep((r1 - self.rho_in) / (self.rho_out - self.rho_in))
        return split * radial


DEFAULT_CUTOFFS = (Cutoff(0.2, 0.8, 0.6, 1.2), Cutoff(0.35, 0.65, 0.8, 1.45))


def background_solution(box, C2) -> DiscreteStokesSolution:
    """``u_b = sum C2^alpha (u_1^alpha + u_2^alpha) + u_0``."""
    vel = box.background.velocity.copy()
    pres = box.background.pressure.copy()
    for a, c in enumerate(np.asarray(C2, dtype=float)):
        for i in (0, 1):
            vel += c * box.modes[i][a].velocity
            pres += c * box.modes[i][a].pressure
    return DiscreteStokesSolution(box.operator, vel, pres, {"field": "u_b"})


def free_solution(box, X1, X2) -> DiscreteStokesSolution:
    """The force-free solution ``sum C1 u_1 + C2 u_2 + u_0`` from ``(C1 - C2, C2)``."""
    C1 = np.asarray(X1, dtype=float) + np.asarray(X2, dtype=float)
    vel = box.background.velocity.copy()
    pres = box.background.pressure.copy()
    for a in range(len(C1)):
        vel += C1[a] * box.modes[0][a].velocity + X2[a] * box.modes[1][a].velocity
        pres += C1[a] * box.modes[0][a].pressure + X2[a] * box.modes[1][a].pressure
    return DiscreteStokesSolution(box.operator, vel, pres, {"field": "u"})


def _test_field(box, beta: int, weight) -> np.ndarray:
    """``weight * psi_beta`` on fluid faces, ``psi_beta`` (times the truncation) on particle 1."""
    op = box.operator
    g = op.grid
    pts = g.ext_points
    vals = psi(beta, pts, n=2)[np.arange(g.n_ext), g.ext_component]
    v = np.zeros(g.n_ext)
    unk = op.unknown
    v[unk] = weight[unk] * vals[unk]
    on1 = op.ext_label == 1
    v[on1] = weight[on1] * vals[on1]
    return v


def _boundary_force(op, ub: DiscreteStokesSolution, v: np.ndarray) -> float:
    # S(u_b, v) - (p_b, div v); equals -int psi . sigma nu over particle 1
    div_v = op.Div[op.cells] @ v
    return -(float(v @ (op.K @ ub.velocity)) - float(ub.pressure[op.cells] @ div_v))


def blowup_factor(box, C2, cutoff: Cutoff = DEFAULT_CUTOFFS[0], truncation=None) -> np.ndarray:
    """``B_beta`` for every beta by the volume form with test field ``cutoff * psi_beta``.

    ``truncation`` (a callable on points, or ``None``) multiplies the test
    field everywhere, including on particle 1, to drop part of the boundary.
    """
    op = box.operator
    scene = box.scene
    pts = op.grid.ext_points
    weight_fluid = cutoff(pts, scene.centers, scene.radius)
    weight = np.where(op.ext_label == 1, 1.0, weight_fluid)
    if truncation is not None:
        weight = weight * truncation(pts)
    ub = background_solution(box, C2)
    return np.array([_boundary_force(op, ub, _test_field(box, b, weight)) for b in (1, 2, 3)])


def gap_truncation(scene, r0: float, width: float | None = None):
    """Weight vanishing on the gap part ``|x'| < r0`` of particle 1's boundary."""
    if r0 <= 0:
        return None
    width = 0.5 * r0 if width is None else width
    y_gap = 0.5 * scene.eps + scene.kappa * r0**2

    def weight(points):
        x, y = points[:, 0], points[:, 1]
        near = 1.0 - smoothstep((np.abs(x) - r0) / width)
        low = 1.0 - smoothstep((y - y_gap) / (0.5 * scene.radius))
        return 1.0 - near * low

    return weight


def blowup_factor_truncated(box, C2, r0: float, cutoff: Cutoff = DEFAULT_CUTOFFS[0]) -> np.ndarray:
    """``B_beta`` with the boundary restricted to ``|x'| >= r0`` (smoothly)."""
    return blowup_factor(box, C2, cutoff, gap_truncation(box.scene, r0))


def _gap_mask(sol: DiscreteStokesSolution, g: GapGeometry, xlo: float, xhi: float) -> np.ndarray:
    xc, yc = sol.grid.cell_centers()
    lim = 0.5 * g.eps + g.kappa * xc**2
    return sol.fluid & (np.abs(yc) < lim) & (np.abs(xc) >= xlo) & (np.abs(xc) < xhi)


def gap_pressure_average(sol: DiscreteStokesSolution, g: GapGeometry, xp: float, field=None) -> float:
    """Volume-weighted mean over the fluid cells of ``Omega_delta(xp)``."""
    grid = sol.grid
    d = float(g.eps + 2 * g.kappa * xp**2)
    if xp - d < grid.X[0] or xp + d > grid.X[-1]:
        raise OracleError("Omega_delta(xp) leaves the grid")
    xc, yc = grid.cell_centers()
    lim = 0.5 * g.eps + g.kappa * xc**2
    mask = sol.fluid & (np.abs(xc - xp) < d) & (np.abs(yc) < lim)
    if not mask.any():
        raise OracleError("no fluid cell in Omega_delta(xp)")
    q = sol.p if field is None else np.asarray(field).reshape(grid.ny, grid.nx)
    vol = grid.cell_volumes
    return float((q * vol)[mask].sum() / vol[mask].sum())


def max_gradient(sol: DiscreteStokesSolution, g: GapGeometry, t: float | None = None,
                 weight=None) -> float:
    """Largest Frobenius norm of the velocity gradient over fluid cells of ``Omega_t``.

    ``t`` defaults to ``sqrt(eps)``; ``weight(x)`` scales each cell value.
    """
    t = np.sqrt(g.eps) if t is None else t
    mask = _gap_mask(sol, g, 0.0, t)
    grad = np.linalg.norm(sol.gradient(), axis=(-2, -1))
    if weight is not None:
        xc, _ = sol.grid.cell_centers()
        grad = grad * weight(xc)
    return float(grad[mask].max())


def pressure_deviation(sol: DiscreteStokesSolution, g: GapGeometry, t: float | None = None) -> float:
    """Peak of ``|p - p_ref|`` over ``Omega_t`` (default ``t = sqrt(eps)``).

    ``p_ref`` is the mean pressure over the outer part of the gap,
    ``r0 / 2 <= |x'| < r0``, where the pressure is of order one.
    """
    t = np.sqrt(g.eps) if t is None else t
    ref_mask = _gap_mask(sol, g, 0.5 * g.r0, g.r0)
    vol = sol.grid.cell_volumes
    ref = float((sol.p * vol)[ref_mask].sum() / vol[ref_mask].sum())
    mask = _gap_mask(sol, g, 0.0, t)
    return float(np.abs(sol.p - ref)[mask].max())
