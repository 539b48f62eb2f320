"""One complete oracle experiment on a two-disk box at a given eps."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import stiffness as st
from .functionals import (DEFAULT_CUTOFFS, blowup_factor, blowup_factor_truncated, energy,
                          free_solution, max_gradient, pressure_deviation)
from .scenes import BoxScene, default_boundary_data, solve_box


@dataclass(eq=False)
class BoxStudy:
    eps: float
    system: st.StiffnessSystem
    gram_asymmetry: float
    X1: np.ndarray
    X2: np.ndarray
    c2_cramer: np.ndarray
    c2_reduced: np.ndarray
    diff_cramer: np.ndarray
    diff_reduced: np.ndarray
    factors: np.ndarray
    factors_cutoff: list[np.ndarray]
    factors_truncated: dict
    max_grad: float
    pressure_dev: float
    mode_max_grad: float
    mode_pressure_dev: float
    min_eig_A: float
    det_F0: float
    flux_correction: float
    info: dict = field(default_factory=dict)

    @property
    def cutoff_discrepancy(self) -> float:
        """Largest relative disagreement between the direct and cutoff factors."""
        scale = max(np.abs(self.factors).max(), 1e-300)
        return float(max(np.abs(f - self.factors).max() for f in self.factors_cutoff) / scale)

    def row(self) -> dict:
        out = {"eps": self.eps, "max_grad": self.max_grad, "max_pressure_dev": self.pressure_dev,
               "mode_max_grad": self.mode_max_grad, "mode_pressure_dev": self.mode_pressure_dev,
               "min_eig_A": self.min_eig_A, "det_F0": self.det_F0,
               "cutoff_discrepancy": self.cutoff_discrepancy}
        for a in range(3):
            out[f"B_{a + 1}"] = float(self.factors[a])
            out[f"C2_{a + 1}"] = float(self.X2[a])
            out[f"C1mC2_{a + 1}"] = float(self.X1[a])
            out[f"a11_{a + 1}{a + 1}"] = float(self.system.A[a, a])
        return out


def study_box(scene: BoxScene, boundary_data=default_boundary_data, r0: float = 0.2,
              truncation_radii=(0.05, 0.1), mode: int = 2) -> BoxStudy:
    """Solve the decomposed problems and evaluate every derived quantity.

    ``mode`` selects the single auxiliary problem ``u_1^mode`` whose peak
    gradient and pressure are reported next to the force-free solution.
    """
    t0 = time.perf_counter()
    box = solve_box(scene, boundary_data)
    t_solve = time.perf_counter() - t0
    system, asym = st.assemble_from_fields(energy, box.modes, box.background)
    X1, X2 = st.solve_block_system(system)
    factors = st.reduced_blowup(system, X2)
    g = scene.geometry(r0)
    u = free_solution(box, X1, X2)
    single = box.modes[0][mode - 1]
    F0, _ = st.f0_matrices(system, 1, 2)
    info = dict(box.info)
    info.update(solve_seconds=t_solve, total_seconds=time.perf_counter() - t0,
                symmetry=system.symmetry_defects(), residual=st.block_residual(system, X1, X2))
    return BoxStudy(
        eps=scene.eps, system=system, gram_asymmetry=asym, X1=X1, X2=X2,
        c2_cramer=st.cramer_c2(system, "exact"), c2_reduced=st.cramer_c2(system, "reduced"),
        diff_cramer=st.cramer_c1_minus_c2(system.A, factors, "exact"),
        diff_reduced=st.cramer_c1_minus_c2(system.A, factors, "reduced", n=2),
        factors=factors,
        factors_cutoff=[blowup_factor(box, X2, c) for c in DEFAULT_CUTOFFS],
        factors_truncated={r: blowup_factor_truncated(box, X2, r) for r in truncation_radii},
        max_grad=max_gradient(u, g), pressure_dev=pressure_deviation(u, g),
        mode_max_grad=max_gradient(single, g), mode_pressure_dev=pressure_deviation(single, g),
        min_eig_A=float(np.linalg.eigvalsh(system.A).min()), det_F0=st.determinant(F0),
        flux_correction=box.flux_correction, info=info,
    )
