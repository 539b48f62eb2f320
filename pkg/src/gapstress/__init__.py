"""Asymptotic stress toolkit for Stokes flow between two nearly touching particles."""

from .coefficients import AuxCoefficients, coefficients, derive_coefficients
from .fields import FieldSample, p_bar, sample, stress_at, u_bar
from .geometry import DomainError, GapGeometry, RigidMode, decode_mode, encode_mode, psi
from .kernels import BACKEND
from .rates import gap_integral_asymptotic, gap_integral_closed, gap_integral_quadrature, rho
from .stiffness import StiffnessSystem, cramer_c1_minus_c2, cramer_c2, solve_block_system
from .stress import AsymptoticStressModel, predict_stress, stress_bounds

__all__ = [
    "AsymptoticStressModel",
    "AuxCoefficients",
    "BACKEND",
    "DomainError",
    "FieldSample",
    "GapGeometry",
    "RigidMode",
    "StiffnessSystem",
    "coefficients",
    "cramer_c1_minus_c2",
    "cramer_c2",
    "decode_mode",
    "derive_coefficients",
    "encode_mode",
    "gap_integral_asymptotic",
    "gap_integral_closed",
    "gap_integral_quadrature",
    "p_bar",
    "predict_stress",
    "psi",
    "rho",
    "sample",
    "solve_block_system",
    "stress_at",
    "stress_bounds",
    "u_bar",
]

__version__ = "0.1.0"
