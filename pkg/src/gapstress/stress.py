"""Leading-order Cauchy stress in the gap and blow-up exponent fits.

The prediction combines the auxiliary stresses ``sigma[u_bar_1^alpha, p_bar_1^alpha]``
with weights built from determinant ratios of the touching configuration.
Those ratios are inputs: they are fitted from oracle sweeps or supplied by the
caller, never defaulted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import stats

from .fields import sample
from .geometry import DomainError, GapGeometry, delta_at, mode_count
from .rates import l_alpha, leading_prefactor, rho
from .stiffness import limit_constants


class MissingRatioError(KeyError):
    """A determinant ratio or geometry constant needed by the model is absent."""


class HypothesisError(ValueError):
    """The vertical-translation ratio vanishes, so the lower bound says nothing."""


@dataclass(frozen=True)
class AsymptoticStressModel:
    """Determinant ratios and geometry constants for one dimension.

    For n = 2, 3 ``ratios[alpha]`` is ``det A_1^alpha / det A_0`` when
    ``alpha <= n`` and ``det A_2^alpha / det A_0`` otherwise, and
    ``geometry_constants[alpha]`` (alpha <= n) is the normalized constant
    G~ entering the denominator.  For n > 3 ``ratios[alpha]`` is
    ``det A_3^alpha / det A`` and no geometry constants are used.
    """

    n: int
    ratios: Mapping[int, float]
    geometry_constants: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be at least 2")
        for k, v in {**self.ratios, **self.geometry_constants}.items():
            if not math.isfinite(v):
                raise ValueError(f"non-finite entry for mode {k}")

    @property
    def branch(self) -> str:
        return "low" if self.n in (2, 3) else "high"

    def ratio(self, alpha: int) -> float:
        try:
            return float(self.ratios[alpha])
        except KeyError:
            raise MissingRatioError(f"no determinant ratio for mode {alpha}") from None

    def geometry_constant(self, alpha: int) -> float:
        try:
            return float(self.geometry_constants[alpha])
        except KeyError:
            raise MissingRatioError(f"no geometry constant for mode {alpha}") from None

    def weight(self, g: GapGeometry, alpha: int) -> float:
        """Scalar multiplying ``sigma[u_bar_1^alpha, p_bar_1^alpha]``."""
        r = self.ratio(alpha)
        if self.branch == "high" or alpha > self.n:
            return r
        inv_rho = 1.0 / rho(self.n, g.eps)
        lead = l_alpha(alpha, self.n, g.mu) * leading_prefactor(self.n, g.kappa)
        return r * inv_rho / lead / (1.0 + self.geometry_constant(alpha) * inv_rho)


@dataclass(frozen=True, eq=False)
class StressPrediction:
    """Predicted stress, its strain and pressure parts, and the remainder bound."""

    stress: np.ndarray
    strain_part: np.ndarray
    pressure_part: np.ndarray
    remainder: np.ndarray


def predict_stress(model: AsymptoticStressModel, g: GapGeometry, x) -> StressPrediction:
    """Leading-term stress at gap points ``x`` (shape ``(..., n)``)."""
    if g.n != model.n:
        raise DomainError("model and geometry dimensions differ")
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1] + (g.n, g.n)
    strain = np.zeros(shape)
    pressure = np.zeros(shape)
    eye = np.eye(g.n)
    for alpha in range(1, mode_count(g.n) + 1):
        w = model.weight(g, alpha)
        if w == 0.0:
            continue
        s = sample(g, 1, alpha, x)
        sym = 0.5 * (s.grad + np.swapaxes(s.grad, -1, -2))
        strain += w * 2.0 * g.mu * sym
        pressure -= w * s.pressure[..., None, None] * eye
    d = delta_at(g, x)
    if model.branch == "low":
        remainder = d**-0.5 / rho(g.n, g.eps)
    else:
        remainder = d**-0.5
    return StressPrediction(strain + pressure, strain, pressure, np.asarray(remainder, dtype=float))


def stress_bounds(model: AsymptoticStressModel, g: GapGeometry) -> tuple[float, float]:
    """Lower and upper size of the stress on the line ``x' = 0``.

    The lower bound uses the vertical-translation ratio, the upper one the
    largest ratio among the translations.
    """
    n = g.n
    rn = model.ratio(n)
    if rn == 0.0:
        raise HypothesisError("the vertical-translation ratio vanishes")
    largest = max(abs(model.ratio(a)) for a in range(1, n + 1))
    if model.branch == "low":
        scale = g.kappa ** ((n - 1) / 2.0) / (g.mu * g.eps**2 * rho(n, g.eps))
    else:
        scale = 1.0 / g.eps**2
    return abs(rn) * scale, largest * scale


def fit_exponent(sweep) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log eps`` and its standard error."""
    pts = [(float(e), float(v)) for e, v in sweep]
    if len(pts) < 3:
        raise ValueError("at least three points are needed")
    if any(e <= 0 or v <= 0 for e, v in pts):
        raise ValueError("eps and values must be positive")
    e, v = np.log(np.array(pts)).T
    fit = stats.linregress(e, v)
    return float(fit.slope), float(fit.stderr)


def diagonal_lead(n: int, alpha: int, kappa: float, mu: float = 1.0, corrected: bool = False) -> float:
    """Coefficient of ``rho_n`` in ``a_11^{alpha alpha}``.

    ``corrected=True`` applies the factor sqrt(pi) that the n = 2 gap integral
    actually carries (its leading term is ``pi / sqrt(2 kappa eps)``).
    """
    lead = l_alpha(alpha, n, mu) * leading_prefactor(n, kappa)
    if corrected and n == 2:
        lead *= math.sqrt(math.pi)
    return lead


def fit_geometry_constant(sweep, n: int, alpha: int, kappa: float, mu: float = 1.0,
                          k_n: float | None = None, corrected: bool = False) -> dict:
    """Extrapolate ``a_11^{alpha alpha}(eps) - lead * rho_n(eps)`` to eps -> 0.

    ``sweep`` holds ``(eps, a_11)`` pairs on a geometric eps sequence.  When
    ``k_n`` is given the split ``G* = L_alpha K_n + M*`` is reported too.
    """
    if n not in (2, 3) or not 1 <= alpha <= n:
        raise DomainError("the geometry constant is defined for n = 2, 3 and alpha <= n")
    lead = diagonal_lead(n, alpha, kappa, mu, corrected)
    rem = [(e, a - lead * rho(n, e)) for e, a in sweep]
    value, err = limit_constants(rem)
    out = {"value": float(value[0]), "error": float(err[0]), "lead": lead}
    if k_n is not None:
        lk = l_alpha(alpha, n, mu) * k_n
        out["L_alpha_K_n"] = lk
        out["M_star"] = out["value"] - lk
    return out
