"""Rate functions, gap constants and narrow-gap integrals.

The central scalar is the gap integral

    I_n(eps) = int_{|x'| < r0} dx' / (eps + 2 kappa |x'|^2),

which sets the growth of the diagonal stiffness entries.  It has closed forms
for n = 2, 3 and is evaluated by adaptive quadrature on the radial reduction
for every other case and weight.
"""

from __future__ import annotations

import math

from . import kernels
from .geometry import DomainError, GapGeometry, mode_count


class ConvergenceError(ArithmeticError):
    """An iterative or adaptive procedure missed its tolerance."""


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"rate functions need 0 < eps < 1, got {eps}")
    return eps


def _check_log_eps(eps: float) -> float:
    eps = _check_eps(eps)
    if eps >= math.exp(-1.0):
        raise DomainError(f"|ln eps| branches need eps < 1/e, got {eps}")
    return eps


def rho(n: int, eps: float) -> float:
    """Growth rate of the leading diagonal entries: eps^-1/2, |ln eps| or 1."""
    if n == 2:
        return _check_eps(eps) ** -0.5
    if n == 3:
        return abs(math.log(_check_log_eps(eps)))
    if n > 3:
        _check_eps(eps)
        return 1.0
    raise DomainError("n must be at least 2")


def r_eps(n: int, eps: float) -> float:
    """Convergence rate of the blow-up factors towards their touching limits."""
    if n == 2:
        return _check_eps(eps) ** (1.0 / 24.0)
    if n == 3:
        return 1.0 / abs(math.log(_check_log_eps(eps)))
    if n > 3:
        return _check_eps(eps) ** min(1.0 / 12.0, (n - 3) / 24.0)
    raise DomainError("n must be at least 2")


def varrho(alpha: int, n: int, eps: float) -> float:
    """Per-mode size of the remainder in the diagonal expansion (alpha <= n)."""
    if not 1 <= alpha <= n:
        raise DomainError(f"varrho is defined for 1 <= alpha <= n, got alpha={alpha}, n={n}")
    if alpha <= n - 1:
        return _check_eps(eps) ** ((n - 1) / 24.0)
    if n == 2:
        return abs(math.log(_check_log_eps(eps)))
    return _check_eps(eps) ** ((n - 2) / 24.0)


def l_alpha(alpha: int, n: int, mu: float = 1.0) -> float:
    """Viscous weight: mu for horizontal translations, 2 mu for the rest."""
    if not 1 <= alpha <= mode_count(n):
        raise DomainError(f"alpha must lie in 1..{mode_count(n)}")
    return mu if alpha <= n - 1 else 2.0 * mu


def omega(n: int, eps: float) -> float:
    """Rate |ln eps| for n = 2 and 1 for n = 3; undefined in other dimensions."""
    if n == 2:
        return abs(math.log(_check_log_eps(eps)))
    if n == 3:
        _check_eps(eps)
        return 1.0
    raise DomainError("omega is only defined for n = 2 and n = 3")


def k_const(n: int, kappa: float, r0: float) -> float:
    """Order-one constant of the gap integral expansion (n = 2, 3)."""
    if n == 2:
        return -1.0 / (kappa * r0)
    if n == 3:
        return math.pi * (math.log(math.sqrt(2.0 * kappa)) + math.log(r0)) / kappa
    raise DomainError("K_n is only defined for n = 2 and n = 3")


def leading_prefactor(n: int, kappa: float) -> float:
    """(pi / 2 kappa)^((n-1)/2)."""
    return (math.pi / (2.0 * kappa)) ** ((n - 1) / 2.0)


def _check_closed(n: int, eps: float, kappa: float, r0: float) -> None:
    if n not in (2, 3):
        raise DomainError("closed forms exist only for n = 2 and n = 3")
    if not eps > 0:
        raise DomainError(f"gap integral diverges for eps <= 0 (eps={eps})")
    GapGeometry(n, eps, kappa, r0)


def gap_integral_closed(n: int, eps: float, kappa: float, r0: float) -> float:
    """Exact value of the unweighted gap integral for n = 2 or 3."""
    _check_closed(n, eps, kappa, r0)
    if n == 2:
        return 2.0 / math.sqrt(2.0 * kappa * eps) * math.atan(r0 * math.sqrt(2.0 * kappa / eps))
    return math.pi / (2.0 * kappa) * math.log1p(2.0 * kappa * r0 * r0 / eps)


def gap_integral_asymptotic(n: int, eps: float, kappa: float, r0: float,
                            corrected: bool = False) -> float:
    """Two-term expansion ``prefactor * rho_n(eps) + K_n``.

    With ``corrected=False`` the prefactor is ``(pi/2 kappa)^((n-1)/2)`` in every
    dimension.  For n = 2 the exact leading term of the closed form is
    ``pi / sqrt(2 kappa eps)``, larger by ``sqrt(pi)``; ``corrected=True`` uses
    that value.  The two agree for n = 3.
    """
    _check_closed(n, eps, kappa, r0)
    lead = leading_prefactor(n, kappa)
    if corrected and n == 2:
        lead *= math.sqrt(math.pi)
    return lead * rho(n, eps) + k_const(n, kappa, r0)


def asymptotic_defect(n: int, eps: float, kappa: float, r0: float,
                      corrected: bool = False) -> float:
    """closed - asymptotic, computed without cancelling two large numbers."""
    _check_closed(n, eps, kappa, r0)
    if n == 2:
        # atan(a) - pi/2 = -atan(1/a) for a > 0
        a = r0 * math.sqrt(2.0 * kappa / eps)
        scale = 2.0 / math.sqrt(2.0 * kappa * eps)
        exact_lead = math.pi / math.sqrt(2.0 * kappa * eps)
        defect = -scale * math.atan(1.0 / a) - k_const(2, kappa, r0)
        if not corrected:
            defect += exact_lead - leading_prefactor(2, kappa) * rho(2, eps)
        return defect
    return math.pi / (2.0 * kappa) * math.log1p(eps / (2.0 * kappa * r0 * r0))


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (equals 2 for dim = 1)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


WEIGHTS = ("none", "xk2", "r2")


def gap_integral_quadrature(n: int, eps: float, kappa: float, r0: float,
                            weight: str = "none", rtol: float = 1e-10,
                            max_levels: int = 60) -> float:
    """Gap integral by adaptive Gauss-Kronrod quadrature on the radial profile.

    ``weight`` is ``"none"``, ``"xk2"`` (one horizontal coordinate squared) or
    ``"r2"`` (``|x'|^2``).  The interval ``[0, r0]`` is first split into panels
    that double in width from ``eps/100`` so the boundary layer of width
    ``sqrt(eps)`` near the origin is isolated, then every panel is refined
    adaptively.
    """
    if weight not in WEIGHTS:
        raise DomainError(f"weight must be one of {WEIGHTS}")
    if n < 2:
        raise DomainError("n must be at least 2")
    if not eps >= 0:
        raise DomainError("eps must be nonnegative")
    if eps > 0:
        GapGeometry(n, eps, kappa, r0)
    power = n - 2 + (0 if weight == "none" else 2)
    if eps == 0 and power < 2:
        raise DomainError("the integral diverges at eps = 0 for this weight and dimension")
    factor = sphere_area(n - 1)
    if weight == "xk2":
        factor /= n - 1

    width = eps / 100.0 if eps > 0 else r0 * 2.0**-40
    edges = [0.0]
    while edges[-1] + width < r0:
        edges.append(edges[-1] + width)
        width *= 2.0
    edges.append(r0)
    parts = []
    try:
        for a, b in zip(edges[:-1], edges[1:]):
            value, _, _ = kernels.gk_radial(eps, kappa, power, a, b, rtol, max_levels)
            parts.append(value)
    except ArithmeticError as exc:
        raise ConvergenceError(
            f"quadrature missed rtol={rtol} within {max_levels} refinement levels"
        ) from exc
    return factor * math.fsum(parts)


def leading_a11_diag(g: GapGeometry, alpha: int, geometry_constant: float) -> float:
    """Asymptotic diagonal stiffness ``L_alpha prefactor rho_n + G*``."""
    if g.n not in (2, 3):
        raise DomainError("the diagonal expansion is stated for n = 2 and n = 3")
    return l_alpha(alpha, g.n, g.mu) * leading_prefactor(g.n, g.kappa) * rho(g.n, g.eps) + geometry_constant


def truncated_tail_bound(r0: float, c: float) -> float:
    """Exponentially small bound ``C / r0 * exp(-1 / (2 C r0))``."""
    if not (r0 > 0 and c > 0):
        raise DomainError("r0 and C must be positive")
    return c / r0 * math.exp(-1.0 / (2.0 * c * r0))
