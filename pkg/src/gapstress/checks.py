"""Self-checks of the analytic layer, shared by ``gapstress verify`` and the tests.

Every check returns a :class:`CheckResult` whose ``worst_error`` is compared
against ``tolerance``; the comparison direction is fixed per check (errors
must stay below, observed orders must stay above).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import rates
from .coefficients import coefficients, derive_coefficients, failing_identities
from .fields import grad_u_bar, momentum_residual, p_bar, u_bar
from .geometry import GapGeometry, mode_count
from .stiffness import cramer_solve


@dataclass
class CheckResult:
    check_name: str
    status: str
    worst_error: float
    tolerance: float
    detail: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return asdict(self)


def _result(name, worst, tol, ok, detail=()) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", float(worst), float(tol), list(detail))


def random_gap_points(g: GapGeometry, count: int, rng: np.random.Generator,
                      radius_factor: float = 2.0, fill: float = 0.98) -> np.ndarray:
    """Points spread over ``Omega_{radius_factor * r0}``.

    ``x'`` is uniform in the ball, ``x_n`` uniform over the central fraction
    ``fill`` of the local gap height, so no point sits on a wall.
    """
    n = g.n
    direction = rng.normal(size=(count, n - 1))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = radius_factor * g.r0 * rng.random(count) ** (1.0 / (n - 1))
    if g.eps == 0:
        radius = np.maximum(radius, 1e-6 * g.r0)
    xp = direction * radius[:, None]
    d = g.eps + 2 * g.kappa * radius**2
    xn = (rng.random(count) - 0.5) * fill * d
    return np.column_stack([xp, xn])


# --- coefficients --------------------------------------------------------------

def check_coefficients(n_values=range(2, 9), kappas=("1/4", "1/2", "1", "2"),
                       override: dict | None = None) -> CheckResult:
    """Closed-form family against the family rebuilt from its defining system.

    ``override`` replaces coefficient values before the comparison (a test
    hook for injected mistakes such as ``{"b3": -4}``).
    """
    bad = []
    worst = Fraction(0)
    for n in n_values:
        for k in kappas:
            closed = coefficients(n, Fraction(k))
            if override:
                closed = closed.replace(**override)
            derived = derive_coefficients(n, Fraction(k))
            names = set(failing_identities(closed))
            for f in ("a1", "a2", "b1", "b2", "b3", "b4", "b5", "b6"):
                diff = abs(getattr(closed, f) - getattr(derived, f))
                worst = max(worst, diff)
                if diff != 0:
                    names.add(f)
            if names:
                bad.append(f"n={n} kappa={k}: " + ", ".join(sorted(names)))
    return _result("coefficients", float(worst), 0.0, not bad, bad)


# --- divergence ----------------------------------------------------------------

def check_divergence(n_values=(2, 3, 4), eps: float = 1e-3, kappa: float = 1.0, r0: float = 0.2,
                     points: int = 1000, seed: int = 0, tol: float = 1e-10) -> CheckResult:
    """``max |div u_bar_1^alpha|`` from analytic gradients over ``Omega_{2 r0}``."""
    rng = np.random.default_rng(seed)
    worst, detail = 0.0, []
    for n in n_values:
        g = GapGeometry(n, eps, kappa, r0)
        x = random_gap_points(g, points, rng)
        for alpha in range(1, mode_count(n) + 1):
            J = grad_u_bar(g, 1, alpha, x)
            err = float(np.abs(np.trace(J, axis1=-2, axis2=-1)).max())
            if err > tol:
                detail.append(f"n={n} alpha={alpha}: {err:.3e}")
            worst = max(worst, err)
    return _result("divergence", worst, tol, worst <= tol, detail)


# --- residual identities -------------------------------------------------------

def fd_momentum_residual(g: GapGeometry, particle: int, alpha: int, j: int, x, h,
                         with_rounding: bool = False):
    """``mu d_nn u^(j) - d_j p`` by central differences with per-point step ``h``.

    With ``with_rounding=True`` a per-point estimate of the rounding error of
    the stencil is returned as well.
    """
    x = np.asarray(x, dtype=float)
    n = g.n
    h = np.asarray(h, dtype=float)
    en = np.zeros(n)
    en[-1] = 1.0
    ej = np.zeros(n)
    ej[j - 1] = 1.0

    def u(y):
        return u_bar(g, particle, alpha, y, check=False)[..., j - 1]

    def p(y):
        return np.asarray(p_bar(g, particle, alpha, y, check=False))

    hc = h[:, None]
    u_mid = u(x)
    p_plus, p_minus = p(x + hc * ej), p(x - hc * ej)
    d2u = (u(x + hc * en) - 2 * u_mid + u(x - hc * en)) / h**2
    dp = (p_plus - p_minus) / (2 * h)
    value = g.mu * d2u - dp
    if not with_rounding:
        return value
    unit = np.finfo(float).eps
    rounding = 64 * unit * (4 * g.mu * np.abs(u_mid) / h**2
                            + (np.abs(p_plus) + np.abs(p_minus)) / h)
    return value, rounding


def residual_fd_order(g: GapGeometry, alpha: int, j: int, x, step: float = 0.05,
                      particle: int = 1) -> tuple[float, float]:
    """Observed order of the central-difference residual and the error at step ``h/2``.

    The step is ``step * max(delta(x'), eps)`` per point.  Points where the
    difference error is at the stencil's rounding level carry no order
    information and are skipped; when every point is skipped the residual is
    reproduced exactly and the order is reported as ``inf``.
    """
    x = np.asarray(x, dtype=float)
    exact = np.asarray(momentum_residual(g, particle, alpha, j, x, check=False))
    base = step * np.maximum(g.eps + 2 * g.kappa * np.sum(x[:, :-1] ** 2, axis=1), g.eps)
    v1, r1 = fd_momentum_residual(g, particle, alpha, j, x, base, with_rounding=True)
    v2, r2 = fd_momentum_residual(g, particle, alpha, j, x, base / 2, with_rounding=True)
    e1, e2 = np.abs(v1 - exact), np.abs(v2 - exact)
    keep = (e1 > 100 * r1) & (e2 > 100 * r2)
    if not keep.any():
        return math.inf, float(e2.max())
    order = float(np.median(np.log2(e1[keep] / e2[keep])))
    return order, float(e2.max())


def check_residuals(n_values=(2, 3), eps: float = 1e-3, kappa: float = 1.0, r0: float = 0.2,
                    points: int = 200, seed: int = 0, min_order: float = 1.9) -> CheckResult:
    """Closed-form momentum residuals against central differences under step halving.

    ``worst_error`` reports the smallest observed order, so the check passes
    when it is at least ``min_order``.
    """
    rng = np.random.default_rng(seed)
    lowest, detail = math.inf, []
    for n in n_values:
        g = GapGeometry(n, eps, kappa, r0)
        x = random_gap_points(g, points, rng, radius_factor=1.0)
        for alpha in range(1, mode_count(n) + 1):
            for j in range(1, n + 1):
                order, _ = residual_fd_order(g, alpha, j, x)
                if order < min_order:
                    detail.append(f"n={n} alpha={alpha} j={j}: order {order:.3f}")
                lowest = min(lowest, order)
    worst = lowest if math.isfinite(lowest) else 2.0
    return _result("residuals", worst, min_order, lowest >= min_order, detail)


# --- quadrature ----------------------------------------------------------------

def check_quadrature(n_values=(2, 3), eps_list=(1e-2, 1e-4, 1e-6, 1e-8), kappa: float = 1.0,
                     r0: float = 0.5, tol: float = 1e-9) -> CheckResult:
    """Adaptive quadrature against the closed forms, relative error."""
    worst, detail = 0.0, []
    for n in n_values:
        for eps in eps_list:
            closed = rates.gap_integral_closed(n, eps, kappa, r0)
            quad = rates.gap_integral_quadrature(n, eps, kappa, r0, rtol=1e-11)
            err = abs(quad - closed) / abs(closed)
            if not err <= tol:
                detail.append(f"n={n} eps={eps:g}: {err:.3e}")
            worst = max(worst, err)
    return _result("quadrature", worst, tol, worst <= tol, detail)


# --- Cramer vs LU --------------------------------------------------------------

def random_system(rng: np.random.Generator, size: int, max_condition: float = 1e6):
    """Gaussian random matrix and right side, redrawn until the condition is acceptable."""
    while True:
        M = rng.normal(size=(size, size))
        if np.linalg.cond(M) <= max_condition:
            return M, rng.normal(size=size)


def check_cramer(systems: int = 100, max_size: int = 15, seed: int = 0,
                 tol: float = 1e-12) -> CheckResult:
    """Determinant-ratio solves against LU on random systems up to the given condition."""
    rng = np.random.default_rng(seed)
    worst, detail = 0.0, []
    for k in range(systems):
        size = int(rng.integers(1, max_size + 1))
        M, y = random_system(rng, size)
        x_lu = np.linalg.solve(M, y)
        x_cr = cramer_solve(M, y)
        err = float(np.linalg.norm(x_cr - x_lu) / np.linalg.norm(x_lu))
        if err > tol:
            detail.append(f"system {k} (size {size}): {err:.3e}")
        worst = max(worst, err)
    return _result("cramer", worst, tol, worst <= tol, detail)


def run_all(settings: dict | None = None) -> list[CheckResult]:
    """Run every check; ``settings`` maps check names to keyword overrides."""
    settings = settings or {}
    return [
        check_coefficients(**settings.get("coefficients", {})),
        check_divergence(**settings.get("divergence", {})),
        check_residuals(**settings.get("residuals", {})),
        check_quadrature(**settings.get("quadrature", {})),
        check_cramer(**settings.get("cramer", {})),
    ]


__all__ = [
    "CheckResult", "check_coefficients", "check_cramer", "check_divergence",
    "check_quadrature", "check_residuals", "fd_momentum_residual", "random_gap_points",
    "random_system", "residual_fd_order", "run_all",
]
