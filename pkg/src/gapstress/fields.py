"""Explicit singular velocity and pressure fields in the narrow gap.

For particle ``i`` and rigid mode ``alpha`` the auxiliary velocity is

    u = psi_alpha (1/2 + s G) + s (G^2 - 1/4) F_alpha,      s = (-1)^(i-1),

with ``G = x_n / delta`` and a correction ``F_alpha`` that makes the field
divergence free.  The matching pressure is ``s * P_alpha``.  All routines are
vectorized over the leading axes of ``x`` and written with plain arithmetic so
they accept complex points; :func:`hessian_u_bar` relies on that to obtain
exact second derivatives by complex-step differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import AuxCoefficients, coefficients
from .geometry import (
    GapGeometry,
    RigidMode,
    as_mode,
    check_gap_points,
    horizontal_sq,
    psi,
    psi_gradient,
)


def _coeffs(g: GapGeometry, c: AuxCoefficients | None) -> dict[str, float]:
    c = coefficients(g.n, g.kappa) if c is None else c
    return c.as_floats()


def _sign(particle: int) -> float:
    if particle not in (1, 2):
        raise ValueError(f"particle index must be 1 or 2, got {particle}")
    return 1.0 if particle == 1 else -1.0


def _prepare(g, mode, x, check):
    mode = as_mode(g.n, mode)
    x = check_gap_points(g, x) if check else np.asarray(x)
    if x.dtype.kind not in "fc":
        x = x.astype(float)
    return mode, x


class _Kinematics:
    """Shared scalar quantities at a batch of points."""

    def __init__(self, g: GapGeometry, x: np.ndarray):
        n = g.n
        self.n = n
        self.kappa = g.kappa
        self.eps = g.eps
        self.xp = x[..., :-1]
        self.z = x[..., -1]
        self.s = horizontal_sq(x)
        self.d = g.eps + 2 * g.kappa * self.s
        self.G = self.z / self.d
        self.Q = self.G * self.G - 0.25
        # T = (x' . grad delta) / delta
        self.T = 4 * g.kappa * self.s / self.d
        shape = x.shape[:-1] + (n,)
        # gradients of G, Q and T (last axis: derivative direction)
        self.dG = np.zeros(shape, dtype=x.dtype)
        self.dG[..., :-1] = -4 * g.kappa * self.xp * (self.z / self.d**2)[..., None]
        self.dG[..., -1] = 1.0 / self.d
        self.dQ = 2 * self.G[..., None] * self.dG
        self.dT = np.zeros(shape, dtype=x.dtype)
        self.dT[..., :-1] = 8 * g.kappa * self.xp * (g.eps / self.d**2)[..., None]


def _correction(k: _Kinematics, cf: dict, mode: RigidMode):
    """Return ``F_alpha`` and its gradient ``dF[..., a, b] = d F^(a) / d x_b``."""
    n = k.n
    shape = k.z.shape
    F = np.zeros(shape + (n,), dtype=k.z.dtype)
    dF = np.zeros(shape + (n, n), dtype=k.z.dtype)
    alpha = mode.alpha
    if alpha <= n - 1:
        F[..., -1] = 2 * k.kappa * k.xp[..., alpha - 1]
        dF[..., -1, alpha - 1] = 2 * k.kappa
    elif alpha == n:
        a1, a2 = cf["a1"], cf["a2"]
        inv_d = 1.0 / k.d
        F[..., :-1] = a1 * k.xp * inv_d[..., None]
        for i in range(n - 1):
            for b in range(n - 1):
                term = -a1 * k.xp[..., i] * 4 * k.kappa * k.xp[..., b] * inv_d**2
                if i == b:
                    term = term + a1 * inv_d
                dF[..., i, b] = term
        inner = a1 * k.T + a2
        F[..., -1] = k.G * inner
        dF[..., -1, :] = k.dG * inner[..., None] + (k.G * a1)[..., None] * k.dT
    elif alpha <= 2 * n - 1:
        b1, b2, b3, b4, b5 = cf["b1"], cf["b2"], cf["b3"], cf["b4"], cf["b5"]
        kk = alpha - n - 1  # zero-based index of x_{alpha - n}
        xk = k.xp[..., kk]
        inv_d = 1.0 / k.d
        for i in range(n - 1):
            xi = k.xp[..., i]
            F[..., i] = b1 * xi * xk * inv_d
            for b in range(n - 1):
                xb = k.xp[..., b]
                term = -b1 * xi * xk * 4 * k.kappa * xb * inv_d**2
                if i == b:
                    term = term + b1 * xk * inv_d
                if kk == b:
                    term = term + b1 * xi * inv_d
                dF[..., i, b] = term
        # (b2 + b3 x_n G) e_{alpha - n}
        F[..., kk] = F[..., kk] + b2 + b3 * k.z * k.G
        dF[..., kk, :-1] = dF[..., kk, :-1] + (b3 * k.z)[..., None] * k.dG[..., :-1]
        dF[..., kk, -1] = dF[..., kk, -1] + 2 * b3 * k.G
        inner = b1 * k.T + b4
        F[..., -1] = xk * k.G * inner + b5 * xk * k.z * k.G**2
        d_last = (
            (xk * inner)[..., None] * k.dG
            + (xk * k.G * b1)[..., None] * k.dT
            + (2 * b5 * xk * k.z * k.G)[..., None] * k.dG
        )
        d_last[..., kk] = d_last[..., kk] + k.G * inner + b5 * k.z * k.G**2
        d_last[..., -1] = d_last[..., -1] + b5 * xk * k.G**2
        dF[..., -1, :] = d_last
    return F, dF


def _pressure(k: _Kinematics, cf: dict, mode: RigidMode, mu: float):
    n = k.n
    alpha = mode.alpha
    if alpha <= n - 1:
        return mu * k.z * 4 * k.kappa * k.xp[..., alpha - 1] / k.d**2
    if alpha == n:
        a1, a2 = cf["a1"], cf["a2"]
        return -mu * a1 / (4 * k.kappa * k.d**2) + 3 * mu * k.z**2 / k.d**3 * (a1 * k.T + a2)
    if alpha <= 2 * n - 1:
        b1, b4, b6 = cf["b1"], cf["b4"], cf["b6"]
        xk = k.xp[..., alpha - n - 1]
        return mu * xk / k.d**2 * (3 * k.z**2 / k.d * (b1 * k.T + b4) + b6)
    return np.zeros_like(k.z)


def correction_field(g: GapGeometry, mode, x, c: AuxCoefficients | None = None, check: bool = True):
    """The divergence-fixing correction ``F_alpha`` at points ``x``."""
    mode, x = _prepare(g, mode, x, check)
    F, _ = _correction(_Kinematics(g, x), _coeffs(g, c), mode)
    return F


def u_bar(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None, check: bool = True):
    """Auxiliary velocity of ``particle`` (1 or 2) moving with rigid ``mode``."""
    sgn = _sign(particle)
    mode, x = _prepare(g, mode, x, check)
    k = _Kinematics(g, x)
    F, _ = _correction(k, _coeffs(g, c), mode)
    base = psi(mode, x, g.n)
    return base * (0.5 + sgn * k.G)[..., None] + sgn * k.Q[..., None] * F


def p_bar(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None, check: bool = True):
    """Auxiliary pressure paired with :func:`u_bar`."""
    sgn = _sign(particle)
    mode, x = _prepare(g, mode, x, check)
    k = _Kinematics(g, x)
    out = sgn * _pressure(k, _coeffs(g, c), mode, g.mu)
    return out if np.ndim(out) else out.item()


def grad_u_bar(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None, check: bool = True):
    """Analytic gradient ``J[..., a, b] = d u^(a) / d x_b`` of :func:`u_bar`."""
    sgn = _sign(particle)
    mode, x = _prepare(g, mode, x, check)
    k = _Kinematics(g, x)
    F, dF = _correction(k, _coeffs(g, c), mode)
    base = psi(mode, x, g.n)
    J = psi_gradient(mode, g.n) * (0.5 + sgn * k.G)[..., None, None]
    J = J + sgn * base[..., :, None] * k.dG[..., None, :]
    J = J + sgn * F[..., :, None] * k.dQ[..., None, :]
    J = J + sgn * k.Q[..., None, None] * dF
    return J


def _complex_step(func, x, h=1e-30):
    """Jacobian of ``func`` (vectorized, analytic) by the complex-step method.

    The derivative direction is appended as the last axis of the result.
    """
    x = np.asarray(x, dtype=float)
    cols = []
    for b in range(x.shape[-1]):
        xc = x.astype(complex)
        xc[..., b] += 1j * h
        cols.append(np.imag(func(xc)) / h)
    return np.stack(cols, axis=-1)


def hessian_u_bar(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None):
    """Second derivatives ``H[..., a, b, e] = d^2 u^(a) / d x_b d x_e`` (complex step)."""
    x = np.asarray(x, dtype=float)
    return _complex_step(lambda y: grad_u_bar(g, particle, mode, y, c, check=False), x)


def grad_p_bar(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None):
    """Pressure gradient by complex-step differentiation of :func:`p_bar`."""
    x = np.asarray(x, dtype=float)
    return _complex_step(lambda y: np.asarray(p_bar(g, particle, mode, y, c, check=False)), x)


def stokes_defect(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None):
    """Full divergence of the stress, ``mu * Laplacian(u) - grad(p)``, at ``x``."""
    H = hessian_u_bar(g, particle, mode, x, c)
    lap = np.trace(H, axis1=-2, axis2=-1)
    return g.mu * lap - grad_p_bar(g, particle, mode, x, c)


def momentum_residual(
    g: GapGeometry,
    particle: int,
    mode,
    j: int,
    x,
    c: AuxCoefficients | None = None,
    form: str = "derived",
    check: bool = True,
):
    """Closed form of ``mu d_nn u^(j) - d_j p`` for the auxiliary pair.

    ``form="derived"`` returns the expressions that actually hold for the
    fields above.  ``form="printed"`` reproduces the commonly quoted version,
    which omits the ``2 mu / delta`` contribution of the rigid part for the
    tilting rotations, attaches the ``b3`` term to every horizontal component,
    and carries ``5 G^2 - 6`` in place of ``5 G^2 - 3/8`` in the vertical
    component.  The two agree for every other mode.
    """
    if form not in ("derived", "printed"):
        raise ValueError("form must be 'derived' or 'printed'")
    sgn = _sign(particle)
    mode, x = _prepare(g, mode, x, check)
    n = g.n
    if not 1 <= j <= n:
        raise ValueError(f"component index j must lie in 1..{n}")
    cf = _coeffs(g, c)
    k = _Kinematics(g, x)
    mu, kap = g.mu, g.kappa
    alpha = mode.alpha
    z, d = k.z, k.d
    zero = np.zeros_like(z)
    if alpha >= 2 * n:
        return zero if np.ndim(zero) else zero.item()
    if j == n:
        if n < alpha <= 2 * n - 1:
            xk = k.xp[..., alpha - n - 1]
            if form == "derived":
                out = mu * cf["b5"] * xk * k.G * (40 * k.G**2 - 3) / (2 * d)
            else:
                out = 4 * mu * cf["b5"] * xk * k.G * (5 * k.G**2 - 6) / d
        else:
            out = zero
        out = sgn * out
        return out if np.ndim(out) else out.item()

    xj = k.xp[..., j - 1]
    if alpha <= n - 1:
        xa = k.xp[..., alpha - 1]
        out = -4 * kap * mu * z * ((1.0 if j == alpha else 0.0) / d**2 - 8 * kap * xa * xj / d**3)
    elif alpha == n:
        a1, a2 = cf["a1"], cf["a2"]
        inner = a1 * k.T + a2
        d_inner = a1 * k.dT[..., j - 1]
        out = -3 * mu * z**2 * (d_inner / d**3 - 3 * inner * 4 * kap * xj / d**4)
    else:
        b1, b3, b4 = cf["b1"], cf["b3"], cf["b4"]
        kk = alpha - n
        xk = k.xp[..., kk - 1]
        inner = b1 * k.T + b4
        d_inner = b1 * k.dT[..., j - 1]
        bracket = (
            (1.0 if j == kk else 0.0) * inner / d**3
            + xk * d_inner / d**3
            - 3 * xk * inner * 4 * kap * xj / d**4
        )
        out = -3 * mu * z**2 * bracket
        if form == "printed":
            out = out + mu * b3 * (24 * k.G**2 - 1) / (2 * d)
        elif j == kk:
            out = out + mu * (b3 * (24 * k.G**2 - 1) + 4) / (2 * d)
    out = sgn * out
    return out if np.ndim(out) else out.item()


@dataclass(frozen=True)
class FieldSample:
    x: np.ndarray
    velocity: np.ndarray
    pressure: np.ndarray
    grad: np.ndarray
    strain: np.ndarray
    stress: np.ndarray

    @property
    def divergence(self) -> np.ndarray:
        return np.trace(self.grad, axis1=-2, axis2=-1)


def sample(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None, check: bool = True) -> FieldSample:
    """Velocity, pressure, gradient, strain and stress of the auxiliary pair."""
    x = np.asarray(x, dtype=float)
    u = u_bar(g, particle, mode, x, c, check)
    p = np.asarray(p_bar(g, particle, mode, x, c, check))
    J = grad_u_bar(g, particle, mode, x, c, check)
    e = 0.5 * (J + np.swapaxes(J, -1, -2))
    sigma = 2 * g.mu * e - p[..., None, None] * np.eye(g.n)
    return FieldSample(x=x, velocity=u, pressure=p, grad=J, strain=e, stress=sigma)


def stress_at(g: GapGeometry, particle: int, mode, x, c: AuxCoefficients | None = None, check: bool = True):
    """Cauchy stress ``2 mu e(u) - p I`` of the auxiliary pair."""
    return sample(g, particle, mode, x, c, check).stress
