"""Gap geometry, normalized height and the rigid-displacement basis.

The two particles face each other across the thin region

    Omega_t = {x = (x', x_n) : |x_n| < eps/2 + kappa |x'|^2, |x'| < t}

whose vertical thickness is the gap function ``delta(x') = eps + 2 kappa |x'|^2``.
Points are stored as arrays whose last axis has length ``n`` (the last entry is
the vertical coordinate ``x_n``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

BOUNDARY_TOL = 1e-12


class DomainError(ValueError):
    """A point or parameter lies outside the region where a formula is valid."""


class SingularityError(DomainError):
    """Evaluation at the touching point of the eps = 0 configuration."""


@dataclass(frozen=True)
class GapGeometry:
    n: int
    eps: float
    kappa: float
    r0: float
    mu: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n}")
        if not self.eps >= 0:
            raise DomainError(f"eps must be nonnegative, got {self.eps}")
        if not (self.kappa > 0 and self.r0 > 0 and self.mu > 0):
            raise DomainError("kappa, r0 and mu must be positive")
        if not self.eps < 2 * self.kappa * self.r0**2:
            raise DomainError(
                f"eps={self.eps} is not small against 2*kappa*r0^2="
                f"{2 * self.kappa * self.r0**2}"
            )

    @property
    def m(self) -> int:
        return self.n * (self.n + 1) // 2

    def as_record(self) -> dict:
        return {"n": self.n, "eps": self.eps, "kappa": self.kappa, "r0": self.r0, "mu": self.mu}


@dataclass(frozen=True)
class RigidMode:
    """One element of the rigid basis.

    ``axis`` is set for translations (1-based); rotations carry the 1-based
    pair ``(i, j)`` with ``i < j`` and act as ``x_j e_i - x_i e_j``.
    """

    n: int
    alpha: int
    axis: int | None = None
    pair: tuple[int, int] | None = None

    @property
    def is_translation(self) -> bool:
        return self.axis is not None

    @property
    def kind(self) -> str:
        return "translation" if self.is_translation else "rotation"

    def describe(self) -> str:
        if self.is_translation:
            return f"e_{self.axis}"
        i, j = self.pair
        return f"x_{j} e_{i} - x_{i} e_{j}"


@lru_cache(maxsize=None)
def _rotation_pairs(n: int) -> tuple[tuple[int, int], ...]:
    # first the pairs coupling x' with the vertical axis, then the purely
    # horizontal pairs in lexicographic order
    vertical = tuple((k, n) for k in range(1, n))
    horizontal = tuple(combinations(range(1, n), 2))
    return vertical + horizontal


def mode_count(n: int) -> int:
    return n * (n + 1) // 2


def decode_mode(n: int, alpha: int) -> RigidMode:
    """Map the 1-based index ``alpha`` to its translation axis or rotation pair."""
    m = mode_count(n)
    if not 1 <= alpha <= m:
        raise DomainError(f"alpha must lie in 1..{m} for n={n}, got {alpha}")
    if alpha <= n:
        return RigidMode(n, alpha, axis=alpha)
    return RigidMode(n, alpha, pair=_rotation_pairs(n)[alpha - n - 1])


def encode_mode(mode: RigidMode) -> int:
    if mode.is_translation:
        return mode.axis
    return mode.n + 1 + _rotation_pairs(mode.n).index(tuple(mode.pair))


def all_modes(n: int) -> list[RigidMode]:
    return [decode_mode(n, a) for a in range(1, mode_count(n) + 1)]


def as_mode(n: int, mode) -> RigidMode:
    if isinstance(mode, RigidMode):
        if mode.n != n:
            raise DomainError(f"mode built for n={mode.n} used with n={n}")
        return mode
    return decode_mode(n, int(mode))


def _points(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if x.dtype.kind not in "fc":
        x = x.astype(float)
    if x.shape[-1] != n:
        raise DomainError(f"points must have last axis of length {n}, got shape {x.shape}")
    return x


def horizontal_sq(x) -> np.ndarray:
    """|x'|^2 written as a plain sum of squares so complex steps pass through."""
    x = np.asarray(x)
    return np.sum(x[..., :-1] * x[..., :-1], axis=-1)


def delta(g: GapGeometry, xp) -> np.ndarray | float:
    """Gap thickness ``eps + 2 kappa |x'|^2`` at horizontal position ``xp``."""
    xp = np.asarray(xp, dtype=float)
    if xp.ndim == 0:
        xp = xp[None]
    if xp.shape[-1] != g.n - 1:
        raise DomainError(f"xp must have {g.n - 1} components")
    s = np.sum(xp * xp, axis=-1)
    if np.any(s > (2 * g.r0) ** 2 * (1 + BOUNDARY_TOL)):
        raise DomainError("|x'| exceeds 2*r0")
    out = g.eps + 2 * g.kappa * s
    return float(out) if np.ndim(out) == 0 else out


def delta_at(g: GapGeometry, x) -> np.ndarray:
    """Gap thickness at full points ``x`` (no domain check)."""
    return g.eps + 2 * g.kappa * horizontal_sq(x)


def half_height(g: GapGeometry, x) -> np.ndarray:
    return 0.5 * delta_at(g, x)


def check_gap_points(g: GapGeometry, x, radius_factor: float = 2.0) -> np.ndarray:
    """Validate that points lie in the closure of Omega_{radius_factor * r0}."""
    x = _points(x, g.n)
    xr = np.real(x)
    s = horizontal_sq(xr)
    if np.any(s > (radius_factor * g.r0) ** 2 * (1 + BOUNDARY_TOL)):
        raise DomainError(f"point with |x'| > {radius_factor}*r0")
    lim = 0.5 * (g.eps + 2 * g.kappa * s)
    if np.any(np.abs(xr[..., -1]) > lim * (1 + BOUNDARY_TOL) + BOUNDARY_TOL):
        raise DomainError("point outside the closure of the gap region")
    if g.eps == 0 and np.any(np.sum(xr * xr, axis=-1) < 1e-16):
        raise SingularityError("fields are singular at the touching point x = 0")
    return x


def frak_g(g: GapGeometry, x, check: bool = True):
    """Normalized height ``x_n / delta(x')``; equals +-1/2 on the two walls."""
    x = check_gap_points(g, x) if check else _points(x, g.n)
    out = x[..., -1] / delta_at(g, x)
    return out if np.ndim(out) else out.item()


def in_region(g: GapGeometry, t: float, x) -> np.ndarray | bool:
    """Strict membership in Omega_t centred at x' = 0."""
    if t > 2 * g.r0 * (1 + BOUNDARY_TOL):
        raise DomainError("t must not exceed 2*r0")
    x = _points(x, g.n)
    s = horizontal_sq(x)
    inside = (np.abs(x[..., -1]) < 0.5 * g.eps + g.kappa * s) & (s < t * t)
    return inside if np.ndim(inside) else bool(inside)


def on_wall(g: GapGeometry, x, tol: float = BOUNDARY_TOL) -> np.ndarray | int:
    """+1 on the upper wall, -1 on the lower wall, 0 elsewhere (absolute tolerance)."""
    x = _points(x, g.n)
    lim = 0.5 * g.eps + g.kappa * horizontal_sq(x)
    z = x[..., -1]
    side = np.where(np.abs(z - lim) <= tol, 1, np.where(np.abs(z + lim) <= tol, -1, 0))
    return side if np.ndim(side) else int(side)


def psi(mode, x, n: int | None = None) -> np.ndarray:
    """Evaluate the rigid displacement of ``mode`` at points ``x``."""
    x = np.asarray(x)
    n = x.shape[-1] if n is None else n
    mode = as_mode(n, mode)
    x = _points(x, n)
    out = np.zeros(x.shape, dtype=np.result_type(x.dtype, float))
    if mode.is_translation:
        out[..., mode.axis - 1] = 1.0
    else:
        i, j = mode.pair
        out[..., i - 1] = x[..., j - 1]
        out[..., j - 1] = -x[..., i - 1]
    return out


def psi_gradient(mode, n: int) -> np.ndarray:
    """Constant gradient matrix ``d psi^(a) / d x_b`` of a rigid mode."""
    mode = as_mode(n, mode)
    grad = np.zeros((n, n))
    if not mode.is_translation:
        i, j = mode.pair
        grad[i - 1, j - 1] = 1.0
        grad[j - 1, i - 1] = -1.0
    return grad
