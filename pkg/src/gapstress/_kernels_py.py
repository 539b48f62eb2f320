"""Pure Python / numpy implementations of the hot loops.

These are the reference versions of the routines in ``_ckernels.pyx``; both
must produce identical results.  :mod:`gapstress.kernels` picks one at import.
"""

from __future__ import annotations

import math

import numpy as np

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _radial_integrand(r: float, eps: float, kappa: float, power: int) -> float:
    return r**power / (eps + 2.0 * kappa * r * r)


def _gk15(a: float, b: float, eps: float, kappa: float, power: int) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = _radial_integrand(center, eps, kappa, power)
    resk = fc * _WGK[7]
    resg = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        f1 = _radial_integrand(center - dx, eps, kappa, power)
        f2 = _radial_integrand(center + dx, eps, kappa, power)
        resk += _WGK[j] * (f1 + f2)
        if j % 2 == 1:
            resg += _WG[j // 2] * (f1 + f2)
    return resk * half, abs((resk - resg) * half)


def gk_radial(eps: float, kappa: float, power: int, a: float, b: float,
              rtol: float = 1e-13, max_depth: int = 60) -> tuple[float, float, int]:
    """Adaptive G7-K15 integral of ``r**power / (eps + 2 kappa r^2)`` over [a, b].

    Panels are bisected until their Kronrod-Gauss difference falls below
    ``rtol`` times the running total; accepted panel values are summed with
    ``math.fsum`` so rounding does not accumulate.  Returns the value, the
    summed error estimate and the number of accepted panels.
    """
    if b <= a:
        return 0.0, 0.0, 0
    whole, _ = _gk15(a, b, eps, kappa, power)
    scale = abs(whole)
    stack = [(a, b, 0)]
    parts: list[float] = []
    errs: list[float] = []
    while stack:
        lo, hi, depth = stack.pop()
        val, err = _gk15(lo, hi, eps, kappa, power)
        if err <= rtol * max(scale, 1e-300) * (hi - lo) / (b - a) or err == 0.0:
            parts.append(val)
            errs.append(err)
            continue
        if depth >= max_depth:
            raise ArithmeticError("adaptive quadrature did not converge within the depth limit")
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    return math.fsum(parts), math.fsum(errs), len(parts)


def strain_triplets(X, Y):
    """Sparse triplets of the discrete strain and divergence operators.

    Velocities live in the extended numbering: all x-faces ``(j, i)`` at
    ``j * (nx + 1) + i``, then all y-faces ``(j, i)`` at ``n_u + j * nx + i``,
    then the tangential wall slots (x-velocity on the bottom and top walls,
    y-velocity on the left and right walls) sampled at the box nodes.

    Returns ``(exx, eyy, exy, div)``, each a ``(rows, cols, vals)`` tuple:
    ``exx`` and ``eyy`` map to cells ``j * nx + i``, ``exy`` maps to nodes
    ``j * (nx + 1) + i``, and ``div`` is the cell-integrated divergence.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    nx, ny = X.size - 1, Y.size - 1
    xc = 0.5 * (X[1:] + X[:-1])
    yc = 0.5 * (Y[1:] + Y[:-1])
    dx = np.diff(X)
    dy = np.diff(Y)
    n_u = ny * (nx + 1)
    n_v = (ny + 1) * nx
    base = n_u + n_v
    bottom, top = base, base + (nx + 1)
    left, right = base + 2 * (nx + 1), base + 2 * (nx + 1) + (ny + 1)

    jj, ii = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    jj, ii = jj.ravel(), ii.ravel()
    c = jj * nx + ii
    east, west = jj * (nx + 1) + ii + 1, jj * (nx + 1) + ii
    north, south = n_u + (jj + 1) * nx + ii, n_u + jj * nx + ii
    exx = (np.concatenate([c, c]), np.concatenate([east, west]),
           np.concatenate([1.0 / dx[ii], -1.0 / dx[ii]]))
    eyy = (np.concatenate([c, c]), np.concatenate([north, south]),
           np.concatenate([1.0 / dy[jj], -1.0 / dy[jj]]))
    div = (np.concatenate([c, c, c, c]), np.concatenate([east, west, north, south]),
           np.concatenate([dy[jj], -dy[jj], dx[ii], -dx[ii]]))

    # nodal distances between the samples entering d/dy of u and d/dx of v
    ynode = np.concatenate([[Y[0]], yc, [Y[-1]]])
    xnode = np.concatenate([[X[0]], xc, [X[-1]]])
    hy = np.diff(ynode)
    hx = np.diff(xnode)
    jn, iN = np.meshgrid(np.arange(ny + 1), np.arange(nx + 1), indexing="ij")
    jn, iN = jn.ravel(), iN.ravel()
    node = jn * (nx + 1) + iN
    u_up = np.where(jn < ny, np.minimum(jn, ny - 1) * (nx + 1) + iN, top + iN)
    u_dn = np.where(jn > 0, np.maximum(jn - 1, 0) * (nx + 1) + iN, bottom + iN)
    v_rt = np.where(iN < nx, n_u + jn * nx + np.minimum(iN, nx - 1), right + jn)
    v_lt = np.where(iN > 0, n_u + jn * nx + np.maximum(iN - 1, 0), left + jn)
    half_y = 0.5 / hy[jn]
    half_x = 0.5 / hx[iN]
    exy = (np.concatenate([node] * 4), np.concatenate([u_up, u_dn, v_rt, v_lt]),
           np.concatenate([half_y, -half_y, half_x, -half_x]))
    return exx, eyy, exy, div
