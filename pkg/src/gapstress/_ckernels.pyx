# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``.

Same signatures and results as the pure Python module; see there for the
meaning of each routine.
"""

import math

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]


cdef inline double radial(double r, double eps, double kappa, int power) nogil:
    cdef double num = 1.0
    cdef int k
    for k in range(power):
        num *= r
    return num / (eps + 2.0 * kappa * r * r)


cdef void gk15(double a, double b, double eps, double kappa, int power,
               double* value, double* error) nogil:
    cdef double center = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double fc = radial(center, eps, kappa, power)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double dx, f1, f2
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        f1 = radial(center - dx, eps, kappa, power)
        f2 = radial(center + dx, eps, kappa, power)
        resk += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    value[0] = resk * half
    error[0] = abs((resk - resg) * half)


def gk_radial(double eps, double kappa, int power, double a, double b,
              double rtol=1e-13, int max_depth=60):
    if b <= a:
        return 0.0, 0.0, 0
    cdef double whole, err, val, lo, hi, mid, scale
    cdef int depth
    gk15(a, b, eps, kappa, power, &whole, &err)
    scale = max(abs(whole), 1e-300)
    stack = [(a, b, 0)]
    parts = []
    errs = []
    while stack:
        lo, hi, depth = stack.pop()
        gk15(lo, hi, eps, kappa, power, &val, &err)
        if err <= rtol * scale * (hi - lo) / (b - a) or err == 0.0:
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
    cdef double[::1] xe = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] ye = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t nx = xe.shape[0] - 1, ny = ye.shape[0] - 1
    cdef Py_ssize_t n_u = ny * (nx + 1), n_v = (ny + 1) * nx
    cdef Py_ssize_t base = n_u + n_v
    cdef Py_ssize_t bottom = base, top = base + (nx + 1)
    cdef Py_ssize_t left = base + 2 * (nx + 1), right = base + 2 * (nx + 1) + (ny + 1)
    cdef Py_ssize_t ncell = nx * ny, nnode = (nx + 1) * (ny + 1)
    cdef Py_ssize_t i, j, c, node, k
    cdef double hx, hy, ylo, yhi, xlo, xhi

    cdef cnp.int64_t[::1] xr = np.empty(2 * ncell, dtype=np.int64)
    cdef cnp.int64_t[::1] xcol = np.empty(2 * ncell, dtype=np.int64)
    cdef double[::1] xv = np.empty(2 * ncell)
    cdef cnp.int64_t[::1] yr = np.empty(2 * ncell, dtype=np.int64)
    cdef cnp.int64_t[::1] ycol = np.empty(2 * ncell, dtype=np.int64)
    cdef double[::1] yv = np.empty(2 * ncell)
    cdef cnp.int64_t[::1] dr = np.empty(4 * ncell, dtype=np.int64)
    cdef cnp.int64_t[::1] dcol = np.empty(4 * ncell, dtype=np.int64)
    cdef double[::1] dv = np.empty(4 * ncell)
    cdef cnp.int64_t[::1] sr = np.empty(4 * nnode, dtype=np.int64)
    cdef cnp.int64_t[::1] scol = np.empty(4 * nnode, dtype=np.int64)
    cdef double[::1] sv = np.empty(4 * nnode)

    # the triplet order matches the vectorized fallback: all "+" entries of a
    # stencil first, then the "-" entries
    for j in range(ny):
        for i in range(nx):
            c = j * nx + i
            hx = xe[i + 1] - xe[i]
            hy = ye[j + 1] - ye[j]
            xr[c] = c; xcol[c] = j * (nx + 1) + i + 1; xv[c] = 1.0 / hx
            xr[ncell + c] = c; xcol[ncell + c] = j * (nx + 1) + i; xv[ncell + c] = -1.0 / hx
            yr[c] = c; ycol[c] = n_u + (j + 1) * nx + i; yv[c] = 1.0 / hy
            yr[ncell + c] = c; ycol[ncell + c] = n_u + j * nx + i; yv[ncell + c] = -1.0 / hy
            for k in range(4):
                dr[k * ncell + c] = c
            dcol[c] = j * (nx + 1) + i + 1; dv[c] = hy
            dcol[ncell + c] = j * (nx + 1) + i; dv[ncell + c] = -hy
            dcol[2 * ncell + c] = n_u + (j + 1) * nx + i; dv[2 * ncell + c] = hx
            dcol[3 * ncell + c] = n_u + j * nx + i; dv[3 * ncell + c] = -hx

    for j in range(ny + 1):
        ylo = ye[0] if j == 0 else 0.5 * (ye[j - 1] + ye[j])
        yhi = ye[ny] if j == ny else 0.5 * (ye[j] + ye[j + 1])
        hy = yhi - ylo
        for i in range(nx + 1):
            xlo = xe[0] if i == 0 else 0.5 * (xe[i - 1] + xe[i])
            xhi = xe[nx] if i == nx else 0.5 * (xe[i] + xe[i + 1])
            hx = xhi - xlo
            node = j * (nx + 1) + i
            for k in range(4):
                sr[k * nnode + node] = node
            scol[node] = j * (nx + 1) + i if j < ny else top + i
            scol[nnode + node] = (j - 1) * (nx + 1) + i if j > 0 else bottom + i
            scol[2 * nnode + node] = n_u + j * nx + i if i < nx else right + j
            scol[3 * nnode + node] = n_u + j * nx + i - 1 if i > 0 else left + j
            sv[node] = 0.5 / hy
            sv[nnode + node] = -0.5 / hy
            sv[2 * nnode + node] = 0.5 / hx
            sv[3 * nnode + node] = -0.5 / hx

    exx = (np.asarray(xr), np.asarray(xcol), np.asarray(xv))
    eyy = (np.asarray(yr), np.asarray(ycol), np.asarray(yv))
    exy = (np.asarray(sr), np.asarray(scol), np.asarray(sv))
    div = (np.asarray(dr), np.asarray(dcol), np.asarray(dv))
    return exx, eyy, exy, div
