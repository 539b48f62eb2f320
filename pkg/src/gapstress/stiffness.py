"""Block linear system for the free rigid-motion constants.

For two particles with rigid modes ``psi_1 .. psi_m`` the particle velocities
are ``C_1^alpha psi_alpha`` and ``C_2^alpha psi_alpha``.  Writing
``X1 = C_1 - C_2`` and ``X2 = C_2`` the force and torque balance becomes

    [[A, B], [C, D]] [X1; X2] = [b1; b1 + b2]

where, with ``a_ij^{ab} = S(u_i^a, u_j^b)`` the strain energy pairing of the
decomposed solutions, row ``beta`` and column ``alpha`` hold

    A = a_11,  B = a_11 + a_21,  C = a_11 + a_12,  D = sum of all four,
    b_j^beta = -S(u_0, u_j^beta).

Determinants are computed from LU factorizations (LAPACK ``getrf`` through
``numpy.linalg.slogdet``), never by cofactor expansion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

CONDITION_WARNING = 1e12
PROVENANCES = ("oracle", "truncated", "extrapolated-limit")


class SingularSystemError(np.linalg.LinAlgError):
    """A determinant vanished or the block matrix could not be inverted."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class NonConvergentSweepError(ArithmeticError):
    """Successive differences of a sweep do not shrink."""


def _frozen(a, shape=None) -> np.ndarray:
    a = np.array(a, dtype=float)
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StiffnessSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.b1).shape[0]
        for name in ("A", "B", "C", "D"):
            object.__setattr__(self, name, _frozen(getattr(self, name), (m, m)))
        for name in ("b1", "b2"):
            object.__setattr__(self, name, _frozen(getattr(self, name), (m,)))

    @property
    def m(self) -> int:
        return self.b1.shape[0]

    @property
    def n(self) -> int:
        """Space dimension with ``m = n (n + 1) / 2`` (0 if ``m`` is not triangular)."""
        n = int(round((np.sqrt(8 * self.m + 1) - 1) / 2))
        return n if n * (n + 1) // 2 == self.m else 0

    def block(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.b1, self.b1 + self.b2])

    def symmetry_defects(self) -> dict:
        scale = max(np.abs(self.A).max(), 1e-300)
        return {
            "A": float(np.abs(self.A - self.A.T).max() / scale),
            "D": float(np.abs(self.D - self.D.T).max() / max(np.abs(self.D).max(), 1e-300)),
            "C-B^T": float(np.abs(self.C - self.B.T).max() / max(np.abs(self.B).max(), 1e-300)),
        }

    def scaled(self, factor: float) -> "StiffnessSystem":
        """The same matrices with boundary data multiplied by ``factor``."""
        return StiffnessSystem(self.A, self.B, self.C, self.D, factor * self.b1, factor * self.b2)


@dataclass(frozen=True, eq=False)
class BlowupFactors:
    values: np.ndarray
    provenance: str = "oracle"

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("blow-up factors must be a finite vector")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]


def gram_blocks(gram: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split a ``2m x 2m`` Gram matrix ordered (u_1^1..u_1^m, u_2^1..u_2^m)."""
    return gram[:m, :m], gram[:m, m:], gram[m:, :m], gram[m:, m:]


def system_from_gram(gram, background) -> tuple[StiffnessSystem, float]:
    """Build the system from ``S`` pairings of the mode fields and background.

    ``gram[k, l] = S(w_k, w_l)`` for the stacked fields ``w = (u_1^*, u_2^*)``
    and ``background[k] = S(u_0, w_k)``.  The Gram matrix is symmetrized
    before use so that ``C = B^T`` holds exactly; the relative asymmetry of
    the input is returned alongside the system.
    """
    gram = np.asarray(gram, dtype=float)
    size = gram.shape[0]
    if gram.shape != (size, size) or size % 2:
        raise ValueError("gram must be square with an even size")
    m = size // 2
    defect = float(np.abs(gram - gram.T).max() / max(np.abs(gram).max(), 1e-300))
    gram = 0.5 * (gram + gram.T)
    g11, g12, g21, g22 = gram_blocks(gram, m)
    A = g11
    B = g11 + g12
    C = g11 + g21
    D = (g11 + g22) + (g12 + g21)  # grouped so D is exactly symmetric
    background = np.asarray(background, dtype=float)
    b1, b2 = -background[:m], -background[m:]
    return StiffnessSystem(A, B, C, D, b1, b2), defect


def assemble_from_fields(energy, modes, background) -> tuple[StiffnessSystem, float]:
    """Assemble from an energy pairing and the decomposed solutions.

    ``energy(a, b)`` must be the symmetric strain-energy form, ``modes`` a
    pair of sequences ``(u_1^1..u_1^m)``, ``(u_2^1..u_2^m)`` and
    ``background`` the solution ``u_0``.
    """
    fields = list(modes[0]) + list(modes[1])
    size = len(fields)
    gram = np.empty((size, size))
    for k in range(size):
        for l in range(size):
            gram[k, l] = energy(fields[k], fields[l])
    back = np.array([energy(background, f) for f in fields])
    return system_from_gram(gram, back)


# --- determinants and direct solves ------------------------------------------

def determinant(M: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(np.asarray(M, dtype=float))
    return float(sign * np.exp(logdet)) if sign != 0 else 0.0


def _det_ratio(num: np.ndarray, den_sign: float, den_log: float) -> float:
    sign, logdet = np.linalg.slogdet(num)
    if sign == 0:
        return 0.0
    return float(sign * den_sign * np.exp(logdet - den_log))


def _checked_denominator(M: np.ndarray, what: str) -> tuple[float, float]:
    sign, logdet = np.linalg.slogdet(M)
    cond = float(np.linalg.cond(M)) if M.size else 1.0
    if sign == 0 or not np.isfinite(logdet) or cond > 1e16:
        raise SingularSystemError(f"det {what} vanishes", cond)
    if cond > CONDITION_WARNING:
        warnings.warn(f"{what} is ill conditioned (condition {cond:.3e})", RuntimeWarning, stacklevel=3)
    return sign, logdet


def cramer_solve(M, y) -> np.ndarray:
    """Solve ``M x = y`` by determinant ratios with column replacement."""
    M = np.asarray(M, dtype=float)
    y = np.asarray(y, dtype=float)
    den_sign, den_log = _checked_denominator(M, "matrix")
    out = np.empty(M.shape[1])
    for k in range(M.shape[1]):
        Mk = M.copy()
        Mk[:, k] = y
        out[k] = _det_ratio(Mk, den_sign, den_log)
    return out


def solve_block_system(S: StiffnessSystem) -> tuple[np.ndarray, np.ndarray]:
    """``(X1, X2) = (C_1 - C_2, C_2)`` by LU with partial pivoting."""
    import scipy.linalg as sla

    M = S.block()
    Y = S.rhs()
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1e16:
        raise SingularSystemError("block matrix is singular", cond)
    if cond > CONDITION_WARNING:
        warnings.warn(f"block matrix is ill conditioned (condition {cond:.3e})", RuntimeWarning,
                      stacklevel=2)
    lu = sla.lu_factor(M)
    X = sla.lu_solve(lu, Y)
    X = X + sla.lu_solve(lu, Y - M @ X)  # one step of iterative refinement
    res = np.linalg.norm(M @ X - Y)
    if res > 1e-10 * max(np.linalg.norm(Y), 1e-300):
        raise SingularSystemError(f"block solve residual {res:.3e} too large", cond)
    return X[: S.m], X[S.m:]


def block_residual(S: StiffnessSystem, X1, X2) -> float:
    Y = S.rhs()
    r = S.block() @ np.concatenate([X1, X2]) - Y
    return float(np.linalg.norm(r) / max(np.linalg.norm(Y), 1e-300))


def rotation_slice(n: int) -> slice:
    """Indices (0-based) of the rotation modes, ``alpha = n+1 .. m``."""
    return slice(n, n * (n + 1) // 2)


def f1_matrices(S: StiffnessSystem, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """``F1`` and ``F1^alpha``: B and D columns ``alpha`` replaced by b1, b1 + b2."""
    F = S.block()
    Fa = F.copy()
    Fa[:, S.m + alpha - 1] = S.rhs()
    return F, Fa


def f0_matrices(S: StiffnessSystem, alpha: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced ``F0`` and ``F0^alpha`` keeping only rotation rows of the first block."""
    rot = rotation_slice(n)
    A0 = S.A[rot, rot]
    B0 = S.B[rot, :]
    C0 = S.C[:, rot]
    F = np.block([[A0, B0], [C0, S.D]])
    Fa = F.copy()
    col = A0.shape[1] + alpha - 1
    Fa[:, col] = np.concatenate([S.b1[rot], S.b1 + S.b2])
    return F, Fa


def cramer_c2(S: StiffnessSystem, path: str = "exact") -> np.ndarray:
    """``C_2`` from determinant ratios.

    ``path="exact"`` uses the full block matrix and reproduces the LU
    solution.  ``path="reduced"`` (n = 2, 3) drops the translation rows of
    the first block; this is the form whose limit defines ``C_*`` and it only
    approaches the exact value as eps -> 0.
    """
    if path == "exact":
        F, _ = f1_matrices(S, 1)
        sign, logdet = _checked_denominator(F, "F1")
        return np.array([_det_ratio(f1_matrices(S, a)[1], sign, logdet) for a in range(1, S.m + 1)])
    if path == "reduced":
        n = S.n
        if n not in (2, 3):
            raise ValueError("the reduced path needs n = 2 or 3")
        F, _ = f0_matrices(S, 1, n)
        sign, logdet = _checked_denominator(F, "F0")
        return np.array([_det_ratio(f0_matrices(S, a, n)[1], sign, logdet) for a in range(1, S.m + 1)])
    raise ValueError("path must be 'exact' or 'reduced'")


def reduced_blowup(S: StiffnessSystem, X2) -> np.ndarray:
    """``B_beta = b1 - (B X2)_beta``, the right side of ``A X1 = B``."""
    return S.b1 - S.B @ np.asarray(X2, dtype=float)


def a3_matrix(A, factors, alpha: int) -> np.ndarray:
    M = np.array(A, dtype=float)
    M[:, alpha - 1] = factors
    return M


def a1_matrix(A, factors, alpha: int, n: int) -> np.ndarray:
    """First column (B_alpha, B_rot), then rows (alpha, rot) of ``A[:, rot]``."""
    rot = rotation_slice(n)
    rows = np.r_[alpha - 1, np.arange(A.shape[0])[rot]]
    M = np.empty((rows.size, rows.size))
    M[:, 0] = np.asarray(factors)[rows]
    M[:, 1:] = np.asarray(A)[np.ix_(rows, np.arange(A.shape[0])[rot])]
    return M


def a2_matrix(A, factors, alpha: int, n: int) -> np.ndarray:
    rot = rotation_slice(n)
    A0 = np.array(A, dtype=float)[rot, rot]
    A0[:, alpha - 1 - n] = np.asarray(factors)[rot]
    return A0


def cramer_c1_minus_c2(A, factors, path: str = "exact", n: int | None = None) -> np.ndarray:
    """``C_1 - C_2`` from ``A X1 = B`` by determinant ratios.

    ``factors`` is a vector or :class:`BlowupFactors`.  ``path="exact"``
    replaces columns of ``A`` (the matrices A_3^alpha).  ``path="reduced"``
    (n = 2, 3) uses A_1^alpha with the diagonal normalization for the
    translations and A_2^alpha for the rotations; it neglects the coupling
    of translations to each other and to the rotations outside the reduced
    blocks, so it matches the exact value only as eps -> 0.
    """
    A = np.asarray(A, dtype=float)
    f = factors.values if isinstance(factors, BlowupFactors) else np.asarray(factors, dtype=float)
    m = A.shape[0]
    if f.shape != (m,):
        raise ValueError("factor vector has the wrong length")
    if path == "exact":
        sign, logdet = _checked_denominator(A, "A")
        return np.array([_det_ratio(a3_matrix(A, f, a), sign, logdet) for a in range(1, m + 1)])
    if path != "reduced":
        raise ValueError("path must be 'exact' or 'reduced'")
    if n is None:
        n = int(round((np.sqrt(8 * m + 1) - 1) / 2))
    if n not in (2, 3) or n * (n + 1) // 2 != m:
        raise ValueError("the reduced path needs n = 2 or 3")
    rot = rotation_slice(n)
    A0 = A[rot, rot]
    sign, logdet = _checked_denominator(A0, "A0")
    diag = np.diag(A)[:n]
    out = np.empty(m)
    for a in range(1, n + 1):
        # prod_{i != a} a_ii / prod_i a_ii = 1 / a_aa
        out[a - 1] = _det_ratio(a1_matrix(A, f, a, n), sign, logdet) / diag[a - 1]
    for a in range(n + 1, m + 1):
        out[a - 1] = _det_ratio(a2_matrix(A, f, a, n), sign, logdet)
    return out


# --- extrapolation -------------------------------------------------------------

def limit_constants(sweep, strict: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Limit of a vector sequence ``[(eps, value), ...]`` as eps -> 0.

    Uses Aitken's delta-squared extrapolation on the last three entries,
    which is exact for ``c + a * eps^q`` on a geometric eps sequence.  The
    error estimate is the size of the extrapolation step.

    A component whose differences do not shrink raises
    :class:`NonConvergentSweepError`; with ``strict=False`` it instead keeps
    the last value and reports the larger of the two differences as error.
    """
    pts = sorted(((float(e), np.atleast_1d(np.asarray(v, dtype=float))) for e, v in sweep),
                 key=lambda t: -t[0])
    if len(pts) < 3:
        raise ValueError("at least three sweep points are needed")
    eps = np.array([p[0] for p in pts])
    if np.any(eps <= 0) or len(set(eps)) != len(eps):
        raise ValueError("eps values must be positive and distinct")
    ratios = eps[1:] / eps[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-6):
        raise ValueError("eps must decrease geometrically")
    c1, c2, c3 = (p[1] for p in pts[-3:])
    d1, d2 = c2 - c1, c3 - c2
    limit = c3.copy()
    err = np.zeros_like(c3)
    for k in range(c3.size):
        if d2[k] == 0.0 and d1[k] == 0.0:
            continue
        if abs(d2[k]) >= abs(d1[k]):
            if strict:
                raise NonConvergentSweepError(f"differences do not shrink for component {k}")
            err[k] = max(abs(d1[k]), abs(d2[k]))
            continue
        step = d2[k] ** 2 / (d1[k] - d2[k])
        limit[k] = c3[k] + step
        err[k] = abs(step)
    return limit, err


def determinant_ratios(A, factors, n: int) -> dict[int, float]:
    """Ratios ``det A_1^alpha / det A_0`` (translations) and ``det A_2^alpha / det A_0``.

    These are the weights of the stress prediction for n = 2, 3.  Evaluated on
    a finite-eps system they are the sweep estimates of the touching values.
    """
    A = np.asarray(A, dtype=float)
    f = factors.values if isinstance(factors, BlowupFactors) else np.asarray(factors, dtype=float)
    m = A.shape[0]
    if n not in (2, 3) or n * (n + 1) // 2 != m:
        raise ValueError("determinant ratios are defined for n = 2 or 3")
    sign, logdet = _checked_denominator(A[rotation_slice(n), rotation_slice(n)], "A0")
    out = {}
    for a in range(1, m + 1):
        M = a1_matrix(A, f, a, n) if a <= n else a2_matrix(A, f, a, n)
        out[a] = _det_ratio(M, sign, logdet)
    return out
