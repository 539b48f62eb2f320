"""Staggered-grid Stokes operator, saddle-point solver and discrete solutions.

Cells carry a label: 0 for fluid, k > 0 for the k-th rigid solid.  A face
velocity is unknown only when both neighbouring cells are fluid; every other
face, and the tangential wall slots on the outer box, carries Dirichlet data.
Solid faces take the rigid velocity of their solid and box faces take the
outer boundary data.  This is the limit of a Brinkman penalty with
vanishing permeability, applied by elimination instead of a stiff term.

The viscous operator is the Hessian of the discrete strain energy

    S(u, w) = 2 mu [sum_cells (exx exx' + eyy eyy') vol + 2 sum_nodes exy exy' vol],

so energies, boundary forces and the momentum equations share one bilinear
form and the discrete integration-by-parts identities hold exactly.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage

from .. import kernels
from .grid import TensorGrid


class OracleError(RuntimeError):
    """A discrete solve failed (singular factorization or no convergence)."""


class ResolutionError(ValueError):
    """The grid does not resolve the gap well enough for the requested solve."""


def clean_labels(labels: np.ndarray) -> np.ndarray:
    """Keep the largest 4-connected fluid component; fill the rest into solids.

    Isolated fluid pockets would add extra pressure constants (a singular
    system), so each pocket cell takes the label of a neighbouring solid.
    """
    labels = np.array(labels, dtype=np.int64)
    fluid = labels == 0
    comp, count = ndimage.label(fluid)
    if count <= 1:
        return labels
    sizes = ndimage.sum_labels(fluid, comp, index=np.arange(1, count + 1))
    keep = 1 + int(np.argmax(sizes))
    pocket = fluid & (comp != keep)
    while pocket.any():
        grown = ndimage.grey_dilation(np.where(pocket, 0, labels), size=(3, 3))
        fill = pocket & (grown > 0)
        if not fill.any():
            break
        labels[fill] = grown[fill]
        pocket &= ~fill
    return labels


@dataclass(frozen=True, eq=False)
class SolveStats:
    method: str
    unknowns: int
    residual: float
    compatibility: float


class StokesOperator:
    """Discrete Stokes problem on a labelled grid, factorized once.

    ``direct_limit`` is the largest velocity plus pressure unknown count
    solved by sparse LU of the whole saddle-point matrix; larger systems use
    the Uzawa iteration.  Inside Uzawa the velocity block is factorized
    exactly while it has at most ``exact_velocity_limit`` unknowns, and is
    otherwise inverted by conjugate gradients with an incomplete LU.
    """

    def __init__(self, grid: TensorGrid, labels: np.ndarray, mu: float = 1.0,
                 direct_limit: int = 50_000, tol: float = 1e-10,
                 exact_velocity_limit: int = 2_000_000):
        labels = np.asarray(labels)
        if labels.shape != (grid.ny, grid.nx):
            raise ValueError("labels must have shape (ny, nx)")
        self.grid = grid
        self.mu = float(mu)
        self.tol = tol
        self.labels = clean_labels(labels)
        self.active = self.labels == 0
        n_ext = grid.n_ext
        n_cell = grid.nx * grid.ny
        n_node = (grid.nx + 1) * (grid.ny + 1)
        exx, eyy, exy, div = kernels.strain_triplets(grid.X, grid.Y)

        def csr(t, rows):
            return sp.csr_matrix((t[2], (t[0], t[1])), shape=(rows, n_ext))

        self.Exx, self.Eyy = csr(exx, n_cell), csr(eyy, n_cell)
        self.Exy, self.Div = csr(exy, n_node), csr(div, n_cell)
        wc = sp.diags(grid.cell_volumes.ravel())
        wn = sp.diags(grid.node_volumes.ravel())
        self.K = (2 * self.mu * (self.Exx.T @ wc @ self.Exx + self.Eyy.T @ wc @ self.Eyy)
                  + 4 * self.mu * (self.Exy.T @ wn @ self.Exy)).tocsr()

        nx, ny = grid.nx, grid.ny
        act = self.active
        unk_u = np.zeros((ny, nx + 1), dtype=bool)
        unk_u[:, 1:nx] = act[:, :-1] & act[:, 1:]
        unk_v = np.zeros((ny + 1, nx), dtype=bool)
        unk_v[1:ny, :] = act[:-1, :] & act[1:, :]
        self.unknown = np.zeros(n_ext, dtype=bool)
        self.unknown[: grid.n_u] = unk_u.ravel()
        self.unknown[grid.n_u: grid.n_u + grid.n_v] = unk_v.ravel()
        self.unk_idx = np.flatnonzero(self.unknown)
        self.known_idx = np.flatnonzero(~self.unknown)

        lab = self.labels
        lu = np.zeros((ny, nx + 1), dtype=np.int64)
        lu[:, 1:nx] = np.maximum(lab[:, :-1], lab[:, 1:])
        lv = np.zeros((ny + 1, nx), dtype=np.int64)
        lv[1:ny, :] = np.maximum(lab[:-1, :], lab[1:, :])
        self.ext_label = np.concatenate([lu.ravel(), lv.ravel(), np.zeros(n_ext - grid.n_u - grid.n_v, dtype=np.int64)])
        self.ext_label[self.unknown] = -1

        self.cells = np.flatnonzero(act.ravel())
        D = self.Div[self.cells]
        self.D_unk = D[:, self.unk_idx].tocsr()
        self.D_known = D[:, self.known_idx].tocsr()
        self.K_uu = self.K[self.unk_idx][:, self.unk_idx].tocsc()
        self.K_uk = self.K[self.unk_idx][:, self.known_idx].tocsr()
        vol = grid.cell_volumes.ravel()[self.cells]
        self.gauge = vol / vol.sum()

        self.face_volumes = self._face_volumes()
        size = self.unk_idx.size + self.cells.size
        self.method = "lu" if size <= direct_limit else "uzawa"
        self.exact_velocity_limit = exact_velocity_limit
        self._lu = None
        self._ilu = None

    def _face_volumes(self) -> np.ndarray:
        g = self.grid
        hx = np.diff(np.concatenate([[g.X[0]], g.xc, [g.X[-1]]]))
        hy = np.diff(np.concatenate([[g.Y[0]], g.yc, [g.Y[-1]]]))
        return np.concatenate([np.outer(g.dy, hx).ravel(), np.outer(hy, g.dx).ravel(),
                               np.zeros(g.n_ext - g.n_u - g.n_v)])

    # --- linear algebra -------------------------------------------------
    def _factorize(self):
        if self._lu is None:
            nc = self.cells.size
            w = sp.csc_matrix(self.gauge[:, None])
            M = sp.bmat([[self.K_uu, -self.D_unk.T, None],
                         [-self.D_unk, None, w],
                         [None, w.T, None]], format="csc")
            try:
                self._lu = spla.splu(M, permc_spec="COLAMD")
            except RuntimeError as exc:
                raise OracleError(f"saddle-point factorization failed: {exc}") from exc
            self._n_p = nc
        return self._lu

    def _solve_lu(self, ru, rp):
        lu = self._factorize()
        k = ru.shape[1]
        rhs = np.vstack([ru, rp, np.zeros((1, k))])
        sol = lu.solve(rhs)
        nu = ru.shape[0]
        return sol[:nu], sol[nu: nu + self.cells.size], sol[-1]

    def _velocity_solver(self):
        if self._ilu is None:
            if self.K_uu.shape[0] <= self.exact_velocity_limit:
                # the velocity block is symmetric positive definite
                self._ilu = spla.splu(self.K_uu, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                                      options={"SymmetricMode": True})
            else:
                ilu = spla.spilu(self.K_uu, drop_tol=1e-5, fill_factor=20)
                self._ilu = spla.LinearOperator(self.K_uu.shape, ilu.solve)
        return self._ilu

    def _kinv(self, b):
        solver = self._velocity_solver()
        if isinstance(solver, spla.SuperLU):
            return solver.solve(b)
        x, info = spla.cg(self.K_uu, b, rtol=1e-12, atol=0.0, M=solver, maxiter=5000)
        if info != 0:
            raise OracleError("velocity conjugate gradients did not converge")
        return x

    def _solve_uzawa(self, ru, rp):
        """Pressure Schur complement by preconditioned conjugate gradients.

        The Schur operator is singular on constants, so right-hand sides and
        search directions are kept orthogonal to the constant vector and the
        final pressure is shifted to the volume-weighted zero-mean gauge.
        """
        B = -self.D_unk
        w = self.gauge
        n_p = B.shape[0]
        vol = self.grid.cell_volumes.ravel()[self.cells]

        def center(q):
            return q - q.mean()

        schur = spla.LinearOperator((n_p, n_p), lambda q: center(B @ self._kinv(B.T @ q)))
        precond = spla.LinearOperator((n_p, n_p), lambda q: center(self.mu * center(q) / vol))
        us, ps, lams = [], [], []
        for col in range(ru.shape[1]):
            f, g = ru[:, col], rp[:, col]
            lam = g.sum() / w.sum()
            rhs = center(B @ self._kinv(f) - (g - lam * w))
            if np.linalg.norm(rhs) == 0.0:
                p = np.zeros(n_p)
            else:
                p, info = spla.cg(schur, rhs, rtol=self.tol, atol=0.0, M=precond, maxiter=5000)
                if info != 0:
                    raise OracleError("Uzawa pressure iteration did not converge")
            p = p - np.dot(w, p) / w.sum()
            us.append(self._kinv(f - B.T @ p))
            ps.append(p)
            lams.append(lam)
        return np.array(us).T, np.array(ps).T, np.array(lams)

    def solve(self, known: np.ndarray, force: np.ndarray | None = None):
        """Solve for one or several data sets.

        ``known`` holds full extended vectors (shape ``(n_ext,)`` or
        ``(n_ext, k)``); only the known entries are read.  ``force`` is a body
        force density sampled at the extended points with the same shape.
        Returns ``(velocity, pressure, stats)`` with velocity of shape
        ``(n_ext, k)`` and pressure of shape ``(ny * nx, k)`` (zero in solids).
        """
        known = np.asarray(known, dtype=float)
        single = known.ndim == 1
        if single:
            known = known[:, None]
        uk = known[self.known_idx]
        ru = -(self.K_uk @ uk)
        if force is not None:
            force = np.asarray(force, dtype=float).reshape(known.shape)
            ru += (force * self.face_volumes[:, None])[self.unk_idx]
        rp = self.D_known @ uk
        if self.method == "lu":
            uu, pp, lam = self._solve_lu(ru, rp)
        else:
            uu, pp, lam = self._solve_uzawa(ru, rp)
        vel = known.copy()
        vel[self.unk_idx] = uu
        pres = np.zeros((self.grid.nx * self.grid.ny, known.shape[1]))
        pres[self.cells] = pp
        res_m = ru - self.K_uu @ uu + self.D_unk.T @ pp
        scale = np.abs(ru).max() + np.abs(self.K_uu @ uu).max() + 1e-300
        residual = float(np.abs(res_m).max() / scale)
        stats = SolveStats(self.method, int(self.unk_idx.size + self.cells.size), residual,
                           float(np.abs(lam).max()))
        if residual > 1e-6:
            raise OracleError(f"discrete momentum residual {residual:.3e} too large")
        if single:
            return vel[:, 0], pres[:, 0], stats
        return vel, pres, stats

    # --- field utilities --------------------------------------------------
    def energy(self, a: np.ndarray, b: np.ndarray | None = None):
        """Discrete strain energy form S(a, b) for extended vectors or stacks.

        For two vectors the form is summed from elementwise strain products,
        so ``energy(a, b) == energy(b, a)`` holds bit for bit.
        """
        b = a if b is None else b
        if np.ndim(a) == 1 and np.ndim(b) == 1:
            g = self.grid
            wc, wn = g.cell_volumes.ravel(), g.node_volumes.ravel()
            total = 0.0
            for E, w, c in ((self.Exx, wc, 2.0), (self.Eyy, wc, 2.0), (self.Exy, wn, 4.0)):
                total += c * self.mu * float(w @ ((E @ a) * (E @ b)))
            return total
        return a.T @ (self.K @ b)

    def divergence(self, vel: np.ndarray) -> np.ndarray:
        """Cell-integrated divergence on fluid cells."""
        return self.Div[self.cells] @ vel

    def cell_gradient(self, vel: np.ndarray) -> np.ndarray:
        """Velocity gradient at cell centres, shape (ny, nx, 2, 2).

        Diagonal entries are exact cell differences; the shear entries are the
        averages of the four surrounding nodal differences.
        """
        g = self.grid
        ny, nx = g.ny, g.nx
        ux = (self.Exx @ vel).reshape(ny, nx)
        vy = (self.Eyy @ vel).reshape(ny, nx)
        # nodal du/dy and dv/dx separately: rebuild from the exy stencil halves
        u_only = vel * (g.ext_component == 0)
        v_only = vel * (g.ext_component == 1)
        uy = (2 * (self.Exy @ u_only)).reshape(ny + 1, nx + 1)
        vx = (2 * (self.Exy @ v_only)).reshape(ny + 1, nx + 1)

        def to_cells(a):
            return 0.25 * (a[:-1, :-1] + a[1:, :-1] + a[:-1, 1:] + a[1:, 1:])

        out = np.empty((ny, nx, 2, 2))
        out[..., 0, 0] = ux
        out[..., 0, 1] = to_cells(uy)
        out[..., 1, 0] = to_cells(vx)
        out[..., 1, 1] = vy
        return out


@dataclass(eq=False)
class DiscreteStokesSolution:
    """Velocity on faces (extended numbering), pressure on cells, labels."""

    operator: StokesOperator
    velocity: np.ndarray
    pressure: np.ndarray
    description: dict = field(default_factory=dict)
    stats: SolveStats | None = None

    @property
    def grid(self) -> TensorGrid:
        return self.operator.grid

    @property
    def mu(self) -> float:
        return self.operator.mu

    @property
    def u(self) -> np.ndarray:
        g = self.grid
        return self.velocity[: g.n_u].reshape(g.ny, g.nx + 1)

    @property
    def v(self) -> np.ndarray:
        g = self.grid
        return self.velocity[g.n_u: g.n_u + g.n_v].reshape(g.ny + 1, g.nx)

    @property
    def p(self) -> np.ndarray:
        return self.pressure.reshape(self.grid.ny, self.grid.nx)

    @property
    def fluid(self) -> np.ndarray:
        return self.operator.active

    @property
    def h(self) -> float:
        return self.grid.h_min

    def max_divergence(self) -> float:
        """Largest |div u| per unit cell area, relative to max|u| / h."""
        g = self.grid
        area = g.cell_volumes.ravel()[self.operator.cells]
        div = np.abs(self.operator.divergence(self.velocity)) / area
        scale = np.abs(self.velocity).max() / g.h_min
        return float(div.max() / scale) if scale > 0 else float(div.max())

    def gradient(self) -> np.ndarray:
        return self.operator.cell_gradient(self.velocity)

    def combine(self, other: "DiscreteStokesSolution", a: float = 1.0, b: float = 1.0):
        if other.operator is not self.operator:
            raise ValueError("solutions live on different operators")
        return DiscreteStokesSolution(self.operator, a * self.velocity + b * other.velocity,
                                      a * self.pressure + b * other.pressure)

    def to_csv(self, path, comments=()) -> None:
        """Write face and cell samples as ``kind,x,y,value`` rows.

        ``comments`` are written first as ``# ...`` lines.  Floats carry 17
        significant digits so every value reads back exactly.
        """
        import csv

        def f(v):
            return format(float(v), ".17g")

        g = self.grid
        pts = g.ext_points
        with open(path, "w", newline="") as fh:
            for line in comments:
                fh.write(f"# {line}\r\n")
            w = csv.writer(fh)
            w.writerow(["kind", "x", "y", "value"])
            for k in range(g.n_u):
                w.writerow(["u", f(pts[k, 0]), f(pts[k, 1]), f(self.velocity[k])])
            for k in range(g.n_u, g.n_u + g.n_v):
                w.writerow(["v", f(pts[k, 0]), f(pts[k, 1]), f(self.velocity[k])])
            xc, yc = g.cell_centers()
            for x, y, pv, fl in zip(xc.ravel(), yc.ravel(), self.pressure, self.fluid.ravel()):
                if fl:
                    w.writerow(["p", f(x), f(y), f(pv)])

    def to_bytes(self) -> bytes:
        """Compact dump: magic, version, dims, edges, faces, cell pressure, labels."""
        g = self.grid
        head = b"SGAP" + struct.pack("<III", 1, g.nx, g.ny) + struct.pack("<d", g.h_min)
        body = [np.asarray(a, dtype="<f8").tobytes() for a in
                (g.X, g.Y, self.u.ravel(), self.v.ravel(), self.pressure,
                 self.operator.labels.ravel().astype(float))]
        return head + b"".join(body)

    @staticmethod
    def read_bytes(data: bytes) -> dict:
        if data[:4] != b"SGAP":
            raise ValueError("not an SGAP dump")
        version, nx, ny = struct.unpack("<III", data[4:16])
        (h,) = struct.unpack("<d", data[16:24])
        arr = np.frombuffer(data[24:], dtype="<f8")
        sizes = [nx + 1, ny + 1, ny * (nx + 1), (ny + 1) * nx, nx * ny, nx * ny]
        out, pos = {}, 0
        for name, n in zip(("X", "Y", "u", "v", "p", "labels"), sizes):
            out[name] = arr[pos: pos + n]
            pos += n
        out.update(version=version, nx=nx, ny=ny, h=h)
        return out


def solve(operator: StokesOperator, known, force=None, description=None):
    """Convenience wrapper returning :class:`DiscreteStokesSolution` objects."""
    vel, pres, stats = operator.solve(known, force)
    if vel.ndim == 1:
        return DiscreteStokesSolution(operator, vel, pres, dict(description or {}), stats)
    return [DiscreteStokesSolution(operator, vel[:, k], pres[:, k], dict(description or {}), stats)
            for k in range(vel.shape[1])]


def warn_if(condition: bool, message: str) -> None:
    if condition:
        warnings.warn(message, RuntimeWarning, stacklevel=3)
