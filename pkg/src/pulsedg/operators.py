"""Weak first-derivative operators and their inverses (recovery solves).

The operator maps Legendre coefficients of u to coefficients of omega through

    (omega, psi)_Ij = <u_hat, psi>_Ij - (u, psi_y)_Ij   for all psi in V_h^k,

with interface flux u_hat either the central average {u} (optionally plus a
jump term mu*[u]) or the upwind trace u^+.  On periodic meshes the operator
annihilates constants and, for the central flux, one extra per-degree mode
(the global L_k sawtooth for odd k, its alternating twin for even k on
even-N meshes); recovery is closed by pinning those components through a
bordered system.  On dirichlet meshes the flux at the two boundary
interfaces uses caller-supplied exterior traces, which makes the system
nonsingular.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import DGField, Mesh1D

CENTRAL = "central"
UPWIND_PLUS = "upwind_plus"


def _stiffness(k: int) -> np.ndarray:
    """S[l, m] = integral_{-1}^{1} L_l * L_m' dxi = 2 if l < m and l+m odd."""
    S = np.zeros((k + 1, k + 1))
    for m in range(k + 1):
        for l in range(k + 1):
            if l < m and (l + m) % 2 == 1:
                S[l, m] = 2.0
    return S


class RecoveryError(RuntimeError):
    pass


class DerivativeOperator:
    """Sparse weak-derivative operator with boundary closure and null handling."""

    def __init__(self, mesh: Mesh1D, k: int, flux: str = UPWIND_PLUS, mu: float = 0.0):
        if flux not in (CENTRAL, UPWIND_PLUS):
            raise ValueError(f"unknown flux {flux!r}")
        if flux == UPWIND_PLUS and mu != 0.0:
            raise ValueError("mu jump term only applies to the central flux")
        self.mesh, self.k, self.flux, self.mu = mesh, k, flux, mu
        self._assemble()

    # -- assembly ---------------------------------------------------------------

    def _flux_weights(self):
        """(weight of u^-, weight of u^+) in u_hat."""
        if self.flux == UPWIND_PLUS:
            return 0.0, 1.0
        return 0.5 - self.mu, 0.5 + self.mu

    def _assemble(self):
        mesh, k = self.mesh, self.k
        N, n = mesh.n_cells, k + 1
        h = mesh.h
        wm, wp = self._flux_weights()
        S = _stiffness(k)
        e_r = np.ones(n)                       # L_m(1)
        e_l = (-1.0) ** np.arange(n)           # L_m(-1)
        inv_mass = (2.0 * np.arange(n) + 1.0) / h

        rows, cols, vals = [], [], []

        def add(j_test, block_vals, j_trial):
            base_r, base_c = j_test * n, (j_trial % N) * n
            for a in range(n):
                for b in range(n):
                    v = block_vals[a, b]
                    if v != 0.0:
                        rows.append(base_r + a)
                        cols.append(base_c + b)
                        vals.append(v)

        # (omega_jm) * h/(2m+1) = u_hat_{j+1/2} * 1 - u_hat_{j-1/2} * (-1)^m
        #                          - sum_l c_jl S[l, m]
        diag = -S.T.copy()
        right_from_self = np.outer(e_r, wm * e_r)    # u^- at j+1/2 from cell j
        right_from_next = np.outer(e_r, wp * e_l)    # u^+ at j+1/2 from cell j+1
        left_from_prev = np.outer(e_l, wm * e_r)     # u^- at j-1/2 from cell j-1
        left_from_self = np.outer(e_l, wp * e_l)     # u^+ at j-1/2 from cell j

        self._bc_left = np.zeros(N * n)
        self._bc_right = np.zeros(N * n)
        block_self = diag + right_from_self - left_from_self
        for j in range(N):
            add(j, block_self, j)
            if j < N - 1 or mesh.periodic:
                add(j, right_from_next, j + 1)
            else:
                # exterior u^+ at the right boundary interface
                self._bc_right[j * n: (j + 1) * n] += wp * inv_mass
            if j > 0 or mesh.periodic:
                add(j, -left_from_prev, j - 1)
            else:
                # exterior u^- at the left boundary interface
                self._bc_left[j * n: (j + 1) * n] += -wm * e_l * inv_mass

        D = sp.csr_matrix((vals, (rows, cols)), shape=(N * n, N * n))
        D = sp.diags(np.tile(inv_mass, N)) @ D
        self.matrix = D.tocsc()
        self._find_null_space()
        if mesh.periodic:
            self._factor_periodic()
        else:
            self._lu = splu(self.matrix)
            self.null_vectors = np.zeros((N * n, 0))

    def _candidate_null_vectors(self):
        mesh, k = self.mesh, self.k
        N, n = mesh.n_cells, k + 1
        cands = []
        const = np.zeros((N, n))
        const[:, 0] = 1.0
        cands.append(const.ravel())
        top = np.zeros((N, n))
        top[:, k] = 1.0
        cands.append(top.ravel())                     # uniform L_k mode
        alt = np.zeros((N, n))
        alt[:, k] = (-1.0) ** np.arange(N)
        cands.append(alt.ravel())                     # alternating L_k mode
        return cands

    def _find_null_space(self):
        if not self.mesh.periodic:
            self.null_vectors = np.zeros((self.matrix.shape[0], 0))
            return
        kept = []
        for v in self._candidate_null_vectors():
            r = self.matrix @ v
            if np.linalg.norm(r) <= 1e-12 * max(1.0, np.linalg.norm(v)):
                if all(abs(np.dot(v, u)) < 1e-9 * np.linalg.norm(v) * np.linalg.norm(u)
                       for u in kept):
                    kept.append(v)
        self.null_vectors = np.array(kept).T if kept else np.zeros((self.matrix.shape[0], 0))

    def _factor_periodic(self):
        Nn = self.matrix.shape[0]
        p = self.null_vectors.shape[1]
        if p == 0:
            self._lu = splu(self.matrix)
            return
        # bordered system [[D, Z], [Z^T, 0]]; Z spans null(D) = null(D^T)
        Z = sp.csc_matrix(self.null_vectors)
        top = sp.hstack([self.matrix, Z])
        bottom = sp.hstack([Z.T, sp.csc_matrix((p, p))])
        self._lu = splu(sp.vstack([top, bottom]).tocsc())

    # -- application --------------------------------------------------------------

    def apply(self, u: DGField, bc_left=None, bc_right=None) -> DGField:
        """omega = D u (+ boundary closure on dirichlet meshes)."""
        vec = self.matrix @ u.coeffs.ravel()
        if not self.mesh.periodic:
            if bc_left is None or bc_right is None:
                raise ValueError("dirichlet operator needs both exterior traces")
            vec = vec + self._bc_left * bc_left + self._bc_right * bc_right
        return DGField(self.mesh, self.k, vec.reshape(u.coeffs.shape))

    def recover(self, omega: DGField, bc_left=None, bc_right=None,
                null_values=None, check_residual=True, rtol=1e-12):
        """Solve D u = omega for u.

        Periodic meshes pin the null components (mean first) to null_values
        (default zeros); any out-of-range part of omega lands in the bordered
        multipliers and is discarded (minimal-residual closure).  Dirichlet
        meshes use the exterior traces instead.
        """
        mesh = self.mesh
        shape = omega.coeffs.shape
        rhs = omega.coeffs.ravel()
        if mesh.periodic:
            p = self.null_vectors.shape[1]
            if p:
                nv = np.zeros(p, dtype=rhs.dtype)
                if null_values is not None:
                    m = min(p, len(null_values))
                    nv[:m] = np.asarray(null_values)[:m]
                full = np.concatenate([rhs, nv])
                sol = self._solve(full)
                u = sol[: rhs.size]
            else:
                u = self._solve(rhs)
        else:
            if bc_right is None or (self.flux == CENTRAL and bc_left is None):
                raise ValueError("dirichlet recovery needs exterior trace(s)")
            bl = 0.0 if bc_left is None else bc_left
            adj = rhs - self._bc_left * bl - self._bc_right * bc_right
            u = self._solve(adj)
        ufield = DGField(mesh, self.k, u.reshape(shape))
        if check_residual:
            back = self.matrix @ u
            r = back - rhs
            if mesh.periodic and self.null_vectors.shape[1]:
                # remove the deliberately discarded null(D^T) component
                Z = self.null_vectors
                r = r - Z @ np.linalg.lstsq(Z, r, rcond=None)[0]
            elif not mesh.periodic:
                r = back + self._bc_left * (0.0 if bc_left is None else bc_left) \
                    + self._bc_right * bc_right - rhs
            scale = max(1.0, float(np.linalg.norm(rhs)))
            if np.linalg.norm(r) > rtol * scale * 100:
                raise RecoveryError(
                    f"recovery residual {np.linalg.norm(r):.3e} exceeds tolerance "
                    f"(flux={self.flux}, bc={mesh.boundary})")
        return ufield

    def _solve(self, rhs):
        if np.iscomplexobj(rhs):
            return self._lu.solve(rhs.real) + 1j * self._lu.solve(rhs.imag)
        return self._lu.solve(rhs)

    def null_components(self, field: DGField) -> np.ndarray:
        """L2-normalized null-space components of a field (periodic only)."""
        Z = self.null_vectors
        if Z.shape[1] == 0:
            return np.zeros(0)
        v = field.coeffs.ravel()
        return (Z.T @ v) / np.einsum("ij,ij->j", Z, Z)


def assemble_derivative_operator(mesh: Mesh1D, k: int, flux: str = UPWIND_PLUS,
                                 mu: float = 0.0) -> DerivativeOperator:
    return DerivativeOperator(mesh, k, flux, mu)


def weak_derivative_from_flux(f: DGField, flux_values: np.ndarray) -> DGField:
    """Solve (d, psi) = <f_hat, psi> - (f, psi_y) with prescribed flux values.

    flux_values holds f_hat at the interfaces: length N on periodic meshes
    (index i is y_{i+1/2}, wrapping), N+1 on dirichlet meshes (index i is
    y_{i-1/2}, exterior traces already folded into the values).
    """
    mesh, k = f.mesh, f.degree
    N, n = mesh.n_cells, k + 1
    S = _stiffness(k)
    e_l = (-1.0) ** np.arange(n)
    inv_mass = (2.0 * np.arange(n) + 1.0) / mesh.h
    if mesh.periodic:
        if len(flux_values) != N:
            raise ValueError("periodic flux array must have N entries")
        right = flux_values
        left = np.roll(flux_values, 1)
    else:
        if len(flux_values) != N + 1:
            raise ValueError("dirichlet flux array must have N+1 entries")
        right = flux_values[1:]
        left = flux_values[:-1]
    d = (right[:, None] * np.ones(n)[None, :]
         - left[:, None] * e_l[None, :]
         - f.coeffs @ S)
    return DGField(mesh, k, d * inv_mass[None, :])


def integration_recover(omega: DGField, u_right: float, periodic_mean=None) -> DGField:
    """Continuous degree-(k+1) primitive chained right-to-left.

    u(y)|_Ij = u(y_{j+1/2}) - int_y^{y_{j+1/2}} omega, anchored by the supplied
    right-boundary value; (u)_y = omega holds exactly per cell.  On a periodic
    run pass periodic_mean to pin the free constant by the field mean instead.
    """
    mesh = omega.mesh
    N = mesh.n_cells
    A = omega.antiderivative_coeffs()            # A_j(-1) = 0, degree k+1
    cell_int = A.sum(axis=1)                     # A_j(1) = integral over cell j
    # interface values of u, right-to-left
    u_if = np.zeros(N + 1, dtype=omega.coeffs.dtype)
    u_if[N] = u_right
    u_if[:N] = u_right - np.cumsum(cell_int[::-1])[::-1]
    coeffs = A.copy()
    coeffs[:, 0] += u_if[:N]
    u = DGField(mesh, omega.degree + 1, coeffs)
    if periodic_mean is not None:
        u.coeffs[:, 0] += (periodic_mean - u.integral() / mesh.length)
    return u
