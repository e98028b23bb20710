"""Energy-conserving scheme for the pulse equation in physical coordinates.

Evolves v = u_x; u is recovered through the central-flux weak-derivative
relation on a periodic mesh with the zero-mean closure (the equation forces
zero mean over a period), and the nonlinear transport field omega is the
weak derivative of f(u) = u^3/6 with the dissipation-free flux
[F]/[u] = {u} (u^-^2 + u^+^2)/12, F = u^4/24.

The periodic central operator also annihilates one top-degree Legendre mode;
its component is pinned to zero and the v right-hand side is projected onto
the operator range, which leaves the recovered u trajectory unchanged while
keeping v recoverable and the semi-discrete energy identity exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DGField, Mesh1D, gauss_nodes, project_values
from .operators import CENTRAL, DerivativeOperator, weak_derivative_from_flux


def nonlinear_flux(u_minus, u_plus):
    """Interface flux [F]/[u] for f = u^3/6; f({u}) on zero jumps.

    F is the quartic u^4/24, so the divided difference factors exactly:
    [F]/[u] = (u^- + u^+)(u^-^2 + u^+^2)/24, which also equals f({u}) in the
    continuous limit; the branch only matters for the spec'd scalar contract.
    """
    um = np.asarray(u_minus, float)
    up = np.asarray(u_plus, float)
    out = (um + up) * (um * um + up * up) / 24.0
    zero = um == up
    if np.any(zero):
        avg = 0.5 * (um + up)
        out = np.where(zero, avg**3 / 6.0, out)
    return out if out.ndim else float(out)


@dataclass
class SPState:
    t: float
    v: DGField
    u: DGField
    omega: DGField


class PulseEnergyScheme:
    """Semi-discrete scheme conserving the squared-amplitude integral."""

    name = "e0"

    def __init__(self, mesh: Mesh1D, k: int, n_quad: int | None = None):
        if not mesh.periodic:
            raise ValueError("the direct scheme is set up for periodic runs")
        self.mesh, self.k = mesh, k
        self.n_quad = n_quad if n_quad is not None else k + 3
        self.quad = gauss_nodes(self.n_quad)
        self.qpts = mesh.points(self.quad.nodes)
        self.op = DerivativeOperator(mesh, k, CENTRAL)

    def _project(self, vals) -> DGField:
        return project_values(vals, self.quad, self.mesh, self.k)

    def initial_arrays(self, u0_fn):
        u0 = self._project(np.asarray(u0_fn(self.qpts), float))
        u0.coeffs[:, 0] -= u0.integral() / self.mesh.length
        # v := D u0 so the algebraic relation holds exactly at t = 0
        v0 = self.op.apply(u0)
        return [v0.coeffs.copy()]

    def recover_u(self, v: DGField) -> DGField:
        return self.op.recover(v, null_values=None)   # zero mean, zero top mode

    def omega_of(self, u: DGField) -> DGField:
        """Weak derivative of f(u) with the nonlinear interface flux.

        f(u) has degree 3k, so the volume term is quadrature-assembled rather
        than routed through a degree-k projection.
        """
        minus, plus = u.right_values(), np.roll(u.left_values(), -1)
        fhat = nonlinear_flux(minus, plus)
        fvals = u.eval_ref(self.quad.nodes) ** 3 / 6.0
        n = self.k + 1
        vol = np.einsum("jq,qm->jm", fvals, _dlegendre_weights(self.quad, self.k))
        e_l = (-1.0) ** np.arange(n)
        right = fhat[:, None] * np.ones(n)[None, :]
        left = np.roll(fhat, 1)[:, None] * e_l[None, :]
        inv_mass = (2.0 * np.arange(n) + 1.0) / self.mesh.h
        return DGField(self.mesh, self.k, (right - left - vol) * inv_mass[None, :])

    def rhs(self, t, arrs):
        v = DGField(self.mesh, self.k, arrs[0])
        u = self.recover_u(v)
        om = self.omega_of(u)
        omhat = 0.5 * (om.right_values() + np.roll(om.left_values(), -1))
        v_dot = self._project(u.eval_ref(self.quad.nodes)) \
            + weak_derivative_from_flux(om, omhat)
        # keep v inside the recoverable range (null content never reaches u)
        Z = self.op.null_vectors
        if Z.shape[1]:
            vec = v_dot.coeffs.ravel()
            comp = (Z.T @ vec) / np.einsum("ij,ij->j", Z, Z)
            v_dot = DGField(self.mesh, self.k,
                            (vec - Z @ comp).reshape(v_dot.coeffs.shape))
        return [v_dot.coeffs]

    def fields(self, t, arrs) -> SPState:
        v = DGField(self.mesh, self.k, arrs[0])
        u = self.recover_u(v)
        return SPState(t, v, u, self.omega_of(u))

    def quantity_rate(self, t, arrs) -> float:
        """d/dt of the squared-amplitude integral, via recovered du/dt."""
        v = DGField(self.mesh, self.k, arrs[0])
        u = self.recover_u(v)
        v_dot = DGField(self.mesh, self.k, self.rhs(t, arrs)[0])
        u_dot = self.op.recover(v_dot, null_values=None)
        x = self.quad.nodes
        rate = 2.0 * u.eval_ref(x) * u_dot.eval_ref(x)
        return float((rate @ self.quad.weights).sum() * self.mesh.h / 2.0)


def _dlegendre_weights(quad, k):
    """W[q, m] = w_q L_m'(x_q), so f-values @ W gives integral f L_m' dxi."""
    dV = np.zeros((len(quad.nodes), k + 1))
    for m in range(1, k + 1):
        c = np.zeros(m + 1)
        c[m] = 1.0
        dV[:, m] = np.polynomial.legendre.legval(
            quad.nodes, np.polynomial.legendre.legder(c))
    return quad.weights[:, None] * dV
