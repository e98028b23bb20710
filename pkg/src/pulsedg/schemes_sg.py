"""DG and integration schemes for sine-Gordon-type equations.

The evolved field is omega = z_y per component; z is recovered either from
the weak-derivative relation with the upwind flux z^+ and the exact trace at
the right boundary, or (integration variant) as the continuous degree-(k+1)
primitive of omega anchored there.  The source term eta = sin z (or
sin z cos z for the modified family) closes omega_s = eta.

The flux making the scheme conserve the z_y energy exists in closed form and
is provided as an evaluator plus an identity assembler; time stepping always
uses the upwind flux (solving the conservative variant would be a nonlinear
implicit problem).
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque

import numpy as np

from .mesh import DGField, Mesh1D, gauss_nodes, project_values
from .operators import (UPWIND_PLUS, DerivativeOperator, integration_recover,
                        weak_derivative_from_flux)
from .systems import SystemDescriptor


@dataclass
class SGState:
    s: float
    omegas: list
    zs: list
    etas: list


class ZHistory:
    """Ring buffer of the four most recent z snapshots at uniform spacing."""

    def __init__(self, ds: float):
        self.ds = ds
        self._buf = deque(maxlen=4)

    def push(self, s: float, z_coeffs_per_component):
        if self._buf and not np.isclose(s - self._buf[-1][0], self.ds,
                                        rtol=1e-8, atol=1e-12):
            raise ValueError("snapshots must be equally spaced in s")
        self._buf.append((s, [np.array(z) for z in z_coeffs_per_component]))

    @property
    def full(self) -> bool:
        return len(self._buf) == 4

    def levels(self):
        return list(self._buf)


def reconstruct_u_from_z(history: ZHistory, mesh: Mesh1D, degree: int,
                         component: int = 0):
    """Backward-stencil time derivative of z at the third-newest level.

    u^n = (2 z^{n+1} + 3 z^n - 6 z^{n-1} + z^{n-2}) / (6 ds); exact for
    polynomials in s up to degree 3.  Returns (s_n, DGField).
    """
    if not history.full:
        raise ValueError("need four z snapshots to reconstruct u")
    (s_m2, z_m2), (s_m1, z_m1), (s_n, z_n), (s_p1, z_p1) = history.levels()
    c = (2.0 * z_p1[component] + 3.0 * z_n[component]
         - 6.0 * z_m1[component] + z_m2[component]) / (6.0 * history.ds)
    return s_n, DGField(mesh, degree, c)


def conservative_flux_z(z_minus, z_plus, eta_minus, eta_plus,
                        jump_tol: float = 1e-12):
    """Interface value of z making the z_y energy telescope.

    ([z eta] - [cos z]) / [eta] away from eta-jump degeneracy; the common
    trace when both jumps vanish.  A zero eta-jump with a genuine z-jump has
    no well-defined value and is reported to the caller.
    """
    de = eta_plus - eta_minus
    dz = z_plus - z_minus
    scale = 1.0 + abs(eta_plus) + abs(eta_minus)
    if abs(de) <= jump_tol * scale:
        if abs(dz) <= jump_tol * (1.0 + abs(z_plus) + abs(z_minus)):
            return 0.5 * (z_plus + z_minus), True
        return 0.5 * (z_plus + z_minus), False   # undefined; caller falls back
    num = (z_plus * eta_plus - z_minus * eta_minus) - (np.cos(z_plus) - np.cos(z_minus))
    return num / de, True


class SineGordonScheme:
    """Upwind-flux scheme: omega_s = Pi(source(z)), z recovered from omega."""

    name = "sg"

    def __init__(self, descr: SystemDescriptor, mesh: Mesh1D, k: int,
                 solution=None, n_quad: int | None = None):
        if not descr.is_sg:
            raise ValueError(f"{descr.family} is not a sine-Gordon family")
        if solution is None and not mesh.periodic:
            raise ValueError("dirichlet runs need exact boundary traces")
        self.descr, self.mesh, self.k = descr, mesh, k
        self.solution = solution
        self.n_quad = n_quad if n_quad is not None else k + 3
        self.quad = gauss_nodes(self.n_quad)
        self.qpts = mesh.points(self.quad.nodes)
        self.op = DerivativeOperator(mesh, k, UPWIND_PLUS)
        self._pins = None

    def _project(self, vals) -> DGField:
        return project_values(vals, self.quad, self.mesh, self.k)

    def initial_arrays(self, s0: float = 0.0):
        sol = self.solution
        oms = [self._project(sol.omega(self.qpts, s0, c))
               for c in range(self.descr.n_wave_components)]
        if self.mesh.periodic:
            zs = [self._project(sol.z(self.qpts, s0, c))
                  for c in range(self.descr.n_wave_components)]
            self._pins = [self.op.null_components(z) for z in zs]
        return [om.coeffs.copy() for om in oms]

    def _bc_z(self, s, c):
        return float(self.solution.z(np.array([self.mesh.y_right]), s, c)[0])

    def _recover_z(self, om: DGField, s: float, c: int) -> DGField:
        if self.mesh.periodic:
            pv = self._pins[c] if self._pins else None
            return self.op.recover(om, null_values=pv)
        return self.op.recover(om, bc_right=self._bc_z(s, c))

    def recover_zs(self, s, oms):
        return [self._recover_z(om, s, c) for c, om in enumerate(oms)]

    def eta_of(self, z: DGField) -> DGField:
        return self._project(self.descr.sg_source(z.eval_ref(self.quad.nodes)))

    def _range_project(self, om_dot: DGField) -> DGField:
        Z = self.op.null_vectors
        if self.mesh.periodic and Z.shape[1]:
            v = om_dot.coeffs.ravel()
            comp = (Z.T @ v) / np.einsum("ij,ij->j", Z, Z)
            return DGField(self.mesh, self.k, (v - Z @ comp).reshape(om_dot.coeffs.shape))
        return om_dot

    def rhs(self, s, arrs):
        oms = [DGField(self.mesh, self.k, a) for a in arrs]
        zs = self.recover_zs(s, oms)
        out = []
        for z in zs:
            out.append(self._range_project(self.eta_of(z)).coeffs)
        return out

    def fields(self, s, arrs) -> SGState:
        oms = [DGField(self.mesh, self.k, a) for a in arrs]
        zs = self.recover_zs(s, oms)
        return SGState(s, oms, zs, [self.eta_of(z) for z in zs])


class SineGordonIntegrationScheme(SineGordonScheme):
    """Continuous degree-(k+1) z from the omega primitive."""

    name = "sg_integration"

    def __init__(self, descr, mesh, k, solution=None, n_quad=None):
        super().__init__(descr, mesh, k, solution, n_quad)
        self._z_means = None

    def initial_arrays(self, s0: float = 0.0):
        arrs = super().initial_arrays(s0)
        if self.mesh.periodic:
            self._z_means = [
                float(np.mean(np.asarray(self.solution.z(self.qpts, s0, c))))
                for c in range(self.descr.n_wave_components)]
        return arrs

    def _recover_z(self, om, s, c):
        if self.mesh.periodic:
            mean = 0.0 if self._z_means is None else self._z_means[c]
            return integration_recover(om, 0.0, periodic_mean=mean)
        return integration_recover(om, self._bc_z(s, c))

    def _range_project(self, om_dot: DGField) -> DGField:
        if self.mesh.periodic:
            out = om_dot.copy()
            out.coeffs[:, 0] -= np.mean(out.coeffs[:, 0])
            return out
        return om_dot


def conservative_weak_derivative(z: DGField, eta: DGField):
    """omega from the weak relation driven by the conservative flux values.

    Periodic meshes only (the identity test bed); returns (omega, all_defined).
    Interfaces where the flux degenerates fall back to the central average.
    """
    if not z.mesh.periodic:
        raise ValueError("conservative-flux assembly is set up for periodic meshes")
    zm, zp = z.right_values(), np.roll(z.left_values(), -1)
    em, ep = eta.right_values(), np.roll(eta.left_values(), -1)
    flux = np.empty(z.mesh.n_cells)
    ok = True
    for i in range(z.mesh.n_cells):
        flux[i], defined = conservative_flux_z(zm[i], zp[i], em[i], ep[i])
        ok = ok and defined
    return weak_derivative_from_flux(z, flux), ok


def h2_rate_conservative(z: DGField, n_quad: int | None = None):
    """2 sum_j (omega, omega_s) with the conservative flux; zero up to the
    quadrature residual of the transcendental source projection."""
    k = z.degree
    nq = n_quad if n_quad is not None else k + 3
    quad = gauss_nodes(nq)
    eta = project_values(np.sin(z.eval_ref(quad.nodes)), quad, z.mesh, k)
    omega, ok = conservative_weak_derivative(z, eta)
    x = quad.nodes
    rate = 2.0 * omega.eval_ref(x) * eta.eval_ref(x)
    return float((rate @ quad.weights).sum() * z.mesh.h / 2.0), ok
