"""Semi-discrete schemes for the coupled-dispersionless family.

Three schemes share the evolved pair (rho_h, omega_h per wave component):

* momentum scheme ("h1"): u_h solved from the weak-derivative relation with
  the upwind flux u^+ (classic mass M = rho) or the central average (modified
  mass M = 2 rho - 1, which needs the central flux for the semi-discrete
  invariant to telescope away);
* energy scheme ("h0"): rho advances through a gamma = G(u) flux form with
  tunable jump penalties (conserved preset alpha=beta=mu=0, dissipative
  preset beta=mu=1/2), u recovered with the mu-augmented central flux;
* integration scheme: u_h is the exact continuous degree-(k+1) primitive of
  omega_h anchored at the right boundary.

On periodic meshes the recovery operators have small null spaces (constants
plus one top-degree mode for the central flux); recovery pins those
components and the omega right-hand sides are projected onto the operator
range so the evolved fields stay recoverable.  Dirichlet runs take exact
exterior traces from the solution adapter at every stage time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import DGField, Mesh1D, gauss_nodes, legendre_vandermonde, project_values
from .operators import (CENTRAL, UPWIND_PLUS, DerivativeOperator,
                        integration_recover, weak_derivative_from_flux)
from .solutions import CDSolution
from .systems import SystemDescriptor


@dataclass(frozen=True)
class FluxParams:
    """Jump penalties of the energy scheme's fluxes."""

    alpha: float = 0.0
    beta: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if self.alpha != 0.0:
            raise ValueError("alpha must be 0 (the dissipation proof needs it)")
        if self.beta < 0 or self.mu < 0:
            raise ValueError("beta and mu must be >= 0")

    @property
    def dissipative(self) -> bool:
        return self.beta + self.mu > 0


CONSERVED_PRESET = FluxParams(0.0, 0.0, 0.0)
DISSIPATIVE_PRESET = FluxParams(0.0, 0.5, 0.5)


@dataclass
class CDState:
    s: float
    rho: DGField
    omegas: list
    us: list
    gamma: DGField | None = None


class _CDSchemeBase:
    def __init__(self, descr: SystemDescriptor, mesh: Mesh1D, k: int,
                 solution: CDSolution | None = None, n_quad: int | None = None):
        if not descr.is_cd:
            raise ValueError(f"{descr.family} is not a CD-family system")
        if solution is None and not mesh.periodic:
            raise ValueError("dirichlet runs need an exact solution for traces")
        self.descr = descr
        self.mesh = mesh
        self.k = k
        self.solution = solution
        self.n_quad = n_quad if n_quad is not None else k + 3
        self.quad = gauss_nodes(self.n_quad)
        self.qpts = mesh.points(self.quad.nodes)
        self._pins = None   # per-component null pins on periodic meshes

    # -- shared plumbing -------------------------------------------------------

    def _project(self, vals) -> DGField:
        return project_values(vals, self.quad, self.mesh, self.k)

    def _cdtype(self):
        return complex if self.descr.is_complex else float

    def initial_arrays(self, s0: float = 0.0):
        sol = self.solution
        rho = self._project(sol.rho(self.qpts, s0))
        oms = [self._project(np.asarray(sol.omega(self.qpts, s0, c),
                                        dtype=self._cdtype()))
               for c in range(self.descr.n_wave_components)]
        if self.mesh.periodic:
            us = [self._project(np.asarray(sol.u(self.qpts, s0, c),
                                           dtype=self._cdtype()))
                  for c in range(self.descr.n_wave_components)]
            self.set_pins_from_fields(us)
        return [rho.coeffs.copy()] + [om.coeffs.copy() for om in oms]

    def set_pins_from_fields(self, us):
        """Record the null-mode components the periodic recovery should hold."""
        op = self._recovery_op()
        self._pins = [op.null_components(u) for u in us]

    def _unpack(self, arrs):
        rho = DGField(self.mesh, self.k, arrs[0])
        oms = [DGField(self.mesh, self.k, a) for a in arrs[1:]]
        return rho, oms

    def _bc_u(self, s, c, side):
        yb = self.mesh.y_left if side == "left" else self.mesh.y_right
        return complex(self.solution.u(np.array([yb]), s, c)[0]) \
            if self.descr.is_complex else float(self.solution.u(np.array([yb]), s, c)[0])

    def _recover_component(self, om: DGField, s: float, c: int) -> DGField:
        raise NotImplementedError

    def recover_us(self, s, oms):
        return [self._recover_component(om, s, c) for c, om in enumerate(oms)]

    def _range_project(self, om_dot: DGField) -> DGField:
        """Drop null(D^T) content so omega stays in the recoverable range."""
        op = self._recovery_op()
        Z = op.null_vectors
        if self.mesh.periodic and Z.shape[1]:
            v = om_dot.coeffs.ravel()
            comp = (Z.T @ v) / np.einsum("ij,ij->j", Z, Z)
            v = v - Z @ comp
            return DGField(self.mesh, self.k, v.reshape(om_dot.coeffs.shape))
        return om_dot

    def _recovery_op(self) -> DerivativeOperator:
        return self.op

    # -- variant-common right-hand side pieces ---------------------------------

    def _omega_dots(self, rho_vals, u_vals_list):
        M = self.descr.mass(rho_vals)
        dots = []
        for uv in u_vals_list:
            om_dot = self._project(M * uv)
            dots.append(self._range_project(om_dot))
        return dots

    def fields(self, s, arrs) -> CDState:
        rho, oms = self._unpack(arrs)
        us = self.recover_us(s, oms)
        return CDState(s, rho, oms, us)

    # -- conserved-quantity rate assembly (diagnostics / identity tests) -------

    def _u_dots(self, s, om_dots):
        """Recover du/ds from the omega rates (zero null pins; exact-trace
        time derivative via central differences for dirichlet runs)."""
        us_dot = []
        for c, od in enumerate(om_dots):
            if self.mesh.periodic:
                us_dot.append(self._recover_from(od, s, c, pins=np.zeros(8)))
            else:
                eps = 1e-6
                def ub(sv, side):
                    return self._bc_u(sv, c, side)
                dr = (ub(s + eps, "right") - ub(s - eps, "right")) / (2 * eps)
                dl = (ub(s + eps, "left") - ub(s - eps, "left")) / (2 * eps)
                us_dot.append(self._recover_from(od, s, c, bc=(dl, dr)))
        return us_dot

    def quantity_rate(self, s, arrs) -> float:
        raise NotImplementedError


class MomentumScheme(_CDSchemeBase):
    """Scheme conserving the rho^2 + omega-pairing invariant."""

    name = "h1"

    def __init__(self, descr, mesh, k, solution=None, n_quad=None, flux=None):
        super().__init__(descr, mesh, k, solution, n_quad)
        if flux is None:
            # the modified-mass family only telescopes with the central flux
            flux = UPWIND_PLUS if descr.mass_a == 1.0 and descr.mass_b == 0.0 \
                else CENTRAL
        self.flux = flux
        self.op = DerivativeOperator(mesh, k, flux)

    def _recover_from(self, om, s, c, pins=None, bc=None):
        if self.mesh.periodic:
            pv = pins if pins is not None else (
                self._pins[c] if self._pins else None)
            return self.op.recover(om, null_values=pv)
        if bc is None:
            bc = (self._bc_u(s, c, "left"), self._bc_u(s, c, "right"))
        if self.flux == UPWIND_PLUS:
            return self.op.recover(om, bc_right=bc[1])
        return self.op.recover(om, bc_left=bc[0], bc_right=bc[1])

    def _recover_component(self, om, s, c):
        return self._recover_from(om, s, c)

    def rhs(self, s, arrs):
        rho, oms = self._unpack(arrs)
        us = self.recover_us(s, oms)
        rho_vals = rho.eval_ref(self.quad.nodes)
        u_vals = [u.eval_ref(self.quad.nodes) for u in us]
        om_vals = [om.eval_ref(self.quad.nodes) for om in oms]
        if self.descr.n_wave_components == 2:
            pair = self.descr.flux_G_pairing(u_vals[0], om_vals[0],
                                             u_vals[1], om_vals[1])
        else:
            pair = self.descr.flux_G_pairing(u_vals[0], om_vals[0])
        rho_dot = self._project(-pair.real)
        om_dots = self._omega_dots(rho_vals, u_vals)
        return [rho_dot.coeffs] + [od.coeffs for od in om_dots]

    def quantity_rate(self, s, arrs) -> float:
        """d/ds of the rho^2 + omega-pairing functional along the flow."""
        rho, oms = self._unpack(arrs)
        dots = self.rhs(s, arrs)
        rho_dot, om_dots = self._unpack(dots)
        x = self.quad.nodes
        rv, rdv = rho.eval_ref(x), rho_dot.eval_ref(x)
        ov = [om.eval_ref(x) for om in oms]
        odv = [od.eval_ref(x) for od in om_dots]
        fam = self.descr.family
        if fam in ("cd", "mcd"):
            rate = 2 * rv * rdv + 2 * ov[0] * odv[0]
        elif fam in ("coupled_cd", "coupled_mcd"):
            rate = 2 * rv * rdv + odv[0] * ov[1] + ov[0] * odv[1]
        elif fam in ("complex_cd", "coupled_complex_cd"):
            rate = 2 * rv * rdv + 2 * (np.conj(ov[0]) * odv[0]).real
            if fam == "coupled_complex_cd":
                rate = rate + 2 * (np.conj(ov[1]) * odv[1]).real
        elif fam == "defocusing_complex_mcd":
            rate = 2 * rv * rdv - 2 * (np.conj(ov[0]) * odv[0]).real
        return float((rate.real @ self.quad.weights).sum() * self.mesh.h / 2)


class EnergyScheme(_CDSchemeBase):
    """Flux-form scheme for the M(rho)-weighted wave energy."""

    name = "h0"

    def __init__(self, descr, mesh, k, solution=None, n_quad=None,
                 flux_params: FluxParams = CONSERVED_PRESET):
        super().__init__(descr, mesh, k, solution, n_quad)
        self.flux_params = flux_params
        self.op = DerivativeOperator(mesh, k, CENTRAL, mu=flux_params.mu)

    def _recover_from(self, om, s, c, pins=None, bc=None):
        if self.mesh.periodic:
            pv = pins if pins is not None else (
                self._pins[c] if self._pins else None)
            return self.op.recover(om, null_values=pv)
        if bc is None:
            bc = (self._bc_u(s, c, "left"), self._bc_u(s, c, "right"))
        return self.op.recover(om, bc_left=bc[0], bc_right=bc[1])

    def _recover_component(self, om, s, c):
        return self._recover_from(om, s, c)

    def _component_vs(self, u_vals_list):
        """Wave components entering G, materializing conjugate-law partners."""
        if self.descr.n_wave_components == 2:
            return u_vals_list[0], u_vals_list[1]
        if self.descr.conjugate_v:
            return u_vals_list[0], self.descr.conjugate_v * np.conj(u_vals_list[0])
        return u_vals_list[0], None

    def gamma_of(self, us):
        u_vals = [u.eval_ref(self.quad.nodes) for u in us]
        uv, vv = self._component_vs(u_vals)
        return self._project(self.descr.flux_G(uv, vv).real)

    def _exterior_gamma(self, s, y):
        sol = self.solution
        us = [np.asarray(sol.u(np.array([y]), s, c))[0]
              for c in range(self.descr.n_wave_components)]
        if len(us) == 1:
            v = self.descr.conjugate_v * np.conj(us[0]) \
                if self.descr.conjugate_v else None
            return float(np.real(self.descr.flux_G(us[0], v)))
        return float(np.real(self.descr.flux_G(us[0], us[1])))

    def _gamma_hat(self, s, gamma: DGField, rho: DGField):
        fp = self.flux_params
        if self.mesh.periodic:
            gm, gp = gamma.right_values(), np.roll(gamma.left_values(), -1)
            rm, rp = rho.right_values(), np.roll(rho.left_values(), -1)
        else:
            yl, yr = self.mesh.y_left, self.mesh.y_right
            sol = self.solution
            gL, gR = self._exterior_gamma(s, yl), self._exterior_gamma(s, yr)
            rL = float(sol.rho(np.array([yl]), s)[0])
            rR = float(sol.rho(np.array([yr]), s)[0])
            gm = np.concatenate(([gL], gamma.right_values()))
            gp = np.concatenate((gamma.left_values(), [gR]))
            rm = np.concatenate(([rL], rho.right_values()))
            rp = np.concatenate((rho.left_values(), [rR]))
        return 0.5 * (gm + gp) - fp.alpha * (rp - rm) - fp.beta * (gp - gm)

    def rhs(self, s, arrs):
        rho, oms = self._unpack(arrs)
        us = self.recover_us(s, oms)
        gamma = self.gamma_of(us)
        ghat = self._gamma_hat(s, gamma, rho)
        rho_dot = -1.0 * weak_derivative_from_flux(gamma, ghat)
        rho_vals = rho.eval_ref(self.quad.nodes)
        u_vals = [u.eval_ref(self.quad.nodes) for u in us]
        om_dots = self._omega_dots(rho_vals, u_vals)
        return [rho_dot.coeffs] + [od.coeffs for od in om_dots]

    def fields(self, s, arrs) -> CDState:
        st = super().fields(s, arrs)
        st.gamma = self.gamma_of(st.us)
        return st

    def quantity_rate(self, s, arrs) -> float:
        """d/ds of the M(rho)-weighted wave energy, via recovered du/ds."""
        rho, oms = self._unpack(arrs)
        us = self.recover_us(s, oms)
        dots = self.rhs(s, arrs)
        rho_dot, om_dots_f = self._unpack(dots)
        us_dot = self._u_dots(s, om_dots_f)
        x = self.quad.nodes
        rv, rdv = rho.eval_ref(x), rho_dot.eval_ref(x)
        uv = [u.eval_ref(x) for u in us]
        udv = [ud.eval_ref(x) for ud in us_dot]
        a, b = self.descr.mass_a, self.descr.mass_b
        M = a * rv + b
        fam = self.descr.family
        if fam in ("cd", "mcd"):
            rate = a * rdv * uv[0] ** 2 + 2 * M * uv[0] * udv[0]
        elif fam in ("coupled_cd", "coupled_mcd"):
            rate = a * rdv * uv[0] * uv[1] + M * (udv[0] * uv[1] + uv[0] * udv[1])
        elif fam in ("complex_cd", "defocusing_complex_mcd"):
            rate = a * rdv * np.abs(uv[0]) ** 2 \
                + 2 * M * (np.conj(uv[0]) * udv[0]).real
        elif fam == "coupled_complex_cd":
            rate = a * rdv * (np.abs(uv[0]) ** 2 + np.abs(uv[1]) ** 2) \
                + 2 * M * ((np.conj(uv[0]) * udv[0]).real
                           + (np.conj(uv[1]) * udv[1]).real)
        return float((rate.real @ self.quad.weights).sum() * self.mesh.h / 2)


class IntegrationScheme(MomentumScheme):
    """Momentum-scheme algebra with the continuous degree-(k+1) primitive."""

    name = "cd_integration"

    def __init__(self, descr, mesh, k, solution=None, n_quad=None):
        # the operator is only used for range bookkeeping of omega
        super().__init__(descr, mesh, k, solution, n_quad, flux=UPWIND_PLUS)
        self._u_means = None

    def initial_arrays(self, s0: float = 0.0):
        arrs = super().initial_arrays(s0)
        if self.mesh.periodic:
            sol = self.solution
            self._u_means = [
                float(np.mean(np.asarray(sol.u(self.qpts, s0, c)).real))
                for c in range(self.descr.n_wave_components)]
        return arrs

    def _recover_component(self, om, s, c):
        if self.mesh.periodic:
            mean = 0.0 if self._u_means is None else self._u_means[c]
            return integration_recover(om, 0.0, periodic_mean=mean)
        return integration_recover(om, self._bc_u(s, c, "right"))

    def _range_project(self, om_dot: DGField) -> DGField:
        # periodic chain continuity only needs the omega mean held at zero
        if self.mesh.periodic:
            out = om_dot.copy()
            out.coeffs[:, 0] -= np.mean(out.coeffs[:, 0])
            return out
        return om_dot
