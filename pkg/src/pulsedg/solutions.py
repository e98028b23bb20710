"""Adapters presenting each closed-form solution as per-field callables.

Schemes consume these for initial data, Dirichlet traces at stage times, and
error measurement; they hide which closed form sits underneath and which
wave components exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exact
from .systems import SystemDescriptor, descriptor


@dataclass
class CDFieldValues:
    rho: np.ndarray
    us: list
    omegas: list
    x: np.ndarray | None = None


class CDSolution:
    """Base class: exact fields of a CD-family system at points (y, s)."""

    descr: SystemDescriptor
    rho_to_xy_offset: float = 0.0

    def fields(self, y, s) -> CDFieldValues:
        raise NotImplementedError

    @property
    def n_components(self) -> int:
        return self.descr.n_wave_components

    def rho(self, y, s):
        return self.fields(y, s).rho

    def u(self, y, s, c=0):
        return self.fields(y, s).us[c]

    def omega(self, y, s, c=0):
        return self.fields(y, s).omegas[c]

    def x(self, y, s):
        return self.fields(y, s).x


class SolitonCD(CDSolution):
    """Determinant m-soliton of the classic or complex wave system."""

    def __init__(self, params: exact.SolitonParams):
        self.params = params
        fam = "complex_cd" if params.conjugate_pairing else "cd"
        self.descr = descriptor(fam)

    def fields(self, y, s) -> CDFieldValues:
        rec = exact.cd_soliton(self.params, y, s)
        return CDFieldValues(rec.rho, [rec.u], [rec.omega], rec.x)

    def x_s(self, y, s):
        return exact.cd_soliton(self.params, y, s).x_s


class CusponCD(CDSolution):
    """One-cuspon solution of the coupled modified system."""

    def __init__(self, params: exact.CusponParams):
        self.params = params
        self.descr = descriptor("coupled_mcd")

    def fields(self, y, s) -> CDFieldValues:
        rec = exact.mcsp_cuspon(self.params, y, s)
        return CDFieldValues(rec.rho, [rec.u, rec.v],
                             [rec.omega_u, rec.omega_v], rec.x)


class DefocusCD(CDSolution):
    """Dark-type solution of the defocusing complex modified system."""

    def __init__(self, params: exact.DefocusParams):
        self.params = params
        self.descr = descriptor("defocusing_complex_mcd")
        self.rho_to_xy_offset = 0.5 * (1.0 + params.kappa * params.gamma)

    def fields(self, y, s) -> CDFieldValues:
        rec = exact.defocusing_mcd(self.params, y, s)
        return CDFieldValues(rec.rho, [rec.u], [rec.omega], rec.x)


class SGSolution:
    """Exact fields of a sine-Gordon-type system: z, omega = z_y, u = z_s."""

    descr: SystemDescriptor

    def z(self, y, s, c=0):
        raise NotImplementedError

    def omega(self, y, s, c=0):
        raise NotImplementedError

    def u(self, y, s, c=0):
        raise NotImplementedError

    @property
    def n_components(self) -> int:
        return self.descr.n_wave_components


class SGKink(SGSolution):
    def __init__(self, family: str = "sine_gordon"):
        self.descr = descriptor(family)

    def z(self, y, s, c=0):
        return exact.sg_one_soliton(y, s).z

    def omega(self, y, s, c=0):
        return exact.sg_one_soliton(y, s).z_y

    def u(self, y, s, c=0):
        return exact.sg_one_soliton(y, s).z_s

    def x_minus_y(self, y, s):
        return exact.sg_one_soliton(y, s).x_minus_y


class PiecewiseSG(SGSolution):
    """Per-subinterval analytic z and omega for discontinuous initial data.

    pieces: list of (y_lo, y_hi, z_fn(y, s), omega_fn(y, s)) per component.
    Only the initial data and boundary traces come from here; no exact error
    is defined.
    """

    def __init__(self, component_pieces, family="sine_gordon"):
        self.descr = descriptor(family)
        self._pieces = component_pieces

    def _eval(self, y, s, c, which):
        y = np.asarray(y, float)
        out = np.zeros_like(y)
        for (lo, hi, z_fn, om_fn) in self._pieces[c]:
            mask = (y >= lo) & (y <= hi)
            if np.any(mask):
                fn = z_fn if which == "z" else om_fn
                out = np.where(mask, fn(y, s), out)
        return out

    def z(self, y, s, c=0):
        return self._eval(y, s, c, "z")

    def omega(self, y, s, c=0):
        return self._eval(y, s, c, "omega")

    def u(self, y, s, c=0):
        raise ValueError("piecewise data has no closed-form u = z_s")
