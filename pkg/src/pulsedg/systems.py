"""PDE family descriptors and conserved-quantity evaluators.

Every hodograph-plane family fits the shape

    rho_s + (G(u, v))_y = 0,     (u_c)_ys = M(rho) u_c ,

with the variant-specific flux G and mass M(rho) = mass_a * rho + mass_b.
Systems whose second component is a fixed conjugate image of the first
(v = u* or v = -u*) store a single wave component; genuinely coupled systems
store two.  The defocusing variant is the coupled modified system with
v = -u*, which fixes both its flux sign and the minus sign in its
second invariant (rho^2 - |u_y|^2); the evaluators below follow that algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DGField, gauss_nodes

CD_FAMILIES = ("cd", "coupled_cd", "complex_cd", "coupled_complex_cd",
               "mcd", "coupled_mcd", "defocusing_complex_mcd")
SG_FAMILIES = ("sine_gordon", "msp_sine_gordon", "two_component_sg")
ALL_FAMILIES = CD_FAMILIES + SG_FAMILIES + ("sp_direct",)


@dataclass(frozen=True)
class SystemDescriptor:
    family: str
    n_wave_components: int
    scalar_kind: str              # "real" or "complex"
    mass_a: float = 1.0           # M(rho) = mass_a * rho + mass_b
    mass_b: float = 0.0
    conjugate_v: float = 0.0      # 0: none; +1: v = u*; -1: v = -u*
    source: str = ""              # sine-Gordon source term name

    @property
    def is_cd(self) -> bool:
        return self.family in CD_FAMILIES

    @property
    def is_sg(self) -> bool:
        return self.family in SG_FAMILIES

    @property
    def is_complex(self) -> bool:
        return self.scalar_kind == "complex"

    def mass(self, rho):
        return self.mass_a * rho + self.mass_b

    def flux_G(self, u, v=None):
        """Variant flux G evaluated pointwise (always real-valued)."""
        fam = self.family
        if fam == "cd":
            return 0.5 * u * u
        if fam == "coupled_cd":
            return 0.5 * u * v
        if fam == "complex_cd":
            return 0.5 * np.abs(u) ** 2
        if fam == "coupled_complex_cd":
            return 0.5 * (np.abs(u) ** 2 + np.abs(v) ** 2)
        if fam == "mcd":
            return u * u
        if fam == "coupled_mcd":
            return u * v
        if fam == "defocusing_complex_mcd":
            return -np.abs(u) ** 2
        raise ValueError(f"{fam} has no CD-type flux")

    def flux_G_pairing(self, u, om_u, v=None, om_v=None):
        """Chain-rule expansion of (G)_y in terms of the derivative fields."""
        fam = self.family
        if fam == "cd":
            return u * om_u
        if fam == "coupled_cd":
            return 0.5 * (u * om_v + v * om_u)
        if fam == "complex_cd":
            return (np.conj(u) * om_u).real
        if fam == "coupled_complex_cd":
            return (np.conj(u) * om_u).real + (np.conj(v) * om_v).real
        if fam == "mcd":
            return 2.0 * u * om_u
        if fam == "coupled_mcd":
            return u * om_v + v * om_u
        if fam == "defocusing_complex_mcd":
            return -2.0 * (np.conj(u) * om_u).real
        raise ValueError(f"{fam} has no CD-type flux")

    def h0_integrand(self, rho, u, v=None):
        fam = self.family
        if fam == "cd":
            return rho * u * u
        if fam == "coupled_cd":
            return rho * u * v
        if fam == "complex_cd":
            return rho * np.abs(u) ** 2
        if fam == "coupled_complex_cd":
            return rho * (np.abs(u) ** 2 + np.abs(v) ** 2)
        if fam == "mcd":
            return (2.0 * rho - 1.0) * u * u
        if fam == "coupled_mcd":
            return (2.0 * rho - 1.0) * u * v
        if fam == "defocusing_complex_mcd":
            return (2.0 * rho - 1.0) * np.abs(u) ** 2
        raise ValueError(f"{fam} is not a CD-family system")

    def h1_integrand(self, rho, om_u, om_v=None):
        fam = self.family
        if fam in ("cd", "mcd"):
            return rho * rho + om_u * om_u
        if fam in ("coupled_cd", "coupled_mcd"):
            return rho * rho + om_u * om_v
        if fam in ("complex_cd", "coupled_complex_cd"):
            out = rho * rho + np.abs(om_u) ** 2
            if fam == "coupled_complex_cd":
                out = out + np.abs(om_v) ** 2
            return out
        if fam == "defocusing_complex_mcd":
            # coupled form with v = -u*: u_y v_y = -|u_y|^2
            return rho * rho - np.abs(om_u) ** 2
        raise ValueError(f"{fam} is not a CD-family system")

    def sg_source(self, z):
        if self.source == "sin":
            return np.sin(z)
        if self.source == "sin_cos":
            return np.sin(z) * np.cos(z)
        raise ValueError(f"{self.family} has no sine-Gordon source")


_REGISTRY = {
    "sp_direct": SystemDescriptor("sp_direct", 1, "real"),
    "cd": SystemDescriptor("cd", 1, "real"),
    "coupled_cd": SystemDescriptor("coupled_cd", 2, "real"),
    "complex_cd": SystemDescriptor("complex_cd", 1, "complex", conjugate_v=1.0),
    "coupled_complex_cd": SystemDescriptor("coupled_complex_cd", 2, "complex"),
    "mcd": SystemDescriptor("mcd", 1, "real", mass_a=2.0, mass_b=-1.0),
    "coupled_mcd": SystemDescriptor("coupled_mcd", 2, "real", mass_a=2.0, mass_b=-1.0),
    "defocusing_complex_mcd": SystemDescriptor(
        "defocusing_complex_mcd", 1, "complex", mass_a=2.0, mass_b=-1.0,
        conjugate_v=-1.0),
    "sine_gordon": SystemDescriptor("sine_gordon", 1, "real", source="sin"),
    "msp_sine_gordon": SystemDescriptor("msp_sine_gordon", 1, "real",
                                        source="sin_cos"),
    "two_component_sg": SystemDescriptor("two_component_sg", 2, "real",
                                         source="sin"),
}


def descriptor(family: str) -> SystemDescriptor:
    try:
        return _REGISTRY[family]
    except KeyError:
        raise ValueError(f"unknown system family {family!r}") from None


# ---------------------------------------------------------------------------
# Quadrature evaluation of the functionals
# ---------------------------------------------------------------------------


def _node_values(fields, n_quad=None):
    degs = [f.degree for f in fields if f is not None]
    nq = n_quad if n_quad is not None else max(degs) + 3
    quad = gauss_nodes(nq)
    vals = [None if f is None else f.eval_ref(quad.nodes) for f in fields]
    return quad, vals


def _cells(integrand_vals, quad, mesh) -> np.ndarray:
    return (integrand_vals @ quad.weights) * (mesh.h / 2.0)


def h0_cell_integrals(descr: SystemDescriptor, rho: DGField, u: DGField,
                      v: DGField | None = None, n_quad=None) -> np.ndarray:
    if not descr.is_cd:
        raise ValueError(f"{descr.family} has no H0 functional")
    quad, (rv, uv, vv) = _node_values((rho, u, v), n_quad)
    return _cells(descr.h0_integrand(rv, uv, vv).real, quad, rho.mesh)


def h1_cell_integrals(descr: SystemDescriptor, rho: DGField, omega_u: DGField,
                      omega_v: DGField | None = None, n_quad=None) -> np.ndarray:
    if not descr.is_cd:
        raise ValueError(f"{descr.family} has no H1 functional")
    quad, (rv, ou, ov) = _node_values((rho, omega_u, omega_v), n_quad)
    return _cells(descr.h1_integrand(rv, ou, ov).real, quad, rho.mesh)


def e0_cell_integrals(u: DGField, n_quad=None) -> np.ndarray:
    quad, (uv,) = _node_values((u,), n_quad)
    return _cells(np.abs(uv) ** 2, quad, u.mesh)


def h2_cell_integrals(omega: DGField, n_quad=None) -> np.ndarray:
    quad, (ov,) = _node_values((omega,), n_quad)
    return _cells(np.abs(ov) ** 2, quad, omega.mesh)


def eval_H0(descr, rho, u, v=None, n_quad=None) -> float:
    return float(h0_cell_integrals(descr, rho, u, v, n_quad).sum())


def eval_H1(descr, rho, omega_u, omega_v=None, n_quad=None) -> float:
    return float(h1_cell_integrals(descr, rho, omega_u, omega_v, n_quad).sum())


def eval_E0(u, n_quad=None) -> float:
    return float(e0_cell_integrals(u, n_quad).sum())


def eval_H2(omega, n_quad=None) -> float:
    return float(h2_cell_integrals(omega, n_quad).sum())


# ---------------------------------------------------------------------------
# Drift diagnostics
# ---------------------------------------------------------------------------


@dataclass
class DriftReport:
    name: str
    times: np.ndarray
    totals: np.ndarray
    delta: float        # sum_j |cell integral change| between first and last
    signed: float       # plain difference of totals

    @property
    def initial(self) -> float:
        return float(self.totals[0])

    @property
    def final(self) -> float:
        return float(self.totals[-1])


def drift_from_cells(name: str, times, cell_history) -> DriftReport:
    """Drift report from a sequence of per-cell integral vectors."""
    if len(cell_history) < 2:
        raise ValueError("drift needs at least two snapshots")
    n = len(cell_history[0])
    for c in cell_history:
        if len(c) != n:
            raise ValueError("snapshots live on different meshes")
    totals = np.array([np.sum(c) for c in cell_history])
    delta = float(np.sum(np.abs(cell_history[-1] - cell_history[0])))
    return DriftReport(name, np.asarray(times, float), totals, delta,
                       float(totals[-1] - totals[0]))
