"""Mapping hodograph-plane solutions to parametric (x, u) curves.

x is the exact per-cell primitive of the density (CD route) or of the
projected cos z (sine-Gordon route), anchored on the left; the curve is kept
parametric in y because x folds back wherever the density goes negative
(loops) and stalls where it touches zero (cusps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DGField, gauss_nodes, legendre_vandermonde, project_values


@dataclass
class Anchor:
    y: float
    x: float


@dataclass
class ParametricCurve:
    """Samples of (y, x, u[, v]) at one time; y strictly increasing."""

    s: float
    y: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray | None = None

    def __post_init__(self):
        if np.any(np.diff(self.y) <= 0):
            raise ValueError("curve parameter y must be strictly increasing")

    @property
    def folds(self) -> bool:
        return bool(np.any(np.diff(self.x) < 0))


def x_from_rho(rho: DGField, anchor: Anchor) -> DGField:
    """Continuous degree-(k+1) primitive of rho with x(anchor.y) = anchor.x.

    The anchor must sit at the left mesh boundary (curves are emitted over
    the whole mesh); differentiating the result returns rho exactly.
    """
    mesh = rho.mesh
    if abs(anchor.y - mesh.y_left) > 1e-12 * max(1.0, abs(mesh.y_left)):
        raise ValueError("anchor must sit at the left mesh boundary")
    A = rho.antiderivative_coeffs()            # A_j(-1) = 0
    cell_int = A.sum(axis=1)
    x_if = anchor.x + np.concatenate(([0.0], np.cumsum(cell_int)))
    coeffs = A.copy()
    coeffs[:, 0] += x_if[:-1]
    return DGField(mesh, rho.degree + 1, coeffs)


def x_from_z(z_field_or_fields, anchor: Anchor, n_quad: int | None = None) -> DGField:
    """x = anchor + cumulative integral of cos z (kink route).

    For the two-component system pass a pair (z, z_tilde); the integrand is
    then the average of the two cosines.  cos z is projected per cell onto
    degree k+2 from the quadrature samples, so interface values carry the
    full Gauss integral of each cell and the result stays continuous.
    """
    if isinstance(z_field_or_fields, DGField):
        zs = [z_field_or_fields]
    else:
        zs = list(z_field_or_fields)
    z0 = zs[0]
    k = z0.degree
    nq = n_quad if n_quad is not None else k + 3
    quad = gauss_nodes(nq)
    vals = np.mean([np.cos(z.eval_ref(quad.nodes)) for z in zs], axis=0)
    cosz = project_values(vals, quad, z0.mesh, min(k + 2, nq - 1))
    return x_from_rho(cosz, anchor)


def advance_anchor(anchor: Anchor, u_at_anchor, ds: float,
                   flux_G=None) -> Anchor:
    """One RK4 step of the anchor ODE dx/ds = -G(u(y_anchor, s)).

    u_at_anchor(s) -> wave components at the anchor ordinate; flux_G defaults
    to the classic G = u^2/2.
    """
    if flux_G is None:
        def flux_G(u):
            return 0.5 * float(np.real(u * np.conj(u)))

    def f(s):
        return -float(np.real(flux_G(u_at_anchor(s))))

    # the ODE has no x-dependence, so RK4 is just a quadrature of f
    k1 = f(0.0)
    k2 = f(0.5 * ds)
    k3 = k2
    k4 = f(ds)
    return Anchor(anchor.y, anchor.x + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def emit_curve(x_field: DGField, u_field: DGField, v_field: DGField | None = None,
               n_samples_per_cell: int = 6, s: float = 0.0) -> ParametricCurve:
    """Sample the parametric curve at equispaced reference points per cell."""
    if n_samples_per_cell < 2:
        raise ValueError("need at least two samples per cell")
    ref = np.linspace(-1.0, 1.0, n_samples_per_cell, endpoint=False)
    mesh = x_field.mesh
    y = mesh.points(ref).ravel()
    y = np.concatenate([y, [mesh.y_right]])

    def sample(f):
        vals = f.eval_ref(ref).ravel()
        last = f.eval_ref(np.array([1.0]))[-1]
        return np.concatenate([vals, last])

    x = sample(x_field).real
    u = sample(u_field)
    v = sample(v_field) if v_field is not None else None
    return ParametricCurve(s, y, x, u, v)
