"""1D mesh, Legendre element basis, quadrature, projections and norms.

Every field lives on a uniform mesh of N cells.  On cell j the solution is a
Legendre expansion u(y) = sum_m c[j,m] * L_m(xi), xi = 2*(y - y_j)/h in
[-1, 1], with the unnormalized Legendre polynomials (L_m(1) = 1).  The local
mass matrix is then diagonal with entries h/(2m+1), which keeps every
projection and weak solve a cheap coefficient-space operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PERIODIC = "periodic"
DIRICHLET_EXACT = "dirichlet_exact"


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of [y_left, y_right] into n_cells cells."""

    y_left: float
    y_right: float
    n_cells: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        if not self.y_left < self.y_right:
            raise ValueError(
                f"inverted interval: [{self.y_left}, {self.y_right}]")
        if self.boundary not in (PERIODIC, DIRICHLET_EXACT):
            raise ValueError(f"unknown boundary kind {self.boundary!r}")

    @property
    def h(self) -> float:
        return (self.y_right - self.y_left) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        j = np.arange(self.n_cells)
        return self.y_left + (j + 0.5) * self.h

    @property
    def interfaces(self) -> np.ndarray:
        """All N+1 cell boundaries y_{j+1/2}, j = 0..N."""
        return self.y_left + np.arange(self.n_cells + 1) * self.h

    @property
    def length(self) -> float:
        return self.y_right - self.y_left

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    def points(self, ref_pts: np.ndarray) -> np.ndarray:
        """Physical coordinates of reference points per cell, shape (N, len(ref_pts))."""
        ref_pts = np.asarray(ref_pts)
        return self.centers[:, None] + 0.5 * self.h * ref_pts[None, :]


def build_mesh(y_left, y_right, n_cells, boundary=PERIODIC) -> Mesh1D:
    return Mesh1D(float(y_left), float(y_right), int(n_cells), boundary)


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int


def gauss_nodes(n: int) -> Quadrature:
    if n < 1:
        raise ValueError(f"quadrature needs >= 1 point, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    return Quadrature(x, w, n)


def legendre_vandermonde(pts: np.ndarray, k: int) -> np.ndarray:
    """Matrix V[i, m] = L_m(pts[i]) for m = 0..k."""
    return np.polynomial.legendre.legvander(np.asarray(pts, float), k)


# L_m(-1) = (-1)^m, L_m(1) = 1
def _end_values(k: int):
    signs = (-1.0) ** np.arange(k + 1)
    return signs, np.ones(k + 1)


class DGField:
    """Piecewise Legendre field on a mesh; real or complex coefficients.

    coeffs has shape (n_cells, degree+1).  The field is one-sided at the
    interfaces; nothing here assumes continuity.
    """

    __slots__ = ("mesh", "degree", "coeffs")

    def __init__(self, mesh: Mesh1D, degree: int, coeffs: np.ndarray | None = None,
                 dtype=float):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.mesh = mesh
        self.degree = degree
        if coeffs is None:
            coeffs = np.zeros((mesh.n_cells, degree + 1), dtype=dtype)
        else:
            coeffs = np.asarray(coeffs)
            if coeffs.shape != (mesh.n_cells, degree + 1):
                raise ValueError(
                    f"coeffs shape {coeffs.shape} != {(mesh.n_cells, degree + 1)}")
        self.coeffs = coeffs

    # -- construction helpers -------------------------------------------------

    def copy(self) -> "DGField":
        return DGField(self.mesh, self.degree, self.coeffs.copy())

    def astype(self, dtype) -> "DGField":
        return DGField(self.mesh, self.degree, self.coeffs.astype(dtype))

    def __add__(self, other):
        return DGField(self.mesh, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return DGField(self.mesh, self.degree, self.coeffs - other.coeffs)

    def __mul__(self, a):
        return DGField(self.mesh, self.degree, self.coeffs * a)

    __rmul__ = __mul__

    # -- evaluation ------------------------------------------------------------

    def eval_ref(self, ref_pts: np.ndarray) -> np.ndarray:
        """Values at the same reference points in every cell, shape (N, n_pts)."""
        V = legendre_vandermonde(ref_pts, self.degree)
        return self.coeffs @ V.T

    def eval_at(self, y: np.ndarray) -> np.ndarray:
        """Pointwise values at arbitrary physical points (right-continuous at
        interior interfaces)."""
        y = np.atleast_1d(np.asarray(y, float))
        m = self.mesh
        j = np.clip(((y - m.y_left) / m.h).astype(int), 0, m.n_cells - 1)
        xi = 2.0 * (y - m.centers[j]) / m.h
        V = legendre_vandermonde(xi, self.degree)
        return np.einsum("pm,pm->p", self.coeffs[j], V)

    def left_values(self) -> np.ndarray:
        """Trace at each cell's left edge, u(y_{j-1/2}^+), shape (N,)."""
        signs, _ = _end_values(self.degree)
        return self.coeffs @ signs

    def right_values(self) -> np.ndarray:
        """Trace at each cell's right edge, u(y_{j+1/2}^-), shape (N,)."""
        return self.coeffs.sum(axis=1)

    def cell_means(self) -> np.ndarray:
        return self.coeffs[:, 0].copy()

    def integral(self):
        return self.coeffs[:, 0].sum() * self.mesh.h

    def derivative(self) -> "DGField":
        """Broken (cell-by-cell) derivative, degree k-1 padded back to k."""
        c = np.polynomial.legendre.legder(self.coeffs.T, axis=0) * (2.0 / self.mesh.h)
        out = np.zeros_like(self.coeffs)
        out[:, : c.shape[0]] = c.T
        return DGField(self.mesh, self.degree, out)

    def antiderivative_coeffs(self) -> np.ndarray:
        """Per-cell primitive A_j with A_j(-1) = 0, dA_j/dy = field; degree k+1."""
        c = np.polynomial.legendre.legint(self.coeffs.T, axis=0) * (self.mesh.h / 2.0)
        A = c.T
        # legint leaves the constant mode free; pin A_j(-1) = 0
        signs = (-1.0) ** np.arange(A.shape[1])
        A[:, 0] -= A @ signs
        return A


def interface_traces(field: DGField, exterior_left=None, exterior_right=None):
    """One-sided values (minus, plus) at every interface.

    Periodic meshes return N wrapped interfaces (index i is y_{i+1/2},
    i = 0..N-1, with the last wrapping to the first cell).  Dirichlet meshes
    return N+1 interfaces and require caller-supplied exterior values at the
    two boundary interfaces.
    """
    right = field.right_values()
    left = field.left_values()
    if field.mesh.periodic:
        minus = right
        plus = np.roll(left, -1)
        return minus, plus
    if exterior_left is None or exterior_right is None:
        raise ValueError("dirichlet mesh needs exterior boundary values")
    minus = np.concatenate(([exterior_left], right))
    plus = np.concatenate((left, [exterior_right]))
    return minus, plus


def jumps(field: DGField, **bc) -> np.ndarray:
    minus, plus = interface_traces(field, **bc)
    return plus - minus


def averages(field: DGField, **bc) -> np.ndarray:
    minus, plus = interface_traces(field, **bc)
    return 0.5 * (plus + minus)


def trace_pair(field: DGField, iface: int, **bc):
    """(u^-, u^+) at a single interface index."""
    minus, plus = interface_traces(field, **bc)
    return minus[iface], plus[iface]


# -- projections ---------------------------------------------------------------


def project_L2(f, mesh: Mesh1D, k: int, n_quad: int | None = None) -> DGField:
    """Cell-wise L2 projection of a pointwise-evaluable f onto degree k."""
    nq = n_quad if n_quad is not None else k + 3
    quad = gauss_nodes(nq)
    pts = mesh.points(quad.nodes)
    vals = np.asarray(f(pts))
    V = legendre_vandermonde(quad.nodes, k)
    scale = (2.0 * np.arange(k + 1) + 1.0) / 2.0
    coeffs = np.einsum("q,qm,jq->jm", quad.weights, V, vals) * scale
    return DGField(mesh, k, coeffs)


def project_values(vals: np.ndarray, quad: Quadrature, mesh: Mesh1D, k: int) -> DGField:
    """L2 projection from values already sampled at quad nodes per cell."""
    V = legendre_vandermonde(quad.nodes, k)
    scale = (2.0 * np.arange(k + 1) + 1.0) / 2.0
    coeffs = np.einsum("q,qm,jq->jm", quad.weights, V, vals) * scale
    return DGField(mesh, k, coeffs)


def _project_endpoint(f, mesh, k, left: bool) -> DGField:
    """Shared body of the Gauss-Radau-type projections.

    Moments against degree <= k-1 match the L2 projection; the top Legendre
    coefficient is then fixed by exact interpolation at one cell endpoint.
    For k = 0 this degenerates to pure endpoint interpolation.
    """
    if k == 0:
        edges = mesh.interfaces[:-1] if left else mesh.interfaces[1:]
        vals = np.asarray(f(edges[:, None]))[:, 0]
        return DGField(mesh, 0, np.array(vals)[:, None])
    low = project_L2(f, mesh, k - 1, n_quad=k + 3)
    coeffs = np.zeros((mesh.n_cells, k + 1))
    coeffs[:, :k] = low.coeffs
    if left:
        edges = mesh.interfaces[:-1]
        fvals = np.asarray(f(edges[:, None]))[:, 0]
        signs = (-1.0) ** np.arange(k)
        resid = fvals - coeffs[:, :k] @ signs
        coeffs[:, k] = resid * (-1.0) ** k
    else:
        edges = mesh.interfaces[1:]
        fvals = np.asarray(f(edges[:, None]))[:, 0]
        resid = fvals - coeffs[:, :k].sum(axis=1)
        coeffs[:, k] = resid
    return DGField(mesh, k, coeffs)


def project_plus(f, mesh: Mesh1D, k: int) -> DGField:
    """Projection matching f exactly at each cell's left endpoint."""
    return _project_endpoint(f, mesh, k, left=True)


def project_minus(f, mesh: Mesh1D, k: int) -> DGField:
    """Projection matching f exactly at each cell's right endpoint."""
    return _project_endpoint(f, mesh, k, left=False)


# -- norms ----------------------------------------------------------------------


def norm_L2(err, mesh: Mesh1D, k: int | None = None, n_quad: int | None = None) -> float:
    """L2 norm of a pointwise error function over the mesh (k+3-point rule)."""
    nq = n_quad if n_quad is not None else (k if k is not None else 2) + 3
    quad = gauss_nodes(nq)
    pts = mesh.points(quad.nodes)
    vals = np.abs(np.asarray(err(pts))) ** 2
    return float(np.sqrt(np.sum(vals @ quad.weights) * mesh.h / 2.0))


_LINF_PTS = np.concatenate(([-1.0], np.linspace(-1.0, 1.0, 10)[1:-1], [1.0]))


def norm_Linf(err, mesh: Mesh1D) -> float:
    """Max |error| sampled at 8 interior equispaced points + both endpoints."""
    pts = mesh.points(_LINF_PTS)
    return float(np.max(np.abs(np.asarray(err(pts)))))


def field_error_norms(field: DGField, exact, n_quad: int | None = None):
    """(L2, Linf) of field - exact, sampled consistently on the field's mesh."""
    mesh, k = field.mesh, field.degree
    nq = n_quad if n_quad is not None else k + 3
    quad = gauss_nodes(nq)
    pts = mesh.points(quad.nodes)
    diff = field.eval_ref(quad.nodes) - np.asarray(exact(pts))
    l2 = float(np.sqrt(np.sum(np.abs(diff) ** 2 @ quad.weights) * mesh.h / 2.0))
    pts_inf = mesh.points(_LINF_PTS)
    diff_inf = field.eval_ref(_LINF_PTS) - np.asarray(exact(pts_inf))
    return l2, float(np.max(np.abs(diff_inf)))


def boundary_norm(field: DGField) -> float:
    """l2 norm of all one-sided traces, as used by the inverse inequality."""
    lv, rv = field.left_values(), field.right_values()
    return float(np.sqrt(np.sum(np.abs(lv) ** 2 + np.abs(rv) ** 2)))
