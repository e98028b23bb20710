"""Closed-form solution oracles with analytic derivatives and hodograph maps.

The multi-soliton family is evaluated through the reduced m x m matrix
Z_ij = sum_k ahat_ik * bhat_kj * exp(xs_k + x_j), which is similar to the
product A*B of the two determinant blocks, so

    f = det(I + Z),    u = sum_i alpha_i e^{xi_i} [ (I+Z)^{-1} 1 ]_i .

All exponentials appear only in pair combinations whose real parts stay
far below the float64 overflow threshold on the domains of interest; the
tails underflow gracefully to the vacuum values.  Every derivative is
analytic (matrix calculus on Z); finite differences appear only in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import (elliptic_cn, elliptic_E_complete, elliptic_E_incomplete,
                       elliptic_K)

_IMAG_TOL = 1e-10


class ExactSolutionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Determinant solitons of the coupled-dispersionless family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolitonParams:
    """Wave numbers p_i, amplitudes alpha_i and phases y0_i of an m-soliton.

    conjugate_pairing selects the complex matrix law (second components built
    from conjugated p, alpha, y0) used by the complex wave equation; the
    plain law keeps all entries unconjugated.
    """

    p: tuple
    alpha: tuple
    y0: tuple
    conjugate_pairing: bool = False

    def __post_init__(self):
        m = len(self.p)
        if not (len(self.alpha) == m and len(self.y0) == m and m >= 1):
            raise ExactSolutionError("p, alpha, y0 must share length m >= 1")
        ps = np.array(self.p, dtype=complex)
        qs = ps.conj() if self.conjugate_pairing else ps
        for i in range(m):
            for j in range(m):
                if abs(1.0 / ps[i] + 1.0 / qs[j]) < 1e-14:
                    raise ExactSolutionError(
                        f"singular matrix entry: 1/p_{i} + 1/p*_{j} = 0")

    @property
    def m(self) -> int:
        return len(self.p)


class _TauWorkspace:
    """Batched Z-matrix evaluation at points (y, s) with derivative factors."""

    def __init__(self, params: SolitonParams, y, s):
        y = np.asarray(y, dtype=float)
        s = np.asarray(s, dtype=float)
        y, s = np.broadcast_arrays(y, s)
        self.shape = y.shape
        yf, sf = y.ravel(), s.ravel()
        p = np.array(params.p, dtype=complex)
        al = np.array(params.alpha, dtype=complex)
        y0 = np.array(params.y0, dtype=complex)
        if params.conjugate_pairing:
            ps, als, y0s = p.conj(), al.conj(), y0.conj()
        else:
            ps, als, y0s = p, al, y0
        xi = p[None, :] * yf[:, None] + sf[:, None] / p[None, :] + y0[None, :]
        xis = ps[None, :] * yf[:, None] + sf[:, None] / ps[None, :] + y0s[None, :]

        m = params.m
        ahat = 1.0 / (2.0 * (1.0 / p[:, None] + 1.0 / ps[None, :]))      # (i, k)
        bhat = (als[:, None] * al[None, :]
                / (2.0 * (1.0 / ps[:, None] + 1.0 / p[None, :])))        # (k, j)
        C = ahat[:, :, None] * bhat[None, :, :]                          # (i, k, j)

        E = np.exp(xis[:, :, None] + xi[:, None, :])                     # (P, k, j)
        if not np.all(np.isfinite(E)):
            raise ExactSolutionError("overflow in soliton exponentials")
        gy = (ps[:, None] + p[None, :])                                  # d/dy factor
        gs = (1.0 / ps[:, None] + 1.0 / p[None, :])                      # d/ds factor

        self.Z = np.einsum("ikj,pkj->pij", C, E)
        self.Zy = np.einsum("ikj,kj,pkj->pij", C, gy, E)
        self.Zs = np.einsum("ikj,kj,pkj->pij", C, gs, E)
        self.Zys = np.einsum("ikj,kj,pkj->pij", C, gy * gs, E)
        self.Zss = np.einsum("ikj,kj,pkj->pij", C, gs * gs, E)
        self.F = np.eye(m)[None] + self.Z
        self.a = al[None, :] * np.exp(xi)                                # (P, i)
        self.a_y = self.a * p[None, :]
        self.p = p

    def _solve(self, B):
        return np.linalg.solve(self.F, B)

    def f(self):
        return np.linalg.det(self.F).reshape(self.shape)

    def logf_s(self):
        return np.trace(self._solve(self.Zs), axis1=1, axis2=2).reshape(self.shape)

    def logf_ys(self):
        t1 = np.trace(self._solve(self.Zys), axis1=1, axis2=2)
        FiZy = self._solve(self.Zy)
        FiZs = self._solve(self.Zs)
        t2 = np.einsum("pij,pji->p", FiZy, FiZs)
        return (t1 - t2).reshape(self.shape)

    def logf_ss(self):
        t1 = np.trace(self._solve(self.Zss), axis1=1, axis2=2)
        FiZs = self._solve(self.Zs)
        t2 = np.einsum("pij,pji->p", FiZs, FiZs)
        return (t1 - t2).reshape(self.shape)

    def u_and_uy(self):
        ones = np.ones(self.F.shape[:2] + (1,), dtype=complex)
        w = self._solve(ones)[..., 0]                                    # (P, i)
        u = np.einsum("pi,pi->p", self.a, w)
        wy = -self._solve(np.einsum("pij,pj->pi", self.Zy, w)[..., None])[..., 0]
        uy = np.einsum("pi,pi->p", self.a_y, w) + np.einsum("pi,pi->p", self.a, wy)
        return u.reshape(self.shape), uy.reshape(self.shape)


def tau_f(params: SolitonParams, y, s):
    """Main tau function f = det(I + AB) at points (y, s)."""
    return _TauWorkspace(params, y, s).f()


def tau_g(params: SolitonParams, y, s, component: int = 0):
    """Bordered tau function g (= f * u); only component 0 exists here."""
    if component != 0:
        raise ExactSolutionError("determinant family has a single wave component")
    ws = _TauWorkspace(params, y, s)
    u, _ = ws.u_and_uy()
    return ws.f() * u


@dataclass(frozen=True)
class CDSolitonRecord:
    u: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    x: np.ndarray
    x_s: np.ndarray


def cd_soliton(params: SolitonParams, y, s) -> CDSolitonRecord:
    """u = g/f with x = y - 2 (ln f)_s, rho = x_y, omega = u_y.

    The plain matrix law returns real arrays after checking that imaginary
    parts are at rounding level (conjugate-paired parameter sets, e.g.
    breathers, must produce real fields).
    """
    ws = _TauWorkspace(params, y, s)
    u, uy = ws.u_and_uy()
    lfs = ws.logf_s()
    lfys = ws.logf_ys()
    lfss = ws.logf_ss()
    x = np.asarray(y, dtype=float) - 2.0 * lfs
    rho = 1.0 - 2.0 * lfys
    x_s = -2.0 * lfss
    if not params.conjugate_pairing:
        fields = {"u": u, "rho": rho, "omega": uy, "x": x, "x_s": x_s}
        for name, arr in fields.items():
            scale = 1.0 + np.max(np.abs(arr))
            if np.max(np.abs(arr.imag)) > _IMAG_TOL * scale:
                raise ExactSolutionError(
                    f"non-real {name} from plain matrix law "
                    f"(max imag {np.max(np.abs(arr.imag)):.2e})")
        return CDSolitonRecord(u.real, rho.real, uy.real, x.real, x_s.real)
    return CDSolitonRecord(u, rho.real, uy, x.real, x_s.real)


# ---------------------------------------------------------------------------
# One-cuspon solution of the coupled modified wave system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CusponParams:
    a1: float
    b1: float
    p1: float
    xi10: float = 0.0

    def __post_init__(self):
        if self.a1 * self.b1 < 0:
            raise ExactSolutionError("a1*b1 must be >= 0 to keep f positive")
        if self.p1 == 0:
            raise ExactSolutionError("p1 must be nonzero")


@dataclass(frozen=True)
class CusponRecord:
    u: np.ndarray
    v: np.ndarray
    rho: np.ndarray
    omega_u: np.ndarray
    omega_v: np.ndarray
    x: np.ndarray
    x_s: np.ndarray


def mcsp_cuspon(params: CusponParams, y, s) -> CusponRecord:
    """Rational-exponential cuspon: f = 1 + c e^{2 xi}, u = a1 e^{xi}/f."""
    a1, b1, p1 = params.a1, params.b1, params.p1
    c = a1 * b1 * p1 * p1 / 4.0
    xi = p1 * np.asarray(y, float) + np.asarray(s, float) / p1 + params.xi10
    E2 = np.exp(2.0 * xi)
    f = 1.0 + c * E2
    E = np.exp(xi)
    u = a1 * E / f
    v = b1 * E / f
    omega_u = p1 * a1 * E * (1.0 - c * E2) / f**2
    omega_v = p1 * b1 * E * (1.0 - c * E2) / f**2
    rho = 1.0 - 4.0 * c * E2 / f**2
    x = np.asarray(y, float) - 2.0 * c * E2 / (p1 * f)
    x_s = -4.0 * c * E2 / (p1 * p1 * f**2)
    return CusponRecord(u, v, rho, omega_u, omega_v, x, x_s)


# ---------------------------------------------------------------------------
# Defocusing complex modified system (dark / cuspon wave on a background)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefocusParams:
    kappa: float
    gamma: float
    phi: float

    def __post_init__(self):
        if abs(np.cos(self.phi) - self.gamma) < 1e-14:
            raise ExactSolutionError("cos(phi) == gamma makes beta undefined")


@dataclass(frozen=True)
class DefocusRecord:
    u: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    x: np.ndarray
    x_s: np.ndarray
    # x_y = rho - rho_to_xy_offset: the printed hodograph map carries a
    # constant shear relative to the density for this family
    rho_to_xy_offset: float


def defocusing_mcd(params: DefocusParams, y, s) -> DefocusRecord:
    kap, gam, phi = params.kappa, params.gamma, params.phi
    om = -np.sin(phi)
    bet = -kap * np.sin(phi) / (np.cos(phi) - gam)
    y = np.asarray(y, float)
    s = np.asarray(s, float)
    xi = bet * y + om * s
    expxi = np.exp(xi)
    f = 1.0 + expxi
    q = expxi / f
    g_over_f = (1.0 + expxi * np.exp(-2j * phi)) / f
    theta = kap * y + gam * s
    u = 0.5 * g_over_f * np.exp(1j * theta)
    du_gf = bet * expxi * (np.exp(-2j * phi) - 1.0) / f**2
    omega = 0.5 * np.exp(1j * theta) * (1j * kap * g_over_f + du_gf)
    rho = 0.5 * (1.0 - kap * gam) - om * bet * q * (1.0 - q)
    x = -kap * gam * y + 0.25 * s - om * q
    x_s = 0.25 - om * om * q * (1.0 - q)
    return DefocusRecord(u, rho, omega, x, x_s, 0.5 * (1.0 + kap * gam))


# ---------------------------------------------------------------------------
# Sine-Gordon kink
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SGSolitonRecord:
    z: np.ndarray
    z_y: np.ndarray
    z_s: np.ndarray
    cos_z: np.ndarray
    x_minus_y: np.ndarray


def sg_one_soliton(y, s) -> SGSolitonRecord:
    """z = 4 arctan(e^{y+s}); the hodograph primitive of cos z is closed form."""
    w = np.asarray(y, float) + np.asarray(s, float)
    z = 4.0 * np.arctan(np.exp(w))
    sech = 1.0 / np.cosh(w)
    return SGSolitonRecord(z, 2.0 * sech, 2.0 * sech,
                           1.0 - 2.0 * sech**2, -2.0 * np.tanh(w))


# ---------------------------------------------------------------------------
# Periodic traveling wave (Jacobi cn)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticParams:
    kappa: float
    a: float
    x0: float = 0.0
    eta0: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ExactSolutionError("modulus must lie in (0, 1)")
        if self.a == 0:
            raise ExactSolutionError("scale a must be nonzero")


def period_of_cn(params: EllipticParams) -> float:
    """Spatial x-period T_p = (4/a) |2 E(kappa) - K(kappa)|."""
    K = elliptic_K(params.kappa)
    E = elliptic_E_complete(params.kappa)
    return 4.0 / params.a * abs(-K + 2.0 * E)


@dataclass(frozen=True)
class PeriodicWaveRecord:
    u: np.ndarray
    x: np.ndarray
    T_p: float


class PeriodicWave:
    """cn-wave in parametric form plus the x -> eta inversion used on x-grids."""

    def __init__(self, params: EllipticParams):
        self.params = params
        self.T_p = period_of_cn(params)
        self._K = elliptic_K(params.kappa)

    def eta(self, y, s):
        p = self.params
        return p.a * np.asarray(y, float) - np.asarray(s, float) / p.a + p.eta0

    def u_of_eta(self, eta):
        p = self.params
        return (2.0 * p.kappa / p.a) * elliptic_cn(eta, p.kappa)

    def x_of_eta(self, eta, s):
        p = self.params
        return (p.x0 + (1.0 - 2.0 * p.kappa**2) * s / p.a**2
                + (-eta + 2.0 * elliptic_E_incomplete(eta, p.kappa)) / p.a + p.d)

    def at(self, y, s) -> PeriodicWaveRecord:
        eta = self.eta(y, s)
        return PeriodicWaveRecord(self.u_of_eta(eta), self.x_of_eta(eta, s), self.T_p)

    def eta_of_x(self, x, s, tol=1e-13):
        """Invert the strictly increasing x(eta) by bisection (vectorized)."""
        x = np.asarray(x, dtype=float)
        # bracket: x moves by T_p*a/|a| per 4K of eta
        span = 4.0 * self._K
        steps = np.ceil(np.abs(x - self.x_of_eta(0.0, s)) / (self.T_p)) + 2
        lo = -span * steps
        hi = span * steps
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            too_low = self.x_of_eta(mid, s) < x
            lo = np.where(too_low, mid, lo)
            hi = np.where(too_low, hi, mid)
            if np.max(hi - lo) < tol:
                break
        return 0.5 * (lo + hi)

    def u_at_x(self, x, t):
        return self.u_of_eta(self.eta_of_x(x, t))


def sp_periodic_wave(params: EllipticParams, y, s) -> PeriodicWaveRecord:
    return PeriodicWave(params).at(y, s)
