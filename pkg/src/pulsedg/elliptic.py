"""Jacobi elliptic functions and elliptic integrals via AGM / Landen chains.

Covers exactly what the periodic-wave solution needs: cn, the complete
integrals K and E, and the incomplete second-kind integral in Jacobi form
E(u) = int_0^u dn^2(t) dt.  Modulus convention: kappa is the modulus k
(not the parameter m = k^2).  scipy.special is deliberately not used here;
the test suite cross-checks against it as an independent oracle.
"""

from __future__ import annotations

import numpy as np

_TOL = 1e-15
_MAX_ITER = 60


def _agm_chain(kappa: float):
    """Sequences (a_n, b_n, c_n) of the arithmetic-geometric-mean iteration."""
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"modulus must satisfy 0 <= kappa < 1, got {kappa}")
    a, b, c = 1.0, np.sqrt(1.0 - kappa * kappa), kappa
    chain = [(a, b, c)]
    while abs(c) > _TOL and len(chain) < _MAX_ITER:
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        chain.append((a, b, c))
    return chain


def elliptic_K(kappa: float) -> float:
    """Complete elliptic integral of the first kind, K(kappa)."""
    chain = _agm_chain(kappa)
    return np.pi / (2.0 * chain[-1][0])


def elliptic_E_complete(kappa: float) -> float:
    """Complete elliptic integral of the second kind, E(kappa)."""
    chain = _agm_chain(kappa)
    s = sum(2.0 ** (n - 1) * c * c for n, (_, _, c) in enumerate(chain))
    return elliptic_K(kappa) * (1.0 - s)


def _phi_chain(u, kappa: float):
    """Descending-Landen amplitude recursion; returns [phi_0, phi_1, ...]."""
    chain = _agm_chain(kappa)
    N = len(chain) - 1
    phis = [None] * (N + 1)
    phi = (2.0 ** N) * chain[N][0] * np.asarray(u, dtype=float)
    phis[N] = phi
    for n in range(N, 0, -1):
        a_n, _, c_n = chain[n]
        phi = 0.5 * (phi + np.arcsin(np.clip((c_n / a_n) * np.sin(phi), -1.0, 1.0)))
        phis[n - 1] = phi
    return phis, chain


def jacobi_am(u, kappa: float):
    """Amplitude function am(u, kappa)."""
    phis, _ = _phi_chain(u, kappa)
    return phis[0]


def elliptic_cn(u, kappa: float):
    """Jacobi cn(u, kappa); reduces to cos(u) at kappa = 0."""
    if kappa == 0.0:
        return np.cos(np.asarray(u, dtype=float))
    phis, _ = _phi_chain(u, kappa)
    return np.cos(phis[0])


def jacobi_sn_cn_dn(u, kappa: float):
    if kappa == 0.0:
        u = np.asarray(u, dtype=float)
        return np.sin(u), np.cos(u), np.ones_like(u)
    phis, _ = _phi_chain(u, kappa)
    sn, cn = np.sin(phis[0]), np.cos(phis[0])
    dn = cn / np.cos(phis[1] - phis[0]) if len(phis) > 1 else np.ones_like(cn)
    return sn, cn, dn


def jacobi_zeta(u, kappa: float):
    """Jacobi zeta Z(u) = E(u) - (E/K) u, summed along the Landen chain."""
    if kappa == 0.0:
        return np.zeros_like(np.asarray(u, dtype=float))
    phis, chain = _phi_chain(u, kappa)
    z = np.zeros_like(phis[0])
    for n in range(1, len(chain)):
        z = z + chain[n][2] * np.sin(phis[n])
    return z


def elliptic_E_incomplete(u, kappa: float):
    """Second-kind integral in Jacobi form: E(u) = int_0^u dn^2(t, kappa) dt."""
    if kappa == 0.0:
        return np.asarray(u, dtype=float)
    ratio = elliptic_E_complete(kappa) / elliptic_K(kappa)
    return ratio * np.asarray(u, dtype=float) + jacobi_zeta(u, kappa)
