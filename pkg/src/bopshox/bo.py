"""Born-Oppenheimer channel of the coupled oscillators.

For fixed slow coordinate y the fast Hamiltonian is a shifted oscillator with
eigenfunctions ``chi_n = (m omega / pi)^(1/4) D_n(z) / sqrt(n!)`` where

    z(x, y) = sqrt(2 m omega) x + sqrt(2 M Omega^2 / omega) delta y,

and potential curves ``eps_n(y) = omega (n + 1/2) + (1 - delta^2) M Omega^2 y^2 / 2``.
Because z is linear in y, derivatives of chi_n in y are ladder operations
on D_n, giving y-independent non-adiabatic couplings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pcf
from .params import StateIndex, SystemParams


@dataclass(frozen=True)
class ZGeometry:
    """Partial derivatives of the fast Weber argument ``z(x, y)``."""

    dz_dx: float
    dz_dy: float
    dx_dy: float


def z_geometry(p: SystemParams) -> ZGeometry:
    dz_dx = math.sqrt(2.0 * p.m * p.omega)
    dz_dy = math.sqrt(2.0 * p.M * p.Omega ** 2 / p.omega) * p.delta
    dx_dy = -math.sqrt(p.m / p.M) * p.Omega * p.delta / p.omega
    return ZGeometry(dz_dx, dz_dy, dx_dy)


def z_of(p: SystemParams, x, y):
    g = z_geometry(p)
    return g.dz_dx * np.asarray(x, dtype=float) + g.dz_dy * np.asarray(y, dtype=float)


def omega1_tilde(p: SystemParams) -> float:
    return p.omega * (1.0 + p.delta ** 2 * p.Omega ** 2 / (2.0 * p.omega ** 2))


def omega2_tilde(p: SystemParams) -> float:
    return p.Omega * math.sqrt(1.0 - p.delta ** 2)


@dataclass(frozen=True)
class BoChannel:
    n: int
    beta_nn: float
    omega1_tilde: float
    omega2_tilde: float
    G_tilde: np.ndarray
    R_tilde: np.ndarray


def bo_channel(p: SystemParams, n: int) -> BoChannel:
    return BoChannel(
        n=n,
        beta_nn=beta_diag(n, p),
        omega1_tilde=omega1_tilde(p),
        omega2_tilde=omega2_tilde(p),
        G_tilde=g_tilde(p),
        R_tilde=r_tilde(p),
    )


def chi_n(n: int, x, y, p: SystemParams):
    """Normalized fast eigenfunction; unit norm over x at every y."""
    z = z_of(p, x, y)
    value = (p.m * p.omega / math.pi) ** 0.25 / math.sqrt(math.factorial(n)) * pcf.d_n(n, z)
    return float(value) if np.ndim(value) == 0 else value


def epsilon_n(n: int, y, p: SystemParams):
    """Potential energy curve of channel n."""
    return p.omega * (n + 0.5) + 0.5 * (1.0 - p.delta ** 2) * p.M * p.Omega ** 2 * np.square(y)


def beta_diag(n: int, p: SystemParams) -> float:
    """Diagonal second-order coupling ``<chi_n|d^2/dy^2 chi_n>``, constant in y."""
    return -(p.M * p.Omega ** 2 * p.delta ** 2 / p.omega) * (n + 0.5)


def alpha_offdiag(l: int, n: int, p: SystemParams) -> float:
    """First-order coupling ``<chi_l| d/dy chi_n>``.

    Only ``l = n - 1`` (``+ sqrt(n) dz_dy / 2``) and ``l = n + 1``
    (``- sqrt(n + 1) dz_dy / 2``) survive; the diagonal (Berry connection)
    vanishes for real normalized chi.
    """
    half = 0.5 * z_geometry(p).dz_dy
    if l == n - 1:
        return half * math.sqrt(n)
    if l == n + 1:
        return -half * math.sqrt(n + 1)
    return 0.0


def beta_offdiag(l: int, n: int, p: SystemParams) -> float:
    """Second-order coupling ``<chi_l| d^2/dy^2 chi_n>`` for any (l, n).

    From ``d^2 chi_n/dy^2 = (dz_dy)^2 (z^2/4 - n - 1/2) chi_n`` and
    ``z chi_n = sqrt(n+1) chi_{n+1} + sqrt(n) chi_{n-1}`` for normalized chi.
    The ``l = n -+ 2`` bands are ``(dz_dy/2)^2 sqrt(n(n-1))`` and
    ``(dz_dy/2)^2 sqrt((n+1)(n+2))``.
    """
    q = (0.5 * z_geometry(p).dz_dy) ** 2
    if l == n:
        return -q * (2 * n + 1)
    if l == n - 2:
        return q * math.sqrt(n * (n - 1))
    if l == n + 2:
        return q * math.sqrt((n + 1) * (n + 2))
    return 0.0


def offdiagonal_residuals(n: int, phi: float, vartheta: float, p: SystemParams) -> dict:
    """Residuals ``-beta_{nl} phi - 2 alpha_{nl} vartheta`` for l = n-2..n+2, l != n.

    Diagnostic only: the solver integrates the diagonal projection and does
    not force these to vanish.
    """
    out = {}
    for l in (n - 2, n - 1, n + 1, n + 2):
        if l < 0:
            continue
        out[l] = -beta_offdiag(l, n, p) * phi - 2.0 * alpha_offdiag(l, n, p) * vartheta
    return out


def bo_energy(p: SystemParams, s: StateIndex) -> float:
    return omega1_tilde(p) * (s.n + 0.5) + omega2_tilde(p) * (s.l + 0.5)


def y_tilde(y, p: SystemParams):
    return np.asarray(y, dtype=float) * math.sqrt(2.0 * p.M * p.Omega) * (1.0 - p.delta ** 2) ** 0.25


def varphi_nl(l: int, yt, p: SystemParams):
    """Normalized slow wavefunction as a function of the scaled coordinate ``y_tilde``.

    Normalization is over the physical y, ``integral varphi^2 dy = 1``.
    """
    norm = (4.0 * p.M ** 2 * p.Omega ** 2 * (1.0 - p.delta ** 2)) ** 0.125
    norm /= math.sqrt(math.factorial(l)) * (2.0 * math.pi) ** 0.25
    value = norm * pcf.d_n(l, yt)
    return float(value) if np.ndim(value) == 0 else value


def g_tilde(p: SystemParams) -> np.ndarray:
    return np.array([
        [math.sqrt(2.0 * p.m * p.omega), math.sqrt(2.0 * p.M * p.Omega ** 2 / p.omega) * p.delta],
        [0.0, math.sqrt(2.0 * p.M * p.Omega) * (1.0 - p.delta ** 2) ** 0.25],
    ])


def r_tilde(p: SystemParams) -> np.ndarray:
    """``F~^-1 G~ M^-1/2 / sqrt(2)``; upper triangular and not orthogonal."""
    Ft_inv = np.diag([omega1_tilde(p) ** -0.5, omega2_tilde(p) ** -0.5])
    M_inv_sqrt = np.diag([p.m ** -0.5, p.M ** -0.5])
    return Ft_inv @ g_tilde(p) @ M_inv_sqrt / math.sqrt(2.0)


def bo_wavefunction(p: SystemParams, s: StateIndex, x, y):
    """BO product ``chi_n varphi_nl`` evaluated through ``xi~ = G~ r``."""
    Gt = g_tilde(p)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = Gt[0, 0] * x + Gt[0, 1] * y
    yt = Gt[1, 1] * y
    norm = (p.m * p.M * p.omega * p.Omega * math.sqrt(1.0 - p.delta ** 2)) ** 0.25
    norm /= math.sqrt(math.pi * math.factorial(s.n) * math.factorial(s.l))
    value = norm * pcf.d_n(s.n, z) * pcf.d_n(s.l, yt)
    return float(value) if np.ndim(value) == 0 else value
