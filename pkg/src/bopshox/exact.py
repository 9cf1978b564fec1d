"""Exact solution of the bilinearly coupled oscillators via normal modes.

In mass-weighted coordinates ``rho = sqrt(M) r`` the potential is
``rho^T B rho / 2``; rotating by ``R(theta)`` diagonalizes ``B`` and the
problem separates into two oscillators of frequencies ``omega1 > omega2``.
The Weber-function arguments of the exact eigenfunction are ``xi = G r``
with ``G = sqrt(2) F R M^(1/2)`` and ``F = diag(sqrt(omega1), sqrt(omega2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pcf
from .params import StateIndex, SystemParams


@dataclass(frozen=True)
class NormalModes:
    lambda1: float
    lambda2: float
    theta: float
    omega1: float
    omega2: float
    R: np.ndarray
    F: np.ndarray
    G: np.ndarray


def b_matrix(p: SystemParams) -> np.ndarray:
    """Mass-weighted potential matrix ``[[w^2, d w W], [d w W, W^2]]``."""
    off = p.delta * p.omega * p.Omega
    return np.array([[p.omega ** 2, off], [off, p.Omega ** 2]])


def eigenvalues(p: SystemParams) -> tuple[float, float]:
    """Squared normal-mode frequencies ``(lambda1, lambda2)``, largest first."""
    w2, W2 = p.omega ** 2, p.Omega ** 2
    disc = math.sqrt((w2 - W2) ** 2 + 4.0 * p.delta ** 2 * w2 * W2)
    lam1 = 0.5 * (w2 + W2 + disc)
    # product form avoids cancellation in the small root
    lam2 = w2 * W2 * (1.0 - p.delta ** 2) / lam1
    return lam1, lam2


def mixing_angle(p: SystemParams) -> float:
    lam1, _ = eigenvalues(p)
    # lam1 - Omega^2 >= omega^2 - Omega^2 > 0, so the quotient is always finite
    return math.atan(p.delta * p.omega * p.Omega / (lam1 - p.Omega ** 2))


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def g_matrix(p: SystemParams) -> np.ndarray:
    lam1, lam2 = eigenvalues(p)
    w1, w2 = math.sqrt(lam1), math.sqrt(lam2)
    th = mixing_angle(p)
    c, s = math.cos(th), math.sin(th)
    return np.array([
        [math.sqrt(2 * p.m * w1) * c, math.sqrt(2 * p.M * w1) * s],
        [-math.sqrt(2 * p.m * w2) * s, math.sqrt(2 * p.M * w2) * c],
    ])


def normal_modes(p: SystemParams) -> NormalModes:
    lam1, lam2 = eigenvalues(p)
    th = mixing_angle(p)
    w1, w2 = math.sqrt(lam1), math.sqrt(lam2)
    return NormalModes(
        lambda1=lam1,
        lambda2=lam2,
        theta=th,
        omega1=w1,
        omega2=w2,
        R=rotation(th),
        F=np.diag([math.sqrt(w1), math.sqrt(w2)]),
        G=g_matrix(p),
    )


def exact_energy(p: SystemParams, s: StateIndex) -> float:
    """``omega1 (n + 1/2) + omega2 (l + 1/2)``."""
    lam1, lam2 = eigenvalues(p)
    return math.sqrt(lam1) * (s.n + 0.5) + math.sqrt(lam2) * (s.l + 0.5)


def volume_factor(p: SystemParams) -> float:
    """``|det G| = 2 (1 - d^2)^(1/4) sqrt(m M omega Omega)``."""
    return 2.0 * (1.0 - p.delta ** 2) ** 0.25 * math.sqrt(p.m * p.M * p.omega * p.Omega)


def exact_wavefunction(p: SystemParams, s: StateIndex, x, y):
    """Exact eigenfunction, normalized over the physical plane (x, y).

    The prefactor carries ``(m M)^(1/4)`` so that the integral of ``Psi**2``
    over ``dx dy`` is one for any masses.
    """
    G = g_matrix(p)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xi1 = G[0, 0] * x + G[0, 1] * y
    xi2 = G[1, 0] * x + G[1, 1] * y
    norm = (p.m * p.M * p.omega * p.Omega * math.sqrt(1.0 - p.delta ** 2)) ** 0.25
    norm /= math.sqrt(math.pi * math.factorial(s.n) * math.factorial(s.l))
    value = norm * pcf.d_n(s.n, xi1) * pcf.d_n(s.l, xi2)
    return float(value) if np.ndim(value) == 0 else value
