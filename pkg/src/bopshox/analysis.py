"""Error analysis of the BO solution against the exact one.

Energies are compared through the reduced frequencies
``omega_bar_{1,2} = omega_{1,2} / omega`` and ``Omega_bar = Omega / omega``:
the BO overshoot of each normal frequency, ``eps_omega`` and ``eps_Omega``,
fixes the sign pattern of the relative error over the (n, l) lattice.
Wavefunctions are compared by their overlap, and the Weber-argument
matrices by a QU (QR) factorization of the exact ``G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bo, exact, pcf
from .errors import DegenerateLine, QuadratureNotConverged
from .params import StateIndex, SystemParams

SIGMA3 = np.diag([1.0, -1.0])


def _lambda1_excess(d2, u):
    # lambda1 - 1 = 2 d^2 u / (disc + 1 - u), free of cancellation
    disc = np.sqrt((1.0 - u) ** 2 + 4.0 * d2 * u)
    return 2.0 * d2 * u / (disc + 1.0 - u), disc


def reduced_frequencies(delta, Omega_bar):
    """``(omega_bar1, omega_bar2)``; vectorized over numpy inputs."""
    d2 = np.square(np.asarray(delta, dtype=float))
    u = np.square(np.asarray(Omega_bar, dtype=float))
    excess, _ = _lambda1_excess(d2, u)
    lam1 = 1.0 + excess
    lam2 = u * (1.0 - d2) / lam1
    return np.sqrt(lam1), np.sqrt(lam2)


def eps_omega(delta, Omega_bar):
    """``(omega1_tilde - omega1) / omega``.

    Written as ``((1 + a)^2 - lambda1) / (1 + a + omega_bar1)`` with
    ``a = d^2 u / 2`` and the numerator expanded so that no two O(1)
    terms cancel; the sign is reliable down to tiny couplings.
    """
    d2 = np.square(np.asarray(delta, dtype=float))
    u = np.square(np.asarray(Omega_bar, dtype=float))
    excess, disc = _lambda1_excess(d2, u)
    a = 0.5 * d2 * u
    num = a * a - 4.0 * d2 * u * u * (1.0 - d2) / ((disc + 1.0 + u) * (disc + 1.0 - u))
    return num / (1.0 + a + np.sqrt(1.0 + excess))


def eps_Omega(delta, Omega_bar):
    """``(omega2_tilde - omega2) / omega``; positive for ``0 < |delta| < 1``."""
    d2 = np.square(np.asarray(delta, dtype=float))
    u = np.square(np.asarray(Omega_bar, dtype=float))
    excess, _ = _lambda1_excess(d2, u)
    w1 = np.sqrt(1.0 + excess)
    # Omega_bar sqrt(1 - d^2) (1 - 1/w1), with w1 - 1 = excess / (w1 + 1)
    return np.sqrt(u * (1.0 - d2)) * excess / ((w1 + 1.0) * w1)


@dataclass(frozen=True)
class ErrorBreakdown:
    eps_bo: float
    eps_bo_reduced: float
    eps_omega: float
    eps_Omega: float
    omega_bar1: float
    omega_bar2: float
    region_B: float


def relative_error(delta, Omega_bar, n, l):
    """Reduced-form BO relative error; n and l may be real-valued arrays."""
    w1, w2 = reduced_frequencies(delta, Omega_bar)
    e1, e2 = eps_omega(delta, Omega_bar), eps_Omega(delta, Omega_bar)
    n = np.asarray(n, dtype=float) + 0.5
    l = np.asarray(l, dtype=float) + 0.5
    return (e1 * n + e2 * l) / (w1 * n + w2 * l)


def error_breakdown(p: SystemParams, s: StateIndex) -> ErrorBreakdown:
    E = exact.exact_energy(p, s)
    Et = bo.bo_energy(p, s)
    w1, w2 = reduced_frequencies(p.delta, p.Omega_bar)
    return ErrorBreakdown(
        eps_bo=(Et - E) / E,
        eps_bo_reduced=float(relative_error(p.delta, p.Omega_bar, s.n, s.l)),
        eps_omega=float(eps_omega(p.delta, p.Omega_bar)),
        eps_Omega=float(eps_Omega(p.delta, p.Omega_bar)),
        omega_bar1=float(w1),
        omega_bar2=float(w2),
        region_B=float(region_B(p.delta, p.Omega_bar)),
    )


def region_B(delta, Omega_bar):
    """Polynomial whose sign equals the sign of ``eps_omega`` for ``0 < Omega_bar < 1``.

    ``4(5 d^2 - 4) + 4 d^2 (2 d^2 - 1) W^2 + d^6 W^4`` with d = delta and
    W = Omega_bar. It follows from squaring ``(1 + d^2 W^2/2)^2 > omega_bar1^2``
    and dividing out the positive factor ``d^2 W^2 / 4``.
    """
    d2 = np.square(delta)
    u = np.square(Omega_bar)
    return 4.0 * (5.0 * d2 - 4.0) + 4.0 * d2 * (2.0 * d2 - 1.0) * u + d2 ** 3 * u ** 2


def region_B_printed(delta, Omega_bar):
    """Region polynomial with the middle term missing its ``d^2`` factor.

    Kept for comparison only; its sign disagrees with ``eps_omega`` in a
    thin band near ``Omega_bar -> 1``.
    """
    d2 = np.square(delta)
    u = np.square(Omega_bar)
    return 4.0 * (5.0 * d2 - 4.0) + 4.0 * (2.0 * d2 - 1.0) * u + d2 ** 3 * u ** 2


def zero_error_line(p: SystemParams) -> tuple[float, float]:
    """Slope and l-intercept of the zero relative-error line in the (n, l) plane."""
    if p.delta == 0.0:
        raise DegenerateLine("every state is exact when delta = 0; no zero-error line")
    ratio = float(eps_omega(p.delta, p.Omega_bar) / eps_Omega(p.delta, p.Omega_bar))
    return -ratio, -0.5 * (1.0 + ratio)


def delta_star(Omega_bar: float) -> float:
    """Coupling that minimizes the exact ``G_21`` entry at fixed ``Omega_bar``."""
    u = Omega_bar ** 2
    inner = (1.0 - u) * (3.0 + 5.0 * u - math.sqrt(9.0 - 2.0 * u - 7.0 * u * u))
    return math.sqrt(inner) / (2.0 * math.sqrt(2.0) * Omega_bar)


@dataclass(frozen=True)
class OverlapResult:
    sigma: float
    error_estimate: float
    K: int


def _overlap_at(p, s, K):
    # Integrate in exact Weber coordinates xi = G r, weight exp(-|xi|^2 / 2);
    # the BO arguments are xi_tilde = G~ G^-1 xi. det(G) = det(G~).
    G = exact.g_matrix(p)
    T = bo.g_tilde(p) @ np.linalg.inv(G)
    nodes, weights = pcf.gauss_hermite(K).scaled()
    a, b = np.meshgrid(nodes, nodes, indexing="ij")
    w = np.outer(weights, weights)
    ta = T[0, 0] * a + T[0, 1] * b
    tb = T[1, 0] * a + T[1, 1] * b
    he = pcf.hermite_e
    poly = he(s.n, a) * he(s.l, b) * he(s.n, ta) * he(s.l, tb)
    gauss = np.exp(0.25 * (a * a + b * b - ta * ta - tb * tb))
    total = np.sum(w * poly * gauss)
    return float(total / (2.0 * math.pi * math.factorial(s.n) * math.factorial(s.l)))


def overlap_sigma(p: SystemParams, s: StateIndex, K: int = 80, check: bool = True,
                  atol: float = 1e-6) -> OverlapResult:
    """Overlap of the exact and BO eigenfunctions with a convergence estimate.

    The estimate is ``|sigma_K - sigma_{K/2}|``. With `check`, an estimate
    above `atol` raises `QuadratureNotConverged`.
    """
    if K < 40:
        raise ValueError("overlap quadrature needs K >= 40")
    sigma = _overlap_at(p, s, K)
    err = abs(sigma - _overlap_at(p, s, K // 2))
    if check and err > atol:
        raise QuadratureNotConverged(
            f"sigma({s.n},{s.l}) at delta={p.delta}: |sigma_K - sigma_K/2| = {err:.3g} > {atol:g}")
    return OverlapResult(sigma, err, K)


@dataclass(frozen=True)
class QuFactors:
    Q: np.ndarray
    U: np.ndarray
    U_tilde: np.ndarray
    deviation: float


def qu_factor(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder ``G = Q U`` of a nonsingular 2x2 matrix.

    Q is the single reflector sending the first column of G onto
    ``-sign(G11) |g1| e1``, so ``Q = Q^T = Q^-1`` and ``det Q = -1``. For
    ``G11 > 0`` and ``det G > 0`` this gives ``U11 < 0 < U22``, and
    ``-sigma3 U`` has a positive diagonal.
    """
    G = np.asarray(G, dtype=float)
    g1 = G[:, 0]
    norm = math.hypot(g1[0], g1[1])
    v = g1.copy()
    v[0] += math.copysign(norm, g1[0])
    Q = np.eye(2) - 2.0 * np.outer(v, v) / (v @ v)
    U = Q @ G
    U[1, 0] = 0.0
    return Q, U


def qu_decompose(p: SystemParams) -> QuFactors:
    """QU factors of the exact G, ``U_tilde = -sigma3 U``, and max |G~ - U_tilde|."""
    Q, U = qu_factor(exact.g_matrix(p))
    Ut = -SIGMA3 @ U
    dev = float(np.max(np.abs(bo.g_tilde(p) - Ut)))
    return QuFactors(Q, U, Ut, dev)
