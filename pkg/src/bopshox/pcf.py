"""Integer-order parabolic cylinder (Weber) functions and Gauss-Hermite rules.

For integer order the Weber function reduces to

    D_n(z) = exp(-z**2/4) He_n(z) = 2**(-n/2) exp(-z**2/4) H_n(z/sqrt(2)),

and the three-term recurrence ``D_{n+1} = z D_n - n D_{n-1}`` started from
``D_0 = exp(-z**2/4)`` is stable in the forward direction. Inner products are
taken over the physical coordinate x with ``z = (dz/dx) x + (dz/dy) y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceFailure, OrderTooLarge

MAX_ORDER = 200
SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_order(n, cap=MAX_ORDER):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    if n > cap:
        raise OrderTooLarge(f"order {n} exceeds the cap {cap}")


def hermite_e_all(nmax, z):
    """Probabilists' Hermite polynomials He_0..He_nmax at `z`.

    Returns an array of shape ``(nmax + 1,) + shape(z)``. Complex `z` is
    accepted (used for complex-step derivatives).
    """
    z = np.asarray(z)
    out = np.empty((nmax + 1,) + z.shape, dtype=np.result_type(z, float))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = z
    for k in range(1, nmax):
        out[k + 1] = z * out[k] - k * out[k - 1]
    return out


def hermite_e(n, z):
    _check_order(n)
    return hermite_e_all(n, z)[n]


def d_all(nmax, z):
    """D_0..D_nmax at `z`, shape ``(nmax + 1,) + shape(z)``."""
    _check_order(nmax)
    z = np.asarray(z)
    out = np.empty((nmax + 1,) + z.shape, dtype=np.result_type(z, float))
    out[0] = np.exp(-0.25 * z * z)
    if nmax >= 1:
        out[1] = z * out[0]
    for k in range(1, nmax):
        out[k + 1] = z * out[k] - k * out[k - 1]
    return out


def d_n(n, z):
    """Parabolic cylinder function D_n(z) for integer ``0 <= n <= MAX_ORDER``.

    Scalars in give a float back; arrays are evaluated elementwise.
    """
    _check_order(n)
    value = d_all(n, z)[n]
    return value.item() if np.ndim(value) == 0 else value


def d_n_prime(n, z):
    """dD_n/dz from ``D'_n = (z/2) D_n - D_{n+1}``."""
    _check_order(n, MAX_ORDER - 1)
    d = d_all(n + 1, z)
    value = 0.5 * np.asarray(z) * d[n] - d[n + 1]
    return value.item() if np.ndim(value) == 0 else value


def _complex_step_derivative(n, z, h=1e-30):
    # Exact to rounding for analytic functions; shares no algebra with the
    # derivative recurrences, so it can check them.
    return (d_all(n, complex(z, h))[n]).imag / h


def recurrence_residuals(n, z):
    """Residuals of the three D_nu identities at integer order ``n >= 1``.

    Returns ``(r1, r2, r3)`` for

        D_{n+1} - z D_n + n D_{n-1}
        D'_n + (z/2) D_n - n D_{n-1}
        D'_n - (z/2) D_n + D_{n+1}

    with D'_n taken by complex step, independent of the recurrences.
    """
    if n < 1:
        raise ValueError("recurrence residuals need n >= 1")
    _check_order(n, MAX_ORDER - 1)
    z = float(z)
    d = d_all(n + 1, z)
    dp = _complex_step_derivative(n, z)
    r1 = d[n + 1] - z * d[n] + n * d[n - 1]
    r2 = dp + 0.5 * z * d[n] - n * d[n - 1]
    r3 = dp - 0.5 * z * d[n] + d[n + 1]
    return float(r1), float(r2), float(r3)


def inner_product_dd(l, n, dz_dx):
    """Closed form of ``integral D_l(z) D_n(z) dx`` for ``z`` linear in x."""
    if dz_dx <= 0:
        raise ValueError("dz_dx must be positive")
    if l != n:
        return 0.0
    return SQRT_2PI / dz_dx * math.factorial(n)


def _times_z(coeffs):
    # z D_j = D_{j+1} + j D_{j-1}
    out = {}
    for j, c in coeffs.items():
        out[j + 1] = out.get(j + 1, 0.0) + c
        if j > 0:
            out[j - 1] = out.get(j - 1, 0.0) + j * c
    return out


def z_moment(l, n, k):
    """``integral z**k D_l(z) D_n(z) dz`` over the real line, exactly."""
    coeffs = {n: 1.0}
    for _ in range(k):
        coeffs = _times_z(coeffs)
    return coeffs.get(l, 0.0) * SQRT_2PI * math.factorial(l)


def _x_moment(l, n, y, geom, power):
    # x = (z - s)/a with a = dz/dx, s = (dz/dy) y; dx = dz/a.
    a = geom.dz_dx
    s = geom.dz_dy * y
    total = 0.0
    for j in range(power + 1):
        total += math.comb(power, j) * (-s) ** (power - j) * z_moment(l, n, j)
    return total / a ** (power + 1)


def matrix_element_x(l, n, y, geom):
    """``<D_l(z)| x D_n(z)>`` integrated over x at fixed y.

    The diagonal term is ``(dx/dy) y sqrt(2 pi) n! / (dz/dx)``; the
    ``l = n +- 1`` bands come from the ``z D_l D_n`` integral and are kept.
    """
    return _x_moment(l, n, y, geom, 1)


def matrix_element_x2(l, n, y, geom):
    """``<D_l(z)| x**2 D_n(z)>`` integrated over x at fixed y.

    Nonzero for ``|l - n|`` in {0, 1, 2}; the ``|l - n| = 1`` band is the
    cross term proportional to y and vanishes at y = 0.
    """
    return _x_moment(l, n, y, geom, 2)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for weight ``exp(-t**2)`` on the real line."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def K(self):
        return len(self.nodes)

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def scaled(self):
        """Nodes/weights for ``integral f(x) exp(-x**2/2) dx`` (x = sqrt(2) t)."""
        return math.sqrt(2.0) * self.nodes, math.sqrt(2.0) * self.weights


def _hermite_functions(K, x):
    # Orthonormal Hermite functions h_0..h_K (include exp(-x^2/2)), stable.
    h = np.empty((K + 1,) + np.shape(x))
    h[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if K >= 1:
        h[1] = math.sqrt(2.0) * x * h[0]
    for j in range(1, K):
        h[j + 1] = math.sqrt(2.0 / (j + 1)) * x * h[j] - math.sqrt(j / (j + 1)) * h[j - 1]
    return h


@lru_cache(maxsize=32)
def _gauss_hermite(K):
    off = np.sqrt(np.arange(1, K) / 2.0)
    x = eigh_tridiagonal(np.zeros(K), off, eigvals_only=True)
    # Newton polish on h_K; h_K / h_K' = h_K / (sqrt(2K) h_{K-1}) near a root.
    for _ in range(20):
        h = _hermite_functions(K, x)
        step = h[K] / (math.sqrt(2.0 * K) * h[K - 1])
        x = x - step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(x))):
            break
    else:
        raise ConvergenceFailure(f"Gauss-Hermite Newton refinement did not converge for K={K}")
    x = 0.5 * (x - x[::-1])
    h = _hermite_functions(K - 1, x)
    w = np.exp(-x * x) / np.sum(h * h, axis=0)
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


def gauss_hermite(K=80):
    """Gauss-Hermite nodes and weights for ``2 <= K <= 256``.

    Golub-Welsch eigenvalues of the Jacobi matrix, refined by Newton steps;
    weights from the Christoffel function. Rules are cached and read-only.
    """
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or not 2 <= K <= 256:
        raise ValueError(f"node count must be an integer in [2, 256], got {K!r}")
    return _gauss_hermite(int(K))


def integrate_over_x(f, dz_dx, K=80):
    """``integral f(z) dx`` with ``z`` linear in x, for f decaying like exp(-z^2/2).

    Substitutes z, then applies Gauss-Hermite with weight exp(-z^2/2).
    """
    z, w = gauss_hermite(K).scaled()
    return float(np.dot(w, f(z) * np.exp(0.5 * z * z))) / dz_dx
