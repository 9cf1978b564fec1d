import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bopshox import bo, pcf
from bopshox.params import StateIndex, SystemParams


def _fd_overlap(l, n, p, y, order, h):
    """<chi_l | d^k/dy^k chi_n> by central differences in y and quadrature in x."""
    g = bo.z_geometry(p)
    z, w = pcf.gauss_hermite(100).scaled()
    x = (z - g.dz_dy * y) / g.dz_dx
    chi = lambda yy: bo.chi_n(n, x, yy, p)
    if order == 1:
        d = (chi(y + h) - chi(y - h)) / (2 * h)
    else:
        d = (chi(y + h) - 2 * chi(y) + chi(y - h)) / h ** 2
    f = bo.chi_n(l, x, y, p) * d
    return float(np.dot(w, f * np.exp(0.5 * z * z))) / g.dz_dx


def _richardson(l, n, p, y, order, h=1e-2):
    a = _fd_overlap(l, n, p, y, order, h)
    b = _fd_overlap(l, n, p, y, order, h / 2)
    return (4 * b - a) / 3


@pytest.fixture(params=[(0.6, 0.2), (0.9, 0.5)])
def pp(request):
    return SystemParams.from_reduced(*request.param, M=1.7)


def test_chi_normalized(pp):
    g = bo.z_geometry(pp)
    for n in range(6):
        for y in (-1.0, 0.0, 2.0):
            val = pcf.integrate_over_x(lambda z: bo.chi_n(n, (z - g.dz_dy * y) / g.dz_dx, y, pp) ** 2, g.dz_dx)
            assert val == pytest.approx(1.0, abs=1e-12)


def test_chi_solves_fast_hamiltonian(pp):
    h = 1e-3
    x = np.linspace(-2, 2, 9)
    for n in range(4):
        for y in (-0.8, 0.5):
            chi = lambda xx: bo.chi_n(n, xx, y, pp)
            lap = (chi(x + h) - 2 * chi(x) + chi(x - h)) / h ** 2
            V = 0.5 * pp.m * pp.omega ** 2 * x ** 2 + 0.5 * pp.M * pp.Omega ** 2 * y ** 2 + pp.c * x * y
            res = -lap / (2 * pp.m) + V * chi(x) - bo.epsilon_n(n, y, pp) * chi(x)
            assert np.max(np.abs(res)) < 1e-5


@pytest.mark.parametrize("n", range(5))
def test_alpha_against_finite_differences(pp, n):
    for l in range(7):
        ref = _richardson(l, n, pp, 0.4, 1)
        assert bo.alpha_offdiag(l, n, pp) == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("n", range(5))
def test_beta_against_finite_differences(pp, n):
    for l in range(8):
        ref = _richardson(l, n, pp, -0.3, 2, h=2e-2)
        assert bo.beta_offdiag(l, n, pp) == pytest.approx(ref, abs=1e-6)


def test_beta_diag_matches_band_formula(pp):
    q = (0.5 * bo.z_geometry(pp).dz_dy) ** 2
    for n in range(6):
        assert bo.beta_offdiag(n, n, pp) == pytest.approx(-q * (2 * n + 1), rel=1e-14)
        assert bo.beta_diag(n, pp) == pytest.approx(-q * (2 * n + 1), rel=1e-14)


def test_frequencies(p06):
    assert bo.omega1_tilde(p06) == pytest.approx(1.0072)
    assert bo.omega2_tilde(p06) == pytest.approx(0.16)
    assert bo.bo_energy(p06, StateIndex(0, 0)) == pytest.approx(0.5836)


def test_bo_wavefunction_is_product(pp):
    x, y = np.meshgrid(np.linspace(-2, 2, 5), np.linspace(-3, 3, 5))
    for s in (StateIndex(0, 0), StateIndex(2, 1), StateIndex(1, 3)):
        prod = bo.chi_n(s.n, x, y, pp) * bo.varphi_nl(s.l, bo.y_tilde(y, pp), pp)
        np.testing.assert_allclose(bo.bo_wavefunction(pp, s, x, y), prod, rtol=1e-12, atol=1e-15)


def test_varphi_normalized(pp):
    y = np.linspace(-40, 40, 20001)
    for l in range(5):
        f = bo.varphi_nl(l, bo.y_tilde(y, pp), pp)
        assert np.trapezoid(f * f, y) == pytest.approx(1.0, abs=1e-10)


def test_varphi_solves_slow_equation(pp):
    # -1/(2M) phi'' + (eps_n - beta_nn/(2M)) phi = E~ phi
    h = 1e-3
    y = np.linspace(-3, 3, 11)
    for n, l in ((0, 0), (2, 3)):
        f = lambda yy: bo.varphi_nl(l, bo.y_tilde(yy, pp), pp)
        lap = (f(y + h) - 2 * f(y) + f(y - h)) / h ** 2
        V = bo.epsilon_n(n, y, pp) - bo.beta_diag(n, pp) / (2 * pp.M)
        res = -lap / (2 * pp.M) + (V - bo.bo_energy(pp, StateIndex(n, l))) * f(y)
        assert np.max(np.abs(res)) < 1e-5


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(0.01, 0.99))
def test_r_tilde_upper_triangular(delta, W):
    p = SystemParams.from_reduced(delta, W)
    Rt = bo.r_tilde(p)
    assert Rt[1, 0] == 0.0
    Gt = bo.g_tilde(p)
    assert np.linalg.det(Gt) > 0


def test_offdiagonal_residuals_vanish_without_coupling():
    p = SystemParams.from_reduced(0.0, 0.3)
    res = bo.offdiagonal_residuals(3, 0.7, -0.2, p)
    assert set(res) == {1, 2, 4, 5}
    assert all(v == 0.0 for v in res.values())


def test_channel_bundle(p06):
    ch = bo.bo_channel(p06, 2)
    assert ch.beta_nn == bo.beta_diag(2, p06)
    np.testing.assert_array_equal(ch.G_tilde, bo.g_tilde(p06))
    assert math.isclose(ch.omega2_tilde, 0.16)
