import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bopshox import pcf
from bopshox.bo import z_geometry
from bopshox.errors import OrderTooLarge
from bopshox.params import SystemParams


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 20])
@pytest.mark.parametrize("z", [-6.0, -1.3, 0.0, 0.7, 3.0, 8.0])
def test_d_n_against_mpmath(n, z):
    ref = float(mpmath.pcfd(n, z))
    assert pcf.d_n(n, z) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_low_orders_closed_form():
    z = np.linspace(-4, 4, 33)
    g = np.exp(-z * z / 4)
    np.testing.assert_allclose(pcf.d_n(0, z), g, rtol=1e-15)
    np.testing.assert_allclose(pcf.d_n(1, z), z * g, rtol=1e-15)
    np.testing.assert_allclose(pcf.d_n(2, z), (z * z - 1) * g, rtol=1e-14, atol=1e-16)


def test_weber_equation():
    # D'' + (n + 1/2 - z^2/4) D = 0, second derivative by central differences
    z = np.linspace(-3, 3, 13)
    h = 1e-4
    for n in range(6):
        d2 = (pcf.d_n(n, z + h) - 2 * pcf.d_n(n, z) + pcf.d_n(n, z - h)) / h ** 2
        res = d2 + (n + 0.5 - z * z / 4) * pcf.d_n(n, z)
        assert np.max(np.abs(res)) < 1e-5 * math.factorial(n) ** 0.5 * 10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.floats(-10, 10))
def test_recurrence_identities(n, z):
    scale = max(abs(x) for x in pcf.d_all(n + 1, z)) + 1e-300
    for r in pcf.recurrence_residuals(n, z):
        assert abs(r) <= 1e-10 * scale * (1 + abs(z)) * (n + 1)


def test_derivative_matches_complex_step():
    for n in range(8):
        for z in (-2.0, 0.3, 1.7):
            assert pcf.d_n_prime(n, z) == pytest.approx(pcf._complex_step_derivative(n, z), rel=1e-12, abs=1e-14)


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        pcf.d_n(pcf.MAX_ORDER + 1, 0.0)
    with pytest.raises((OrderTooLarge, ValueError)):
        pcf.d_n(-1, 0.0)


@pytest.mark.parametrize("K", [2, 5, 20, 80, 150])
def test_gauss_hermite_against_numpy(K):
    x, w = np.polynomial.hermite.hermgauss(K)
    rule = pcf.gauss_hermite(K)
    np.testing.assert_allclose(rule.nodes, x, atol=1e-12 * max(1, np.max(np.abs(x))))
    np.testing.assert_allclose(rule.weights, w, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("K", [10, 40, 80])
def test_gauss_hermite_moments(K):
    rule = pcf.gauss_hermite(K)
    for k in range(0, 2 * K, 4):
        exact = math.gamma((k + 1) / 2)
        assert rule.integrate(rule.nodes ** k) == pytest.approx(exact, rel=1e-10)
    assert rule.integrate(rule.nodes ** 3) == pytest.approx(0.0, abs=1e-12)


def test_gauss_hermite_rules_are_read_only():
    rule = pcf.gauss_hermite(12)
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0
    for bad in (1, 257, 3.0, True):
        with pytest.raises(ValueError):
            pcf.gauss_hermite(bad)


@pytest.mark.parametrize("l,n", [(0, 0), (3, 3), (2, 5), (7, 7)])
def test_inner_product_orthogonality(l, n):
    a = 1.7
    num = pcf.integrate_over_x(lambda z: pcf.d_n(l, z) * pcf.d_n(n, z), a)
    assert num == pytest.approx(pcf.inner_product_dd(l, n, a), abs=1e-12 * math.factorial(max(l, n)))


def _quad_x_moment(l, n, y, geom, k):
    # Independent oracle: trapezoid rule over x on a fine grid.
    a, s = geom.dz_dx, geom.dz_dy * y
    x = np.linspace(-(s + 25) / a, (25 - s) / a, 40001)
    z = a * x + s
    f = pcf.d_n(l, z) * x ** k * pcf.d_n(n, z)
    return float(np.trapezoid(f, x))


@pytest.mark.parametrize("l,n", [(0, 0), (1, 2), (2, 1), (2, 2), (0, 2), (3, 5), (4, 4)])
@pytest.mark.parametrize("y", [0.0, 1.0, -0.7])
def test_matrix_elements_against_quadrature(l, n, y):
    geom = z_geometry(SystemParams.from_reduced(0.6, 0.2))
    for k, func in ((1, pcf.matrix_element_x), (2, pcf.matrix_element_x2)):
        ref = _quad_x_moment(l, n, y, geom, k)
        assert func(l, n, y, geom) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_matrix_element_x_diagonal_and_bands():
    p = SystemParams.from_reduced(0.6, 0.2)
    g = z_geometry(p)
    y = 1.3
    for n in range(5):
        diag = g.dx_dy * y * pcf.SQRT_2PI * math.factorial(n) / g.dz_dx
        assert pcf.matrix_element_x(n, n, y, g) == pytest.approx(diag, rel=1e-13)
    # the z D_l D_n term survives on the first off-diagonal
    assert pcf.matrix_element_x(1, 2, 1.0, g) != 0.0
    assert pcf.matrix_element_x(0, 3, 1.0, g) == 0.0
    assert pcf.matrix_element_x2(0, 3, 1.0, g) == 0.0
