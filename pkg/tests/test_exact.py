import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bopshox import exact
from bopshox.params import StateIndex, SystemParams

params_st = st.tuples(
    st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.5, 3.0),
    st.floats(0.02, 0.98), st.floats(-0.99, 0.99),
).map(lambda t: SystemParams(t[0], t[1], t[2], t[3] * t[2], t[4]))


@settings(max_examples=80, deadline=None)
@given(params_st)
def test_eigenvalues_against_eigh(p):
    ref = np.linalg.eigvalsh(exact.b_matrix(p))
    lam1, lam2 = exact.eigenvalues(p)
    assert lam1 == pytest.approx(ref[1], rel=1e-12)
    assert lam2 == pytest.approx(ref[0], rel=1e-9, abs=1e-14)
    assert lam1 * lam2 == pytest.approx(p.omega ** 2 * p.Omega ** 2 * (1 - p.delta ** 2), rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(params_st)
def test_rotation_diagonalizes(p):
    nm = exact.normal_modes(p)
    D = nm.R @ exact.b_matrix(p) @ nm.R.T
    scale = nm.lambda1
    assert abs(D[0, 1]) < 1e-12 * scale
    assert D[0, 0] == pytest.approx(nm.lambda1, rel=1e-12)
    assert D[1, 1] == pytest.approx(nm.lambda2, rel=1e-8, abs=1e-13 * scale)
    assert nm.omega1 > nm.omega2 > 0


@settings(max_examples=80, deadline=None)
@given(params_st)
def test_g_matrix_structure(p):
    nm = exact.normal_modes(p)
    G = np.sqrt(2.0) * nm.F @ nm.R @ np.diag([math.sqrt(p.m), math.sqrt(p.M)])
    np.testing.assert_allclose(exact.g_matrix(p), G, rtol=1e-12, atol=1e-14)
    assert abs(np.linalg.det(G)) == pytest.approx(exact.volume_factor(p), rel=1e-10)


def test_uncoupled_limit():
    p = SystemParams(1.3, 0.7, 2.0, 0.5, 0.0)
    assert exact.eigenvalues(p) == pytest.approx((4.0, 0.25))
    assert exact.mixing_angle(p) == 0.0
    assert exact.exact_energy(p, StateIndex(2, 3)) == pytest.approx(2.0 * 2.5 + 0.5 * 3.5)


def test_reference_values(p06):
    lam1, lam2 = exact.eigenvalues(p06)
    assert lam1 == pytest.approx(1.0147727, abs=1e-7)
    assert lam2 == pytest.approx(0.0252273, abs=1e-7)
    assert exact.exact_energy(p06, StateIndex(0, 0)) == pytest.approx(0.5830952, abs=1e-7)


def _hamiltonian_residual(p, s, x, y, h=1e-3):
    psi = lambda a, b: exact.exact_wavefunction(p, s, a, b)
    lap_x = (psi(x + h, y) - 2 * psi(x, y) + psi(x - h, y)) / h ** 2
    lap_y = (psi(x, y + h) - 2 * psi(x, y) + psi(x, y - h)) / h ** 2
    V = 0.5 * p.m * p.omega ** 2 * x ** 2 + 0.5 * p.M * p.Omega ** 2 * y ** 2 + p.c * x * y
    Hpsi = -lap_x / (2 * p.m) - lap_y / (2 * p.M) + V * psi(x, y)
    return Hpsi - exact.exact_energy(p, s) * psi(x, y)


@pytest.mark.parametrize("s", [StateIndex(0, 0), StateIndex(1, 2), StateIndex(3, 1)])
def test_wavefunction_solves_schrodinger(s):
    p = SystemParams(1.5, 2.0, 1.0, 0.4, 0.7)
    x, y = np.meshgrid(np.linspace(-1.5, 1.5, 7), np.linspace(-2, 2, 7))
    res = _hamiltonian_residual(p, s, x, y)
    assert np.max(np.abs(res)) < 1e-5


@pytest.mark.parametrize("p", [SystemParams(1, 1, 1, 0.2, 0.6), SystemParams(2.0, 0.5, 1.5, 0.9, -0.8)])
def test_wavefunction_orthonormal(p):
    # integrate on a large grid in physical coordinates
    G = exact.g_matrix(p)
    L = 9.0 / np.min(np.abs(np.linalg.svd(G, compute_uv=False)))
    t = np.linspace(-L, L, 401)
    X, Y = np.meshgrid(t, t, indexing="ij")
    dA = (t[1] - t[0]) ** 2
    states = [StateIndex(0, 0), StateIndex(1, 0), StateIndex(0, 2), StateIndex(2, 1)]
    psis = [exact.exact_wavefunction(p, s, X, Y) for s in states]
    for i, a in enumerate(psis):
        for j, b in enumerate(psis):
            assert np.sum(a * b) * dA == pytest.approx(float(i == j), abs=1e-8)


def test_scalar_evaluation():
    p = SystemParams(1, 1, 1, 0.2, 0.3)
    v = exact.exact_wavefunction(p, StateIndex(0, 0), 0.1, -0.2)
    assert isinstance(v, float)
