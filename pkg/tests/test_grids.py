import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy import integrate

from levyfp.grids import (GridError, build_spatial_grid, build_velocity_grid,
                          integrate_v, q_eval, x_coeffs, x_eval, x_values)


def test_two_point_velocity_grid_closed_form():
    g = build_velocity_grid(2, 1.0)
    assert np.allclose(g.q, [np.pi / 4, 3 * np.pi / 4])
    assert np.allclose(g.v, [1.0, -1.0])
    assert np.allclose(g.w, [2.0, 2.0])


def test_four_point_velocity_grid_closed_form():
    g = build_velocity_grid(4, 3.0)
    assert g.q[0] == pytest.approx(np.pi / 8)
    assert g.v[0] == pytest.approx(3.0 / np.tan(np.pi / 8))
    assert g.v[0] == pytest.approx(7.2426, abs=1e-4)


@pytest.mark.parametrize("N_v, L_v", [(3, 1.0), (0, 1.0), (-4, 1.0),
                                      (4, 0.0), (4, -2.0)])
def test_velocity_grid_rejects_bad_parameters(N_v, L_v):
    with pytest.raises(GridError):
        build_velocity_grid(N_v, L_v)


@given(n=st.integers(min_value=1, max_value=128),
       L=st.floats(min_value=1e-2, max_value=1e3))
@settings(max_examples=50, deadline=None)
def test_velocity_grid_symmetries(n, L):
    g = build_velocity_grid(2 * n, L)
    assert np.all(g.v[:n] > 0) and np.all(np.diff(g.v) < 0)
    assert np.array_equal(g.v, -g.v[::-1])
    assert np.array_equal(g.w, g.w[::-1])
    assert np.all(g.w > 0)
    assert np.all((g.q > 0) & (g.q < np.pi))


@pytest.mark.parametrize("N_v", [2, 4, 8, 16, 64, 256, 512])
def test_cauchy_quadrature_is_exact(N_v):
    g = build_velocity_grid(N_v, 1.0)
    val = integrate_v(1.0 / (np.pi * (1.0 + g.v ** 2)), g)
    assert val == pytest.approx(1.0, abs=1e-14)


def test_gaussian_quadrature_matches_adaptive_oracle():
    g = build_velocity_grid(128, 3.0)
    oracle, _ = integrate.quad(lambda v: np.exp(-v * v), -np.inf, np.inf)
    assert integrate_v(np.exp(-g.v ** 2), g) == pytest.approx(oracle, abs=1e-6)


def test_gaussian_quadrature_error_nonincreasing_under_refinement():
    errs = []
    for N in (32, 64, 128, 256):
        g = build_velocity_grid(N, 3.0)
        errs.append(abs(integrate_v(np.exp(-g.v ** 2), g) - np.sqrt(np.pi)))
    assert all(e2 <= e1 * (1 + 1e-12) for e1, e2 in zip(errs, errs[1:]))


def test_integrate_v_rejects_length_mismatch():
    g = build_velocity_grid(8, 1.0)
    with pytest.raises(GridError):
        integrate_v(np.ones(7), g)


def test_zero_integrand():
    g = build_velocity_grid(16, 2.0)
    assert integrate_v(np.zeros(16), g) == 0.0


def test_two_point_spatial_grid():
    g = build_spatial_grid(2, np.pi)
    assert np.allclose(g.x, [-np.pi / 2, np.pi / 2])
    assert sorted(g.xi) == pytest.approx([-1.0, 0.0])


def test_spatial_grid_standard_scale():
    g = build_spatial_grid(100, np.pi)
    assert g.dx == pytest.approx(2 * np.pi / 100)
    assert np.all((g.x > -np.pi) & (g.x < np.pi))


def test_spatial_wavenumbers_each_once():
    g = build_spatial_grid(4, 5.0)
    assert sorted(g.xi) == pytest.approx(np.array([-2, -1, 0, 1]) * np.pi / 5)


@pytest.mark.parametrize("N_x, L_x", [(5, 1.0), (0, 1.0), (4, -1.0)])
def test_spatial_grid_rejects_bad_parameters(N_x, L_x):
    with pytest.raises(GridError):
        build_spatial_grid(N_x, L_x)


def test_x_transform_round_trip():
    g = build_spatial_grid(32, 2.0)
    u = np.sin(np.pi * g.x / 2.0) + 0.3 * np.cos(2 * np.pi * g.x / 2.0)
    c = x_coeffs(u, g)
    assert np.allclose(x_values(c, g), u, atol=1e-13)
    # conjugate symmetry for real input
    idx = np.argsort(g.xi)
    xi_sorted, c_sorted = g.xi[idx], c[idx]
    for k in range(1, 5):
        i = np.argmin(np.abs(xi_sorted - np.pi * k / 2.0))
        j = np.argmin(np.abs(xi_sorted + np.pi * k / 2.0))
        assert c_sorted[i] == pytest.approx(np.conj(c_sorted[j]), abs=1e-13)


def test_x_eval_matches_grid_values_and_shifts():
    g = build_spatial_grid(16, np.pi)
    u = 1.0 + np.sin(g.x)
    c = x_coeffs(u, g)
    assert np.allclose(x_eval(c, g, g.x), u, atol=1e-12)
    shifted = x_eval(c, g, g.x + 0.2)
    assert np.allclose(shifted, 1.0 + np.sin(g.x + 0.2), atol=1e-12)


def test_q_eval_reproduces_samples_and_interpolates():
    g = build_velocity_grid(32, 1.0)
    f = np.sin(g.q) ** 2
    assert np.allclose(q_eval(f, g, g.q), f, atol=1e-12)
    assert q_eval(f, g, np.array([np.pi / 2]))[0] == pytest.approx(1.0, abs=1e-12)
