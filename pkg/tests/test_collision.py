import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from levyfp.collision import (BackwardEulerStepper, apply_positivity_fix,
                              apply_tail_anchor, assemble_Ps,
                              compute_equilibrium, drift_matrix, mass_error,
                              relative_entropy, relax, step_homogeneous)
from levyfp.fraclap import (FracLapParams, assemble_Ls, cauchy_density)
from levyfp.grids import build_velocity_grid, integrate_v


@pytest.fixture(scope="module")
def ops_half_L1(cache_dir):
    grid = build_velocity_grid(128, 1.0)
    Ls = assemble_Ls(FracLapParams(0.5, 300), grid, cache_dir=cache_dir)
    return grid, Ls, assemble_Ps(Ls, grid)


def test_collision_identity_on_constants(ops_half_L1):
    grid, _, Ps = ops_half_L1
    assert np.max(np.abs(Ps.mat @ np.ones(grid.N_v) - 1.0)) <= 1e-10


def test_cauchy_is_discrete_kernel_at_half_order(ops_half_L1):
    grid, _, Ps = ops_half_L1
    res = Ps.mat @ cauchy_density(grid.v)
    assert integrate_v(np.abs(res), grid) <= 1e-3


def test_drift_block_matches_analytic_derivative(ops_half_L1):
    grid, Ls, _ = ops_half_L1
    f = np.sin(grid.q) ** 2
    dfdq = 2 * np.sin(grid.q) * np.cos(grid.q)
    drift = -(np.cos(grid.q) * np.sin(grid.q)) * (drift_matrix(grid) @ f)
    want = -(np.cos(grid.q) * np.sin(grid.q)) * dfdq
    assert np.allclose(drift, want, atol=1e-10)


def test_step_homogeneous_fixed_point_and_linearity(ops_half_L1):
    grid, _, Ps = ops_half_L1
    M = cauchy_density(grid.v)
    stepper = BackwardEulerStepper(Ps, 0.01)
    out = step_homogeneous(M, 0.01, Ps, stepper)
    assert integrate_v(np.abs(out - M), grid) <= 1e-6
    assert np.allclose(step_homogeneous(np.zeros(grid.N_v), 0.01, Ps, stepper),
                       0.0)


def test_positivity_fix_no_op_on_positive_input():
    grid = build_velocity_grid(16, 1.0)
    f = np.exp(-grid.v ** 2) + 0.1
    assert np.array_equal(apply_positivity_fix(f, grid, 0.5), f)


def test_positivity_fix_single_negative_endpoint():
    grid = build_velocity_grid(16, 1.0)
    f = np.exp(-np.abs(grid.v)) + 0.01
    f[-1] = -1e-3
    out = apply_positivity_fix(f, grid, 0.5)
    ratio = ((1 + abs(grid.v[-2])) / (1 + abs(grid.v[-1]))) ** 2.0
    assert out[-1] == pytest.approx(f[-2] * ratio)
    assert np.all(out >= 0)


def test_positivity_fix_restores_equilibrium_tail():
    grid = build_velocity_grid(64, 3.0)
    s = 0.6
    M = (1 + np.abs(grid.v)) ** -(1 + 2 * s)
    broken = M.copy()
    broken[0] = -broken[0]
    broken[1] = -broken[1]
    broken[-1] = -broken[-1]
    broken[-2] = -broken[-2]
    fixed = apply_positivity_fix(broken, grid, s)
    for j in (0, 1, -2, -1):
        assert fixed[j] == pytest.approx(M[j], rel=0.1)


@given(st.lists(st.floats(min_value=-1e3, max_value=1e3,
                          allow_nan=False), min_size=8, max_size=8))
@settings(max_examples=200, deadline=None)
def test_positivity_fix_always_nonnegative(values):
    grid = build_velocity_grid(8, 2.0)
    with np.errstate(all="ignore"):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = apply_positivity_fix(np.array(values), grid, 0.5)
    assert np.all(out >= 0)


def test_tail_anchor_installs_decay_rate():
    grid = build_velocity_grid(32, 3.0)
    s = 0.7
    f = np.abs(grid.v) ** -(1 + 2 * s)
    out = apply_tail_anchor(f, grid, s)
    assert out[0] == pytest.approx(f[1] * (abs(grid.v[1]) / abs(grid.v[0]))
                                   ** (1 + 2 * s))
    assert np.allclose(out[2:-2], f[2:-2])


def test_relative_entropy_identities():
    grid = build_velocity_grid(64, 3.0)
    M = np.exp(-grid.v ** 2)
    M /= integrate_v(M, grid)
    assert relative_entropy(M, M, grid) == pytest.approx(0.0, abs=1e-14)
    assert relative_entropy(2 * M, M, grid) == pytest.approx(2 * np.log(2),
                                                             abs=1e-10)


def test_relative_entropy_zero_convention():
    grid = build_velocity_grid(8, 1.0)
    M = np.full(8, 0.5)
    f = np.zeros(8)
    assert relative_entropy(f, M, grid) == 0.0


def test_mass_error_exact_quadrature_case():
    grid = build_velocity_grid(64, 1.0)
    assert mass_error(cauchy_density(grid.v), grid, 1.0) == pytest.approx(
        0.0, abs=1e-14)


@pytest.fixture(scope="module")
def equilibrium_half(cache_dir):
    grid = build_velocity_grid(128, 3.0)
    return grid, compute_equilibrium(0.5, grid, 0.01, cache_dir=cache_dir)


def test_equilibrium_matches_cauchy_shape(equilibrium_half):
    grid, prof = equilibrium_half
    cau = cauchy_density(grid.v)
    cau = cau / integrate_v(cau, grid)
    assert integrate_v(np.abs(prof.M - cau), grid) <= 1e-3
    assert prof.mass == pytest.approx(1.0, abs=1e-12)
    assert np.all(prof.M > 0)


def test_equilibrium_tail_slope_half(equilibrium_half):
    _, prof = equilibrium_half
    assert prof.tail_slope == pytest.approx(-2.0, abs=0.15)


def test_equilibrium_is_backward_euler_fixed_point(equilibrium_half):
    grid, prof = equilibrium_half
    Ls = assemble_Ls(FracLapParams(0.5, 300), grid)
    Ps = assemble_Ps(Ls, grid)
    out = step_homogeneous(prof.M, prof.dt, Ps)
    drift = integrate_v(np.abs(out - prof.M), grid)
    assert drift <= 10 * prof.dt * prof.residual


def test_entropy_monotone_along_relaxation(cache_dir):
    grid = build_velocity_grid(64, 3.0)
    Ls = assemble_Ls(FracLapParams(0.6, 300), grid, cache_dir=cache_dir)
    Ps = assemble_Ps(Ls, grid)
    prof = compute_equilibrium(0.6, grid, 0.01, Ps=Ps, cache_dir=cache_dir)
    f0 = np.exp(-grid.v ** 2)
    f0 /= integrate_v(f0, grid)
    rows, _, _ = relax(f0, Ps, grid, 0.01, delta=None, n_steps=300,
                       M=prof.M, M0=1.0)
    H = rows[:, 2]
    assert np.all(np.diff(H) <= 1e-10)
