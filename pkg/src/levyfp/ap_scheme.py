"""Micro-macro split solver with uniform behavior across the stiffness range.

The distribution is written f = eta * M + g where the macro part
eta(t, x, v) = h(t, x + eps*v) rides on a one-dimensional profile h and M
is the unit-mass equilibrium.  One time step performs

  1. an implicit collision solve for the micro part per spatial column,
     with the shift gamma removing the ill-conditioning of the stiff
     inversion and the product-rule defect I(eta, M) as source,
  2. a transport solve per velocity row, diagonal in the spatial Fourier
     index, which also removes the gamma shift again,
  3. an implicit fractional-heat step for the profile h, diagonal in
     Fourier space.

Two stabilizers keep the time loop clean across the whole stiffness
range.  First, the collocation operator on the unbounded velocity domain
carries two spurious non-decaying eigenmodes with eigenvalues near +1
(images of constant and sign-like profiles, which the physical micro part
excludes); on long stiff runs, where their intrinsic exp(t/eps^(2s))
growth would dominate, the collision solve uses a deflected matrix that
moves exactly those eigenvalues to -1 while preserving every other
eigenpair.  Second, the implicit gamma pair of stages 1 and 2 is
contractive except in a resonance band eps^(2s)/dt ~ gamma, where the
stage-2 denominator nearly vanishes; resonance_safe_gamma moves gamma
well below the band when a run would land inside it.

All x-transforms keep the midpoint-grid phase convention of grids.x_coeffs
so that h can be evaluated at the shifted points x + eps*v exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .collision import NumericalFailure
from .fraclap import SpectralOperator
from .grids import (SpatialGrid, VelocityGrid, integrate_v, x_coeffs, x_values)

#: minimum allowed |eps^(2s)/dt - gamma| in the implicit transport branch
ZERO_MODE_GUARD = 1e-10

#: eigenvalues of the collision matrix above this are treated as spurious
SPURIOUS_EIG_CUT = 0.5

#: deflation engages automatically once the spurious-mode growth factor
#: exp(T/eps^(2s)) over the run exceeds exp of this
DEFLATE_HORIZON = 2.0


@dataclass
class SplitState:
    """Macro profile coefficients and micro field at one time level."""

    h_hat: np.ndarray       # N_x complex Fourier coefficients of h
    g: np.ndarray           # (N_x, N_v) micro part
    t: float
    eps: float
    s: float
    gamma: float


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    E_f: float
    E_g: float
    E_eta: float
    ap_error: float


def eval_eta(h_hat: np.ndarray, eps: float, sgrid: SpatialGrid,
             vgrid: VelocityGrid) -> np.ndarray:
    """Macro part eta(x_i, v_j) = sum_k h_k exp(i xi_k (x_i + eps v_j))."""
    shift = np.exp(1j * np.outer(sgrid.xi, eps * vgrid.v))   # (N_x, N_v)
    return x_values(h_hat[:, None] * shift, sgrid, axis=0)


def commutator_I(eta_col: np.ndarray, M: np.ndarray,
                 Ls: SpectralOperator) -> np.ndarray:
    """Product-rule defect L(eta*M) - M*L(eta) - eta*L(M) for one column."""
    eta_col = np.asarray(eta_col, dtype=float)
    M = np.asarray(M, dtype=float)
    return Ls.mat @ (eta_col * M) - M * (Ls.mat @ eta_col) - eta_col * (Ls.mat @ M)


def commutator_field(eta: np.ndarray, M: np.ndarray,
                     Ls: SpectralOperator) -> np.ndarray:
    """commutator_I applied to every spatial column of an (N_x, N_v) field."""
    LsM = Ls.mat @ M
    return ((Ls.mat @ (eta * M).T).T
            - (Ls.mat @ eta.T).T * M[None, :]
            - eta * LsM[None, :])


def decompose_initial(f_in: np.ndarray, rho_in, eps: float,
                      sgrid: SpatialGrid, vgrid: VelocityGrid,
                      M: np.ndarray, s: float, gamma: float,
                      density_tol: float = 1e-8) -> SplitState:
    """Split initial data into the shifted macro profile and the remainder.

    ``rho_in`` may be None (the discrete velocity integral of ``f_in`` is
    used), an array on the x grid, or a callable of x.  A supplied density
    must match the discrete integral of ``f_in`` to ``density_tol``.
    """
    f_in = np.asarray(f_in, dtype=float)
    if f_in.shape != (sgrid.N_x, vgrid.N_v):
        raise ValueError(f"f_in must have shape ({sgrid.N_x}, {vgrid.N_v})")
    rho_disc = integrate_v(f_in, vgrid)
    if rho_in is None:
        rho = rho_disc
    else:
        rho = rho_in(sgrid.x) if callable(rho_in) else np.asarray(rho_in, dtype=float)
        mismatch = float(np.max(np.abs(rho - rho_disc)))
        if mismatch > density_tol:
            raise ValueError(
                f"rho_in differs from the velocity integral of f_in by "
                f"{mismatch:.3e} (tol {density_tol:.1e})")
    h_hat = x_coeffs(rho, sgrid)
    eta = eval_eta(h_hat, eps, sgrid, vgrid)
    g = f_in - eta * M[None, :]
    return SplitState(h_hat=h_hat, g=g, t=0.0, eps=eps, s=s, gamma=gamma)


def deflate_spurious_modes(Ps: SpectralOperator, cut: float = SPURIOUS_EIG_CUT,
                           target: float = -1.0) -> np.ndarray:
    """Collision matrix with its non-decaying eigenmodes moved to ``target``.

    The right and left invariant subspaces of the eigenvalues above
    ``cut`` are taken from sorted real Schur forms; the rank-k update
    changes only those eigenvalues and leaves every other eigenpair of
    the matrix untouched.
    """
    P = Ps.mat
    T, Q, k = linalg.schur(P, sort=lambda x: x.real > cut, output="real")
    if k == 0:
        return P.copy()
    U = Q[:, :k]
    T2, Q2, k2 = linalg.schur(P.T, sort=lambda x: x.real > cut, output="real")
    if k2 != k:
        raise NumericalFailure("left/right spurious subspaces disagree")
    Y = Q2[:, :k]
    W = Y @ np.linalg.inv(Y.T @ U)          # W^T U = I, W^T (rest) = 0
    lam = W.T @ P @ U
    return P - U @ (lam - target * np.eye(k)) @ W.T


def step1_matrix(eps: float, dt: float, gamma: float,
                 Ps: SpectralOperator) -> np.ndarray:
    """System matrix (eps^(2s)/dt + gamma) I - P of the collision solve."""
    r = eps ** (2.0 * Ps.s) / dt
    return (r + gamma) * np.eye(Ps.grid.N_v) - Ps.mat


def step1_collision(g: np.ndarray, eta: np.ndarray, dt: float, eps: float,
                    gamma: float, Ps: SpectralOperator, Ls: SpectralOperator,
                    M: np.ndarray, lu=None) -> np.ndarray:
    """Implicit collision solve per spatial column."""
    r = eps ** (2.0 * Ps.s) / dt
    if lu is None:
        lu = linalg.lu_factor(step1_matrix(eps, dt, gamma, Ps))
    rhs = (r * g - commutator_field(eta, M, Ls)).T       # (N_v, N_x)
    return linalg.lu_solve(lu, rhs).T


def step2_transport(g_star: np.ndarray, dt: float, eps: float, gamma: float,
                    sgrid: SpatialGrid, vgrid: VelocityGrid, s: float,
                    mode: str = "implicit") -> np.ndarray:
    """Transport solve, diagonal per spatial Fourier mode.

    ``mode`` "implicit" removes the gamma shift through the same implicit
    factor as the rest of the solve; "exact" uses the integrating factor
    of the sub-step equation (only stable when gamma*dt/eps^(2s) is small).
    """
    r = eps ** (2.0 * s) / dt
    theta = eps * np.outer(sgrid.xi, vgrid.v)            # (N_x, N_v)
    if mode == "implicit":
        if abs(r - gamma) < ZERO_MODE_GUARD:
            raise NumericalFailure(
                f"eps^(2s)/dt = {r:.3e} collides with gamma = {gamma}; "
                "choose dt so that eps^(2s)/dt != gamma")
        mult = r / ((r - gamma) + 1j * theta)
    elif mode == "exact":
        mult = np.exp((gamma - 1j * theta) / r)
    else:
        raise ValueError(f"unknown transport mode {mode!r}")
    ghat = np.fft.fft(g_star, axis=0)
    return np.fft.ifft(mult * ghat, axis=0).real


def step3_eta(h_hat: np.ndarray, dt: float, s: float,
              sgrid: SpatialGrid) -> np.ndarray:
    """Implicit fractional-heat step for the macro profile."""
    return h_hat / (1.0 + dt * np.abs(sgrid.xi) ** (2.0 * s))


def reconstruct_and_density(state: SplitState, M: np.ndarray,
                            sgrid: SpatialGrid, vgrid: VelocityGrid):
    """Full distribution f = eta*M + g and its density."""
    eta = eval_eta(state.h_hat, state.eps, sgrid, vgrid)
    f = eta * M[None, :] + state.g
    rho = integrate_v(f, vgrid)
    return f, rho


def energies(state: SplitState, M: np.ndarray, sgrid: SpatialGrid,
             vgrid: VelocityGrid) -> EnergyRecord:
    """Weighted quadratic energies and the distance to local equilibrium."""
    wq = vgrid.w * vgrid.dq
    eta = eval_eta(state.h_hat, state.eps, sgrid, vgrid)
    f = eta * M[None, :] + state.g
    rho = integrate_v(f, vgrid)
    E_f = float(np.sum(f ** 2 / M[None, :] * wq) * sgrid.dx)
    E_g = float(np.sum(state.g ** 2 / M[None, :] * wq) * sgrid.dx)
    E_eta = float(np.sum(eta ** 2 * M[None, :] * wq) * sgrid.dx)
    ap = float(np.sum(np.abs(rho[:, None] * M[None, :] - f) * wq) * sgrid.dx)
    return EnergyRecord(t=state.t, E_f=E_f, E_g=E_g, E_eta=E_eta, ap_error=ap)


def resonance_safe_gamma(eps: float, s: float, dt: float,
                         gamma: float = 1.0) -> float:
    """Move gamma off the transport resonance band r ~ gamma if needed.

    The shift only matters for conditioning when r = eps^(2s)/dt is small,
    and both transport branches degrade when gamma sits within a factor of
    a few of r.  Outside the band the requested value is returned.
    """
    r = eps ** (2.0 * s) / dt
    if r >= 4.0 * gamma or r <= 0.25 * gamma:
        return gamma
    return r / 10.0


def run_ap(state: SplitState, M: np.ndarray, sgrid: SpatialGrid,
           vgrid: VelocityGrid, Ls: SpectralOperator, Ps: SpectralOperator,
           dt: float, T: float, record_energies: bool = True,
           deflate: bool | str = "auto", Ps_defl: np.ndarray | None = None,
           transport: str = "implicit"):
    """March the three-stage scheme to time T.

    Returns (records, state) where records is an array of per-step rows
    (step, t, E_f, E_g, E_eta, ap_error, mass) including the initial one.
    """
    eps, gamma, s = state.eps, state.gamma, state.s
    r = eps ** (2.0 * s) / dt
    if transport == "implicit" and abs(r - gamma) < ZERO_MODE_GUARD:
        raise NumericalFailure(
            f"eps^(2s)/dt = {r:.3e} collides with gamma = {gamma}; "
            "choose dt so that eps^(2s)/dt != gamma")
    if deflate == "auto":
        deflate = T / eps ** (2.0 * s) >= DEFLATE_HORIZON
    if deflate and Ps_defl is None:
        Ps_defl = deflate_spurious_modes(Ps)
    P1 = Ps_defl if deflate else Ps.mat
    lu = linalg.lu_factor((r + gamma) * np.eye(vgrid.N_v) - P1)
    n_steps = int(round(T / dt))
    records = []

    def record(step):
        if record_energies:
            e = energies(state, M, sgrid, vgrid)
            _, rho = reconstruct_and_density(state, M, sgrid, vgrid)
            mass = float(np.sum(rho) * sgrid.dx)
            records.append((step, state.t, e.E_f, e.E_g, e.E_eta, e.ap_error, mass))

    record(0)
    for n in range(1, n_steps + 1):
        eta = eval_eta(state.h_hat, eps, sgrid, vgrid)
        g_star = step1_collision(state.g, eta, dt, eps, gamma, Ps, Ls, M, lu=lu)
        state.g = step2_transport(g_star, dt, eps, gamma, sgrid, vgrid, s,
                                  mode=transport)
        state.h_hat = step3_eta(state.h_hat, dt, s, sgrid)
        state.t = n * dt
        record(n)
    return np.array(records), state
