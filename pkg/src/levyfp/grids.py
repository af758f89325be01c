"""Grids and discrete transforms shared by all solvers.

Velocity space uses the cotangent map v = L_v * cot(q) with q in (0, pi),
which pulls the whole real line onto a bounded interval.  Midpoint
collocation in q keeps every node at finite velocity and turns integrals
over v into weighted sums in q.  Physical space is a uniform periodic
midpoint grid with FFT wavenumbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft


class GridError(ValueError):
    """Invalid grid parameters or mismatched array lengths."""


@dataclass(frozen=True)
class VelocityGrid:
    """Cotangent-mapped velocity grid.

    Attributes set on construction:
      q  : midpoints pi*(2j+1)/(2*N_v), strictly inside (0, pi)
      v  : physical velocities L_v*cot(q), strictly decreasing, antisymmetric
      w  : quadrature weights L_v/sin(q)^2 (symmetric, positive)
      dq : spacing pi/N_v
    """

    N_v: int
    L_v: float

    def __post_init__(self) -> None:
        if self.N_v < 2 or self.N_v % 2 != 0:
            raise GridError(f"N_v must be an even integer >= 2, got {self.N_v}")
        if not self.L_v > 0:
            raise GridError(f"L_v must be positive, got {self.L_v}")
        j = np.arange(self.N_v)
        q = (2 * j + 1) * np.pi / (2 * self.N_v)
        half = self.N_v // 2
        # build one half and mirror so that antisymmetry of v and symmetry
        # of w hold exactly in floating point
        vh = self.L_v / np.tan(q[:half])
        wh = self.L_v / np.sin(q[:half]) ** 2
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "v", np.concatenate([vh, -vh[::-1]]))
        object.__setattr__(self, "w", np.concatenate([wh, wh[::-1]]))
        object.__setattr__(self, "dq", np.pi / self.N_v)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic midpoint grid on [-L_x, L_x].

    Attributes set on construction:
      x  : midpoints -L_x + (i+1/2)*dx
      dx : spacing 2*L_x/N_x
      xi : wavenumbers pi*k/L_x, k in {-N_x/2..N_x/2-1}, FFT ordering
    """

    N_x: int
    L_x: float

    def __post_init__(self) -> None:
        if self.N_x < 2 or self.N_x % 2 != 0:
            raise GridError(f"N_x must be an even integer >= 2, got {self.N_x}")
        if not self.L_x > 0:
            raise GridError(f"L_x must be positive, got {self.L_x}")
        dx = 2.0 * self.L_x / self.N_x
        x = -self.L_x + (np.arange(self.N_x) + 0.5) * dx
        xi = 2.0 * np.pi * np.fft.fftfreq(self.N_x, d=dx)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)


def build_velocity_grid(N_v: int, L_v: float) -> VelocityGrid:
    return VelocityGrid(N_v=int(N_v), L_v=float(L_v))


def build_spatial_grid(N_x: int, L_x: float) -> SpatialGrid:
    return SpatialGrid(N_x=int(N_x), L_x=float(L_x))


def integrate_v(fvals: np.ndarray, grid: VelocityGrid) -> np.ndarray | float:
    """Approximate the integral of f over the real velocity line.

    ``fvals`` holds samples on the q grid along the last axis; the return
    value is sum_j f_j * w_j * dq, i.e. the image of the midpoint rule
    under the cotangent map.
    """
    fvals = np.asarray(fvals)
    if fvals.shape[-1] != grid.N_v:
        raise GridError(
            f"expected last axis of length {grid.N_v}, got {fvals.shape[-1]}"
        )
    return np.sum(fvals * grid.w, axis=-1) * grid.dq


# ---------------------------------------------------------------------------
# Fourier helpers on the spatial grid.  Coefficients follow the convention
#   u(x_i) = sum_k c_k exp(i xi_k x_i)
# which keeps the midpoint offset of the grid explicit, so coefficients can
# be evaluated at arbitrary (shifted) points.

def x_coeffs(values: np.ndarray, grid: SpatialGrid, axis: int = -1) -> np.ndarray:
    values = np.asarray(values)
    n = grid.N_x
    if values.shape[axis] != n:
        raise GridError(f"expected axis of length {n}, got {values.shape[axis]}")
    c = np.fft.fft(values, axis=axis) / n
    phase = np.exp(-1j * grid.xi * grid.x[0])
    return c * _along(phase, values.ndim, axis)


def x_values(coeffs: np.ndarray, grid: SpatialGrid, axis: int = -1,
             real: bool = True) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    phase = np.exp(1j * grid.xi * grid.x[0])
    u = np.fft.ifft(coeffs * _along(phase, coeffs.ndim, axis), axis=axis) * grid.N_x
    return u.real if real else u


def x_eval(coeffs: np.ndarray, grid: SpatialGrid, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    ph = np.exp(1j * np.outer(points, grid.xi))
    return (ph @ np.asarray(coeffs)).real


def _along(vec: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = vec.shape[0]
    return vec.reshape(shape)


# ---------------------------------------------------------------------------
# Cosine-series helpers on the velocity grid.  Samples on the q midpoints
# determine an even 2*pi-periodic interpolant
#   F(q) = c_0 + 2 sum_{k=1..N_v-1} c_k cos(k q),
# the discrete image of the even extension of f about q = pi.

def q_cosine_coeffs(fvals: np.ndarray, grid: VelocityGrid) -> np.ndarray:
    fvals = np.asarray(fvals)
    if fvals.shape[-1] != grid.N_v:
        raise GridError(
            f"expected last axis of length {grid.N_v}, got {fvals.shape[-1]}"
        )
    # DCT-II gives 2*sum_p f_p cos(k q_p) directly
    return scipy.fft.dct(fvals, type=2, axis=-1) / (2.0 * grid.N_v)


def q_eval(fvals: np.ndarray, grid: VelocityGrid, qpts: np.ndarray) -> np.ndarray:
    qpts = np.atleast_1d(np.asarray(qpts, dtype=float))
    c = q_cosine_coeffs(fvals, grid)
    k = np.arange(grid.N_v)
    basis = np.cos(np.outer(qpts, k))
    basis[:, 1:] *= 2.0
    return basis @ c
