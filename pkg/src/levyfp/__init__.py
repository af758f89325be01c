"""Solvers for a 1-D kinetic equation with fractional velocity diffusion.

The package provides the cotangent-mapped velocity grid, a pseudospectral
fractional Laplacian with an independent quadrature oracle, the full
collision operator with a backward-Euler relaxation solver, a micro-macro
split scheme that stays accurate across the stiffness range, reference
solvers (kinetic split stepping and the heavy-tail heat flow), and CSV
diagnostics plumbing behind the ``levyfp`` command line tool.
"""

from .grids import (VelocityGrid, SpatialGrid, build_velocity_grid,
                    build_spatial_grid, integrate_v)
from .fraclap import (FracLapParams, SpectralOperator, assemble_Ls,
                      frac_lap_mode, frac_lap_quadrature_oracle)
from .collision import (assemble_Ps, step_homogeneous, apply_positivity_fix,
                        apply_tail_anchor, compute_equilibrium,
                        relative_entropy, mass_error, EquilibriumProfile)
from .ap_scheme import (SplitState, decompose_initial, commutator_I,
                        step1_collision, step2_transport, step3_eta,
                        eval_eta, reconstruct_and_density, energies, run_ap)
from .reference import imex_step, limit_step, limit_solve_exact, LimitState
from .config import RunConfig, build_config

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
