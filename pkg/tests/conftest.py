import os

import pytest

from levyfp.fraclap import FracLapParams, assemble_Ls
from levyfp.grids import build_velocity_grid

CACHE_DIR = os.path.join(os.path.dirname(__file__), "..", "_opcache")


@pytest.fixture(scope="session")
def cache_dir():
    os.makedirs(CACHE_DIR, exist_ok=True)
    return CACHE_DIR


@pytest.fixture(scope="session")
def operator_bank(cache_dir):
    """Assembled fractional Laplacians shared across the suite."""
    bank = {}

    def get(s, N_v=128, L_v=3.0, l_lim=300):
        key = (s, N_v, L_v, l_lim)
        if key not in bank:
            grid = build_velocity_grid(N_v, L_v)
            bank[key] = assemble_Ls(FracLapParams(s, l_lim), grid,
                                    cache_dir=cache_dir)
        return bank[key]

    return get
