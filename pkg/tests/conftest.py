import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flrtest import FunctionalSample, build_design, make_grid
from flrtest.simlab import gen_setup1


@pytest.fixture
def grid101():
    return make_grid(101)


@pytest.fixture
def grid201():
    return make_grid(201)


def random_sample(n=15, p=101, nu=2.0, B=0.0, seed=0):
    """Convenience: a centered setup-1 sample on a p-point grid."""
    rng = np.random.default_rng(seed)
    sample, _ = gen_setup1(n, nu, B, rng, make_grid(p))
    return sample


def smooth_function_values(grid, seed, terms=6):
    """A random smooth function: a short Fourier sum with decaying weights."""
    rng = np.random.default_rng(seed)
    t = grid.points
    coef = rng.standard_normal(terms) / (1.0 + np.arange(terms)) ** 2
    vals = coef[0] * np.ones_like(t)
    for k in range(1, terms):
        vals = vals + coef[k] * np.cos(k * np.pi * t)
    return vals
