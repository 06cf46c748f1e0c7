import math

import numpy as np
import pytest

from polyrad.optim import OptimConfig
from polyrad.spaces import SpaceDescriptor


@pytest.fixture(scope="session")
def cfg_std():
    """Default budget for structured reference computations."""
    return OptimConfig(restarts=6, max_iters=100, grid_resolution=2048, seed=1)


@pytest.fixture(scope="session")
def cfg_fast():
    """Light budget for randomized property suites."""
    return OptimConfig(restarts=4, max_iters=80, grid_resolution=1024, seed=3)


@pytest.fixture(scope="session")
def cfg_scalar():
    return OptimConfig(restarts=1, max_iters=12, grid_resolution=24, seed=0)


def random_vector(space: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal(space.real_dim)
    if space.is_complex:
        g = g.view(np.complex128)
    return g.astype(space.dtype)


SPACE_GRID = [
    SpaceDescriptor("real", 1.0, 2),
    SpaceDescriptor("real", 1.5, 2),
    SpaceDescriptor("real", 2.0, 3),
    SpaceDescriptor("real", 3.0, 2),
    SpaceDescriptor("real", math.inf, 2),
    SpaceDescriptor("complex", 1.0, 2),
    SpaceDescriptor("complex", 2.0, 2),
    SpaceDescriptor("complex", math.inf, 2),
]
