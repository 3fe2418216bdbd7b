import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hausdorff_choquet.grid import GridFunction, GridGeometry, GridSet

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_set(geo: GridGeometry, rng, density=None) -> GridSet:
    d = rng.uniform(0.05, 0.7) if density is None else density
    return GridSet(geo, rng.random(geo.shape) < d)


def random_function(geo: GridGeometry, rng, levels=None) -> GridFunction:
    k = int(rng.integers(1, 9)) if levels is None else levels
    vals = rng.integers(0, k + 1, size=geo.shape) * rng.uniform(0.1, 2.0)
    vals = np.where(rng.random(geo.shape) < 0.3, 0.0, vals)
    return GridFunction.on(GridSet.full(geo), vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
