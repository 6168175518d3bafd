import numpy as np
import pytest

from senseloop.config import load_config
from senseloop.motor_fields import ArmCommand


@pytest.fixture(scope="session")
def cfg():
    return load_config(None)


@pytest.fixture(scope="session")
def geometry(cfg):
    return cfg.geometry()


@pytest.fixture(scope="session")
def basis(cfg):
    return cfg.basis()


def random_command(basis, gen: np.random.Generator) -> ArmCommand:
    """Uniform random convex command supported on one basis triangle."""
    tri = basis.triangles[gen.integers(len(basis.triangles))]
    w = gen.dirichlet(np.ones(3))
    return ArmCommand(tuple((i, float(wi)) for i, wi in zip(tri, w)))
