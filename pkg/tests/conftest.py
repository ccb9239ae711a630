"""Shared pytest configuration and fixtures for the simulator tests."""

import numpy as np
import pytest
from pathlib import Path

from qwa_sim.instance import GraphInstance, generate_instance
from qwa_sim.ordering import identity_path


def pytest_addoption(parser):
    """Add custom command line options."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run desk-scale acceptance tests marked slow",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="slow: pass --run-slow to include")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def repo_root():
    """Get path to repository root."""
    return Path(__file__).parent.parent


@pytest.fixture
def out_dir(tmp_path):
    """Empty output directory for artifacts."""
    path = tmp_path / "out"
    path.mkdir()
    return path


@pytest.fixture
def rng():
    """Seeded numpy generator for random states and instances."""
    return np.random.default_rng(20240917)


@pytest.fixture
def two_spin_ferro():
    """Two spins, J = 1."""
    return GraphInstance.from_edges(2, [(0, 1, 1.0)])


@pytest.fixture
def ferro_chain_4():
    return generate_instance("chain", {"n": 4}, "ferro", seed=0)


@pytest.fixture
def gaussian_chain_8():
    """The n=8 gaussian chain used by the annealer oracle checks."""
    return generate_instance("chain", {"n": 8}, "gaussian", seed=11)


@pytest.fixture
def triangle():
    """Frustrated antiferromagnetic triangle."""
    return GraphInstance.from_edges(3, [(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)])


@pytest.fixture
def identity4():
    return identity_path(4)


def random_instance(rng: np.random.Generator, n: int, density: float = 0.5) -> GraphInstance:
    """Connected random instance: a gaussian chain plus extra gaussian edges."""
    edges = [(i, i + 1, float(rng.standard_normal())) for i in range(n - 1)]
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < density:
                edges.append((i, j, float(rng.standard_normal())))
    return GraphInstance.from_edges(n, edges)
