"""
Shared fixtures: bundled systems and small hand-made graphs.
"""
import numpy as np
import pytest

from eigslab.services.presets import load_preset
from eigslab.services.system import LevelGraph

SEED = 7


def make_graph(n_vertices: int, edges: list[tuple[int, int]], terminals: tuple[int, int] = (0, 1)) -> LevelGraph:
    """Single-colour level-0 graph from an undirected edge list."""
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return LevelGraph(
        level=0,
        n_vertices=n_vertices,
        tails=arr[:, 0].copy(),
        heads=arr[:, 1].copy(),
        colours=np.ones(arr.shape[0], dtype=np.int64),
        birth_level=np.zeros(n_vertices, dtype=np.int64),
        terminal_plus=terminals[0],
        terminal_minus=terminals[1],
    )


@pytest.fixture(scope="session")
def dhl():
    return load_preset("dhl")


@pytest.fixture(scope="session")
def fig2():
    return load_preset("fig2")


@pytest.fixture(scope="session")
def xi():
    return load_preset("xi")


@pytest.fixture(scope="session")
def vicsek():
    return load_preset("vicsek")


@pytest.fixture(scope="session")
def laakso():
    return load_preset("laakso")


@pytest.fixture
def single_edge():
    return make_graph(2, [(0, 1)])


@pytest.fixture
def triangle():
    return make_graph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def cycle4():
    return make_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)], terminals=(0, 2))


@pytest.fixture
def path4():
    return make_graph(4, [(0, 1), (1, 2), (2, 3)], terminals=(0, 3))
