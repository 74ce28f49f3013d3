import numpy as np
import pytest

from scaled_consensus import ALParams, WeightedGraph

# six-agent unit-weight topology of the first bundled example
EX1_WEIGHTS = np.array(
    [
        [0, 1, 1, 1, 0, 0],
        [1, 0, 0, 1, 0, 0],
        [1, 0, 0, 0, 1, 1],
        [1, 1, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 1],
        [0, 0, 1, 0, 1, 0],
    ],
    dtype=float,
)

# weighted digraph of the second bundled example (detail-balanced)
EX2_WEIGHTS = np.array(
    [
        [0, 0.2, 0.2, 0, 0, 0],
        [0.4, 0, 0.2, 0, 0, 0],
        [1, 0.5, 0, 2, 0, 0],
        [0, 0, 2, 0, 0.8, 0.4],
        [0, 0, 0, 0.4, 0, 0.4],
        [0, 0, 0, 0.4, 0.8, 0],
    ]
)

EX2_BALANCE = (10.0, 5.0, 2.0, 2.0, 4.0, 2.0)


@pytest.fixture
def ex1_graph():
    return WeightedGraph(EX1_WEIGHTS)


@pytest.fixture
def ex2_graph():
    return WeightedGraph(EX2_WEIGHTS, directed=True)


@pytest.fixture
def gal_params():
    return ALParams(rho=2.0, kappa1=1.0, kappa2=1.0, gamma1=(1, 3), gamma2=(5, 3))


@pytest.fixture
def dp_params():
    return ALParams(rho=0.0, kappa1=1.0, kappa2=1.0, gamma1=(1, 3), gamma2=(5, 3))


def random_connected_graph(rng: np.random.Generator, n: int) -> WeightedGraph:
    """Random undirected weighted graph, resampled until connected."""
    from scaled_consensus import is_connected

    while True:
        mask = rng.random((n, n)) < 0.55
        weights = np.where(mask, rng.uniform(0.2, 2.0, (n, n)), 0.0)
        weights = np.triu(weights, k=1)
        weights = weights + weights.T
        g = WeightedGraph(weights)
        if is_connected(g):
            return g
