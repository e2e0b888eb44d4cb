import numpy as np
import pytest

from sigmatch import Graph


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return Graph.from_adjacency(upper | upper.T)


@pytest.fixture
def rgraph():
    return random_graph
