import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lazycg.domains import Hypercube, ProbabilitySimplex, SpanningTreePolytope, VertexList

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def small_domains():
    """Enumerable domains of every kind, for exhaustive checks."""
    return [
        ProbabilitySimplex(3),
        ProbabilitySimplex(5),
        Hypercube(2),
        Hypercube(4),
        SpanningTreePolytope.complete_graph(4),
        SpanningTreePolytope(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]),
        VertexList([(0, 0), (1, 0), (0, 1)]),
        VertexList([(1, 1, 0), (1, 0, 1), (0, 1, 1), (0, 0, 0)]),
    ]


def dag_domain():
    from lazycg.domains import ShortestPathPolytope

    edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
    return ShortestPathPolytope(5, edges, 0, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def all_pairs(vertices):
    return itertools.combinations(vertices, 2)
