"""Shared helpers for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from specsync import WeightedGraph, VertexPartition


def random_connected_graph(rng, n_max=20, n_min=3, p=0.5, w_range=(0.5, 1.5)):
    """Random connected weighted graph; resamples until connected."""
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j, rng.uniform(*w_range)))
        try:
            return WeightedGraph(n, edges)
        except ValueError:
            continue


def random_partition(rng, n, k=None):
    """Random partition with every cell nonempty and some cell of size >= 2."""
    if k is None:
        k = int(rng.integers(2, max(3, n // 2 + 1)))
    while True:
        assignment = rng.integers(0, k, size=n)
        counts = np.bincount(assignment, minlength=k)
        if np.all(counts > 0) and np.any(counts >= 2):
            return VertexPartition(assignment, k)


@pytest.fixture
def path3():
    """Path graph 0-1-2 with unit weights."""
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def k23():
    """Complete bipartite K_{2,3}, unit weights, sides {0,1} and {2,3,4}."""
    edges = [(i, j, 1.0) for i in (0, 1) for j in (2, 3, 4)]
    return WeightedGraph(5, edges)
