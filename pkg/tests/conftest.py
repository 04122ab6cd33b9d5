"""Shared fixtures and independent numeric oracles.

The oracles here are built straight from edge lists with plain numpy (dense
Laplacian pseudoinverse, brute-force scans), never through the package's own
solver paths, so they stay independent of what they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from germinet import build_graph

BARBELL_EDGES = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def c4():
    return build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def k4():
    return build_graph([(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def barbell():
    """Two triangles joined by the bridge (2, 3)."""
    return build_graph(BARBELL_EDGES)


def dense_laplacian(g) -> np.ndarray:
    """Laplacian assembled edge by edge, independent of the CSR storage."""
    lap = np.zeros((g.n, g.n))
    for u, v in zip(g.edges_u, g.edges_v):
        lap[u, u] += 1
        lap[v, v] += 1
        lap[u, v] -= 1
        lap[v, u] -= 1
    return lap


def pairwise_resistance_oracle(g) -> np.ndarray:
    """Full pairwise effective resistance from the dense pseudoinverse."""
    lp = np.linalg.pinv(dense_laplacian(g))
    d = np.diag(lp)
    return d[:, None] + d[None, :] - 2.0 * lp


def random_connected_graph(rng, n, extra_edges):
    """Random spanning tree plus random extra edges: connected, simple."""
    edges = []
    order = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(i))
        edges.append((int(order[i]), int(order[j])))
    for _ in range(extra_edges):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u != v:
            edges.append((u, v))
    return build_graph(edges)


def brute_force_conductance(g, nodes) -> float:
    members = set(int(v) for v in nodes)
    cut = sum(
        1
        for u, v in zip(g.edges_u, g.edges_v)
        if (int(u) in members) != (int(v) in members)
    )
    vol = sum(g.degree(v) for v in members)
    return cut / min(vol, 2 * g.m - vol)
