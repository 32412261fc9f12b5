import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plankcover import UnitVector, angular_distance, build_angle_graph, compute_alpha, extract_order
from plankcover.ordering import AngleGraph, default_threshold, infer_beta


@pytest.mark.parametrize("beta, alpha", [(7 / 4, 3 / 4), (0.0, 1 / 6), (1.0, 1 / 2)])
def test_compute_alpha(beta, alpha):
    assert compute_alpha(beta) == pytest.approx(alpha, abs=1e-15)


def test_default_threshold_clamps_beta():
    assert infer_beta(10, 0.1) == 1.0
    assert infer_beta(10**6, 0.1) == 2.0
    assert infer_beta(50, 0.1) == pytest.approx(math.log(50) / math.log(10))
    assert default_threshold(50, 0.1) == pytest.approx(0.1 ** compute_alpha(math.log(50) / math.log(10)))
    assert default_threshold(450, 0.1) == pytest.approx(0.1 ** compute_alpha(2.0))


def test_angle_graph_examples():
    assert build_angle_graph([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 0.1).edges() == set()
    g = build_angle_graph([(0, 0, 1), (math.sin(0.01), 0, math.cos(0.01))], 0.1)
    assert g.edges() == {(0, 1)}
    g = build_angle_graph([(0, 0, 1)] * 100, 0.3)
    assert all(len(a) == 99 for a in g.adjacency)


def test_tree_and_dense_paths_agree():
    rng = np.random.default_rng(0)
    N = rng.standard_normal((700, 3))
    N /= np.linalg.norm(N, axis=1, keepdims=True)
    N = np.vstack([N, N[:50]])  # duplicates
    for theta in (0.05, 0.2, 1.0):
        assert build_angle_graph(N, theta, "dense").adjacency == build_angle_graph(N, theta, "tree").adjacency


def test_edges_follow_the_angle_rule():
    rng = np.random.default_rng(1)
    normals = [UnitVector(*v) for v in rng.standard_normal((60, 3))]
    g = build_angle_graph(normals, 0.6)
    edges = g.edges()
    for u, v in itertools.combinations(range(60), 2):
        assert ((u, v) in edges) == (angular_distance(normals[u], normals[v]) < 0.6)


def _graph(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return AngleGraph(n, tuple(tuple(sorted(a)) for a in adj), 0.1)


def test_extract_order_examples():
    order, chunks = extract_order(_graph(4, []))
    assert order == [0, 1, 2, 3] and [c.indices for c in chunks] == [(0,), (1,), (2,), (3,)]
    order, chunks = extract_order(_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert [c.indices for c in chunks] == [(0, 1, 2)]
    trace = []
    order, chunks = extract_order(_graph(5, [(0, 1), (1, 2), (0, 2), (3, 4)]), trace)
    assert [c.indices for c in chunks] == [(0, 1, 2), (3, 4)]
    assert trace == [(0, 2, 1.6), (3, 1, 1.0)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 80), st.floats(0.05, 1.2), st.integers(0, 2**31))
def test_extract_order_invariants(k, theta, seed):
    rng = np.random.default_rng(seed)
    N = rng.standard_normal((k, 3))
    N /= np.linalg.norm(N, axis=1, keepdims=True)
    g = build_angle_graph(N, theta)
    trace = []
    order, chunks = extract_order(g, trace)
    assert sorted(order) == list(range(k))
    assert [i for c in chunks for i in c.indices] == order
    for v, deg, avg in trace:
        assert deg >= avg
    for c in chunks:
        for a, b in itertools.combinations(c.indices, 2):
            ang = math.acos(min(1.0, max(-1.0, float(N[a] @ N[b]))))
            assert ang < 2 * theta
    assert extract_order(build_angle_graph(N, theta))[0] == order
