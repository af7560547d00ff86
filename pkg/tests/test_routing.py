import math

import pytest

from conftest import brute_force_paths, undirected
from qkdrwa.rng import SplitMix64
from qkdrwa.routing import (
    RoutingError,
    all_simple_paths,
    k_shortest_paths,
    make_path,
    shortest_path,
)
from qkdrwa.topology import NetworkGraph


def as_tuples(paths):
    return [(p.length_km, p.hops, p.node_sequence, p.link_ids) for p in paths]


def random_graph(rng: SplitMix64) -> NetworkGraph:
    """Small random graph; half the time with integer lengths so ties are common."""
    n = rng.randint(2, 8)
    p = rng.uniform(0.2, 0.9)
    integer = rng.random() < 0.5
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                length = float(rng.randint(1, 3)) if integer else rng.uniform(1.0, 20.0)
                edges.append((a, b, length))
    return undirected(n, edges)


def test_triangle_examples(triangle):
    p = shortest_path(triangle, 0, 2)
    assert p.node_sequence == (0, 1, 2) and p.length_km == 20.0
    ksp = k_shortest_paths(triangle, 0, 2, 2)
    assert [q.node_sequence for q in ksp] == [(0, 1, 2), (0, 2)]
    assert [q.length_km for q in ksp] == [20.0, 25.0]
    assert [q.length_km for q in all_simple_paths(triangle, 0, 2, 3)] == [20.0, 25.0]


def test_single_link_and_unreachable():
    g = undirected(3, [(0, 1, 12.0)])
    p = shortest_path(g, 0, 1)
    assert p.length_km == 12.0 and p.hops == 1
    assert shortest_path(g, 0, 2) is None
    assert k_shortest_paths(g, 0, 2, 3) == []
    assert all_simple_paths(g, 0, 2) == []


def test_k1_equals_shortest(triangle):
    assert k_shortest_paths(triangle, 2, 0, 1) == [shortest_path(triangle, 2, 0)]


def test_max_hops_one_is_direct_links(triangle):
    paths = all_simple_paths(triangle, 0, 2, max_hops=1)
    assert [p.node_sequence for p in paths] == [(0, 2)]


def test_complete_five_node_count():
    g = undirected(5, [(a, b, 1.0 + a + 2 * b) for a in range(5) for b in range(a + 1, 5)])
    for s in range(5):
        for d in range(5):
            if s != d:
                assert len(all_simple_paths(g, s, d, max_hops=4)) == 1 + 3 + 3 * 2 + 3 * 2 * 1


def test_tie_break_hops_then_nodes():
    # 0-3 direct (2 km) ties with 0-1-3 and 0-2-3 (1+1 km)
    g = undirected(4, [(0, 3, 2.0), (0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)])
    assert [p.node_sequence for p in all_simple_paths(g, 0, 3)][:3] == [(0, 3), (0, 1, 3), (0, 2, 3)]
    assert shortest_path(g, 0, 3).node_sequence == (0, 3)


def test_errors(triangle):
    with pytest.raises(RoutingError):
        shortest_path(triangle, 1, 1)
    with pytest.raises(RoutingError):
        k_shortest_paths(triangle, 0, 7, 2)
    with pytest.raises(RoutingError):
        k_shortest_paths(triangle, 0, 1, 0)
    with pytest.raises(RoutingError):
        make_path(triangle, [0, 0])


def test_path_invariants(triangle):
    for p in all_simple_paths(triangle, 0, 2):
        assert len(set(p.node_sequence)) == len(p.node_sequence)
        for lid, (a, b) in zip(p.link_ids, zip(p.node_sequence, p.node_sequence[1:])):
            assert (triangle.links[lid].src, triangle.links[lid].dst) == (a, b)
        assert math.isclose(p.length_km, sum(triangle.links[l].length_km for l in p.link_ids), rel_tol=1e-9)


def test_brute_force_oracle_200_graphs():
    """KSP and all-simple-paths equal brute-force enumeration, order included."""
    rng = SplitMix64(2024)
    checked = 0
    for _ in range(200):
        g = random_graph(rng)
        n = g.n_nodes
        for s in range(n):
            for d in range(n):
                if s == d:
                    continue
                oracle = brute_force_paths(g, s, d)
                assert as_tuples(all_simple_paths(g, s, d, max_hops=max(1, n - 1))) == oracle
                hop_cap = rng.randint(1, max(1, n - 1))
                assert as_tuples(all_simple_paths(g, s, d, max_hops=hop_cap)) == [
                    t for t in oracle if t[1] <= hop_cap
                ]
                k = rng.randint(1, 8)
                assert as_tuples(k_shortest_paths(g, s, d, k)) == oracle[:k]
                sp = shortest_path(g, s, d)
                assert (as_tuples([sp]) if sp else []) == oracle[:1]
                checked += 1
    assert checked > 1000
