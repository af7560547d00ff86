import itertools

import pytest

from qkdrwa.channel import LengthMetric, calibrated_params
from qkdrwa.topology import NetworkGraph


def brute_force_paths(graph: NetworkGraph, s: int, d: int, max_hops: int | None = None):
    """Every simple s-d path by enumerating ordered node subsets.

    Returns ``(length, hops, nodes, link_ids)`` tuples sorted by that tuple,
    lengths summed left to right.
    """
    n = graph.n_nodes
    if max_hops is None:
        max_hops = n - 1
    between: dict[tuple[int, int], list[int]] = {}
    for link in graph.links:
        between.setdefault((link.src, link.dst), []).append(link.id)
    middle = [v for v in range(n) if v not in (s, d)]
    found = []
    for r in range(0, min(len(middle), max_hops - 1) + 1):
        for perm in itertools.permutations(middle, r):
            nodes = (s, *perm, d)
            hops = [between.get((a, b), []) for a, b in zip(nodes, nodes[1:])]
            for lids in itertools.product(*hops):
                length = 0.0
                for lid in lids:
                    length += graph.links[lid].length_km
                found.append((length, len(lids), nodes, tuple(lids)))
    found.sort()
    return found


def undirected(n, edges, w_total=80, w_quantum=40):
    """Graph from ``(a, b, length)`` fiber pairs."""
    links = []
    for a, b, length in edges:
        links.append((a, b, length))
        links.append((b, a, length))
    return NetworkGraph(n, links, w_total, w_quantum)


@pytest.fixture
def triangle():
    # A=0, B=1, C=2
    return undirected(3, [(0, 1, 10.0), (1, 2, 10.0), (0, 2, 25.0)])


@pytest.fixture(scope="session")
def params_effective():
    return calibrated_params(length_metric=LengthMetric.EFFECTIVE)


@pytest.fixture(scope="session")
def params_actual():
    return calibrated_params(length_metric=LengthMetric.ACTUAL)


_CRITERIA: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Remember one acceptance verdict for the terminal summary."""
    _CRITERIA[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
