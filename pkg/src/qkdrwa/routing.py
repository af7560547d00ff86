"""Path discovery over a :class:`~qkdrwa.topology.NetworkGraph`.

All path lists share one total order, :func:`path_key`: ascending length,
then fewer hops, then lexicographically smaller node sequence (and, for
parallel links, smaller link ids).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .topology import NetworkGraph

# Bound for all-simple-path enumeration on graphs larger than the paper's.
MAX_HOPS_CAP = 12


class RoutingError(ValueError):
    """Invalid routing query (unknown node, source equal to destination)."""


@dataclass(frozen=True, slots=True)
class Path:
    link_ids: tuple[int, ...]
    node_sequence: tuple[int, ...]
    length_km: float

    @property
    def hops(self) -> int:
        return len(self.link_ids)

    @property
    def source(self) -> int:
        return self.node_sequence[0]

    @property
    def dest(self) -> int:
        return self.node_sequence[-1]


def path_key(path: Path) -> tuple:
    return (path.length_km, len(path.link_ids), path.node_sequence, path.link_ids)


def make_path(graph: NetworkGraph, link_ids: Sequence[int]) -> Path:
    """Build a :class:`Path` from contiguous link ids, summing lengths in order."""
    if not link_ids:
        raise RoutingError("a path needs at least one link")
    links = graph.links
    nodes = [links[link_ids[0]].src]
    length = 0.0
    for lid in link_ids:
        link = links[lid]
        if link.src != nodes[-1]:
            raise RoutingError(f"link {lid} does not continue the path at node {nodes[-1]}")
        nodes.append(link.dst)
        length += link.length_km
    if len(set(nodes)) != len(nodes):
        raise RoutingError(f"node sequence {nodes} is not simple")
    return Path(tuple(link_ids), tuple(nodes), length)


def _check_endpoints(graph: NetworkGraph, s: int, d: int) -> None:
    for node in (s, d):
        if not 0 <= node < graph.n_nodes:
            raise RoutingError(f"node {node} is not in the graph (0..{graph.n_nodes - 1})")
    if s == d:
        raise RoutingError(f"source and destination are both {s}")


def _dijkstra(
    graph: NetworkGraph,
    s: int,
    d: int,
    banned_nodes: frozenset[int] | set[int] = frozenset(),
    banned_links: frozenset[int] | set[int] = frozenset(),
) -> Path | None:
    # Labels are full (length, hops, nodes, links) keys, so settling order
    # realises the tie rule directly.
    links = graph.links
    heap: list[tuple[float, int, tuple[int, ...], tuple[int, ...]]] = [(0.0, 0, (s,), ())]
    best: dict[int, tuple] = {s: heap[0]}
    settled: set[int] = set()
    while heap:
        label = heapq.heappop(heap)
        length, hops, nodes, lids = label
        u = nodes[-1]
        if u in settled:
            continue
        settled.add(u)
        if u == d:
            return Path(lids, nodes, length)
        for lid in graph.out_links[u]:
            if lid in banned_links:
                continue
            v = links[lid].dst
            if v in settled or v in banned_nodes:
                continue
            cand = (length + links[lid].length_km, hops + 1, nodes + (v,), lids + (lid,))
            if v not in best or cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, cand)
    return None


def shortest_path(graph: NetworkGraph, s: int, d: int) -> Path | None:
    """Minimum-length path from ``s`` to ``d`` (Dijkstra), or None if unreachable."""
    _check_endpoints(graph, s, d)
    return _dijkstra(graph, s, d)


def k_shortest_paths(graph: NetworkGraph, s: int, d: int, k: int) -> list[Path]:
    """Up to ``k`` loop-free paths in :func:`path_key` order (Yen's algorithm)."""
    _check_endpoints(graph, s, d)
    if k < 1:
        raise RoutingError("k must be at least 1")
    first = _dijkstra(graph, s, d)
    if first is None:
        return []
    found = [first]
    found_ids = {first.link_ids}
    candidates: dict[tuple[int, ...], Path] = {}
    while len(found) < k:
        prev = found[-1]
        for i in range(prev.hops):
            root = prev.link_ids[:i]
            banned_links = {p.link_ids[i] for p in found if p.hops > i and p.link_ids[:i] == root}
            banned_nodes = set(prev.node_sequence[:i])
            spur = _dijkstra(graph, prev.node_sequence[i], d, banned_nodes, banned_links)
            if spur is None:
                continue
            total = root + spur.link_ids
            if total not in found_ids and total not in candidates:
                candidates[total] = make_path(graph, total)
        if not candidates:
            break
        best = min(candidates.values(), key=path_key)
        del candidates[best.link_ids]
        found.append(best)
        found_ids.add(best.link_ids)
    return found


def all_simple_paths(graph: NetworkGraph, s: int, d: int, max_hops: int | None = None) -> list[Path]:
    """Every simple ``s``-``d`` path with at most ``max_hops`` links, sorted by :func:`path_key`.

    ``max_hops`` defaults to ``n_nodes - 1`` capped at :data:`MAX_HOPS_CAP`.
    """
    _check_endpoints(graph, s, d)
    if max_hops is None:
        max_hops = min(graph.n_nodes - 1, MAX_HOPS_CAP)
    if max_hops < 1:
        raise RoutingError("max_hops must be at least 1")
    links = graph.links
    out: list[Path] = []
    on_path = [False] * graph.n_nodes
    on_path[s] = True
    lids: list[int] = []
    nodes: list[int] = [s]

    # iterative DFS over (node, next out-link index) frames
    stack = [(s, 0)]
    while stack:
        u, idx = stack.pop()
        outs = graph.out_links[u]
        if idx < len(outs) and len(lids) < max_hops:
            stack.append((u, idx + 1))
            lid = outs[idx]
            v = links[lid].dst
            if on_path[v]:
                continue
            if v == d:
                lids.append(lid)
                nodes.append(v)
                length = 0.0
                for x in lids:
                    length += links[x].length_km
                out.append(Path(tuple(lids), tuple(nodes), length))
                lids.pop()
                nodes.pop()
                continue
            on_path[v] = True
            lids.append(lid)
            nodes.append(v)
            stack.append((v, 0))
        else:
            if u != s:
                on_path[u] = False
                lids.pop()
                nodes.pop()
    out.sort(key=path_key)
    return out
