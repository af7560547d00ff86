"""Optical network graph with per-link wavelength occupancy.

Fibers are directed links; every physical connection between two nodes is a
pair of unidirectional links of equal length. Wavelength occupancy of a link
is held as an integer bitmask (bit ``w`` set = wavelength ``w`` in use) and
exposed as a boolean vector through :attr:`Link.occupancy`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Sequence

import numpy as np

from .rng import SplitMix64


class TopologyError(ValueError):
    """Invalid topology configuration or malformed graph."""


@dataclass(slots=True)
class Link:
    id: int
    src: int
    dst: int
    length_km: float
    w_total: int
    used_mask: int = 0

    @property
    def occupancy(self) -> np.ndarray:
        """Boolean vector of length ``w_total``; True means the wavelength is in use."""
        return np.array([(self.used_mask >> w) & 1 for w in range(self.w_total)], dtype=bool)

    def is_free(self, wavelength: int) -> bool:
        return not (self.used_mask >> wavelength) & 1


class NetworkGraph:
    """Directed graph ``G(N, L, W_T, W_Q)`` of nodes and fiber links.

    Links are indexed by position in :attr:`links`. ``out_links[u]`` lists the
    ids of links leaving ``u`` in ascending order of (destination, id).
    """

    def __init__(
        self,
        n_nodes: int,
        links: Iterable[tuple[int, int, float]],
        w_total: int,
        w_quantum: int,
    ) -> None:
        if n_nodes < 1:
            raise TopologyError("graph needs at least one node")
        if w_total < 1:
            raise TopologyError("w_total must be positive")
        if not 0 <= w_quantum <= w_total:
            raise TopologyError("w_quantum must lie in [0, w_total]")
        self.n_nodes = n_nodes
        self.w_total = w_total
        self.w_quantum = w_quantum
        self.links: list[Link] = []
        for src, dst, length in links:
            if not (0 <= src < n_nodes and 0 <= dst < n_nodes):
                raise TopologyError(f"link {src}->{dst} references a node outside [0, {n_nodes})")
            if src == dst:
                raise TopologyError(f"self-loop at node {src}")
            if not length > 0:
                raise TopologyError(f"link {src}->{dst} has non-positive length {length}")
            self.links.append(Link(len(self.links), int(src), int(dst), float(length), w_total))
        self.out_links: list[list[int]] = [[] for _ in range(n_nodes)]
        for link in self.links:
            self.out_links[link.src].append(link.id)
        for ids in self.out_links:
            ids.sort(key=lambda i: (self.links[i].dst, i))
        self._check_pairing()

    @property
    def nodes(self) -> list[int]:
        return list(range(self.n_nodes))

    @property
    def quantum_band(self) -> range:
        return range(0, self.w_quantum)

    @property
    def classical_band(self) -> range:
        return range(self.w_quantum, self.w_total)

    def _check_pairing(self) -> None:
        pending: dict[tuple[int, int, float], int] = {}
        for link in self.links:
            key = (link.src, link.dst, link.length_km)
            rev = (link.dst, link.src, link.length_km)
            if pending.get(rev, 0):
                pending[rev] -= 1
            else:
                pending[key] = pending.get(key, 0) + 1
        unmatched = [k for k, v in pending.items() if v]
        if unmatched:
            src, dst, length = unmatched[0]
            raise TopologyError(
                f"link {src}->{dst} ({length} km) has no reverse link of identical length"
            )

    def neighbours(self, node: int) -> set[int]:
        return {self.links[i].dst for i in self.out_links[node]}

    def degree(self, node: int) -> int:
        """Number of distinct neighbours (out-degree over node pairs)."""
        return len(self.neighbours(node))

    def is_connected(self) -> bool:
        if self.n_nodes == 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.neighbours(u):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n_nodes

    def check_invariants(self, min_degree: int = 1) -> None:
        """Raise :class:`TopologyError` unless pairing and degree constraints hold."""
        self._check_pairing()
        for node in range(self.n_nodes):
            if self.degree(node) < min_degree:
                raise TopologyError(f"node {node} has degree {self.degree(node)} < {min_degree}")

    # -- occupancy -------------------------------------------------------

    def occupancy_matrix(self) -> np.ndarray:
        """``(n_links, w_total)`` boolean occupancy snapshot."""
        out = np.zeros((len(self.links), self.w_total), dtype=bool)
        for link in self.links:
            mask = link.used_mask
            while mask:
                low = mask & -mask
                out[link.id, low.bit_length() - 1] = True
                mask ^= low
        return out

    def used_on_path(self, path: Sequence[int]) -> int:
        """Bitmask of wavelengths in use on any link of ``path``."""
        used = 0
        links = self.links
        for lid in path:
            used |= links[lid].used_mask
        return used

    def occupy(self, path: Sequence[int], wavelength: int) -> None:
        """Claim ``wavelength`` on every link of ``path``; all or nothing."""
        bit = 1 << wavelength
        for lid in path:
            if self.links[lid].used_mask & bit:
                raise TopologyError(f"wavelength {wavelength} already in use on link {lid}")
        for lid in path:
            self.links[lid].used_mask |= bit

    def vacate(self, path: Sequence[int], wavelength: int) -> None:
        """Release ``wavelength`` on every link of ``path``; all or nothing."""
        bit = 1 << wavelength
        for lid in path:
            if not self.links[lid].used_mask & bit:
                raise TopologyError(f"wavelength {wavelength} is not in use on link {lid}")
        for lid in path:
            self.links[lid].used_mask &= ~bit

    def fresh_copy(self) -> "NetworkGraph":
        """Same structure, all wavelengths free."""
        return NetworkGraph(
            self.n_nodes,
            [(l.src, l.dst, l.length_km) for l in self.links],
            self.w_total,
            self.w_quantum,
        )

    def structure_key(self) -> tuple:
        return (
            self.n_nodes,
            self.w_total,
            self.w_quantum,
            tuple((l.src, l.dst, l.length_km) for l in self.links),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkGraph):
            return NotImplemented
        return self.structure_key() == other.structure_key() and [
            l.used_mask for l in self.links
        ] == [l.used_mask for l in other.links]

    def __repr__(self) -> str:
        return (
            f"NetworkGraph(nodes={self.n_nodes}, links={len(self.links)}, "
            f"wt={self.w_total}, wq={self.w_quantum})"
        )


def wavelength_free_on_path(graph: NetworkGraph, path: Sequence[int], wavelength: int) -> bool:
    """True iff ``wavelength`` is unoccupied on every link of ``path``."""
    return not (graph.used_on_path(path) >> wavelength) & 1


# -- random generation ----------------------------------------------------


@dataclass(frozen=True)
class TopologyConfig:
    n_nodes_min: int = 5
    n_nodes_max: int = 10
    link_probability: float = 0.5
    length_min_km: float = 10.0
    length_max_km: float = 20.0
    min_degree: int = 2
    seed: int = 0
    w_total: int = 80
    w_quantum: int = 40
    max_attempts: int = field(default=1000, compare=False)

    def validate(self) -> None:
        if self.n_nodes_min < 2 or self.n_nodes_min > self.n_nodes_max:
            raise TopologyError("need 2 <= n_nodes_min <= n_nodes_max")
        if not 0.0 <= self.link_probability <= 1.0:
            raise TopologyError("link_probability must lie in [0, 1]")
        if not 0 < self.length_min_km <= self.length_max_km:
            raise TopologyError("need 0 < length_min_km <= length_max_km")
        if self.min_degree < 1:
            raise TopologyError("min_degree must be at least 1")
        if self.min_degree >= self.n_nodes_min:
            raise TopologyError(
                f"min_degree={self.min_degree} cannot be met with as few as "
                f"{self.n_nodes_min} nodes"
            )
        if not 0 <= self.w_quantum <= self.w_total:
            raise TopologyError("need 0 <= w_quantum <= w_total")


def _draw_candidate(config: TopologyConfig, rng: SplitMix64) -> NetworkGraph:
    n = rng.randint(config.n_nodes_min, config.n_nodes_max)
    adjacent = [set() for _ in range(n)]
    pairs: list[tuple[int, int, float]] = []

    def connect(a: int, b: int) -> None:
        length = rng.uniform(config.length_min_km, config.length_max_km)
        adjacent[a].add(b)
        adjacent[b].add(a)
        pairs.append((a, b, length))

    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < config.link_probability:
                connect(a, b)
    # degree repair: link deficient nodes to uniformly chosen non-neighbours
    for a in range(n):
        while len(adjacent[a]) < config.min_degree:
            options = [b for b in range(n) if b != a and b not in adjacent[a]]
            connect(a, rng.choice(options))

    links = []
    for a, b, length in pairs:
        links.append((a, b, length))
        links.append((b, a, length))
    return NetworkGraph(n, links, config.w_total, config.w_quantum)


def generate_random_topology(config: TopologyConfig) -> NetworkGraph:
    """Draw a random connected topology.

    The node count is uniform on ``[n_nodes_min, n_nodes_max]``; each
    unordered pair (visited in ascending order) is joined with probability
    ``link_probability`` by two opposite links of one uniform length. Nodes
    below ``min_degree`` then get links to uniformly chosen non-neighbours.
    Disconnected draws are rejected and redrawn from the same stream.
    """
    config.validate()
    rng = SplitMix64(config.seed)
    for _ in range(config.max_attempts):
        graph = _draw_candidate(config, rng)
        if graph.is_connected():
            return graph
    raise TopologyError(f"no connected topology after {config.max_attempts} attempts")


# -- plain-text adjacency format -------------------------------------------


def format_topology(graph: NetworkGraph) -> str:
    lines = [f"nodes={graph.n_nodes} wt={graph.w_total} wq={graph.w_quantum}"]
    lines.extend(f"{l.src} {l.dst} {l.length_km!r}" for l in graph.links)
    return "\n".join(lines) + "\n"


def parse_topology(text: str) -> NetworkGraph:
    rows = [(i, line.strip()) for i, line in enumerate(text.splitlines(), 1)]
    rows = [(i, line) for i, line in rows if line and not line.startswith("#")]
    if not rows:
        raise TopologyError("empty topology file")
    lineno, header = rows[0]
    try:
        fields = dict(item.split("=", 1) for item in header.split())
        n, wt, wq = int(fields.pop("nodes")), int(fields.pop("wt")), int(fields.pop("wq"))
    except (KeyError, ValueError) as exc:
        raise TopologyError(f"line {lineno}: bad header {header!r}") from exc
    if fields:
        raise TopologyError(f"line {lineno}: unknown header keys {sorted(fields)}")
    links = []
    for lineno, line in rows[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise TopologyError(f"line {lineno}: expected 'from to length_km', got {line!r}")
        try:
            links.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise TopologyError(f"line {lineno}: {exc}") from exc
    return NetworkGraph(n, links, wt, wq)


def write_topology(graph: NetworkGraph, path: str | FsPath) -> None:
    FsPath(path).write_text(format_topology(graph))


def read_topology(path: str | FsPath) -> NetworkGraph:
    return parse_topology(FsPath(path).read_text())
