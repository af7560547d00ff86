"""Experiment campaigns under static traffic.

One *unit* of work is a (topology index, replication index) pair. Within a
unit every algorithm spec sees the same topology and the same request list
(paired design). Request lists are drawn from a seed that depends only on
the unit, so the list for ``n`` requests is a prefix of the list for any
larger ``n`` at the same classical load; the sweep exploits that by serving
the longest list once and reading results at each requested count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import ChannelParams, LengthMetric, calibrated_params
from .rng import TAG_REQUEST_KINDS, TAG_REQUEST_PAIRS, TAG_TOPOLOGY, SplitMix64, derive_seed
from .rwa import (
    AlgorithmSpec,
    Blocked,
    Heuristic,
    NetworkState,
    PathCache,
    Request,
    RequestKind,
    serve_request,
)
from .topology import NetworkGraph, TopologyConfig, generate_random_topology

TAG_REPLICATION = 4
Z_95 = 1.96


@dataclass(frozen=True)
class ChannelInputs:
    """Physical parameters before noise calibration."""

    alpha_q_db_per_km: float = 0.32
    alpha_c_db_per_km: float = 0.17
    p_tx_quantum: float = 1.0
    qsnr_threshold_db: float = 15.0
    snr_target_db: float = 20.0
    n_ref: float = 1.0
    length_metric: LengthMetric = LengthMetric.EFFECTIVE

    def calibrate(self) -> ChannelParams:
        return calibrated_params(
            alpha_q_db_per_km=self.alpha_q_db_per_km,
            alpha_c_db_per_km=self.alpha_c_db_per_km,
            p_tx_quantum=self.p_tx_quantum,
            qsnr_threshold_db=self.qsnr_threshold_db,
            snr_target_db=self.snr_target_db,
            n_ref=self.n_ref,
            length_metric=LengthMetric(self.length_metric),
        )


def default_algorithm_specs() -> tuple[AlgorithmSpec, ...]:
    return tuple(AlgorithmSpec(h, pc) for h in Heuristic for pc in (False, True))


@dataclass(frozen=True)
class ScenarioConfig:
    topology_count: int = 10
    replications_per_topology: int = 500
    request_counts: tuple[int, ...] = tuple(range(10, 101, 10))
    classical_load: float = 0.0
    algorithm_specs: tuple[AlgorithmSpec, ...] = field(default_factory=default_algorithm_specs)
    seed: int = 1
    topology_config: TopologyConfig = field(default_factory=TopologyConfig)
    channel_base: ChannelInputs = field(default_factory=ChannelInputs)

    def __post_init__(self) -> None:
        if self.topology_count < 1:
            raise ValueError("topology_count must be at least 1")
        if self.replications_per_topology < 1:
            raise ValueError("replications_per_topology must be at least 1")
        if not self.request_counts or min(self.request_counts) < 1:
            raise ValueError("request_counts must be non-empty and positive")
        if not 0.0 <= self.classical_load <= 1.0:
            raise ValueError("classical_load must lie in [0, 1]")
        if not self.algorithm_specs:
            raise ValueError("algorithm_specs must not be empty")
        self.topology_config.validate()

    def topology(self, index: int) -> NetworkGraph:
        seed = derive_seed(self.seed, TAG_TOPOLOGY, index)
        return generate_random_topology(replace(self.topology_config, seed=seed))

    def request_seed(self, topology_index: int, replication_index: int) -> int:
        return derive_seed(self.seed, TAG_REPLICATION, topology_index, replication_index)


@dataclass
class ReplicationResult:
    blocked: int
    total: int
    quantum_qsnr_db_values: list[float] = field(default_factory=list)

    @property
    def blocking_ratio(self) -> float:
        return self.blocked / self.total if self.total else 0.0


@dataclass(frozen=True)
class AggregateMetrics:
    blocking_ratio_mean: float
    blocking_ratio_ci95: float
    qsnr_db_mean: float | None
    qsnr_db_ci95: float | None
    n_samples: int
    n_qsnr: int = 0


@dataclass(frozen=True)
class RawRecord:
    spec: AlgorithmSpec
    request_count: int
    classical_load: float
    topology: int
    replication: int
    blocked: int
    total: int
    n_quantum: int
    qsnr_db_mean: float | None
    qsnr_db_m2: float
    qsnr_db_min: float | None


@dataclass
class SweepResult:
    length_metric: LengthMetric
    table: dict[tuple[AlgorithmSpec, int, float], AggregateMetrics]
    raw: list[RawRecord]

    def metrics(self, spec: AlgorithmSpec, request_count: int, classical_load: float) -> AggregateMetrics:
        return self.table[(spec, request_count, classical_load)]


# -- requests ------------------------------------------------------------------


def classical_count(n: int, classical_load: float) -> int:
    """Round-half-up of ``n * classical_load``."""
    return int(math.floor(n * classical_load + 0.5))


def generate_requests(graph: NetworkGraph, n: int, classical_load: float, seed: int) -> list[Request]:
    """``n`` requests over uniformly drawn distinct node pairs.

    Pairs come from one stream and the positions of the classical requests
    from an independent shuffle, so at a fixed load the pair sequence is
    prefix-stable in ``n``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= classical_load <= 1.0:
        raise ValueError("classical_load must lie in [0, 1]")
    pair_rng = SplitMix64(derive_seed(seed, TAG_REQUEST_PAIRS))
    kind_rng = SplitMix64(derive_seed(seed, TAG_REQUEST_KINDS))
    nodes = graph.n_nodes
    n_classical = classical_count(n, classical_load)
    kinds = [RequestKind.CLASSICAL_PURE] * n_classical + [RequestKind.QUANTUM] * (n - n_classical)
    kind_rng.shuffle(kinds)
    requests = []
    for i in range(n):
        s = pair_rng.randbelow(nodes)
        d = pair_rng.randbelow(nodes - 1)
        if d >= s:
            d += 1
        requests.append(Request(i, s, d, kinds[i]))
    return requests


# -- replications --------------------------------------------------------------


Observer = Callable[[NetworkState, int], None]


def run_checkpoints(
    graph: NetworkGraph,
    requests: Sequence[Request],
    spec: AlgorithmSpec,
    params: ChannelParams,
    checkpoints: Iterable[int],
    paths: PathCache | None = None,
    observer: Observer | None = None,
) -> dict[int, ReplicationResult]:
    """Serve ``requests`` in order, reporting results after each checkpoint prefix.

    QSNR values are those of the quantum lightpaths alive at the checkpoint,
    recomputed from the state at that moment.
    """
    marks = sorted(set(checkpoints))
    if marks and (marks[0] < 0 or marks[-1] > len(requests)):
        raise ValueError("checkpoints must lie within the request list")
    state = NetworkState(graph, params, paths)
    results: dict[int, ReplicationResult] = {}
    blocked = 0
    served = 0

    def record() -> None:
        values = [state.current_qsnr_db(lp.id) for lp in state.quantum_lightpaths()]
        results[served] = ReplicationResult(blocked, served, values)
        if observer is not None:
            observer(state, served)

    todo = iter(marks)
    nxt = next(todo, None)
    while nxt == 0:
        record()
        nxt = next(todo, None)
    for request in requests:
        if nxt is None:
            break
        if isinstance(serve_request(state, request, spec), Blocked):
            blocked += 1
        served += 1
        while nxt == served:
            record()
            nxt = next(todo, None)
    return results


def run_replication(
    graph: NetworkGraph,
    requests: Sequence[Request],
    spec: AlgorithmSpec,
    params: ChannelParams,
    paths: PathCache | None = None,
) -> ReplicationResult:
    """Serve every request on a fresh state; blocking counts whole requests."""
    return run_checkpoints(graph, requests, spec, params, [len(requests)], paths)[len(requests)]


# -- statistics ------------------------------------------------------------------


def confidence_interval_95(samples: Sequence[float]) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width, ``1.96 * s / sqrt(n)``."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("confidence interval of an empty sample")
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, 0.0
    return mean, float(Z_95 * arr.std(ddof=1) / math.sqrt(arr.size))


@dataclass
class _Pooled:
    """Chan et al. pairwise merge of (count, mean, M2)."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def merge(self, n: int, mean: float, m2: float) -> None:
        if n == 0:
            return
        total = self.n + n
        delta = mean - self.mean
        self.mean += delta * n / total
        self.m2 += m2 + delta * delta * self.n * n / total
        self.n = total

    def interval(self) -> tuple[float | None, float | None]:
        if self.n == 0:
            return None, None
        if self.n == 1:
            return self.mean, 0.0
        return self.mean, Z_95 * math.sqrt(self.m2 / (self.n - 1)) / math.sqrt(self.n)


def aggregate(records: Sequence[RawRecord]) -> dict[tuple[AlgorithmSpec, int, float], AggregateMetrics]:
    """Reduce raw records (in the given order) to per-point metrics."""
    ratios: dict[tuple, list[float]] = {}
    pooled: dict[tuple, _Pooled] = {}
    for r in records:
        key = (r.spec, r.request_count, r.classical_load)
        ratios.setdefault(key, []).append(r.blocked / r.total)
        pooled.setdefault(key, _Pooled()).merge(r.n_quantum, r.qsnr_db_mean or 0.0, r.qsnr_db_m2)
    table = {}
    for key, values in ratios.items():
        mean, half = confidence_interval_95(values)
        q_mean, q_half = pooled[key].interval()
        table[key] = AggregateMetrics(mean, half, q_mean, q_half, len(values), pooled[key].n)
    return table


# -- sweeps ------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _topology_and_paths(config: ScenarioConfig, index: int) -> tuple[NetworkGraph, PathCache]:
    graph = config.topology(index)
    return graph, PathCache(graph)


def _run_unit(
    config: ScenarioConfig,
    params: ChannelParams,
    topology_index: int,
    replication_index: int,
    points: tuple[tuple[int, float], ...],
    observer: Observer | None = None,
) -> list[RawRecord]:
    graph, paths = _topology_and_paths(config, topology_index)
    seed = config.request_seed(topology_index, replication_index)
    by_load: dict[float, list[int]] = {}
    for count, load in points:
        by_load.setdefault(load, []).append(count)
    out: list[RawRecord] = []
    for load, counts in by_load.items():
        longest = generate_requests(graph, max(counts), load, seed)
        # share one pass when every shorter list is a prefix of the longest
        groups: list[tuple[list[Request], list[int]]]
        if all(generate_requests(graph, n, load, seed) == longest[:n] for n in counts):
            groups = [(longest, counts)]
        else:
            groups = [(generate_requests(graph, n, load, seed), [n]) for n in counts]
        for spec in config.algorithm_specs:
            for requests, marks in groups:
                results = run_checkpoints(graph, requests, spec, params, marks, paths, observer)
                for n in marks:
                    res = results[n]
                    vals = np.asarray(res.quantum_qsnr_db_values)
                    mean = float(vals.mean()) if vals.size else None
                    m2 = float(((vals - mean) ** 2).sum()) if vals.size else 0.0
                    out.append(
                        RawRecord(
                            spec, n, load, topology_index, replication_index,
                            res.blocked, res.total, int(vals.size), mean, m2,
                            float(vals.min()) if vals.size else None,
                        )
                    )
    return out


def _unit_task(args) -> list[RawRecord]:
    return _run_unit(*args)


def _sweep(
    config: ScenarioConfig,
    points: tuple[tuple[int, float], ...],
    threads: int = 1,
    observer: Observer | None = None,
) -> SweepResult:
    params = config.channel_base.calibrate()
    units = [
        (config, params, t, r, points)
        for t in range(config.topology_count)
        for r in range(config.replications_per_topology)
    ]
    if threads <= 1:
        chunks = [_run_unit(*u, observer=observer) for u in units]
    else:
        if observer is not None:
            raise ValueError("an observer requires threads=1")
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_unit_task, units, chunksize=max(1, config.replications_per_topology // 4)))
    raw = [rec for chunk in chunks for rec in chunk]
    # canonical order, independent of how the work was split
    spec_rank = {s: i for i, s in enumerate(config.algorithm_specs)}
    raw.sort(key=lambda r: (spec_rank[r.spec], r.request_count, r.classical_load, r.topology, r.replication))
    return SweepResult(params.length_metric, aggregate(raw), raw)


def run_sweep(config: ScenarioConfig, threads: int = 1, observer: Observer | None = None) -> SweepResult:
    """Blocking ratio and QSNR for every (spec, request count) at the configured load."""
    points = tuple((n, config.classical_load) for n in config.request_counts)
    return _sweep(config, points, threads, observer)


def run_mixed_sweep(
    config: ScenarioConfig,
    total_requests: int = 90,
    load_points: Sequence[float] = tuple(i / 10 for i in range(11)),
    threads: int = 1,
    observer: Observer | None = None,
) -> SweepResult:
    """Like :func:`run_sweep` with the request count fixed and the classical load varied."""
    if total_requests < 1:
        raise ValueError("total_requests must be positive")
    if any(not 0.0 <= x <= 1.0 for x in load_points):
        raise ValueError("load points must lie in [0, 1]")
    points = tuple((total_requests, float(x)) for x in load_points)
    return _sweep(config, points, threads, observer)
