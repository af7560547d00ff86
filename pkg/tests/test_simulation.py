import math
from dataclasses import replace

import numpy as np
import pytest

import qkdrwa.simulation as sim
from conftest import undirected
from qkdrwa.rwa import AlgorithmSpec, Heuristic, RequestKind, Request
from qkdrwa.simulation import (
    ScenarioConfig,
    classical_count,
    confidence_interval_95,
    generate_requests,
    run_checkpoints,
    run_mixed_sweep,
    run_replication,
    run_sweep,
)
from qkdrwa.topology import TopologyConfig

TINY = ScenarioConfig(
    topology_count=2,
    replications_per_topology=3,
    request_counts=(5, 10, 15),
    algorithm_specs=(AlgorithmSpec(Heuristic.KSPFF, False), AlgorithmSpec(Heuristic.KSPFF, True),
                     AlgorithmSpec(Heuristic.MQDO, True)),
    seed=11,
    topology_config=TopologyConfig(n_nodes_min=5, n_nodes_max=7),
)


@pytest.fixture(scope="module")
def graph():
    return TINY.topology(0)


def test_generate_requests_examples(graph):
    assert all(r.kind is RequestKind.QUANTUM for r in generate_requests(graph, 90, 0.0, 1))
    assert all(r.kind is RequestKind.CLASSICAL_PURE for r in generate_requests(graph, 90, 1.0, 1))
    assert generate_requests(graph, 10, 0.5, 4) == generate_requests(graph, 10, 0.5, 4)
    assert generate_requests(graph, 10, 0.5, 4) != generate_requests(graph, 10, 0.5, 5)
    reqs = generate_requests(graph, 500, 0.3, 8)
    assert sum(r.kind is RequestKind.CLASSICAL_PURE for r in reqs) == 150
    assert all(r.source != r.dest and 0 <= r.source < graph.n_nodes and 0 <= r.dest < graph.n_nodes for r in reqs)
    assert generate_requests(graph, 0, 0.5, 1) == []


def test_pairs_uniform_over_distinct_pairs(graph):
    n = graph.n_nodes
    reqs = generate_requests(graph, 20000, 0.0, 3)
    counts = np.zeros((n, n))
    for r in reqs:
        counts[r.source, r.dest] += 1
    expected = 20000 / (n * (n - 1))
    off = counts[~np.eye(n, dtype=bool)]
    # chi-square with n(n-1)-1 dof; 99.9% bound is generous for n <= 7
    chi2 = ((off - expected) ** 2 / expected).sum()
    assert chi2 < 80


def test_request_prefix_property(graph):
    long = generate_requests(graph, 100, 0.0, 9)
    assert generate_requests(graph, 40, 0.0, 9) == long[:40]


def test_classical_rounding():
    assert classical_count(5, 0.5) == 3
    assert classical_count(90, 0.7) == 63
    assert classical_count(10, 0.25) == 3
    assert classical_count(10, 0.24) == 2


def test_run_replication_examples(params_effective):
    g = undirected(3, [(0, 1, 12.0), (1, 2, 14.0)], w_total=6, w_quantum=2)
    res = run_replication(g, [], AlgorithmSpec(), params_effective)
    assert (res.blocked, res.total, res.quantum_qsnr_db_values) == (0, 0, [])
    res = run_replication(g, [Request(0, 0, 1)], AlgorithmSpec(), params_effective)
    assert res.blocked == 0 and res.total == 1 and len(res.quantum_qsnr_db_values) == 1
    assert res.quantum_qsnr_db_values[0] >= 15.0
    # only two quantum wavelengths across the 0-1 cut
    reqs = [Request(i, 0, 1) for i in range(3)]
    res = run_replication(g, reqs, AlgorithmSpec(), params_effective)
    assert res.blocked == 1 and res.total == 3


def test_checkpoints_match_separate_runs(params_effective, graph):
    reqs = generate_requests(graph, 30, 0.2, 5)
    spec = AlgorithmSpec(Heuristic.MQCCO, False)
    marks = run_checkpoints(graph, reqs, spec, params_effective, [10, 20, 30])
    for n in (10, 20, 30):
        alone = run_replication(graph, reqs[:n], spec, params_effective)
        assert (alone.blocked, alone.total) == (marks[n].blocked, marks[n].total)
        assert alone.quantum_qsnr_db_values == marks[n].quantum_qsnr_db_values


def test_confidence_interval_examples():
    assert confidence_interval_95([5, 5, 5, 5]) == (5.0, 0.0)
    mean, half = confidence_interval_95([0, 1])
    assert mean == 0.5 and half == pytest.approx(1.96 * (1 / math.sqrt(2)) / math.sqrt(2))
    # sample sd of [0, 1] is 1/sqrt(2), so the half-width is 1.96 / 2 (0.6930 would need the population sd)
    assert half == pytest.approx(0.98, abs=1e-12)
    assert confidence_interval_95([3.25]) == (3.25, 0.0)
    with pytest.raises(ValueError):
        confidence_interval_95([])


def test_single_sample_sweep():
    cfg = replace(TINY, topology_count=1, replications_per_topology=1, algorithm_specs=(AlgorithmSpec(),))
    result = run_sweep(cfg)
    for m in result.table.values():
        assert m.blocking_ratio_ci95 == 0.0 and m.n_samples == 1


@pytest.fixture(scope="module")
def tiny_result():
    return run_sweep(TINY)


def test_sweep_mean_identity_and_bounds(tiny_result):
    for (spec, n, load), m in tiny_result.table.items():
        recs = [r for r in tiny_result.raw if (r.spec, r.request_count, r.classical_load) == (spec, n, load)]
        assert len(recs) == m.n_samples == 6
        assert m.blocking_ratio_mean == pytest.approx(sum(r.blocked for r in recs) / sum(r.total for r in recs))
        assert 0.0 <= m.blocking_ratio_mean <= 1.0


def test_pooled_qsnr_matches_direct(tiny_result, params_effective):
    spec = TINY.algorithm_specs[2]
    values = []
    for t in range(TINY.topology_count):
        g = TINY.topology(t)
        for r in range(TINY.replications_per_topology):
            reqs = generate_requests(g, 15, 0.0, TINY.request_seed(t, r))
            values += run_replication(g, reqs, spec, params_effective).quantum_qsnr_db_values
    m = tiny_result.metrics(spec, 15, 0.0)
    assert m.n_qsnr == len(values)
    assert m.qsnr_db_mean == pytest.approx(np.mean(values), rel=1e-12)
    assert m.qsnr_db_ci95 == pytest.approx(1.96 * np.std(values, ddof=1) / math.sqrt(len(values)), rel=1e-9)
    assert min(values) >= 15.0 - 1e-9


def test_paired_design(monkeypatch):
    seen = {}
    real = sim.run_checkpoints

    def spy(graph, requests, spec, params, checkpoints, paths=None, observer=None):
        seen.setdefault(tuple(requests), set()).add(spec)
        return real(graph, requests, spec, params, checkpoints, paths, observer)

    monkeypatch.setattr(sim, "run_checkpoints", spy)
    run_sweep(TINY)
    assert len(seen) == TINY.topology_count * TINY.replications_per_topology
    assert all(specs == set(TINY.algorithm_specs) for specs in seen.values())


def test_determinism_and_threads(tiny_result):
    again = run_sweep(TINY)
    assert again.table == tiny_result.table and again.raw == tiny_result.raw
    parallel = run_sweep(TINY, threads=2)
    assert parallel.table == tiny_result.table and parallel.raw == tiny_result.raw


def test_mixed_sweep_consistency(tiny_result):
    mixed = run_mixed_sweep(TINY, total_requests=15, load_points=[0.0])
    for spec in TINY.algorithm_specs:
        assert mixed.metrics(spec, 15, 0.0) == tiny_result.metrics(spec, 15, 0.0)
    grid = run_mixed_sweep(replace(TINY, replications_per_topology=1), 10, [i / 10 for i in range(11)])
    for spec in TINY.algorithm_specs:
        rows = [k for k in grid.table if k[0] == spec]
        assert len(rows) == 11
        assert grid.metrics(spec, 10, 1.0).qsnr_db_mean is None


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(replications_per_topology=0)
    with pytest.raises(ValueError):
        ScenarioConfig(request_counts=())
    with pytest.raises(ValueError):
        ScenarioConfig(classical_load=1.5)
    with pytest.raises(ValueError):
        run_mixed_sweep(TINY, 10, [1.2])
