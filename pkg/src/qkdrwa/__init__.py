"""Routing and wavelength assignment for hybrid quantum-classical optical networks."""

from .channel import ChannelParams, LengthMetric, calibrate_noise, calibrated_params
from .routing import Path, all_simple_paths, k_shortest_paths, shortest_path
from .rwa import AlgorithmSpec, Heuristic, NetworkState, Request, RequestKind, serve_request
from .simulation import ScenarioConfig, run_mixed_sweep, run_sweep
from .topology import NetworkGraph, TopologyConfig, generate_random_topology

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "ChannelParams",
    "Heuristic",
    "LengthMetric",
    "NetworkGraph",
    "NetworkState",
    "Path",
    "Request",
    "RequestKind",
    "ScenarioConfig",
    "TopologyConfig",
    "all_simple_paths",
    "calibrate_noise",
    "calibrated_params",
    "generate_random_topology",
    "k_shortest_paths",
    "run_mixed_sweep",
    "run_sweep",
    "serve_request",
    "shortest_path",
]
