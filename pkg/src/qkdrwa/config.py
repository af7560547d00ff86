"""Campaign configuration files (TOML).

The grammar is plain TOML with four tables and one array of tables::

    [scenario]      seed, topology_count, replications_per_topology,
                    request_counts, classical_load
    [mixed]         total_requests, load_points
    [topology]      n_nodes_min, n_nodes_max, link_probability,
                    length_min_km, length_max_km, min_degree, w_total, w_quantum
    [channel]       alpha_q_db_per_km, alpha_c_db_per_km, p_tx_quantum,
                    qsnr_threshold_db, snr_target_db, n_ref, length_metric
    [[algorithms]]  heuristic, power_control, ksp_k (optional, 5),
                    max_hops (optional)

Every key other than the two marked optional is required, and unknown keys
anywhere are an error.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import LengthMetric
from .rwa import AlgorithmSpec, Heuristic
from .simulation import ChannelInputs, ScenarioConfig
from .topology import TopologyConfig, TopologyError

U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Unreadable, malformed or invalid configuration file."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class _Scenario(_Strict):
    seed: int = Field(ge=0, le=U64_MAX)
    topology_count: int = Field(ge=1)
    replications_per_topology: int = Field(ge=1)
    request_counts: list[int] = Field(min_length=1)
    classical_load: float = Field(ge=0.0, le=1.0)

    @field_validator("request_counts")
    @classmethod
    def _positive(cls, v: list[int]) -> list[int]:
        if min(v) < 1:
            raise ValueError("request counts must be positive")
        return v


class _Mixed(_Strict):
    total_requests: int = Field(ge=1)
    load_points: list[float] = Field(min_length=1)

    @field_validator("load_points")
    @classmethod
    def _unit_interval(cls, v: list[float]) -> list[float]:
        if any(not 0.0 <= x <= 1.0 for x in v):
            raise ValueError("load points must lie in [0, 1]")
        return v


class _Topology(_Strict):
    n_nodes_min: int
    n_nodes_max: int
    link_probability: float
    length_min_km: float
    length_max_km: float
    min_degree: int
    w_total: int
    w_quantum: int


class _Channel(_Strict):
    alpha_q_db_per_km: float = Field(gt=0)
    alpha_c_db_per_km: float = Field(gt=0)
    p_tx_quantum: float = Field(gt=0)
    qsnr_threshold_db: float
    snr_target_db: float
    n_ref: float = Field(gt=0)
    length_metric: LengthMetric


class _Algorithm(_Strict):
    heuristic: Heuristic
    power_control: bool
    ksp_k: int = Field(default=5, ge=1)
    max_hops: Optional[int] = Field(default=None, ge=1)


class _File(_Strict):
    scenario: _Scenario
    mixed: _Mixed
    topology: _Topology
    channel: _Channel
    algorithms: list[_Algorithm] = Field(min_length=1)


@dataclass(frozen=True)
class MixedConfig:
    total_requests: int
    load_points: tuple[float, ...]


@dataclass(frozen=True)
class CampaignConfig:
    """Everything one config file describes."""

    scenario: ScenarioConfig
    mixed: MixedConfig


def default_config_path() -> Path:
    return Path(str(resources.files("qkdrwa") / "configs" / "default.toml"))


def _describe(exc: ValidationError, source: str) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{source}: {where}: {err['msg']}")
    return "\n".join(lines)


def load_campaign_text(text: str, seed_override: int | None = None, source: str = "<config>") -> CampaignConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        parsed = _File.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_describe(exc, source)) from exc
    if seed_override is not None and not 0 <= seed_override <= U64_MAX:
        raise ConfigError(f"seed override {seed_override} is not an unsigned 64-bit integer")
    sc = parsed.scenario
    try:
        scenario = ScenarioConfig(
            topology_count=sc.topology_count,
            replications_per_topology=sc.replications_per_topology,
            request_counts=tuple(sc.request_counts),
            classical_load=sc.classical_load,
            algorithm_specs=tuple(
                AlgorithmSpec(a.heuristic, a.power_control, a.ksp_k, a.max_hops) for a in parsed.algorithms
            ),
            seed=sc.seed if seed_override is None else seed_override,
            topology_config=TopologyConfig(**parsed.topology.model_dump()),
            channel_base=ChannelInputs(**parsed.channel.model_dump()),
        )
    except (TopologyError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if len(set(scenario.algorithm_specs)) != len(scenario.algorithm_specs):
        raise ConfigError(f"{source}: algorithms: duplicate algorithm entries")
    mixed = MixedConfig(parsed.mixed.total_requests, tuple(parsed.mixed.load_points))
    return CampaignConfig(scenario, mixed)


def load_campaign(path: str | Path | None = None, seed_override: int | None = None) -> CampaignConfig:
    """Read and validate a campaign file; ``None`` means the shipped default."""
    path = Path(path) if path is not None else default_config_path()
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return load_campaign_text(text, seed_override, str(path))


def parse_config(path: str | Path | None = None, seed_override: int | None = None) -> ScenarioConfig:
    """The :class:`ScenarioConfig` part of a campaign file."""
    return load_campaign(path, seed_override).scenario
