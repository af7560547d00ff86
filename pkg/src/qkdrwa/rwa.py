"""Routing and wavelength assignment with QSNR-aware admission.

A quantum request is served as four lightpaths placed in order: the quantum
channel s->d, classical control s->d, classical control d->s and classical
data s->d. Placement is all-or-nothing. Quantum lightpaths live on
wavelengths ``[0, W_Q)``, classical ones on ``[W_Q, W_T)``, and every
heuristic assigns the lowest free index of the band (first fit).

Admission rules shared by all heuristics:

* a quantum candidate path is accepted only if its QSNR, given the classical
  lightpaths already in place, is at or above the threshold;
* a classical candidate is accepted only if no established quantum
  lightpath (including the quantum sibling of the same request) drops below
  the threshold once the candidate is lit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .channel import (
    ChannelParams,
    Interferer,
    attenuation_factor,
    db,
    from_db,
    LengthMetric,
    THRESHOLD_SLACK_DB,
    max_launch_power,
    meets_threshold,
    noise_contribution,
    quantum_signal,
    required_launch_power,
)
from .routing import MAX_HOPS_CAP, Path, all_simple_paths, k_shortest_paths
from .topology import NetworkGraph


class Heuristic(str, enum.Enum):
    KSPFF = "kspff"
    MQDO = "mqdo"
    MQCCO = "mqcco"
    QTD = "qtd"

    @property
    def label(self) -> str:
        return {"kspff": "KSP-FF", "mqdo": "MQDO", "mqcco": "MQCCO", "qtd": "QTD"}[self.value]


class RequestKind(str, enum.Enum):
    QUANTUM = "quantum"
    CLASSICAL_PURE = "classical"


class ChannelKind(str, enum.Enum):
    QUANTUM = "quantum"
    CONTROL_FORWARD = "control_forward"
    CONTROL_REVERSE = "control_reverse"
    DATA = "data"
    CLASSICAL_PURE = "classical_pure"

    @property
    def is_quantum(self) -> bool:
        return self is ChannelKind.QUANTUM


class BlockReason(str, enum.Enum):
    NO_PATH_OR_WAVELENGTH = "no_path_or_wavelength"
    QSNR_BELOW_THRESHOLD = "qsnr_below_threshold"
    DEGRADES_ESTABLISHED_QUANTUM = "degrades_established_quantum"
    NO_DISJOINT_PATH = "no_disjoint_path"


class InvariantViolation(RuntimeError):
    """Network state is corrupt; this is a bug, not a blocking outcome."""


@dataclass(frozen=True)
class Request:
    id: int
    source: int
    dest: int
    kind: RequestKind = RequestKind.QUANTUM

    def __post_init__(self) -> None:
        if self.source == self.dest:
            raise ValueError(f"request {self.id}: source equals destination ({self.source})")


@dataclass(frozen=True)
class AlgorithmSpec:
    heuristic: Heuristic = Heuristic.KSPFF
    power_control: bool = True
    ksp_k: int = 5
    max_hops: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        if self.ksp_k < 1:
            raise ValueError("ksp_k must be positive")
        if self.max_hops is not None and self.max_hops < 1:
            raise ValueError("max_hops must be positive")

    @property
    def label(self) -> str:
        return f"{self.heuristic.label}{'+PC' if self.power_control else ''}"


@dataclass
class Lightpath:
    id: int
    request_id: int
    channel_kind: ChannelKind
    path: Path
    wavelength: int
    launch_power: float
    qsnr_db: float | None = None


@dataclass
class Established:
    lightpaths: list[Lightpath]


@dataclass
class Blocked:
    reason: BlockReason


@dataclass(frozen=True)
class RouteChoice:
    path: Path
    wavelength: int
    launch_power: float
    qsnr_db: float | None = None


# -- candidate paths ---------------------------------------------------------


class CandidateSet:
    """A fixed list of paths with a dense link-incidence matrix for fast weighting."""

    def __init__(self, paths: list[Path], n_links: int, link_lengths: np.ndarray) -> None:
        self.paths = paths
        self.lengths = np.array([p.length_km for p in paths])
        self.max_length = max((p.length_km for p in paths), default=0.0)
        self.incidence = np.zeros((len(paths), n_links), dtype=bool)
        for row, p in enumerate(paths):
            self.incidence[row, list(p.link_ids)] = True
        self.weighted = self.incidence * link_lengths
        self._derived: dict[tuple, np.ndarray] = {}

    def attenuation(self, alpha_db_per_km: float) -> np.ndarray:
        """``10**(-alpha L / 10)`` for every candidate, memoised per alpha."""
        key = ("att", alpha_db_per_km)
        if key not in self._derived:
            self._derived[key] = 10.0 ** (-alpha_db_per_km * self.lengths / 10.0)
        return self._derived[key]

    def __len__(self) -> int:
        return len(self.paths)


class PathCache:
    """Per-topology memo of candidate path lists, shareable across replications."""

    def __init__(self, graph: NetworkGraph) -> None:
        self.graph = graph
        self.link_lengths = np.array([l.length_km for l in graph.links])
        self._ksp: dict[tuple[int, int, int], CandidateSet] = {}
        self._simple: dict[tuple[int, int, int], CandidateSet] = {}

    def ksp(self, s: int, d: int, k: int) -> CandidateSet:
        key = (s, d, k)
        if key not in self._ksp:
            paths = k_shortest_paths(self.graph, s, d, k)
            self._ksp[key] = CandidateSet(paths, len(self.graph.links), self.link_lengths)
        return self._ksp[key]

    def simple(self, s: int, d: int, max_hops: int | None) -> CandidateSet:
        if max_hops is None:
            max_hops = min(self.graph.n_nodes - 1, MAX_HOPS_CAP)
        key = (s, d, max_hops)
        if key not in self._simple:
            paths = all_simple_paths(self.graph, s, d, max_hops)
            self._simple[key] = CandidateSet(paths, len(self.graph.links), self.link_lengths)
        return self._simple[key]


# -- interference geometry ---------------------------------------------------


def shared_spans(
    graph: NetworkGraph, classical_path: Path, quantum_links: set[int] | frozenset[int]
) -> list[tuple[float, float]]:
    """Contiguous runs of ``classical_path`` inside ``quantum_links``.

    Returns ``(distance_from_transmitter_km, span_length_km)`` per run.
    """
    spans = []
    start = None
    run = 0.0
    travelled = 0.0
    for lid in classical_path.link_ids:
        length = graph.links[lid].length_km
        if lid in quantum_links:
            if start is None:
                start, run = travelled, 0.0
            run += length
        elif start is not None:
            spans.append((start, run))
            start = None
        travelled += length
    if start is not None:
        spans.append((start, run))
    return spans


def interferers_between(
    graph: NetworkGraph,
    params: ChannelParams,
    classical_path: Path,
    launch_power: float,
    quantum_links: set[int] | frozenset[int],
) -> list[Interferer]:
    """Interferers a classical lightpath presents to a quantum route."""
    return [
        Interferer(launch_power * attenuation_factor(params.alpha_c_db_per_km, start), length)
        for start, length in shared_spans(graph, classical_path, quantum_links)
    ]


class _Noise:
    """Precomputed constants for fast evaluation of nonlinear noise terms."""

    def __init__(self, graph: NetworkGraph, params: ChannelParams) -> None:
        self.lengths = [l.length_km for l in graph.links]
        self.alpha_c_db = params.alpha_c_db_per_km
        self.alpha_nat = params.alpha_c_natural
        self.gamma = params.gamma_nl
        self.effective = params.length_metric is LengthMetric.EFFECTIVE
        self.n_fixed = params.n_fixed
        # linear QSNR needed to pass, including the dB slack
        self.min_qsnr = 10.0 ** ((params.qsnr_threshold_db - THRESHOLD_SLACK_DB) / 10.0)
        self.params = params

    def layout(self, path: Path) -> tuple[tuple[int, float, float], ...]:
        """(link id, distance from transmitter, link length) along ``path``."""
        out = []
        travelled = 0.0
        for lid in path.link_ids:
            length = self.lengths[lid]
            out.append((lid, travelled, length))
            travelled += length
        return tuple(out)

    def span(self, power: float, start: float, length: float) -> float:
        p_span = power * 10.0 ** (-self.alpha_c_db * start / 10.0)
        if self.effective:
            length = -math.expm1(-self.alpha_nat * length) / self.alpha_nat
        return self.gamma * p_span * math.exp(-self.alpha_nat * length)

    def pair(self, layout, power: float, quantum_links) -> float:
        """Noise a classical lightpath (given by its layout) adds to a quantum route."""
        noise = 0.0
        start = None
        run = 0.0
        for lid, dist, length in layout:
            if lid in quantum_links:
                if start is None:
                    start, run = dist, 0.0
                run += length
            elif start is not None:
                noise += self.span(power, start, run)
                start = None
        if start is not None:
            noise += self.span(power, start, run)
        return noise

    def signal(self, path: Path) -> float:
        return quantum_signal(self.params, path.length_km)


def _pair_noise(
    graph: NetworkGraph,
    params: ChannelParams,
    classical_path: Path,
    launch_power: float,
    quantum_links: set[int] | frozenset[int],
) -> float:
    """Sum of the noise contributions of every span ``classical_path`` shares with ``quantum_links``."""
    return sum(
        noise_contribution(params, it)
        for it in interferers_between(graph, params, classical_path, launch_power, quantum_links)
    )


# -- network state -------------------------------------------------------------


class NetworkState:
    """Established lightpaths over one replication's private copy of the graph.

    ``graph`` occupancy is kept equal to the projection of ``established``.
    The noise seen by each quantum lightpath is cached and recomputed from
    scratch, in lightpath-id order, whenever its interferer set changes, so
    cached values never depend on history.
    """

    def __init__(
        self,
        graph: NetworkGraph,
        params: ChannelParams,
        paths: PathCache | None = None,
    ) -> None:
        self.graph = graph.fresh_copy()
        self.params = params
        self.paths = paths if paths is not None else PathCache(graph)
        self.noise_model = _Noise(self.graph, params)
        self.established: dict[int, Lightpath] = {}
        self.by_request: dict[int, list[int]] = {}
        n_links = len(self.graph.links)
        self.quantum_on_link: list[set[int]] = [set() for _ in range(n_links)]
        self.classical_on_link: list[set[int]] = [set() for _ in range(n_links)]
        self.quantum_count = np.zeros(n_links, dtype=np.int64)
        self.classical_count = np.zeros(n_links, dtype=np.int64)
        self.quantum_noise: dict[int, float] = {}
        self._quantum_links: dict[int, frozenset[int]] = {}
        self._layouts: dict[int, tuple] = {}
        # per-link counter bumped on every classical change; keys the path noise memo
        self._epoch = [0] * n_links
        self._noise_memo: dict[tuple[int, ...], tuple[tuple[int, ...], float]] = {}
        # lower bounds used by the admission prefilter (see _prefilter)
        self.classical_floor = np.zeros(n_links)
        self._floor_of: dict[int, float] = {}
        self._slack: np.ndarray | None = None
        self.next_id = 0

    # -- queries --

    def quantum_lightpaths(self) -> list[Lightpath]:
        return [lp for lp in self.established.values() if lp.channel_kind.is_quantum]

    def classical_lightpaths(self) -> list[Lightpath]:
        return [lp for lp in self.established.values() if not lp.channel_kind.is_quantum]

    def _classical_touching(self, link_ids) -> list[int]:
        touching: set[int] = set()
        for lid in link_ids:
            touching |= self.classical_on_link[lid]
        return sorted(touching)

    def interferers_for(self, path: Path) -> list[Interferer]:
        """Interferer list a quantum lightpath on ``path`` would see right now."""
        qlinks = frozenset(path.link_ids)
        out: list[Interferer] = []
        for cid in self._classical_touching(path.link_ids):
            c = self.established[cid]
            out.extend(interferers_between(self.graph, self.params, c.path, c.launch_power, qlinks))
        return out

    def noise_for(self, path: Path) -> float:
        """Fixed plus nonlinear noise a quantum lightpath on ``path`` would see."""
        stamp = tuple(self._epoch[lid] for lid in path.link_ids)
        hit = self._noise_memo.get(path.link_ids)
        if hit is not None and hit[0] == stamp:
            return hit[1]
        model = self.noise_model
        qlinks = frozenset(path.link_ids)
        noise = model.n_fixed
        for cid in self._classical_touching(path.link_ids):
            noise += model.pair(self._layouts[cid], self.established[cid].launch_power, qlinks)
        self._noise_memo[path.link_ids] = (stamp, noise)
        return noise

    def qsnr_db_for(self, path: Path) -> float:
        return db(self.noise_model.signal(path) / self.noise_for(path))

    def current_qsnr_db(self, lightpath_id: int) -> float:
        """QSNR of an established quantum lightpath from the current interferers."""
        return self.qsnr_db_for(self.established[lightpath_id].path)

    def snapshot(self) -> tuple:
        """Hashable image of everything that defines the state (for comparisons)."""
        return (
            tuple(
                (lp.id, lp.request_id, lp.channel_kind, lp.path.link_ids, lp.wavelength, lp.launch_power)
                for lp in sorted(self.established.values(), key=lambda lp: lp.id)
            ),
            tuple(link.used_mask for link in self.graph.links),
        )

    # -- mutation --

    def _refresh_quantum(self, link_ids) -> None:
        affected: set[int] = set()
        for lid in link_ids:
            self._epoch[lid] += 1
            affected |= self.quantum_on_link[lid]
        for qid in affected:
            self.quantum_noise[qid] = self.noise_for(self.established[qid].path)

    def establish(self, request_id: int, kind: ChannelKind, choice: RouteChoice) -> Lightpath:
        lp = Lightpath(
            self.next_id, request_id, kind, choice.path, choice.wavelength, choice.launch_power, choice.qsnr_db
        )
        band = self.graph.quantum_band if kind.is_quantum else self.graph.classical_band
        if lp.wavelength not in band:
            raise InvariantViolation(f"wavelength {lp.wavelength} outside the {kind.value} band")
        try:
            self.graph.occupy(lp.path.link_ids, lp.wavelength)
        except ValueError as exc:
            raise InvariantViolation(str(exc)) from exc
        self.next_id += 1
        self.established[lp.id] = lp
        self.by_request.setdefault(request_id, []).append(lp.id)
        if kind.is_quantum:
            for lid in lp.path.link_ids:
                self.quantum_on_link[lid].add(lp.id)
                self.quantum_count[lid] += 1
            self._quantum_links[lp.id] = frozenset(lp.path.link_ids)
            self.quantum_noise[lp.id] = self.noise_for(lp.path)
        else:
            model = self.noise_model
            floor = model.gamma * lp.launch_power * attenuation_factor(model.alpha_c_db, lp.path.length_km)
            self._floor_of[lp.id] = floor
            for lid in lp.path.link_ids:
                self.classical_on_link[lid].add(lp.id)
                self.classical_count[lid] += 1
                if floor > self.classical_floor[lid]:
                    self.classical_floor[lid] = floor
            self._layouts[lp.id] = model.layout(lp.path)
            self._refresh_quantum(lp.path.link_ids)
        self._slack = None
        return lp

    def remove(self, lightpath_id: int) -> None:
        if lightpath_id not in self.established:
            raise KeyError(f"lightpath {lightpath_id} is not established")
        lp = self.established.pop(lightpath_id)
        self.graph.vacate(lp.path.link_ids, lp.wavelength)
        ids = self.by_request[lp.request_id]
        ids.remove(lightpath_id)
        if not ids:
            del self.by_request[lp.request_id]
        if lp.channel_kind.is_quantum:
            for lid in lp.path.link_ids:
                self.quantum_on_link[lid].discard(lp.id)
                self.quantum_count[lid] -= 1
            del self.quantum_noise[lp.id]
            del self._quantum_links[lp.id]
        else:
            for lid in lp.path.link_ids:
                self.classical_on_link[lid].discard(lp.id)
                self.classical_count[lid] -= 1
            del self._layouts[lp.id]
            del self._floor_of[lp.id]
            for lid in lp.path.link_ids:
                self.classical_floor[lid] = max(
                    (self._floor_of[c] for c in self.classical_on_link[lid]), default=0.0
                )
            self._refresh_quantum(lp.path.link_ids)
        self._slack = None

    def quantum_slack(self) -> np.ndarray:
        """Per link, the least extra noise any quantum lightpath on it can still absorb."""
        if self._slack is None:
            model = self.noise_model
            slack = np.full(len(self.graph.links), np.inf)
            for qid, noise in self.quantum_noise.items():
                path = self.established[qid].path
                room = model.signal(path) / model.min_qsnr - noise
                for lid in path.link_ids:
                    if room < slack[lid]:
                        slack[lid] = room
            self._slack = slack
        return self._slack

    def release_request(self, request_id: int) -> None:
        """Tear down every lightpath of ``request_id``."""
        if request_id not in self.by_request:
            raise KeyError(f"request {request_id} has no established lightpaths")
        for lid in reversed(list(self.by_request[request_id])):
            self.remove(lid)


# -- admission checks ----------------------------------------------------------


def admit_quantum(state: NetworkState, path: Path) -> tuple[bool, float]:
    """QSNR (dB) of a quantum lightpath on ``path`` and whether it clears the threshold."""
    model = state.noise_model
    signal = model.signal(path)
    if signal < model.min_qsnr * model.n_fixed:
        # fails even without interference; skip the noise sum
        return False, db(signal / model.n_fixed)
    ratio = signal / state.noise_for(path)
    return ratio >= model.min_qsnr, db(ratio)


def protects_established_quantum(state: NetworkState, path: Path, launch_power: float) -> bool:
    """True iff lighting a classical channel on ``path`` keeps every quantum lightpath above threshold."""
    affected: set[int] = set()
    for lid in path.link_ids:
        affected |= state.quantum_on_link[lid]
    if not affected:
        return True
    model = state.noise_model
    layout = model.layout(path)
    for qid in sorted(affected):
        q = state.established[qid]
        extra = model.pair(layout, launch_power, state._quantum_links[qid])
        if model.signal(q.path) / (state.quantum_noise[qid] + extra) < model.min_qsnr:
            return False
    return True


def shared_quantum_distance(state: NetworkState, path: Path) -> float:
    """Length of ``path`` on links carrying at least one quantum lightpath (each link once)."""
    total = 0.0
    for lid in path.link_ids:
        if state.quantum_on_link[lid]:
            total += state.graph.links[lid].length_km
    return total


def weighted_shared_distance_mqcco(state: NetworkState, path: Path) -> float:
    """Like :func:`shared_quantum_distance`, doubled on links also carrying classical traffic."""
    total = 0.0
    for lid in path.link_ids:
        if state.quantum_on_link[lid]:
            length = state.graph.links[lid].length_km
            total += 2 * length if state.classical_on_link[lid] else length
    return total


# -- per-lightpath routing -----------------------------------------------------


# Candidate lists at least this long get a vectorised admission prefilter,
# switched on once the first few candidates in scan order have failed.
PREFILTER_MIN_CANDIDATES = 32
PREFILTER_AFTER = 8


def _prefilter(state: NetworkState, kind: ChannelKind, cands: CandidateSet, fixed_power: float | None) -> np.ndarray:
    """Boolean mask of candidates that *may* pass admission.

    Uses necessary conditions only. Every shared span of a classical
    lightpath of length ``L`` launched at ``P`` injects at least
    ``gamma * P * 10**(-alpha_c L / 10)`` (under either length metric), so a
    rejected candidate would certainly fail the exact check.
    """
    model = state.noise_model
    params = state.params
    margin = 1.0 - 1e-9
    if kind.is_quantum:
        signal = params.p_tx_quantum * cands.attenuation(params.alpha_q_db_per_km)
        keep = signal >= model.min_qsnr * model.n_fixed * margin
        cols = np.flatnonzero(state.classical_count)
        if len(cols):
            worst = np.where(cands.incidence[:, cols], state.classical_floor[cols], 0.0).max(axis=1)
            keep &= signal >= model.min_qsnr * (model.n_fixed + worst) * margin
        return keep
    cols = np.flatnonzero(state.quantum_count)
    if not len(cols):
        return np.ones(len(cands), dtype=bool)
    slack = state.quantum_slack()[cols]
    tightest = np.where(cands.incidence[:, cols], slack, np.inf).min(axis=1)
    if fixed_power is None:
        # P_required(L) * 10**(-alpha_c L / 10) is the SNR target times n_ref
        return tightest >= model.gamma * from_db(params.snr_target_db) * params.n_ref * margin
    lower = model.gamma * fixed_power * cands.attenuation(model.alpha_c_db)
    return tightest >= lower * margin


def _first_fit(
    state: NetworkState,
    kind: ChannelKind,
    spec: AlgorithmSpec,
    cands: CandidateSet,
    order: Sequence[int] | np.ndarray | None = None,
) -> RouteChoice | BlockReason:
    """Try candidates in ``order``; first free band wavelength, then admission."""
    graph = state.graph
    params = state.params
    paths = cands.paths
    band = graph.quantum_band if kind.is_quantum else graph.classical_band
    band_mask = ((1 << band.stop) - 1) ^ ((1 << band.start) - 1)
    fixed_power = None
    if not kind.is_quantum and not spec.power_control:
        fixed_power = max_launch_power(params, [cands.max_length])
    if order is None:
        order = range(len(paths))
    keep = None
    tried = 0
    vectorise = len(paths) >= PREFILTER_MIN_CANDIDATES
    admission_failed = False
    pruned = []
    for i in order:
        path = paths[i]
        if keep is None:
            tried += 1
            if vectorise and tried > PREFILTER_AFTER:
                keep = _prefilter(state, kind, cands, fixed_power)
        if keep is not None and not keep[i]:
            pruned.append(path)
            continue
        free = band_mask & ~graph.used_on_path(path.link_ids)
        if not free:
            continue
        wavelength = (free & -free).bit_length() - 1
        if kind.is_quantum:
            ok, value = admit_quantum(state, path)
            if ok:
                return RouteChoice(path, wavelength, params.p_tx_quantum, value)
        else:
            power = fixed_power if fixed_power is not None else required_launch_power(params, path.length_km)
            if protects_established_quantum(state, path, power):
                return RouteChoice(path, wavelength, power)
        admission_failed = True
    if not admission_failed:
        # a pruned path with a free wavelength is an admission failure too
        admission_failed = any(band_mask & ~graph.used_on_path(p.link_ids) for p in pruned)
    if admission_failed:
        return BlockReason.QSNR_BELOW_THRESHOLD if kind.is_quantum else BlockReason.DEGRADES_ESTABLISHED_QUANTUM
    return BlockReason.NO_PATH_OR_WAVELENGTH


def route_lightpath_kspff(
    state: NetworkState, s: int, d: int, kind: ChannelKind, spec: AlgorithmSpec
) -> RouteChoice | BlockReason:
    """k shortest paths in ascending length, first fit on each."""
    cands = state.paths.ksp(s, d, spec.ksp_k)
    if not cands.paths:
        return BlockReason.NO_PATH_OR_WAVELENGTH
    return _first_fit(state, kind, spec, cands)


def _overlap_weights(state: NetworkState, cands: CandidateSet, doubled: bool) -> np.ndarray:
    marked = state.quantum_count > 0
    if doubled:
        factor = marked * np.where(state.classical_count > 0, 2.0, 1.0)
    else:
        factor = marked.astype(float)
    return cands.weighted @ factor


def route_lightpath_overlap(
    state: NetworkState,
    s: int,
    d: int,
    kind: ChannelKind,
    spec: AlgorithmSpec,
    weight_fn: Callable[[NetworkState, Path], float] = shared_quantum_distance,
) -> RouteChoice | BlockReason:
    """All simple paths by ascending quantum overlap (MQDO / MQCCO), first fit on each.

    ``weight_fn`` is :func:`shared_quantum_distance` or
    :func:`weighted_shared_distance_mqcco`; both have vectorised fast paths.
    """
    cands = state.paths.simple(s, d, spec.max_hops)
    if not cands.paths:
        return BlockReason.NO_PATH_OR_WAVELENGTH
    if weight_fn is shared_quantum_distance:
        weights = _overlap_weights(state, cands, doubled=False)
    elif weight_fn is weighted_shared_distance_mqcco:
        weights = _overlap_weights(state, cands, doubled=True)
    else:
        weights = np.array([weight_fn(state, p) for p in cands.paths])
    return _first_fit(state, kind, spec, cands, _stable_order(weights))


def _stable_order(weights: np.ndarray) -> Iterator[int]:
    """Indices in stable ascending-weight order, produced lazily.

    Same sequence as ``np.argsort(weights, kind="stable")``; the minimum-weight
    group comes out first so the full sort is only paid if all of it fails.
    """
    low = weights.min()
    best = weights == low
    yield from np.flatnonzero(best).tolist()
    rest = np.flatnonzero(~best)
    if len(rest):
        yield from rest[np.argsort(weights[rest], kind="stable")].tolist()


def route_lightpath_qtd(
    state: NetworkState, s: int, d: int, kind: ChannelKind, spec: AlgorithmSpec
) -> RouteChoice | BlockReason:
    """Shortest paths that share no link with any quantum lightpath.

    A quantum lightpath must in addition avoid links carrying classical
    lightpaths, so quantum and classical traffic never share a fiber.
    """
    cands = state.paths.simple(s, d, spec.max_hops)
    if not cands.paths:
        return BlockReason.NO_PATH_OR_WAVELENGTH
    busy = state.quantum_count > 0
    if kind.is_quantum:
        busy = busy | (state.classical_count > 0)
    clear = ~(cands.incidence @ busy)
    if not clear.any():
        return BlockReason.NO_DISJOINT_PATH
    return _first_fit(state, kind, spec, cands, np.flatnonzero(clear))


def route_lightpath(
    state: NetworkState, s: int, d: int, kind: ChannelKind, spec: AlgorithmSpec
) -> RouteChoice | BlockReason:
    h = spec.heuristic
    if h is Heuristic.KSPFF:
        return route_lightpath_kspff(state, s, d, kind, spec)
    if h is Heuristic.MQDO:
        return route_lightpath_overlap(state, s, d, kind, spec, shared_quantum_distance)
    if h is Heuristic.MQCCO:
        return route_lightpath_overlap(state, s, d, kind, spec, weighted_shared_distance_mqcco)
    return route_lightpath_qtd(state, s, d, kind, spec)


def request_channels(request: Request) -> list[tuple[ChannelKind, int, int]]:
    s, d = request.source, request.dest
    if request.kind is RequestKind.CLASSICAL_PURE:
        return [(ChannelKind.CLASSICAL_PURE, s, d)]
    return [
        (ChannelKind.QUANTUM, s, d),
        (ChannelKind.CONTROL_FORWARD, s, d),
        (ChannelKind.CONTROL_REVERSE, d, s),
        (ChannelKind.DATA, s, d),
    ]


def serve_request(state: NetworkState, request: Request, spec: AlgorithmSpec) -> Established | Blocked:
    """Place every lightpath of ``request`` or none of them."""
    if request.id in state.by_request:
        raise InvariantViolation(f"request {request.id} is already established")
    next_id = state.next_id
    placed: list[Lightpath] = []

    def rollback(reason: BlockReason) -> Blocked:
        for lp in reversed(placed):
            state.remove(lp.id)
        state.next_id = next_id
        return Blocked(reason)

    for kind, a, b in request_channels(request):
        outcome = route_lightpath(state, a, b, kind, spec)
        if isinstance(outcome, BlockReason):
            return rollback(outcome)
        placed.append(state.establish(request.id, kind, outcome))

    # siblings were admitted against the quantum channel as placed; re-verify anyway
    for lp in placed:
        if lp.channel_kind.is_quantum and not meets_threshold(state.params, state.current_qsnr_db(lp.id)):
            return rollback(BlockReason.DEGRADES_ESTABLISHED_QUANTUM)
    return Established(placed)
