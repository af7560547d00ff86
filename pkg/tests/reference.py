"""Slow, independent re-implementations used as test oracles.

Nothing here reuses the package's routing, ordering or interference code:
candidate paths come from brute-force enumeration, interferer spans are
rebuilt link by link, and QSNR goes through the textbook formula in
``qkdrwa.channel.qsnr``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from conftest import brute_force_paths
from qkdrwa.channel import ChannelParams, Interferer, qsnr
from qkdrwa.topology import NetworkGraph

QUANTUM = "quantum"
SLACK_DB = 1e-9


def spans(graph: NetworkGraph, classical_links, quantum_links) -> list[tuple[float, float]]:
    """(distance from transmitter, length) of each maximal run of shared links."""
    shared = set(quantum_links)
    out = []
    pos = 0.0
    i = 0
    lids = list(classical_links)
    while i < len(lids):
        if lids[i] in shared:
            start = pos
            run = 0.0
            while i < len(lids) and lids[i] in shared:
                run += graph.links[lids[i]].length_km
                pos += graph.links[lids[i]].length_km
                i += 1
            out.append((start, run))
        else:
            pos += graph.links[lids[i]].length_km
            i += 1
    return out


def reference_qsnr_db(graph, params: ChannelParams, quantum_links, quantum_length, classical) -> float:
    """QSNR of a quantum route given ``classical`` = [(link_ids, launch_power), ...]."""
    its = []
    for links, power in classical:
        for start, length in spans(graph, links, quantum_links):
            its.append(Interferer(power * 10 ** (-params.alpha_c_db_per_km * start / 10), length))
    return 10 * math.log10(qsnr(params, quantum_length, its))


def required_power(params: ChannelParams, length: float) -> float:
    return 10 ** (params.snr_target_db / 10) * params.n_ref * 10 ** (params.alpha_c_db_per_km * length / 10)


@dataclass
class RefLightpath:
    request: int
    kind: str
    links: tuple[int, ...]
    length: float
    wavelength: int
    power: float


class ReferenceRWA:
    """Brute-force RWA following the documented rules, one decision at a time."""

    def __init__(self, graph: NetworkGraph, params: ChannelParams, heuristic: str, power_control: bool, k: int = 5):
        self.graph = graph
        self.params = params
        self.heuristic = heuristic
        self.pc = power_control
        self.k = k
        self.lps: list[RefLightpath] = []
        self.threshold = params.qsnr_threshold_db - SLACK_DB

    # -- state queries --

    def quantum(self):
        return [lp for lp in self.lps if lp.kind == QUANTUM]

    def classical(self):
        return [lp for lp in self.lps if lp.kind != QUANTUM]

    def free(self, links, w) -> bool:
        return all(not (lp.wavelength == w and set(lp.links) & set(links)) for lp in self.lps)

    def qsnr_of(self, q_links, q_length, extra=None) -> float:
        cl = [(lp.links, lp.power) for lp in self.classical()]
        if extra is not None:
            cl.append(extra)
        return reference_qsnr_db(self.graph, self.params, q_links, q_length, cl)

    # -- candidate ordering --

    def candidates(self, s, d, kind):
        allp = brute_force_paths(self.graph, s, d)
        qlinks = {l for lp in self.quantum() for l in lp.links}
        clinks = {l for lp in self.classical() for l in lp.links}
        length = lambda lid: self.graph.links[lid].length_km
        if self.heuristic == "kspff":
            return allp[: self.k], allp[: self.k], None
        if self.heuristic in ("mqdo", "mqcco"):
            def weight(p):
                w = 0.0
                for lid in p[3]:
                    if lid in qlinks:
                        w += length(lid) * (2 if self.heuristic == "mqcco" and lid in clinks else 1)
                return w
            return sorted(allp, key=lambda p: (weight(p), p)), allp, None
        busy = qlinks | (clinks if kind == QUANTUM else set())
        ordered = [p for p in allp if not set(p[3]) & busy]
        return ordered, allp, ("no_disjoint_path" if allp and not ordered else None)

    def route(self, s, d, kind):
        ordered, reference_set, special = self.candidates(s, d, kind)
        if special:
            return special
        band = range(0, self.graph.w_quantum) if kind == QUANTUM else range(self.graph.w_quantum, self.graph.w_total)
        failed_admission = False
        for length, _, _, links in ordered:
            for w in band:
                if not self.free(links, w):
                    continue
                if kind == QUANTUM:
                    if self.qsnr_of(links, length) >= self.threshold:
                        return RefLightpath(-1, kind, links, length, w, self.params.p_tx_quantum)
                else:
                    power = required_power(self.params, length) if self.pc else required_power(
                        self.params, max(p[0] for p in reference_set)
                    )
                    if all(
                        self.qsnr_of(q.links, q.length, (links, power)) >= self.threshold for q in self.quantum()
                    ):
                        return RefLightpath(-1, kind, links, length, w, power)
                failed_admission = True
                break  # admission does not depend on the wavelength
        if failed_admission:
            return "qsnr_below_threshold" if kind == QUANTUM else "degrades_established_quantum"
        return "no_path_or_wavelength"

    def serve(self, rid, s, d, quantum: bool):
        plan = [(QUANTUM, s, d), ("control_forward", s, d), ("control_reverse", d, s), ("data", s, d)]
        if not quantum:
            plan = [("classical_pure", s, d)]
        before = list(self.lps)
        for kind, a, b in plan:
            out = self.route(a, b, kind)
            if isinstance(out, str):
                self.lps = before
                return out
            out.request = rid
            self.lps.append(out)
        for q in self.quantum():
            if q.request == rid and self.qsnr_of(q.links, q.length) < self.threshold:
                self.lps = before
                return "degrades_established_quantum"
        return [lp for lp in self.lps if lp.request == rid]
