"""Routing, spectrum assignment, what-if provisioning, backup precomputation.

What-if analysis is pure: it simulates the hypothetical channel on top of a
store snapshot, reports per-existing-LP GSNR deltas, and never mutates.
Commit re-checks the store revision so a stale report cannot land.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx

from .errors import NoRoute, NoSpectrum, SpectrumConflict, StaleReport
from .gn_engine import Channel
from .trx_model import TrxType, btb_ber, make_qot_point, margin, q_factor
from .twin_store import (
    AddedChannel,
    BackupRoute,
    Lightpath,
    QotRecord,
    SpectrumSlot,
    TwinStore,
)

DEFAULT_CANDIDATE_ROUTES = 3
DEFAULT_BACKUPS = 2


@dataclass(frozen=True)
class ProvisionRequest:
    src: str
    dst: str
    requested_bitrate_gbps: float
    target_margin_db: float = 2.0
    service_class: str = "default"
    allow_trx: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.requested_bitrate_gbps <= 0:
            raise ValueError("requested bitrate must be positive")
        if self.src == self.dst:
            raise ValueError("source and destination must differ")


@dataclass(frozen=True)
class Impact:
    lp_id: str
    gsnr_before_db: float
    gsnr_after_db: float
    margin_after_db: float


@dataclass(frozen=True)
class ProvisionReport:
    verdict: str  # accept | reject
    revision: int
    reason: str | None = None
    lp_id: str | None = None
    route: tuple[str, ...] | None = None
    spectrum: SpectrumSlot | None = None
    trx_id: str | None = None
    new_lp_gsnr_db: float | None = None
    new_lp_margin_db: float | None = None
    new_lp_ber: float | None = None
    new_lp_q_db: float | None = None
    new_lp_rx_power_dbm: float | None = None
    impacts: tuple[Impact, ...] = ()
    violated: tuple[str, ...] = ()
    request: ProvisionRequest | None = None

    def to_doc(self) -> dict:
        return {
            "verdict": self.verdict,
            "revision": self.revision,
            "reason": self.reason,
            "lp_id": self.lp_id,
            "route": list(self.route) if self.route else None,
            "spectrum": (
                {"center_thz": self.spectrum.center_thz, "width_ghz": self.spectrum.width_ghz}
                if self.spectrum
                else None
            ),
            "trx_id": self.trx_id,
            "new_lp": (
                {
                    "gsnr_db": self.new_lp_gsnr_db,
                    "margin_db": self.new_lp_margin_db,
                    "ber": self.new_lp_ber,
                    "q_db": self.new_lp_q_db,
                    "rx_power_dbm": self.new_lp_rx_power_dbm,
                }
                if self.new_lp_gsnr_db is not None
                else None
            ),
            "impacts": [
                {
                    "lp_id": i.lp_id,
                    "gsnr_before_db": i.gsnr_before_db,
                    "gsnr_after_db": i.gsnr_after_db,
                    "margin_after_db": i.margin_after_db,
                }
                for i in self.impacts
            ],
            "violated": list(self.violated),
            "request": (
                {
                    "src": self.request.src,
                    "dst": self.request.dst,
                    "requested_bitrate_gbps": self.request.requested_bitrate_gbps,
                    "target_margin_db": self.request.target_margin_db,
                    "service_class": self.request.service_class,
                    "allow_trx": list(self.request.allow_trx) if self.request.allow_trx else None,
                }
                if self.request
                else None
            ),
        }


def report_from_doc(doc: dict) -> ProvisionReport:
    req = doc.get("request")
    new_lp = doc.get("new_lp") or {}
    return ProvisionReport(
        verdict=doc["verdict"],
        revision=int(doc["revision"]),
        reason=doc.get("reason"),
        lp_id=doc.get("lp_id"),
        route=tuple(doc["route"]) if doc.get("route") else None,
        spectrum=(
            SpectrumSlot(doc["spectrum"]["center_thz"], doc["spectrum"]["width_ghz"])
            if doc.get("spectrum")
            else None
        ),
        trx_id=doc.get("trx_id"),
        new_lp_gsnr_db=new_lp.get("gsnr_db"),
        new_lp_margin_db=new_lp.get("margin_db"),
        new_lp_ber=new_lp.get("ber"),
        new_lp_q_db=new_lp.get("q_db"),
        new_lp_rx_power_dbm=new_lp.get("rx_power_dbm"),
        impacts=tuple(
            Impact(i["lp_id"], i["gsnr_before_db"], i["gsnr_after_db"], i["margin_after_db"])
            for i in doc.get("impacts", [])
        ),
        violated=tuple(doc.get("violated", [])),
        request=(
            ProvisionRequest(
                src=req["src"],
                dst=req["dst"],
                requested_bitrate_gbps=req["requested_bitrate_gbps"],
                target_margin_db=req.get("target_margin_db", 2.0),
                service_class=req.get("service_class", "default"),
                allow_trx=tuple(req["allow_trx"]) if req.get("allow_trx") else None,
            )
            if req
            else None
        ),
    )


def _route_graph(topology) -> nx.MultiGraph:
    g = nx.MultiGraph()
    for node_id in topology.nodes:
        g.add_node(node_id)
    for link in topology.links.values():
        g.add_edge(link.a, link.b, key=link.id)
    return g


def route_length_km(topology, route) -> float:
    return sum(topology.links[link_id].span_length_km for link_id in route)


def k_shortest_routes(topology, src: str, dst: str, k: int = DEFAULT_CANDIDATE_ROUTES):
    """Up to ``k`` loopless routes (link-id tuples), shortest span length first.

    Ties break on the lexicographic link-id sequence.  Fewer than ``k``
    routes means the simple-path space is exhausted.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if src not in topology.nodes or dst not in topology.nodes:
        raise NoRoute(f"unknown endpoint {src!r} or {dst!r}")
    g = _route_graph(topology)
    routes = []
    for edge_path in nx.all_simple_edge_paths(g, src, dst):
        routes.append(tuple(key for _u, _v, key in edge_path))
    if not routes:
        raise NoRoute(f"no route between {src} and {dst}")
    routes.sort(key=lambda r: (route_length_km(topology, r), r))
    return routes[:k]


def channel_width_ghz(baud_gbd: float, slot_width_ghz: float) -> float:
    """Flex-grid channel width: 1.2 x baud rounded up to the grid."""
    return math.ceil(baud_gbd * 1.2 / slot_width_ghz) * slot_width_ghz


def assign_spectrum(store: TwinStore, route, width_ghz: float) -> SpectrumSlot:
    """First-fit lowest-frequency slot free on every route link."""
    band = store.topology.band
    steps = width_ghz / band.slot_width_ghz
    if abs(steps - round(steps)) > 1e-9:
        raise ValueError(f"width {width_ghz} GHz not aligned to {band.slot_width_ghz} GHz grid")
    occupied = []
    for link_id in route:
        occupied.extend((lo, hi) for lo, hi, _ in store.link_occupancy(link_id))
    occupied.sort()
    lo_thz = band.min_thz
    width_thz = width_ghz / 1e3
    while lo_thz + width_thz <= band.max_thz + 1e-12:
        hi_thz = lo_thz + width_thz
        clash = next(
            (o for o in occupied if not (hi_thz <= o[0] + 1e-12 or lo_thz >= o[1] - 1e-12)), None
        )
        if clash is None:
            return SpectrumSlot(center_thz=lo_thz + width_thz / 2.0, width_ghz=width_ghz)
        # jump past the blocking interval, snapped up to the grid
        jump = max((clash[1] - band.min_thz) * 1e3 / band.slot_width_ghz, 0.0)
        lo_thz = band.min_thz + math.ceil(jump - 1e-9) * band.slot_width_ghz / 1e3
    raise NoSpectrum(f"no free {width_ghz} GHz slot on route {'-'.join(route)}")


@dataclass(frozen=True)
class CandidateEval:
    """One (route, TRx) candidate evaluated against the current load."""

    route: tuple[str, ...]
    trx_id: str
    feasible: bool
    reason: str | None
    spectrum: SpectrumSlot | None = None
    gsnr_db: float | None = None
    margin_db: float | None = None
    ber: float | None = None
    q_db: float | None = None
    rx_power_dbm: float | None = None
    impacts: tuple[Impact, ...] = ()
    violated: tuple[str, ...] = ()


def _eligible_trx(store: TwinStore, request: ProvisionRequest):
    types = [
        t
        for t in store.catalog
        if t.bitrate_gbps >= request.requested_bitrate_gbps
        and (request.allow_trx is None or t.id in request.allow_trx)
    ]
    return sorted(types, key=lambda t: (-t.bitrate_gbps, t.baud_gbd, t.id))


def _evaluate_candidate(
    store: TwinStore, request: ProvisionRequest, route, trx: TrxType
) -> CandidateEval:
    width = channel_width_ghz(trx.baud_gbd, store.topology.band.slot_width_ghz)
    try:
        slot = assign_spectrum(store, route, width)
    except NoSpectrum:
        return CandidateEval(route, trx.id, False, "no_spectrum")
    launch = store.default_launch_power_dbm
    path = store.evaluate_path(
        route, slot.center_thz, trx.baud_gbd, request.src, request.dst, launch_power_dbm=launch
    )
    gsnr_db = path.gsnr_db
    m = margin(trx, gsnr_db)
    if not (trx.min_rx_power_dbm <= path.rx_power_dbm <= trx.max_rx_power_dbm):
        return CandidateEval(
            route, trx.id, False, "rx_power_out_of_range",
            spectrum=slot, gsnr_db=gsnr_db, margin_db=m, rx_power_dbm=path.rx_power_dbm,
        )
    ber = btb_ber(trx, gsnr_db, path.rx_power_dbm)
    q = q_factor(ber)
    hypothetical = AddedChannel(
        link_ids=frozenset(route),
        channel=Channel(slot.center_thz, trx.baud_gbd, launch),
    )
    impacts = []
    violated = []
    for lp_id in sorted(store.lightpaths):
        lp = store.lightpaths[lp_id]
        if not set(lp.route) & set(route):
            continue
        before = store.effective_gsnr(lp_id).gsnr_db
        after = store.effective_gsnr(lp_id, added_channels=(hypothetical,)).gsnr_db
        m_after = margin(store.trx(lp.trx_id), after)
        impacts.append(Impact(lp_id, before, after, m_after))
        if m_after < lp.target_margin_db:
            violated.append(lp_id)
    feasible = m >= request.target_margin_db and not violated
    reason = None
    if not feasible:
        reason = "margin_violation"
    return CandidateEval(
        route,
        trx.id,
        feasible,
        reason,
        spectrum=slot,
        gsnr_db=gsnr_db,
        margin_db=m,
        ber=ber,
        q_db=q,
        rx_power_dbm=path.rx_power_dbm,
        impacts=tuple(impacts),
        violated=tuple(violated),
    )


def enumerate_candidates(
    store: TwinStore,
    request: ProvisionRequest,
    k: int = DEFAULT_CANDIDATE_ROUTES,
    *,
    stop_at_first_accept: bool = False,
):
    """Candidates in deterministic order: routes by length, TRx by bitrate desc."""
    try:
        routes = k_shortest_routes(store.topology, request.src, request.dst, k)
    except NoRoute:
        return [], "no_route"
    types = _eligible_trx(store, request)
    if not types:
        return [], "no_feasible_trx"
    evals = []
    for route in routes:
        for trx in types:
            cand = _evaluate_candidate(store, request, route, trx)
            evals.append(cand)
            if cand.feasible and stop_at_first_accept:
                return evals, None
    return evals, None


def whatif_provision(
    store: TwinStore, request: ProvisionRequest, k: int = DEFAULT_CANDIDATE_ROUTES
) -> ProvisionReport:
    """Simulate provisioning without touching the store.

    Accepts the first candidate (routes by length, then TRx by bitrate
    descending) whose own margin meets the request and whose added NLI
    pushes no existing LP below its own target margin.
    """
    evals, failure = enumerate_candidates(store, request, k, stop_at_first_accept=True)
    if failure is not None:
        return ProvisionReport(
            verdict="reject", revision=store.revision, reason=failure, request=request
        )
    winner = next((c for c in evals if c.feasible), None)
    if winner is None:
        spectrum_only = all(c.reason == "no_spectrum" for c in evals)
        detailed = next((c for c in evals if c.reason == "margin_violation"), None)
        if spectrum_only or detailed is None:
            reason = "no_spectrum" if spectrum_only else "margin_violation"
            return ProvisionReport(
                verdict="reject", revision=store.revision, reason=reason, request=request
            )
        return ProvisionReport(
            verdict="reject",
            revision=store.revision,
            reason="margin_violation",
            route=detailed.route,
            spectrum=detailed.spectrum,
            trx_id=detailed.trx_id,
            new_lp_gsnr_db=detailed.gsnr_db,
            new_lp_margin_db=detailed.margin_db,
            new_lp_ber=detailed.ber,
            new_lp_q_db=detailed.q_db,
            new_lp_rx_power_dbm=detailed.rx_power_dbm,
            impacts=detailed.impacts,
            violated=detailed.violated,
            request=request,
        )
    return ProvisionReport(
        verdict="accept",
        revision=store.revision,
        lp_id=f"lp-{store.revision:06d}",
        route=winner.route,
        spectrum=winner.spectrum,
        trx_id=winner.trx_id,
        new_lp_gsnr_db=winner.gsnr_db,
        new_lp_margin_db=winner.margin_db,
        new_lp_ber=winner.ber,
        new_lp_q_db=winner.q_db,
        new_lp_rx_power_dbm=winner.rx_power_dbm,
        impacts=winner.impacts,
        violated=(),
        request=request,
    )


def commit_provision(store: TwinStore, report: ProvisionReport, *, timestamp: float = 0.0) -> str:
    """Realize an accepted report; spectrum recheck first, then staleness."""
    if report.verdict != "accept":
        raise ValueError("only accept reports can be committed")
    with store._mutate():
        store._check_spectrum_free(report.route, report.spectrum)
        if report.revision != store.revision:
            raise StaleReport(
                f"report taken at revision {report.revision}, store is at {store.revision}"
            )
        lp = Lightpath(
            id=report.lp_id,
            src=report.request.src,
            dst=report.request.dst,
            route=report.route,
            spectrum=report.spectrum,
            trx_id=report.trx_id,
            target_margin_db=report.request.target_margin_db,
            service_class=report.request.service_class,
            state="active",
            launch_power_dbm=store.default_launch_power_dbm,
        )
        store.register_lightpath(lp)
        path = store.effective_gsnr(lp.id)
        trx = store.trx(lp.trx_id)
        point = make_qot_point(trx, path.gsnr_db, path.rx_power_dbm)
        store.append_record(
            lp.id,
            QotRecord(
                timestamp=timestamp,
                ber=point.ber,
                gsnr_db=point.gsnr_db,
                margin_db=point.margin_db,
                q_db=point.q_db,
                source="computed",
            ),
        )
        return lp.id


def _fiber_links(store: TwinStore, route) -> set:
    """Links on a route that carry fiber spans.

    Disjointness is judged on shared fiber: a span-less access link tying a
    site to its ROADM is unavoidable on every route and does not disqualify
    a backup.
    """
    from .gn_engine import FiberSpan

    return {
        link_id
        for link_id in route
        if any(isinstance(e, FiberSpan) for e in store.topology.links[link_id].elements)
    }


def precompute_backups(store: TwinStore, lp_id: str, k: int = DEFAULT_BACKUPS):
    """Store up to ``k`` link-disjoint feasible alternates, best margin first."""
    lp = store.lightpath(lp_id)
    trx = store.trx(lp.trx_id)
    primary = _fiber_links(store, lp.route)
    try:
        routes = k_shortest_routes(store.topology, lp.src, lp.dst, k=1_000_000)
    except NoRoute:
        routes = []
    candidates = []
    width = channel_width_ghz(trx.baud_gbd, store.topology.band.slot_width_ghz)
    for route in routes:
        if route == lp.route or (_fiber_links(store, route) & primary):
            continue
        try:
            slot = assign_spectrum(store, route, width)
        except NoSpectrum:
            continue
        path = store.evaluate_path(
            route,
            slot.center_thz,
            trx.baud_gbd,
            lp.src,
            lp.dst,
            launch_power_dbm=lp.launch_power_dbm,
            exclude_lp=lp.id,
        )
        m = margin(trx, path.gsnr_db)
        if m >= lp.target_margin_db:
            candidates.append(BackupRoute(route=route, spectrum=slot, margin_db=m))
    candidates.sort(key=lambda b: (-b.margin_db, b.route))
    with store._mutate():
        lp.backups = tuple(candidates[:k])
        store.revision += 1
    return lp.backups
