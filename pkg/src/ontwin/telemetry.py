"""Telemetry ingestion and analytics over per-LP QoT histories.

Measured pre-FEC BER is backed out to a GSNR estimate through the
transceiver's back-to-back curve, appended to the LP's history, and fed to
degradation detection, shared-link fault scoring, margin-trend prediction,
and span-loss what-if simulation.  Multi-operator composition exchanges
only per-segment GSNR summaries, never topology.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientHistory,
    InvalidBer,
    InvalidSample,
    NoIntersection,
    NonContiguousSegments,
    UnknownLightpath,
)
from .gn_engine import accumulate_gsnr
from .trx_model import TrxType, btb_ber, estimate_gsnr_from_ber, margin, q_factor
from .twin_store import QotHistory, QotRecord, TwinStore
from .units import db_to_lin, lin_to_db

#: Default log-domain emulator jitter, expressed as dB of equivalent GSNR noise.
DEFAULT_EMULATOR_SIGMA_DB = 0.02

#: An LP counts as fault-degraded when its margin fell at least this much.
FAULT_DROP_DB = 1.0


@dataclass(frozen=True)
class TelemetrySample:
    lp_id: str
    timestamp: float
    pre_fec_ber: float
    rx_power_dbm: float | None = None
    source: str = "replayed"

    def to_doc(self) -> dict:
        doc = {
            "lp_id": self.lp_id,
            "timestamp": self.timestamp,
            "pre_fec_ber": self.pre_fec_ber,
            "source": self.source,
        }
        if self.rx_power_dbm is not None:
            doc["rx_power_dbm"] = self.rx_power_dbm
        return doc


def sample_from_doc(doc: dict) -> TelemetrySample:
    from .schemas import validate_document

    validate_document("telemetry_sample", doc)
    return TelemetrySample(
        lp_id=doc["lp_id"],
        timestamp=float(doc["timestamp"]),
        pre_fec_ber=float(doc["pre_fec_ber"]),
        rx_power_dbm=doc.get("rx_power_dbm"),
        source=doc.get("source", "replayed"),
    )


@dataclass(frozen=True)
class FaultHypothesis:
    ranked: tuple[tuple[str, float], ...]
    evidence: tuple[str, ...]
    healthy_witnesses: tuple[str, ...]
    ticket_text: str


@dataclass(frozen=True)
class DomainQot:
    """Operator-boundary QoT summary; deliberately carries no topology."""

    operator_id: str
    segment: tuple[str, str]
    gsnr_db: float
    timestamp: float

    def to_doc(self) -> dict:
        return {
            "operator_id": self.operator_id,
            "segment": list(self.segment),
            "gsnr_db": self.gsnr_db,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class DegradationEvent:
    onset_index: int
    onset_timestamp: float
    cleared_index: int | None
    cleared_timestamp: float | None
    max_drop_db: float


@dataclass(frozen=True)
class CrossingEstimate:
    crossing_timestamp: float
    stderr_seconds: float
    slope_db_per_day: float


@dataclass(frozen=True)
class SpanLossStep:
    added_loss_db: float
    gsnr_db: float
    ber: float
    q_db: float
    rx_power_dbm: float


def ingest(store: TwinStore, sample: TelemetrySample) -> QotRecord:
    """Append one telemetry sample to its LP history.

    A BER below the TRx floor cannot be intersected with the back-to-back
    curve; it is recorded flagged (no GSNR estimate) rather than dropped.
    """
    lp = store.lightpath(sample.lp_id)
    if lp.state not in ("active", "degraded"):
        raise UnknownLightpath(f"lightpath {lp.id!r} is {lp.state}, not carrying traffic")
    if not 0.0 < sample.pre_fec_ber < 0.5:
        raise InvalidBer(f"pre-FEC BER {sample.pre_fec_ber} outside (0, 0.5)")
    history = store.history(sample.lp_id)
    if history.samples and sample.timestamp <= history.samples[-1].timestamp:
        raise InvalidSample(
            f"timestamp {sample.timestamp} not after last sample "
            f"{history.samples[-1].timestamp} for {lp.id}"
        )
    trx = store.trx(lp.trx_id)
    try:
        gsnr_db = estimate_gsnr_from_ber(trx, sample.pre_fec_ber)
    except NoIntersection:
        record = QotRecord(
            timestamp=sample.timestamp,
            ber=sample.pre_fec_ber,
            gsnr_db=None,
            margin_db=None,
            q_db=q_factor(sample.pre_fec_ber),
            source="telemetry",
        )
        store.append_record(lp.id, record)
        return record
    margin_db = margin(trx, gsnr_db)
    record = QotRecord(
        timestamp=sample.timestamp,
        ber=sample.pre_fec_ber,
        gsnr_db=gsnr_db,
        margin_db=margin_db,
        q_db=q_factor(sample.pre_fec_ber),
        source="telemetry",
    )
    with store._mutate():
        store.append_record(lp.id, record)
        threshold = store.degraded_threshold(lp.service_class)
        if margin_db < threshold and lp.state == "active":
            lp.state = "degraded"
        elif margin_db >= threshold and lp.state == "degraded":
            lp.state = "active"
    return record


def emulate_telemetry(
    store: TwinStore,
    timestamp: float,
    *,
    rng: np.random.Generator | None = None,
    noise_sigma_db: float = DEFAULT_EMULATOR_SIGMA_DB,
    extra_loss_by_link: dict | None = None,
) -> list[TelemetrySample]:
    """Generate one sample per carrying LP from the twin's own model.

    Noise is Gaussian jitter on the GSNR axis (log domain) before the BER
    mapping, emulating polarization-induced overnight fluctuation.  Pass
    ``noise_sigma_db=0`` for exact model closure.
    """
    samples = []
    for lp_id in sorted(store.lightpaths):
        lp = store.lightpaths[lp_id]
        if lp.state not in ("active", "degraded"):
            continue
        path = store.effective_gsnr(
            lp_id, extra_loss_by_link=extra_loss_by_link, clamp_gain=True
        )
        gsnr_db = path.gsnr_db
        if noise_sigma_db > 0.0:
            if rng is None:
                raise ValueError("noisy emulation requires an rng")
            gsnr_db += float(rng.normal(0.0, noise_sigma_db))
        ber = btb_ber(store.trx(lp.trx_id), gsnr_db)
        samples.append(
            TelemetrySample(
                lp_id=lp_id,
                timestamp=timestamp,
                pre_fec_ber=ber,
                rx_power_dbm=path.rx_power_dbm,
                source="emulated",
            )
        )
    return samples


def detect_degradation(history: QotHistory, window: int, delta_db: float):
    """Windowed-median degradation events against the first-day baseline.

    Onset when the window median drops at least ``delta_db`` below baseline;
    hysteresis clears the event only once the shortfall recovers to
    ``delta_db / 2``.
    """
    if window < 2:
        raise ValueError("window must cover at least 2 samples")
    points = [(r.timestamp, r.margin_db) for r in history.samples if r.margin_db is not None]
    if len(points) < window:
        return []
    t0 = points[0][0]
    first_day = [m for ts, m in points if ts <= t0 + 86400.0]
    baseline = statistics.median(first_day)
    events = []
    open_event = None
    for i in range(window - 1, len(points)):
        med = statistics.median(m for _ts, m in points[i - window + 1 : i + 1])
        drop = baseline - med
        if open_event is None:
            if drop >= delta_db:
                open_event = {"onset": i, "max_drop": drop}
        else:
            open_event["max_drop"] = max(open_event["max_drop"], drop)
            if drop <= delta_db / 2.0:
                events.append(
                    DegradationEvent(
                        onset_index=open_event["onset"],
                        onset_timestamp=points[open_event["onset"]][0],
                        cleared_index=i,
                        cleared_timestamp=points[i][0],
                        max_drop_db=open_event["max_drop"],
                    )
                )
                open_event = None
    if open_event is not None:
        events.append(
            DegradationEvent(
                onset_index=open_event["onset"],
                onset_timestamp=points[open_event["onset"]][0],
                cleared_index=None,
                cleared_timestamp=None,
                max_drop_db=open_event["max_drop"],
            )
        )
    return events


def localize_fault(store: TwinStore, degraded, healthy) -> FaultHypothesis:
    """Shared-link scoring: degraded coverage minus healthy-witness penalty.

    A link traversed by any healthy LP can never outrank one traversed only
    by degraded LPs.
    """
    degraded = sorted(set(degraded))
    healthy = sorted(set(healthy))
    if not degraded:
        raise ValueError("need at least one degraded lightpath")
    candidate_links: dict[str, int] = {}
    for lp_id in degraded:
        for link_id in store.lightpath(lp_id).route:
            candidate_links[link_id] = candidate_links.get(link_id, 0) + 1
    witnesses_per_link = {
        link_id: sum(1 for h in healthy if link_id in store.lightpath(h).route)
        for link_id in candidate_links
    }
    scored = []
    for link_id, hits in candidate_links.items():
        score = max(hits / len(degraded) - 1.0 * witnesses_per_link[link_id], 0.0)
        scored.append((link_id, score))
    scored.sort(key=lambda pair: (-pair[1], witnesses_per_link[pair[0]], pair[0]))
    witnesses = tuple(
        h for h in healthy if set(store.lightpath(h).route) & set(candidate_links)
    )
    top_link, top_score = scored[0]
    ticket_lines = [
        f"Suspected fault on link {top_link} (score {top_score:.2f}).",
        f"Degraded lightpaths: {', '.join(degraded)}.",
    ]
    if witnesses:
        ticket_lines.append(f"Healthy witnesses narrowing the search: {', '.join(witnesses)}.")
    runners = [f"{l} ({s:.2f})" for l, s in scored[1:4]]
    if runners:
        ticket_lines.append(f"Next candidates: {', '.join(runners)}.")
    return FaultHypothesis(
        ranked=tuple(scored),
        evidence=tuple(degraded),
        healthy_witnesses=witnesses,
        ticket_text="\n".join(ticket_lines),
    )


def predict_margin_crossing(
    history: QotHistory, threshold_db: float
) -> CrossingEstimate | None:
    """Least-squares margin trend; None when the slope is non-negative.

    Slopes shallower than a nano-dB per day are float noise on a flat
    series and count as non-declining.
    """
    points = [(r.timestamp, r.margin_db) for r in history.samples if r.margin_db is not None]
    if len(points) < 8:
        raise InsufficientHistory(f"need >= 8 margin samples, have {len(points)}")
    t = np.array([p[0] for p in points])
    m = np.array([p[1] for p in points])
    t0 = t[0]
    coeffs, cov = np.polyfit(t - t0, m, 1, cov=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    if slope * 86400.0 >= -1e-9:
        return None
    crossing = (threshold_db - intercept) / slope
    jac = np.array([-(threshold_db - intercept) / slope**2, -1.0 / slope])
    variance = float(jac @ cov @ jac)
    return CrossingEstimate(
        crossing_timestamp=t0 + crossing,
        stderr_seconds=math.sqrt(max(variance, 0.0)),
        slope_db_per_day=slope * 86400.0,
    )


def simulate_span_loss(store: TwinStore, lp_id: str, added_losses_db) -> list[SpanLossStep]:
    """Q trajectory as equal extra loss is inserted into every route span.

    Managed-link gains recompensate up to their gain_max; past that the
    power profile sags and Q falls faster.  Pure: the store is untouched.
    """
    lp = store.lightpath(lp_id)
    trx = store.trx(lp.trx_id)
    steps = []
    for added in added_losses_db:
        path = store.effective_gsnr(lp_id, extra_span_loss_db=float(added), clamp_gain=True)
        ber = btb_ber(trx, path.gsnr_db)
        steps.append(
            SpanLossStep(
                added_loss_db=float(added),
                gsnr_db=path.gsnr_db,
                ber=ber,
                q_db=q_factor(ber),
                rx_power_dbm=path.rx_power_dbm,
            )
        )
    return steps


def compose_domains(segments, trx: TrxType):
    """End-to-end QoT from chained per-operator GSNR summaries."""
    if not segments:
        raise NonContiguousSegments("no segments to compose")
    for first, second in zip(segments, segments[1:]):
        if first.segment[1] != second.segment[0]:
            raise NonContiguousSegments(
                f"segment ending at {first.segment[1]!r} not followed by one "
                f"starting there (got {second.segment[0]!r})"
            )
    inv = 0.0
    for seg in segments:
        lin = db_to_lin(seg.gsnr_db)
        if lin <= 0.0:
            raise ValueError(f"segment {seg.segment} has non-positive GSNR")
        inv += 1.0 / lin
    gsnr_db = lin_to_db(1.0 / inv)
    from .trx_model import make_qot_point

    return make_qot_point(trx, gsnr_db, None)


@dataclass(frozen=True)
class FaultScenario:
    """One seeded lossy-link scenario with ground truth attached."""

    seed: int
    injected_link: str
    injected_loss_db: float
    degraded: tuple[str, ...]
    healthy: tuple[str, ...]
    hypothesis: FaultHypothesis


def generate_fault_scenario(
    seed: int,
    *,
    n_lightpaths: int = 20,
    loss_range_db: tuple[float, float] = (8.0, 11.0),
    drop_threshold_db: float = 0.2,
) -> FaultScenario:
    """Populate the DCX mesh, break one random in-use link, localize it.

    The generator knows the injected link, so the returned hypothesis can be
    scored against ground truth.  Degraded means the computed margin fell by
    at least ``drop_threshold_db`` relative to the pre-fault state; managed
    links isolate co-routed channels, so off-fault drops are exactly zero
    and the threshold only trades evidence volume, not false positives.
    """
    from .fixtures import build_dcx_store
    from .pathfinder import assign_spectrum, channel_width_ghz, k_shortest_routes
    from .twin_store import Lightpath

    rng = np.random.default_rng(seed)
    store = build_dcx_store()
    sites = sorted(n for n in store.topology.nodes if n.startswith("D"))
    trx_ids = [t.id for t in store.catalog]
    registered = []
    attempts = 0
    while len(registered) < n_lightpaths and attempts < n_lightpaths * 10:
        attempts += 1
        src, dst = (str(s) for s in rng.choice(sites, size=2, replace=False))
        routes = k_shortest_routes(store.topology, src, dst, 2)
        route = routes[int(rng.integers(len(routes)))]
        trx = store.trx(trx_ids[int(rng.integers(len(trx_ids)))])
        width = channel_width_ghz(trx.baud_gbd, store.topology.band.slot_width_ghz)
        try:
            slot = assign_spectrum(store, route, width)
        except Exception:
            continue
        lp = Lightpath(
            id=f"lp{len(registered):02d}",
            src=src,
            dst=dst,
            route=route,
            spectrum=slot,
            trx_id=trx.id,
        )
        store.register_lightpath(lp)
        registered.append(lp.id)
    traversals: dict[str, int] = {}
    for lp in store.lightpaths.values():
        for link_id in lp.route:
            if store.topology.links[link_id].elements:
                traversals[link_id] = traversals.get(link_id, 0) + 1
    well_used = sorted(l for l, n in traversals.items() if n >= 2) or sorted(traversals)
    injected = well_used[int(rng.integers(len(well_used)))]
    loss = float(rng.uniform(*loss_range_db))
    pre = {}
    post = {}
    for lp_id in registered:
        trx = store.trx(store.lightpaths[lp_id].trx_id)
        pre[lp_id] = margin(trx, store.effective_gsnr(lp_id).gsnr_db)
        post[lp_id] = margin(
            trx,
            store.effective_gsnr(
                lp_id, extra_loss_by_link={injected: loss}, clamp_gain=True
            ).gsnr_db,
        )
    degraded = tuple(i for i in registered if pre[i] - post[i] >= drop_threshold_db)
    healthy = tuple(i for i in registered if i not in degraded)
    hypothesis = localize_fault(store, degraded, healthy)
    return FaultScenario(
        seed=seed,
        injected_link=injected,
        injected_loss_db=loss,
        degraded=degraded,
        healthy=healthy,
        hypothesis=hypothesis,
    )


def export_domain_qot(store: TwinStore, lp_id: str, timestamp: float = 0.0):
    """Per-operator GSNR summaries along an LP's route.

    Consecutive links under one operator form a segment; contribution-less
    stretches (access links) merge into the neighboring segment so every
    exported GSNR is finite.
    """
    lp = store.lightpath(lp_id)
    path = store.effective_gsnr(lp_id)
    nodes = store._node_sequence(lp.src, lp.route)
    runs = []  # (operator_id, start_node_idx, end_node_idx, contributions)
    for i, link_qot in enumerate(path.per_link):
        contribs = list(link_qot.breakdown.contributions)
        if runs and runs[-1][0] == link_qot.operator_id:
            op, start, _end, acc = runs[-1]
            runs[-1] = (op, start, i + 1, acc + contribs)
        else:
            runs.append((link_qot.operator_id, i, i + 1, contribs))
    # fold noise-free runs into a neighbor so exported GSNRs stay finite
    folded = []
    for run in runs:
        if run[3] or not folded:
            folded.append(list(run))
        else:
            folded[-1][2] = run[2]
    for idx in range(len(folded) - 1, 0, -1):
        if not folded[idx][3]:
            folded[idx - 1][2] = folded[idx][2]
            del folded[idx]
    if len(folded) > 1 and not folded[0][3]:
        folded[1][1] = folded[0][1]
        del folded[0]
    out = []
    for op, start, end, contribs in folded:
        gsnr = accumulate_gsnr(contribs)
        out.append(
            DomainQot(
                operator_id=op,
                segment=(nodes[start], nodes[end]),
                gsnr_db=lin_to_db(gsnr) if not math.isinf(gsnr) else float("inf"),
                timestamp=timestamp,
            )
        )
    return tuple(out)
