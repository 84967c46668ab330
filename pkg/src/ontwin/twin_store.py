"""Digital-domain state: topology, spectrum occupancy, lightpath registry.

QoT is managed per lightpath: the store walks an LP's route link by link,
building the co-propagating channel plan on each link (managed links pin
per-channel power to the OLS set-point, unmanaged links propagate launch
power), and accumulates every ASE/NLI contribution by inverse sum.

Concurrency: single writer, many readers.  All mutations go through
``_mutate`` under one lock; reads operate on immutable element/plan data.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaViolation, SpectrumConflict, UnknownLightpath
from .gn_engine import (
    Channel,
    ChannelPlan,
    Edfa,
    FiberSpan,
    LinkSnrBreakdown,
    RoadmNode,
    accumulate_gsnr,
    link_gsnr,
)
from .trx_model import TrxType, load_catalog
from .units import lin_to_db

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

#: LP drops to "degraded" below this margin unless its service class says otherwise.
DEFAULT_DEGRADED_MARGIN_DB = 1.0


@dataclass(frozen=True)
class TrxSite:
    """Transceiver site; the access-link loss is modeled as a fixed dB hit."""

    id: str
    access_loss_db: float = 1.0


@dataclass(frozen=True)
class Band:
    min_thz: float
    max_thz: float
    slot_width_ghz: float = 6.25

    def __post_init__(self):
        if self.max_thz <= self.min_thz or self.slot_width_ghz <= 0:
            raise ValueError("band must be non-empty with positive slot width")


@dataclass(frozen=True)
class Link:
    """Element chain between two nodes, tagged with its OLS control mode."""

    id: str
    a: str
    b: str
    elements: tuple
    mode: str = "managed"
    operator_id: str = "default"
    target_power_dbm: float = 0.0

    def __post_init__(self):
        if self.mode not in ("managed", "unmanaged"):
            raise ValueError(f"link mode must be managed|unmanaged, got {self.mode!r}")
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def span_length_km(self) -> float:
        return sum(e.length_km for e in self.elements if isinstance(e, FiberSpan))

    def other_end(self, node_id: str) -> str:
        if node_id == self.a:
            return self.b
        if node_id == self.b:
            return self.a
        raise ValueError(f"node {node_id} is not an endpoint of link {self.id}")


@dataclass(frozen=True)
class Topology:
    nodes: dict
    links: dict
    band: Band

    def links_at(self, node_id: str):
        return [l for l in self.links.values() if node_id in (l.a, l.b)]


@dataclass(frozen=True)
class SpectrumSlot:
    center_thz: float
    width_ghz: float

    @property
    def lo_thz(self) -> float:
        return self.center_thz - self.width_ghz / 2e3

    @property
    def hi_thz(self) -> float:
        return self.center_thz + self.width_ghz / 2e3


@dataclass(frozen=True)
class BackupRoute:
    route: tuple[str, ...]
    spectrum: SpectrumSlot
    margin_db: float


@dataclass
class Lightpath:
    id: str
    src: str
    dst: str
    route: tuple[str, ...]
    spectrum: SpectrumSlot
    trx_id: str
    target_margin_db: float = 2.0
    service_class: str = "default"
    state: str = "active"
    launch_power_dbm: float = 0.0
    backups: tuple[BackupRoute, ...] = ()

    def __post_init__(self):
        self.route = tuple(self.route)
        if self.state not in ("planned", "active", "degraded", "failed"):
            raise ValueError(f"bad lightpath state {self.state!r}")


@dataclass(frozen=True)
class QotRecord:
    timestamp: float
    ber: float
    gsnr_db: float | None
    margin_db: float | None
    q_db: float | None
    source: str  # computed | telemetry


@dataclass
class QotHistory:
    lp_id: str
    samples: list = field(default_factory=list)

    def append(self, record: QotRecord) -> None:
        if self.samples and record.timestamp <= self.samples[-1].timestamp:
            raise ValueError(
                f"timestamps must be strictly increasing per LP "
                f"({record.timestamp} after {self.samples[-1].timestamp})"
            )
        self.samples.append(record)


@dataclass(frozen=True)
class LinkQot:
    link_id: str
    operator_id: str
    breakdown: LinkSnrBreakdown
    gsnr_db: float
    cut_ingress_dbm: float
    cut_egress_dbm: float


@dataclass(frozen=True)
class PathQot:
    """Aggregate of per-link breakdowns along one route walk."""

    gsnr: float
    gsnr_db: float
    per_link: tuple[LinkQot, ...]
    contributions: tuple
    rx_power_dbm: float


@dataclass(frozen=True)
class AddedChannel:
    """Hypothetical interferer present on a set of links (what-if overlay)."""

    link_ids: frozenset
    channel: Channel


def _element_to_doc(element) -> dict:
    if isinstance(element, FiberSpan):
        return {
            "kind": "fiber",
            "length_km": element.length_km,
            "loss_db_per_km": element.loss_db_per_km,
            "dispersion_ps_nm_km": element.dispersion_ps_nm_km,
            "gamma_per_w_km": element.gamma_per_w_km,
            "extra_loss_db": element.extra_loss_db,
            "loss_offsets": [list(p) for p in element.loss_offsets],
        }
    if isinstance(element, Edfa):
        return {
            "kind": "edfa",
            "gain_target_db": element.gain_target_db,
            "gain_min_db": element.gain_min_db,
            "gain_max_db": element.gain_max_db,
            "nf_poly": list(element.nf_poly),
            "p_out_max_dbm": element.p_out_max_dbm,
        }
    raise TypeError(f"cannot serialize element {type(element).__name__}")


def _element_from_doc(doc: dict, path: str):
    kind = doc.get("kind")
    try:
        if kind == "fiber":
            return FiberSpan(
                length_km=float(doc["length_km"]),
                loss_db_per_km=float(doc["loss_db_per_km"]),
                dispersion_ps_nm_km=float(doc["dispersion_ps_nm_km"]),
                gamma_per_w_km=float(doc["gamma_per_w_km"]),
                extra_loss_db=float(doc.get("extra_loss_db", 0.0)),
                loss_offsets=tuple(tuple(p) for p in doc.get("loss_offsets", [])),
            )
        if kind == "edfa":
            return Edfa(
                gain_target_db=float(doc["gain_target_db"]),
                gain_min_db=float(doc["gain_min_db"]),
                gain_max_db=float(doc["gain_max_db"]),
                nf_poly=tuple(float(c) for c in doc.get("nf_poly", (5.0, 0.0, 0.0, 0.0))),
                p_out_max_dbm=float(doc.get("p_out_max_dbm", 23.0)),
            )
    except (KeyError, ValueError) as exc:
        raise SchemaViolation(str(exc), path) from exc
    raise SchemaViolation(f"unknown element kind {kind!r}", path)


def topology_to_doc(topology: Topology) -> dict:
    nodes = []
    for node in sorted(topology.nodes.values(), key=lambda n: n.id):
        if isinstance(node, RoadmNode):
            nodes.append(
                {
                    "id": node.id,
                    "kind": "roadm",
                    "insertion_loss_db": node.insertion_loss_db,
                    "target_per_channel_power_dbm": node.target_per_channel_power_dbm,
                }
            )
        else:
            nodes.append({"id": node.id, "kind": "trx_site", "access_loss_db": node.access_loss_db})
    links = []
    for link in sorted(topology.links.values(), key=lambda l: l.id):
        links.append(
            {
                "id": link.id,
                "a": link.a,
                "b": link.b,
                "mode": link.mode,
                "operator_id": link.operator_id,
                "target_power_dbm": link.target_power_dbm,
                "elements": [_element_to_doc(e) for e in link.elements],
            }
        )
    return {
        "version": SCHEMA_VERSION,
        "band": {
            "min_thz": topology.band.min_thz,
            "max_thz": topology.band.max_thz,
            "slot_width_ghz": topology.band.slot_width_ghz,
        },
        "nodes": nodes,
        "links": links,
    }


def topology_from_doc(doc: dict) -> Topology:
    from .schemas import validate_document

    validate_document("topology", doc)
    nodes: dict = {}
    for i, ndoc in enumerate(doc.get("nodes", [])):
        path = f"/nodes/{i}"
        if ndoc["id"] in nodes:
            raise SchemaViolation(f"duplicate node id {ndoc['id']!r}", path)
        if ndoc["kind"] == "roadm":
            nodes[ndoc["id"]] = RoadmNode(
                id=ndoc["id"],
                insertion_loss_db=float(ndoc.get("insertion_loss_db", 6.0)),
                target_per_channel_power_dbm=float(ndoc.get("target_per_channel_power_dbm", 0.0)),
            )
        else:
            nodes[ndoc["id"]] = TrxSite(
                id=ndoc["id"], access_loss_db=float(ndoc.get("access_loss_db", 1.0))
            )
    links: dict = {}
    for i, ldoc in enumerate(doc.get("links", [])):
        path = f"/links/{i}"
        for end in ("a", "b"):
            if ldoc[end] not in nodes:
                raise SchemaViolation(f"link endpoint {ldoc[end]!r} not a known node", f"{path}/{end}")
        if ldoc["id"] in links:
            raise SchemaViolation(f"duplicate link id {ldoc['id']!r}", path)
        elements = tuple(
            _element_from_doc(edoc, f"{path}/elements/{j}")
            for j, edoc in enumerate(ldoc.get("elements", []))
        )
        for e1, e2 in zip(elements, elements[1:]):
            if isinstance(e1, Edfa) and isinstance(e2, Edfa):
                log.warning("link %s has two adjacent EDFAs", ldoc["id"])
        try:
            links[ldoc["id"]] = Link(
                id=ldoc["id"],
                a=ldoc["a"],
                b=ldoc["b"],
                elements=elements,
                mode=ldoc.get("mode", "managed"),
                operator_id=ldoc.get("operator_id", "default"),
                target_power_dbm=float(ldoc.get("target_power_dbm", 0.0)),
            )
        except ValueError as exc:
            raise SchemaViolation(str(exc), path) from exc
    band_doc = doc["band"]
    band = Band(
        min_thz=float(band_doc["min_thz"]),
        max_thz=float(band_doc["max_thz"]),
        slot_width_ghz=float(band_doc.get("slot_width_ghz", 6.25)),
    )
    return Topology(nodes=nodes, links=links, band=band)


def lightpath_to_doc(lp: Lightpath) -> dict:
    return {
        "id": lp.id,
        "src": lp.src,
        "dst": lp.dst,
        "route": list(lp.route),
        "spectrum": {"center_thz": lp.spectrum.center_thz, "width_ghz": lp.spectrum.width_ghz},
        "trx_id": lp.trx_id,
        "target_margin_db": lp.target_margin_db,
        "service_class": lp.service_class,
        "state": lp.state,
        "launch_power_dbm": lp.launch_power_dbm,
        "backups": [
            {
                "route": list(b.route),
                "spectrum": {"center_thz": b.spectrum.center_thz, "width_ghz": b.spectrum.width_ghz},
                "margin_db": b.margin_db,
            }
            for b in lp.backups
        ],
    }


def lightpath_from_doc(doc: dict) -> Lightpath:
    return Lightpath(
        id=doc["id"],
        src=doc["src"],
        dst=doc["dst"],
        route=tuple(doc["route"]),
        spectrum=SpectrumSlot(
            center_thz=float(doc["spectrum"]["center_thz"]),
            width_ghz=float(doc["spectrum"]["width_ghz"]),
        ),
        trx_id=doc["trx_id"],
        target_margin_db=float(doc.get("target_margin_db", 2.0)),
        service_class=doc.get("service_class", "default"),
        state=doc.get("state", "active"),
        launch_power_dbm=float(doc.get("launch_power_dbm", 0.0)),
        backups=tuple(
            BackupRoute(
                route=tuple(b["route"]),
                spectrum=SpectrumSlot(
                    center_thz=float(b["spectrum"]["center_thz"]),
                    width_ghz=float(b["spectrum"]["width_ghz"]),
                ),
                margin_db=float(b["margin_db"]),
            )
            for b in doc.get("backups", [])
        ),
    )


class TwinStore:
    """Owns the digital state; one writer, any number of readers."""

    def __init__(
        self,
        topology: Topology,
        catalog: tuple[TrxType, ...] | None = None,
        *,
        default_launch_power_dbm: float = 0.0,
        degraded_margin_db: dict | None = None,
    ):
        self.topology = topology
        self.catalog = tuple(catalog) if catalog is not None else load_catalog()
        self.default_launch_power_dbm = default_launch_power_dbm
        self.degraded_margin_db = dict(degraded_margin_db or {})
        self.lightpaths: dict[str, Lightpath] = {}
        self.histories: dict[str, QotHistory] = {}
        self.archived_histories: dict[str, QotHistory] = {}
        self.revision = 0
        self._lock = threading.RLock()
        self._persisted_records = 0

    # ------------------------------------------------------------------ state

    def _mutate(self):
        return self._lock

    def trx(self, trx_id: str) -> TrxType:
        for t in self.catalog:
            if t.id == trx_id:
                return t
        raise KeyError(f"unknown transceiver type {trx_id!r}")

    def degraded_threshold(self, service_class: str) -> float:
        return self.degraded_margin_db.get(service_class, DEFAULT_DEGRADED_MARGIN_DB)

    # -------------------------------------------------------------- occupancy

    def link_occupancy(self, link_id: str):
        """Sorted (lo_thz, hi_thz, lp_id) intervals on a link."""
        out = []
        for lp in self.lightpaths.values():
            if link_id in lp.route:
                out.append((lp.spectrum.lo_thz, lp.spectrum.hi_thz, lp.id))
        return sorted(out)

    def _check_spectrum_free(self, route, slot: SpectrumSlot, *, ignore_lp: str | None = None):
        band = self.topology.band
        half_ghz = slot.width_ghz / 2.0
        if slot.center_thz * 1e3 - half_ghz < band.min_thz * 1e3 - 1e-6 or (
            slot.center_thz * 1e3 + half_ghz > band.max_thz * 1e3 + 1e-6
        ):
            raise SpectrumConflict(
                f"slot {slot.center_thz} THz width {slot.width_ghz} GHz outside band"
            )
        offset = (slot.lo_thz - band.min_thz) * 1e3
        steps = offset / band.slot_width_ghz
        if abs(steps - round(steps)) > 1e-6:
            raise SpectrumConflict(
                f"slot edge {slot.lo_thz} THz not aligned to {band.slot_width_ghz} GHz grid"
            )
        blocking = []
        for link_id in route:
            for lo, hi, lp_id in self.link_occupancy(link_id):
                if lp_id == ignore_lp:
                    continue
                if not (slot.hi_thz <= lo + 1e-12 or slot.lo_thz >= hi - 1e-12):
                    blocking.append(lp_id)
        if blocking:
            blocking = sorted(set(blocking))
            raise SpectrumConflict(
                f"slot overlaps lightpaths {', '.join(blocking)}", tuple(blocking)
            )

    # ------------------------------------------------------------- lightpaths

    def _validate_route(self, lp: Lightpath):
        nodes_seen = []
        current = lp.src
        if current not in self.topology.nodes:
            raise SchemaViolation(f"unknown source node {lp.src!r}", "/src")
        for link_id in lp.route:
            link = self.topology.links.get(link_id)
            if link is None:
                raise SchemaViolation(f"unknown link {link_id!r} in route", "/route")
            nodes_seen.append(current)
            current = link.other_end(current)
        if current != lp.dst:
            raise SchemaViolation(
                f"route ends at {current!r}, expected destination {lp.dst!r}", "/route"
            )
        nodes_seen.append(current)
        if len(set(nodes_seen)) != len(nodes_seen):
            raise SchemaViolation("route is not a simple path", "/route")

    def register_lightpath(self, lp: Lightpath) -> None:
        with self._mutate():
            if lp.id in self.lightpaths:
                raise SpectrumConflict(f"lightpath id {lp.id!r} already registered", (lp.id,))
            self.trx(lp.trx_id)
            self._validate_route(lp)
            self._check_spectrum_free(lp.route, lp.spectrum)
            self.lightpaths[lp.id] = lp
            self.histories[lp.id] = self.archived_histories.pop(lp.id, None) or QotHistory(lp.id)
            self.revision += 1

    def release_lightpath(self, lp_id: str) -> None:
        with self._mutate():
            if lp_id not in self.lightpaths:
                raise UnknownLightpath(f"no lightpath {lp_id!r}")
            del self.lightpaths[lp_id]
            self.archived_histories[lp_id] = self.histories.pop(lp_id)
            self.revision += 1

    def lightpath(self, lp_id: str) -> Lightpath:
        lp = self.lightpaths.get(lp_id)
        if lp is None:
            raise UnknownLightpath(f"no lightpath {lp_id!r}")
        return lp

    def history(self, lp_id: str) -> QotHistory:
        if lp_id in self.histories:
            return self.histories[lp_id]
        if lp_id in self.archived_histories:
            return self.archived_histories[lp_id]
        raise UnknownLightpath(f"no lightpath {lp_id!r}")

    def append_record(self, lp_id: str, record: QotRecord) -> None:
        with self._mutate():
            self.history(lp_id).append(record)

    # ------------------------------------------------------------- evaluation

    def _node_sequence(self, src: str, route) -> list[str]:
        seq = [src]
        current = src
        for link_id in route:
            current = self.topology.links[link_id].other_end(current)
            seq.append(current)
        return seq

    def _link_plan(
        self,
        link: Link,
        cut_center_thz: float,
        cut_baud_gbd: float,
        cut_power_dbm: float,
        exclude_lp: str | None,
        added: tuple[AddedChannel, ...],
    ) -> tuple[ChannelPlan, int]:
        """Channel plan on one link with the channel under test included."""
        channels: list[Channel] = []
        for lp_id in sorted(self.lightpaths):
            lp = self.lightpaths[lp_id]
            if lp_id == exclude_lp or link.id not in lp.route:
                continue
            power = link.target_power_dbm if link.mode == "managed" else lp.launch_power_dbm
            channels.append(Channel(lp.spectrum.center_thz, self.trx(lp.trx_id).baud_gbd, power))
        for extra in added:
            if link.id in extra.link_ids:
                power = (
                    link.target_power_dbm if link.mode == "managed" else extra.channel.power_dbm
                )
                channels.append(Channel(extra.channel.center_thz, extra.channel.baud_gbd, power))
        channels.append(Channel(cut_center_thz, cut_baud_gbd, cut_power_dbm))
        channels.sort(key=lambda c: c.center_thz)
        cut_index = next(
            i for i, c in enumerate(channels) if c.center_thz == cut_center_thz
        )
        return ChannelPlan(tuple(channels)), cut_index

    def evaluate_path(
        self,
        route,
        spectrum_center_thz: float,
        baud_gbd: float,
        src: str,
        dst: str,
        *,
        launch_power_dbm: float | None = None,
        exclude_lp: str | None = None,
        added_channels: tuple[AddedChannel, ...] = (),
        extra_span_loss_db: float = 0.0,
        extra_loss_by_link: dict | None = None,
        clamp_gain: bool = False,
    ) -> PathQot:
        """Walk a route and accumulate every ASE/NLI contribution.

        The channel under test enters at ``launch_power_dbm`` (store default
        when None) minus the source site's access loss; managed links reset
        it to their per-channel target, unmanaged links carry it through.
        ``extra_span_loss_db`` is added to every span on this route;
        ``extra_loss_by_link`` adds per-link loss (fault injection).
        """
        launch = (
            self.default_launch_power_dbm if launch_power_dbm is None else launch_power_dbm
        )
        nodes = self.topology.nodes
        power = launch
        src_node = nodes[src]
        if isinstance(src_node, TrxSite):
            power -= src_node.access_loss_db
        contributions: list = []
        per_link: list[LinkQot] = []
        current = src
        for link_id in route:
            link = self.topology.links[link_id]
            entry = nodes[current]
            if isinstance(entry, RoadmNode):
                power -= entry.insertion_loss_db
            managed = link.mode == "managed"
            ingress = link.target_power_dbm if managed else power
            plan, cut_idx = self._link_plan(
                link, spectrum_center_thz, baud_gbd, ingress, exclude_lp, tuple(added_channels)
            )
            elements = link.elements
            extra = extra_span_loss_db + (
                (extra_loss_by_link or {}).get(link_id, 0.0)
            )
            if extra:
                elements = tuple(
                    dataclasses.replace(e, extra_loss_db=e.extra_loss_db + extra)
                    if isinstance(e, FiberSpan)
                    else e
                    for e in elements
                )
            breakdown = link_gsnr(
                elements,
                plan,
                cut_idx,
                managed=managed,
                target_dbm=link.target_power_dbm,
                clamp_gain=clamp_gain,
            )
            egress = breakdown.power_profile_dbm[-1][cut_idx]
            per_link.append(
                LinkQot(
                    link_id=link_id,
                    operator_id=link.operator_id,
                    breakdown=breakdown,
                    gsnr_db=lin_to_db(breakdown.gsnr) if breakdown.gsnr != float("inf") else float("inf"),
                    cut_ingress_dbm=ingress,
                    cut_egress_dbm=egress,
                )
            )
            contributions.extend(breakdown.contributions)
            power = egress
            current = link.other_end(current)
        dst_node = nodes[dst]
        if isinstance(dst_node, RoadmNode):
            power -= dst_node.insertion_loss_db
        elif isinstance(dst_node, TrxSite):
            power -= dst_node.access_loss_db
        gsnr = accumulate_gsnr(contributions)
        return PathQot(
            gsnr=gsnr,
            gsnr_db=lin_to_db(gsnr) if gsnr != float("inf") else float("inf"),
            per_link=tuple(per_link),
            contributions=tuple(contributions),
            rx_power_dbm=power,
        )

    def effective_gsnr(self, lp_id: str, **kwargs) -> PathQot:
        """Accumulated GSNR of a registered lightpath at the current load."""
        lp = self.lightpath(lp_id)
        return self.evaluate_path(
            lp.route,
            lp.spectrum.center_thz,
            self.trx(lp.trx_id).baud_gbd,
            lp.src,
            lp.dst,
            launch_power_dbm=lp.launch_power_dbm,
            exclude_lp=lp.id,
            **kwargs,
        )

    # ------------------------------------------------------------ persistence

    def snapshot(self) -> dict:
        """Full-state document (histories persist separately as a log)."""
        return {
            "version": SCHEMA_VERSION,
            "revision": self.revision,
            "topology": topology_to_doc(self.topology),
            "lightpaths": [
                lightpath_to_doc(self.lightpaths[k]) for k in sorted(self.lightpaths)
            ],
        }

    @classmethod
    def from_snapshot(cls, doc: dict, catalog=None, **kwargs) -> "TwinStore":
        from .schemas import validate_document

        validate_document("store", doc)
        store = cls(topology_from_doc(doc["topology"]), catalog, **kwargs)
        for lp_doc in doc.get("lightpaths", []):
            lp = lightpath_from_doc(lp_doc)
            store.trx(lp.trx_id)
            store._validate_route(lp)
            try:
                store._check_spectrum_free(lp.route, lp.spectrum)
            except SpectrumConflict as exc:
                both = sorted(set(exc.blocking) | {lp.id})
                raise SchemaViolation(
                    f"overlapping spectrum between lightpaths {', '.join(both)}",
                    f"/lightpaths/{lp.id}",
                ) from exc
            store.lightpaths[lp.id] = lp
            store.histories[lp.id] = QotHistory(lp.id)
        store.revision = int(doc.get("revision", 0))
        return store

    def save(self, data_dir) -> None:
        data_dir = Path(data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        snap = self.snapshot()
        (data_dir / "topology.json").write_text(
            json.dumps(snap["topology"], indent=2, sort_keys=True) + "\n"
        )
        (data_dir / "lightpaths.json").write_text(
            json.dumps(
                {
                    "version": snap["version"],
                    "revision": snap["revision"],
                    "lightpaths": snap["lightpaths"],
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        records = []
        for lp_id in sorted(self.histories):
            for rec in self.histories[lp_id].samples:
                records.append((lp_id, rec))
        records.sort(key=lambda pair: (pair[1].timestamp, pair[0]))
        fresh = records[self._persisted_records:]
        if fresh:
            with open(data_dir / "history.jsonl", "a", encoding="utf-8") as fh:
                for lp_id, rec in fresh:
                    fh.write(
                        json.dumps(
                            {
                                "lp_id": lp_id,
                                "timestamp": rec.timestamp,
                                "ber": rec.ber,
                                "gsnr_db": rec.gsnr_db,
                                "margin_db": rec.margin_db,
                                "q_db": rec.q_db,
                                "source": rec.source,
                            },
                            sort_keys=True,
                        )
                        + "\n"
                    )
            self._persisted_records = len(records)

    @classmethod
    def load(cls, data_dir, catalog=None, **kwargs) -> "TwinStore":
        data_dir = Path(data_dir)
        topology_doc = json.loads((data_dir / "topology.json").read_text())
        lp_path = data_dir / "lightpaths.json"
        lp_doc = json.loads(lp_path.read_text()) if lp_path.exists() else {"revision": 0, "lightpaths": []}
        if catalog is None and (data_dir / "trx_catalog.json").exists():
            catalog = load_catalog(data_dir / "trx_catalog.json")
        snap = {
            "version": topology_doc.get("version", SCHEMA_VERSION),
            "revision": lp_doc.get("revision", 0),
            "topology": topology_doc,
            "lightpaths": lp_doc.get("lightpaths", []),
        }
        store = cls.from_snapshot(snap, catalog, **kwargs)
        hist_path = data_dir / "history.jsonl"
        count = 0
        if hist_path.exists():
            for line in hist_path.read_text().splitlines():
                if not line.strip():
                    continue
                doc = json.loads(line)
                rec = QotRecord(
                    timestamp=float(doc["timestamp"]),
                    ber=float(doc["ber"]),
                    gsnr_db=doc.get("gsnr_db"),
                    margin_db=doc.get("margin_db"),
                    q_db=doc.get("q_db"),
                    source=doc.get("source", "telemetry"),
                )
                target = store.histories.get(doc["lp_id"])
                if target is None:
                    target = store.archived_histories.setdefault(
                        doc["lp_id"], QotHistory(doc["lp_id"])
                    )
                target.append(rec)
                count += 1
        store._persisted_records = count
        return store
