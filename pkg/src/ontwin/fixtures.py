"""Shipped fixture corpus: metro ring, DCX mesh, two-operator chain.

Builders return :class:`TwinStore` instances; the CLI ``init`` command
serializes them into a data directory.  Span/EDFA parameters are typical
metro values (80 km max spans at 0.2 dB/km, standard single-mode fiber).
"""

from __future__ import annotations

from .gn_engine import Edfa, FiberSpan, RoadmNode
from .trx_model import load_catalog
from .twin_store import Band, Link, Lightpath, Topology, TrxSite, TwinStore

RING_TRX_CYCLE = (
    "trx-100g-qpsk-32gbd",
    "trx-400g-16qam-64gbd",
    "trx-800g-16qam-130gbd",
)


def _span(length_km: float) -> FiberSpan:
    return FiberSpan(
        length_km=length_km,
        loss_db_per_km=0.2,
        dispersion_ps_nm_km=16.7,
        gamma_per_w_km=1.3,
    )


def _edfa(gain_db: float) -> Edfa:
    return Edfa(
        gain_target_db=gain_db,
        gain_min_db=4.0,
        gain_max_db=26.0,
        nf_poly=(8.0, -0.15, 0.0, 0.0),
        p_out_max_dbm=23.0,
    )


def _line(*span_lengths_km: float):
    """Span/EDFA chain with each EDFA exactly compensating its span."""
    elements = []
    for length in span_lengths_km:
        elements.append(_span(length))
        elements.append(_edfa(length * 0.2))
    return tuple(elements)


_BAND = Band(min_thz=191.3, max_thz=195.3, slot_width_ghz=6.25)


def build_ring_store() -> TwinStore:
    """Six-ROADM metro ring, managed OLS, one TRx site per ROADM."""
    nodes = {}
    links = {}
    n = 6
    for i in range(1, n + 1):
        nodes[f"R{i}"] = RoadmNode(id=f"R{i}", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0)
        nodes[f"T{i}"] = TrxSite(id=f"T{i}", access_loss_db=1.0)
        links[f"acc-T{i}"] = Link(
            id=f"acc-T{i}", a=f"T{i}", b=f"R{i}", elements=(), mode="unmanaged",
            operator_id="ring-op",
        )
    for i in range(1, n + 1):
        j = i % n + 1
        links[f"ring-R{i}-R{j}"] = Link(
            id=f"ring-R{i}-R{j}",
            a=f"R{i}",
            b=f"R{j}",
            elements=_line(80.0, 80.0),
            mode="managed",
            operator_id="ring-op",
            target_power_dbm=0.0,
        )
    topology = Topology(nodes=nodes, links=links, band=_BAND)
    return TwinStore(topology, load_catalog())


def build_dcx_store() -> TwinStore:
    """Eight-ROADM metro DCX mesh with data-center sites, managed OLS."""
    nodes = {}
    links = {}
    for i in range(1, 9):
        nodes[f"M{i}"] = RoadmNode(id=f"M{i}", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0)
        nodes[f"D{i}"] = TrxSite(id=f"D{i}", access_loss_db=1.0)
        links[f"acc-D{i}"] = Link(
            id=f"acc-D{i}", a=f"D{i}", b=f"M{i}", elements=(), mode="unmanaged",
            operator_id="dcx-op",
        )
    mesh = [
        ("M1", "M2", (60.0,)),
        ("M2", "M3", (50.0,)),
        ("M3", "M4", (60.0,)),
        ("M4", "M1", (50.0,)),
        ("M5", "M6", (60.0,)),
        ("M6", "M7", (50.0,)),
        ("M7", "M8", (60.0,)),
        ("M8", "M5", (50.0,)),
        ("M1", "M5", (40.0,)),
        ("M2", "M6", (40.0,)),
        ("M3", "M7", (40.0,)),
        ("M4", "M8", (40.0,)),
        ("M1", "M3", (55.0, 55.0)),
    ]
    for a, b, spans in mesh:
        link_id = f"dcx-{a}-{b}"
        links[link_id] = Link(
            id=link_id, a=a, b=b, elements=_line(*spans), mode="managed",
            operator_id="dcx-op", target_power_dbm=0.0,
        )
    topology = Topology(nodes=nodes, links=links, band=_BAND)
    return TwinStore(topology, load_catalog())


def build_two_operator_store() -> TwinStore:
    """Linear chain crossing a demarcation: managed op-a, unmanaged op-b.

    Unmanaged links open with a small channel amplifier recovering the
    upstream ROADM loss, so launch-power propagation stays near 0 dBm.
    """
    nodes = {
        "SA": TrxSite(id="SA", access_loss_db=1.0),
        "SB": TrxSite(id="SB", access_loss_db=1.0),
        "A1": RoadmNode(id="A1", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0),
        "A2": RoadmNode(id="A2", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0),
        "X": RoadmNode(id="X", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0),
        "B1": RoadmNode(id="B1", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0),
        "B2": RoadmNode(id="B2", insertion_loss_db=6.0, target_per_channel_power_dbm=0.0),
    }
    unmanaged_chain = ( _edfa(6.0), _span(80.0), _edfa(16.0) )
    links = {
        "acc-SA": Link(id="acc-SA", a="SA", b="A1", elements=(), mode="unmanaged", operator_id="op-a"),
        "opa-A1-A2": Link(
            id="opa-A1-A2", a="A1", b="A2", elements=_line(80.0, 80.0), mode="managed",
            operator_id="op-a", target_power_dbm=0.0,
        ),
        "opa-A2-X": Link(
            id="opa-A2-X", a="A2", b="X", elements=_line(80.0), mode="managed",
            operator_id="op-a", target_power_dbm=0.0,
        ),
        "opb-X-B1": Link(
            id="opb-X-B1", a="X", b="B1", elements=unmanaged_chain, mode="unmanaged",
            operator_id="op-b",
        ),
        "opb-B1-B2": Link(
            id="opb-B1-B2", a="B1", b="B2", elements=unmanaged_chain, mode="unmanaged",
            operator_id="op-b",
        ),
        "acc-SB": Link(id="acc-SB", a="B2", b="SB", elements=(), mode="unmanaged", operator_id="op-b"),
    }
    topology = Topology(nodes=nodes, links=links, band=_BAND)
    return TwinStore(topology, load_catalog())


FIXTURES = {
    "ring": build_ring_store,
    "dcx": build_dcx_store,
    "two-operator": build_two_operator_store,
}


def populate_ring(store: TwinStore, count: int = 12) -> list[str]:
    """Register ``count`` lightpaths on the ring across all TRx generations."""
    from .pathfinder import assign_spectrum, channel_width_ghz, k_shortest_routes

    pairs = []
    for hop in (1, 2, 3):
        for i in range(1, 7):
            j = (i - 1 + hop) % 6 + 1
            pairs.append((f"T{i}", f"T{j}"))
    lp_ids = []
    for idx, (src, dst) in enumerate(pairs[:count]):
        trx = store.trx(RING_TRX_CYCLE[idx % len(RING_TRX_CYCLE)])
        route = k_shortest_routes(store.topology, src, dst, 1)[0]
        width = channel_width_ghz(trx.baud_gbd, store.topology.band.slot_width_ghz)
        slot = assign_spectrum(store, route, width)
        lp = Lightpath(
            id=f"ring-lp{idx:02d}",
            src=src,
            dst=dst,
            route=route,
            spectrum=slot,
            trx_id=trx.id,
            target_margin_db=2.0,
        )
        store.register_lightpath(lp)
        lp_ids.append(lp.id)
    return lp_ids
