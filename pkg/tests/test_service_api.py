"""HTTP surface: endpoint behavior, error mapping, CLI/API parity hooks."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from ontwin.fixtures import build_ring_store, populate_ring
from ontwin.service_api import ServiceConfig, create_app
from ontwin.telemetry import emulate_telemetry


@pytest.fixture()
def client():
    store = build_ring_store()
    populate_ring(store, 6)
    app = create_app(store, ServiceConfig(persist=False))
    return TestClient(app), store


def test_topology_is_store_snapshot_passthrough(client):
    http, store = client
    body = http.get("/topology").json()
    snap = store.snapshot()
    assert body["revision"] == snap["revision"]
    assert body["topology"] == json.loads(json.dumps(snap["topology"]))


def test_lightpaths_listing_and_detail(client):
    http, store = client
    listing = http.get("/lightpaths").json()
    assert len(listing["lightpaths"]) == 6
    one = http.get("/lightpaths/ring-lp00").json()
    assert one["lightpath"]["id"] == "ring-lp00"
    assert http.get("/lightpaths/ghost").status_code == 404


def test_whatif_accept_then_commit_flow(client):
    http, store = client
    report = http.post(
        "/whatif", json={"src": "T1", "dst": "T4", "requested_bitrate_gbps": 400.0}
    ).json()
    assert report["verdict"] == "accept"
    committed = http.post(f"/lightpaths/{report['lp_id']}/commit", json=report)
    assert committed.status_code == 201
    assert committed.json()["lp_id"] == report["lp_id"]
    # double commit: the slot is now taken
    again = http.post(f"/lightpaths/{report['lp_id']}/commit", json=report)
    assert again.status_code == 409
    assert again.json()["code"] == "SpectrumConflict"


def test_whatif_reject_is_a_domain_outcome_not_transport_error(client):
    http, _ = client
    response = http.post(
        "/whatif", json={"src": "T1", "dst": "T2", "requested_bitrate_gbps": 1600.0}
    )
    assert response.status_code == 200
    assert response.json()["verdict"] == "reject"
    assert response.json()["reason"] == "no_feasible_trx"


def test_stale_commit_blocked(client):
    http, _ = client
    report = http.post(
        "/whatif", json={"src": "T1", "dst": "T4", "requested_bitrate_gbps": 400.0}
    ).json()
    # intervening non-conflicting mutation: manual registration far up-band
    intruder = {
        "id": "intruder",
        "src": "T5",
        "dst": "T6",
        "route": ["acc-T5", "ring-R5-R6", "acc-T6"],
        "spectrum": {"center_thz": 191.3 + (43.75 * 40 + 43.75 / 2) / 1e3, "width_ghz": 43.75},
        "trx_id": "trx-100g-qpsk-32gbd",
    }
    assert http.post("/lightpaths", json=intruder).status_code == 201
    stale = http.post(f"/lightpaths/{report['lp_id']}/commit", json=report)
    assert stale.status_code == 409
    assert stale.json()["code"] == "StaleReport"


def test_malformed_ber_maps_to_invalid_ber(client):
    http, _ = client
    response = http.post(
        "/telemetry", json={"lp_id": "ring-lp00", "timestamp": 1.0, "pre_fec_ber": 0.7}
    )
    assert response.status_code == 422
    assert response.json()["code"] == "InvalidBer"


def test_telemetry_batch_then_history_and_forecast(client):
    http, store = client
    t0 = 1_700_000_000.0
    for day in range(10):
        batch = [s.to_doc() for s in emulate_telemetry(store, t0 + day * 86400.0, noise_sigma_db=0.0)]
        assert http.post("/telemetry", json=batch).status_code == 200
    history = http.get("/lightpaths/ring-lp00/history").json()
    assert len(history["samples"]) == 10
    forecast = http.get("/lightpaths/ring-lp00/margin-forecast", params={"threshold_db": 1.0}).json()
    assert forecast["crossing"] is None  # flat margins, non-negative slope


def test_fault_board_empty_then_populated(client):
    http, store = client
    assert http.get("/faults").json()["hypotheses"] == []
    store.lightpaths["ring-lp00"].state = "degraded"
    board = http.get("/faults").json()
    assert board["degraded"] == ["ring-lp00"]
    assert board["hypotheses"][0]["score"] > 0.0
    assert board["ticket_text"]


def test_span_loss_scenario_endpoint(client):
    http, _ = client
    response = http.post(
        "/scenario/span-loss", json={"lp_id": "ring-lp00", "added_losses_db": [0.0, 1.0, 2.0]}
    )
    steps = response.json()["steps"]
    assert [s["added_loss_db"] for s in steps] == [0.0, 1.0, 2.0]
    assert steps[0]["q_db"] > steps[1]["q_db"] > steps[2]["q_db"]


def test_trx_catalog_and_schema_endpoints(client):
    http, _ = client
    catalog = http.get("/trx-catalog").json()
    assert [t["id"] for t in catalog] == [
        "trx-100g-qpsk-32gbd", "trx-400g-16qam-64gbd", "trx-800g-16qam-130gbd",
    ]
    index = http.get("/schema").json()["schemas"]
    assert "topology" in index and "domain_qot" in index
    assert http.get("/schema/topology").json()["title"] == "Topology document"
    assert http.get("/schema/nonsense").status_code == 404


def test_trx_curve_endpoint_matches_model(client):
    http, store = client
    from ontwin.trx_model import btb_ber, gsnr_at_fec_limit

    body = http.get("/trx-catalog/trx-400g-16qam-64gbd/curve").json()
    trx = store.trx("trx-400g-16qam-64gbd")
    assert body["fec_limit_ber"] == trx.fec.pre_fec_ber_limit
    assert body["gsnr_at_fec_db"] == pytest.approx(gsnr_at_fec_limit(trx))
    for gsnr_db, ber in body["points"][:: 20]:
        assert ber == pytest.approx(btb_ber(trx, gsnr_db), rel=1e-9)
    bers = [b for _, b in body["points"]]
    assert all(b2 < b1 for b1, b2 in zip(bers, bers[1:]))  # strictly decreasing
    assert http.get("/trx-catalog/ghost/curve").status_code == 404


def test_domain_qot_export_contains_no_topology(client):
    http, _ = client
    body = http.get("/domains/qot", params={"lp_id": "ring-lp00"}).json()
    assert body["lp_id"] == "ring-lp00"
    for segment in body["segments"]:
        assert set(segment) == {"operator_id", "segment", "gsnr_db", "timestamp"}


def test_post_lightpath_registers_document(client):
    http, store = client
    blocker = store.lightpaths["ring-lp00"].spectrum  # sits on ring-R1-R2
    doc = {
        "id": "manual-lp",
        "src": "T1",
        "dst": "T4",
        "route": ["acc-T1", "ring-R1-R2", "ring-R2-R3", "ring-R3-R4", "acc-T4"],
        "spectrum": {"center_thz": blocker.center_thz, "width_ghz": blocker.width_ghz},
        "trx_id": "trx-100g-qpsk-32gbd",
    }
    clash = http.post("/lightpaths", json=doc)
    assert clash.status_code == 409
    assert "ring-lp00" in clash.json()["blocking"]
    doc["spectrum"]["center_thz"] = 191.3 + (43.75 * 30 + 43.75 / 2) / 1e3  # free slot
    response = http.post("/lightpaths", json=doc)
    assert response.status_code == 201
    assert "manual-lp" in store.lightpaths


def test_concurrent_reads_during_commit_see_consistent_state(client):
    http, store = client
    report = http.post(
        "/whatif", json={"src": "T1", "dst": "T4", "requested_bitrate_gbps": 400.0}
    ).json()
    seen = []

    def reader():
        for _ in range(20):
            body = http.get("/lightpaths").json()
            seen.append((body["revision"], len(body["lightpaths"])))

    thread = threading.Thread(target=reader)
    thread.start()
    http.post(f"/lightpaths/{report['lp_id']}/commit", json=report)
    thread.join()
    for revision, count in seen:
        assert count in (6, 7)
        if revision == report["revision"]:
            assert count == 6
        if count == 7:
            assert revision > report["revision"]
