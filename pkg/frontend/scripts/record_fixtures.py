"""Record deterministic API fixtures for the console contract tests.

Builds the ring fixture, replays a week of noise-free emulated telemetry
with a 7 dB fault on ring-R1-R2 from day 4, and snapshots the service
responses the console renders from.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from ontwin.fixtures import build_ring_store, populate_ring
from ontwin.pathfinder import precompute_backups
from ontwin.service_api import ServiceConfig, create_app
from ontwin.telemetry import emulate_telemetry, ingest

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    store = build_ring_store()
    populate_ring(store, 12)
    t0 = 1_700_000_000.0
    # 20 dB exceeds the EDFA gain headroom: power collapses on the faulted
    # link and its lightpaths drop below the degraded-margin threshold
    for step in range(28):  # 7 days x 4 samples
        extra = {"ring-R1-R2": 20.0} if step >= 16 else None
        for sample in emulate_telemetry(
            store, t0 + step * 21600.0, noise_sigma_db=0.0, extra_loss_by_link=extra
        ):
            ingest(store, sample)
    degraded_ids = [k for k, lp in store.lightpaths.items() if lp.state == "degraded"]
    for lp_id in degraded_ids + ["ring-lp01"]:
        precompute_backups(store, lp_id, 2)

    client = TestClient(create_app(store, ServiceConfig(persist=False)))
    fixtures = {
        "topology.json": client.get("/topology").json(),
        "lightpaths.json": client.get("/lightpaths").json(),
        "trx_curve.json": client.get("/trx-catalog/trx-400g-16qam-64gbd/curve").json(),
        "history.json": client.get("/lightpaths/ring-lp01/history").json(),
        "faults.json": client.get("/faults").json(),
        "whatif_accept.json": client.post(
            "/whatif", json={"src": "T2", "dst": "T5", "requested_bitrate_gbps": 400.0}
        ).json(),
        "whatif_reject.json": client.post(
            "/whatif", json={"src": "T2", "dst": "T5", "requested_bitrate_gbps": 1600.0}
        ).json(),
        "span_loss.json": client.post(
            "/scenario/span-loss",
            json={"lp_id": "ring-lp01", "added_losses_db": [0.0, 0.5, 1.0, 1.5, 2.0]},
        ).json(),
    }
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in fixtures.items():
        (OUT / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"recorded {name}")
    degraded = [s["lightpath"]["id"] for s in fixtures["lightpaths.json"]["lightpaths"]
                if s["lightpath"]["state"] == "degraded"]
    print(f"degraded LPs in fixture: {degraded}")
    assert degraded, "fixture must contain a degraded LP for the fault board"


if __name__ == "__main__":
    main()
