"""HTTP/JSON service exposing the twin to operators and the console.

Single process embedding one :class:`TwinStore`; mutations serialize
through the store's writer lock, reads see consistent snapshots.  Domain
rejections (a what-if that cannot be accepted) are 200 responses with a
reject verdict; transport-level errors map each module exception to a
stable machine-readable code.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import TwinError, UnknownLightpath
from .pathfinder import (
    ProvisionRequest,
    commit_provision,
    report_from_doc,
    whatif_provision,
)
from .schemas import SCHEMA_NAMES, schema
from .telemetry import (
    export_domain_qot,
    ingest,
    localize_fault,
    predict_margin_crossing,
    sample_from_doc,
    simulate_span_loss,
)
from .trx_model import trx_to_dict
from .twin_store import TwinStore, lightpath_from_doc, lightpath_to_doc


@dataclass
class ServiceConfig:
    data_dir: str | None = None
    catalog_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8040
    persist: bool = True
    console_dir: str | None = None

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        cfg = cls(**overrides)
        cfg.data_dir = overrides.get("data_dir") or os.environ.get("ONTWIN_DATA_DIR", cfg.data_dir)
        if "port" not in overrides and os.environ.get("ONTWIN_PORT"):
            cfg.port = int(os.environ["ONTWIN_PORT"])
        cfg.console_dir = overrides.get("console_dir") or os.environ.get("ONTWIN_CONSOLE_DIR")
        return cfg


class WhatifBody(BaseModel):
    src: str
    dst: str
    requested_bitrate_gbps: float
    target_margin_db: float = 2.0
    service_class: str = "default"
    allow_trx: list[str] | None = None
    k_routes: int = 3


class SpanLossBody(BaseModel):
    lp_id: str
    added_losses_db: list[float]


def _record_doc(rec) -> dict:
    return {
        "timestamp": rec.timestamp,
        "ber": rec.ber,
        "gsnr_db": rec.gsnr_db,
        "margin_db": rec.margin_db,
        "q_db": rec.q_db,
        "source": rec.source,
    }


def _lp_summary(store: TwinStore, lp_id: str) -> dict:
    lp = store.lightpath(lp_id)
    samples = store.history(lp_id).samples
    return {
        "lightpath": lightpath_to_doc(lp),
        "latest": _record_doc(samples[-1]) if samples else None,
        "history_len": len(samples),
    }


def create_app(store: TwinStore, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig(persist=False)
    app = FastAPI(title="ontwin", version="0.1.0")
    app.state.store = store
    app.state.config = config

    def _persist():
        if config.persist and config.data_dir:
            store.save(config.data_dir)

    @app.exception_handler(TwinError)
    async def _twin_error(_request: Request, exc: TwinError):
        body = {"code": exc.code, "message": str(exc)}
        if getattr(exc, "path", ""):
            body["path"] = exc.path
        if getattr(exc, "blocking", ()):
            body["blocking"] = list(exc.blocking)
        return JSONResponse(status_code=exc.http_status, content=body)

    @app.get("/topology")
    def get_topology():
        snap = store.snapshot()
        return {"revision": snap["revision"], "topology": snap["topology"]}

    @app.get("/lightpaths")
    def get_lightpaths():
        return {
            "revision": store.revision,
            "lightpaths": [_lp_summary(store, lp_id) for lp_id in sorted(store.lightpaths)],
        }

    @app.post("/lightpaths", status_code=201)
    def post_lightpath(doc: dict):
        from .schemas import validate_document

        validate_document("lightpath", doc)
        lp = lightpath_from_doc(doc)
        store.register_lightpath(lp)
        _persist()
        return {"lp_id": lp.id, "revision": store.revision}

    @app.get("/lightpaths/{lp_id}")
    def get_lightpath(lp_id: str):
        return _lp_summary(store, lp_id)

    @app.post("/whatif")
    def post_whatif(body: WhatifBody):
        request = ProvisionRequest(
            src=body.src,
            dst=body.dst,
            requested_bitrate_gbps=body.requested_bitrate_gbps,
            target_margin_db=body.target_margin_db,
            service_class=body.service_class,
            allow_trx=tuple(body.allow_trx) if body.allow_trx else None,
        )
        report = whatif_provision(store, request, k=body.k_routes)
        return report.to_doc()

    @app.post("/lightpaths/{lp_id}/commit", status_code=201)
    def post_commit(lp_id: str, doc: dict):
        report = report_from_doc(doc)
        if report.lp_id != lp_id:
            raise UnknownLightpath(f"report is for {report.lp_id!r}, not {lp_id!r}")
        committed = commit_provision(store, report, timestamp=time.time())
        _persist()
        return {"lp_id": committed, "revision": store.revision}

    @app.post("/telemetry")
    async def post_telemetry(request: Request):
        body = await request.json()
        docs = body if isinstance(body, list) else [body]
        records = []
        for doc in docs:
            sample = sample_from_doc(doc)
            records.append({"lp_id": sample.lp_id, **_record_doc(ingest(store, sample))})
        _persist()
        return {"ingested": records}

    @app.get("/lightpaths/{lp_id}/history")
    def get_history(lp_id: str):
        samples = store.history(lp_id).samples
        return {"lp_id": lp_id, "samples": [_record_doc(r) for r in samples]}

    @app.get("/lightpaths/{lp_id}/margin-forecast")
    def get_forecast(lp_id: str, threshold_db: float = Query(default=1.0)):
        estimate = predict_margin_crossing(store.history(lp_id), threshold_db)
        if estimate is None:
            return {"lp_id": lp_id, "threshold_db": threshold_db, "crossing": None}
        return {
            "lp_id": lp_id,
            "threshold_db": threshold_db,
            "crossing": {
                "timestamp": estimate.crossing_timestamp,
                "stderr_seconds": estimate.stderr_seconds,
                "slope_db_per_day": estimate.slope_db_per_day,
            },
        }

    @app.get("/faults")
    def get_faults():
        degraded = [k for k, lp in store.lightpaths.items() if lp.state == "degraded"]
        healthy = [k for k, lp in store.lightpaths.items() if lp.state == "active"]
        if not degraded:
            return {"hypotheses": [], "degraded": [], "healthy_witnesses": [], "ticket_text": ""}
        hyp = localize_fault(store, degraded, healthy)
        return {
            "hypotheses": [{"link_id": l, "score": s} for l, s in hyp.ranked],
            "degraded": list(hyp.evidence),
            "healthy_witnesses": list(hyp.healthy_witnesses),
            "ticket_text": hyp.ticket_text,
        }

    @app.post("/scenario/span-loss")
    def post_span_loss(body: SpanLossBody):
        steps = simulate_span_loss(store, body.lp_id, body.added_losses_db)
        return {
            "lp_id": body.lp_id,
            "steps": [
                {
                    "added_loss_db": s.added_loss_db,
                    "gsnr_db": s.gsnr_db,
                    "ber": s.ber,
                    "q_db": s.q_db,
                    "rx_power_dbm": s.rx_power_dbm,
                }
                for s in steps
            ],
        }

    @app.get("/trx-catalog")
    def get_catalog():
        return [trx_to_dict(t) for t in store.catalog]

    @app.get("/trx-catalog/{trx_id}/curve")
    def get_trx_curve(trx_id: str, lo_db: float = -5.0, hi_db: float = 40.0, step_db: float = 0.25):
        """Sampled back-to-back curve so clients never do QoT math."""
        from .trx_model import btb_ber, gsnr_at_fec_limit

        try:
            trx = store.trx(trx_id)
        except KeyError as exc:
            raise UnknownLightpath(str(exc)) from None
        points = []
        g = lo_db
        while g <= hi_db + 1e-9:
            points.append([g, btb_ber(trx, g)])
            g += step_db
        return {
            "trx_id": trx_id,
            "points": points,
            "fec_limit_ber": trx.fec.pre_fec_ber_limit,
            "gsnr_at_fec_db": gsnr_at_fec_limit(trx),
        }

    @app.get("/domains/qot")
    def get_domain_qot(lp_id: str):
        segments = export_domain_qot(store, lp_id, timestamp=time.time())
        return {"lp_id": lp_id, "segments": [s.to_doc() for s in segments]}

    @app.get("/schema")
    def get_schema_index():
        return {"schemas": list(SCHEMA_NAMES)}

    @app.get("/schema/{name}")
    def get_schema(name: str):
        try:
            return schema(name)
        except KeyError as exc:
            return JSONResponse(status_code=404, content={"code": "UnknownSchema", "message": str(exc)})

    console = config.console_dir
    if console and Path(console).is_dir():
        app.mount("/ui", StaticFiles(directory=console, html=True), name="console")

    return app


def build_store(config: ServiceConfig) -> TwinStore:
    if not config.data_dir:
        raise ValueError("service needs a data directory (ONTWIN_DATA_DIR or --data-dir)")
    data_dir = Path(config.data_dir)
    if not (data_dir / "topology.json").exists():
        raise FileNotFoundError(f"no topology.json under {data_dir}; run `ontwin init` first")
    catalog = None
    if config.catalog_path:
        from .trx_model import load_catalog

        catalog = load_catalog(config.catalog_path)
    return TwinStore.load(data_dir, catalog)


def serve(config: ServiceConfig) -> None:
    """Validate config, build the store, then accept traffic."""
    import uvicorn

    store = build_store(config)
    app = create_app(store, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
