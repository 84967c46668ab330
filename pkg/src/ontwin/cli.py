"""Operator CLI mirroring the HTTP surface on a data directory.

Exit codes: 0 success, 1 domain rejection or twin error, 2 usage error.
JSON output of a subcommand matches the corresponding service endpoint
payload byte for byte (modulo the table formatting wrapper).
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from .errors import TwinError
from .fixtures import FIXTURES, populate_ring
from .pathfinder import (
    ProvisionRequest,
    commit_provision,
    enumerate_candidates,
    precompute_backups,
    report_from_doc,
    whatif_provision,
)
from .telemetry import (
    emulate_telemetry,
    generate_fault_scenario,
    ingest,
    sample_from_doc,
    simulate_span_loss,
)
from .twin_store import TwinStore, lightpath_to_doc

DATA_DIR_OPTION = click.option(
    "--data-dir",
    envvar="ONTWIN_DATA_DIR",
    default="./twin-data",
    show_default=True,
    help="Twin state directory (topology.json, lightpaths.json, history.jsonl).",
)


def _load_store(data_dir: str) -> TwinStore:
    path = Path(data_dir)
    if not (path / "topology.json").exists():
        raise click.ClickException(f"no twin state under {path}; run `ontwin init` first")
    return TwinStore.load(path)


def _echo_json(doc) -> None:
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _record_doc(rec) -> dict:
    return {
        "timestamp": rec.timestamp,
        "ber": rec.ber,
        "gsnr_db": rec.gsnr_db,
        "margin_db": rec.margin_db,
        "q_db": rec.q_db,
        "source": rec.source,
    }


def _fmt(value, digits=2) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


@click.group()
def main() -> None:
    """Optical network digital twin."""


@main.command()
@DATA_DIR_OPTION
@click.option("--fixture", type=click.Choice(sorted(FIXTURES)), default="ring", show_default=True)
@click.option("--populate", type=int, default=0, help="Ring only: register N demo lightpaths.")
@click.option("--force", is_flag=True, help="Overwrite an existing data directory.")
def init(data_dir, fixture, populate, force):
    """Write a fixture topology (and optionally demo lightpaths)."""
    path = Path(data_dir)
    if (path / "topology.json").exists() and not force:
        raise click.ClickException(f"{path} already initialized (use --force to overwrite)")
    if force:
        for name in ("topology.json", "lightpaths.json", "history.jsonl"):
            (path / name).unlink(missing_ok=True)
    store = FIXTURES[fixture]()
    if populate:
        if fixture != "ring":
            raise click.UsageError("--populate is only supported for the ring fixture")
        populate_ring(store, populate)
        now = time.time()
        for lp_id in sorted(store.lightpaths):
            for sample in emulate_telemetry(store, now, noise_sigma_db=0.0):
                if sample.lp_id == lp_id:
                    ingest(store, sample)
    store.save(path)
    from .trx_model import load_catalog, trx_to_dict

    (path / "trx_catalog.json").write_text(
        json.dumps([trx_to_dict(t) for t in load_catalog()], indent=2) + "\n"
    )
    click.echo(f"initialized {fixture} fixture in {path} (revision {store.revision})")


@main.command()
@DATA_DIR_OPTION
@click.option("--src", required=True)
@click.option("--dst", required=True)
@click.option("--bitrate", "bitrate", type=float, required=True, help="Requested bitrate, Gb/s.")
@click.option("--margin", "margin_db", type=float, default=2.0, show_default=True)
@click.option("--k", type=int, default=3, show_default=True, help="Candidate routes.")
def plan(data_dir, src, dst, bitrate, margin_db, k):
    """Print the per-candidate GSNR/margin table without provisioning."""
    store = _load_store(data_dir)
    request = ProvisionRequest(src=src, dst=dst, requested_bitrate_gbps=bitrate, target_margin_db=margin_db)
    evals, failure = enumerate_candidates(store, request, k)
    if failure:
        click.echo(f"no candidates: {failure}")
        sys.exit(1)
    click.echo(f"{'route':50s} {'trx':24s} {'gsnr dB':>8s} {'margin dB':>10s} verdict")
    for c in evals:
        route = "-".join(c.route)
        verdict = "feasible" if c.feasible else (c.reason or "infeasible")
        click.echo(f"{route:50s} {c.trx_id:24s} {_fmt(c.gsnr_db):>8s} {_fmt(c.margin_db):>10s} {verdict}")


@main.command()
@DATA_DIR_OPTION
@click.option("--src", required=True)
@click.option("--dst", required=True)
@click.option("--bitrate", "bitrate", type=float, required=True)
@click.option("--margin", "margin_db", type=float, default=2.0, show_default=True)
@click.option("--service-class", default="default", show_default=True)
@click.option("--allow-trx", multiple=True, help="Restrict to these TRx ids.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Save the report JSON for commit.")
def whatif(data_dir, src, dst, bitrate, margin_db, service_class, allow_trx, fmt, out):
    """Simulate provisioning; exit 1 on a reject verdict."""
    store = _load_store(data_dir)
    request = ProvisionRequest(
        src=src,
        dst=dst,
        requested_bitrate_gbps=bitrate,
        target_margin_db=margin_db,
        service_class=service_class,
        allow_trx=tuple(allow_trx) or None,
    )
    report = whatif_provision(store, request)
    doc = report.to_doc()
    if out:
        Path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if fmt == "json":
        _echo_json(doc)
    else:
        click.echo(f"verdict: {report.verdict}" + (f" ({report.reason})" if report.reason else ""))
        if report.route:
            click.echo(f"route:   {'-'.join(report.route)}")
            click.echo(f"trx:     {report.trx_id}")
            click.echo(
                f"new LP:  gsnr {_fmt(report.new_lp_gsnr_db)} dB, margin {_fmt(report.new_lp_margin_db)} dB"
            )
        if report.impacts:
            click.echo(f"{'impacted lp':16s} {'before dB':>10s} {'after dB':>10s} {'margin dB':>10s}")
            for i in report.impacts:
                mark = " *violated*" if i.lp_id in report.violated else ""
                click.echo(
                    f"{i.lp_id:16s} {_fmt(i.gsnr_before_db):>10s} {_fmt(i.gsnr_after_db):>10s}"
                    f" {_fmt(i.margin_after_db):>10s}{mark}"
                )
    sys.exit(0 if report.verdict == "accept" else 1)


@main.command()
@DATA_DIR_OPTION
@click.option("--report", "report_path", type=click.Path(exists=True, dir_okay=False), required=True)
def commit(data_dir, report_path):
    """Commit a previously saved accept report."""
    store = _load_store(data_dir)
    report = report_from_doc(json.loads(Path(report_path).read_text()))
    lp_id = commit_provision(store, report, timestamp=time.time())
    store.save(data_dir)
    click.echo(f"committed {lp_id} (revision {store.revision})")


@main.command("ingest")
@DATA_DIR_OPTION
@click.option("--file", "file_path", type=click.Path(exists=True, dir_okay=False), required=True)
def ingest_cmd(data_dir, file_path):
    """Replay a telemetry.jsonl file into the twin."""
    store = _load_store(data_dir)
    ok = flagged = 0
    for line in Path(file_path).read_text().splitlines():
        if not line.strip():
            continue
        record = ingest(store, sample_from_doc(json.loads(line)))
        if record.gsnr_db is None:
            flagged += 1
        else:
            ok += 1
    store.save(data_dir)
    click.echo(f"ingested {ok + flagged} samples ({flagged} flagged without GSNR estimate)")


@main.command()
@DATA_DIR_OPTION
@click.option("--lp", "lp_id", default=None, help="Limit to one lightpath.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
def report(data_dir, lp_id, fmt):
    """Per-LP QoT summary (state, latest GSNR/margin/Q)."""
    store = _load_store(data_dir)
    ids = [lp_id] if lp_id else sorted(store.lightpaths)
    docs = []
    for i in ids:
        lp = store.lightpath(i)
        samples = store.history(i).samples
        docs.append(
            {
                "lightpath": lightpath_to_doc(lp),
                "latest": _record_doc(samples[-1]) if samples else None,
                "history_len": len(samples),
            }
        )
    if fmt == "json":
        _echo_json(docs[0] if lp_id else docs)
        return
    click.echo(f"{'lp':16s} {'state':10s} {'trx':24s} {'gsnr dB':>8s} {'margin dB':>10s} {'q dB':>7s} samples")
    for d in docs:
        lp = d["lightpath"]
        latest = d["latest"] or {}
        click.echo(
            f"{lp['id']:16s} {lp['state']:10s} {lp['trx_id']:24s}"
            f" {_fmt(latest.get('gsnr_db')):>8s} {_fmt(latest.get('margin_db')):>10s}"
            f" {_fmt(latest.get('q_db')):>7s} {d['history_len']}"
        )


@main.command()
@DATA_DIR_OPTION
@click.option("--lp", "lp_id", required=True)
@click.option("--k", type=int, default=2, show_default=True)
def backups(data_dir, lp_id, k):
    """Precompute link-disjoint backup routes for a lightpath."""
    store = _load_store(data_dir)
    routes = precompute_backups(store, lp_id, k)
    store.save(data_dir)
    if not routes:
        click.echo("no feasible disjoint backup route")
        return
    for b in routes:
        click.echo(f"{'-'.join(b.route)}  margin {b.margin_db:.2f} dB")


@main.group()
def scenario() -> None:
    """Degradation and fault scenario generators."""


@scenario.command("telemetry")
@DATA_DIR_OPTION
@click.option("--days", type=int, default=7, show_default=True)
@click.option("--per-day", type=int, default=4, show_default=True)
@click.option("--noise", "noise_sigma_db", type=float, default=0.02, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--fault-link", default=None, help="Inject extra loss on this link.")
@click.option("--fault-loss", type=float, default=3.0, show_default=True, help="Injected loss, dB.")
@click.option("--fault-at-day", type=int, default=None, help="Day index the fault appears.")
@click.option("--ramp", is_flag=True, help="Ramp the fault loss linearly instead of a step.")
@click.option("--start-ts", type=float, default=1700000000.0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def scenario_telemetry(
    data_dir, days, per_day, noise_sigma_db, seed, fault_link, fault_loss, fault_at_day, ramp, start_ts, out
):
    """Emulate telemetry from the twin's own model into a jsonl file."""
    store = _load_store(data_dir)
    rng = np.random.default_rng(seed)
    lines = []
    total = days * per_day
    for step in range(total):
        ts = start_ts + step * (86400.0 / per_day)
        day = step / per_day
        extra = None
        if fault_link is not None and fault_at_day is not None and day >= fault_at_day:
            loss = fault_loss
            if ramp:
                span = max(days - fault_at_day, 1)
                loss = fault_loss * min((day - fault_at_day) / span, 1.0)
            extra = {fault_link: loss}
        for sample in emulate_telemetry(
            store, ts, rng=rng if noise_sigma_db > 0 else None,
            noise_sigma_db=noise_sigma_db, extra_loss_by_link=extra,
        ):
            lines.append(json.dumps(sample.to_doc(), sort_keys=True))
    Path(out).write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {len(lines)} samples to {out}")


@scenario.command("span-loss")
@DATA_DIR_OPTION
@click.option("--lp", "lp_id", required=True)
@click.option("--steps", default="0,0.5,1.0,1.5", show_default=True, help="Comma-separated dB steps.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
def scenario_span_loss(data_dir, lp_id, steps, fmt):
    """Q trajectory as equal loss is added to every span of the LP route."""
    store = _load_store(data_dir)
    losses = [float(s) for s in steps.split(",") if s.strip()]
    result = simulate_span_loss(store, lp_id, losses)
    doc = {
        "lp_id": lp_id,
        "steps": [
            {
                "added_loss_db": s.added_loss_db,
                "gsnr_db": s.gsnr_db,
                "ber": s.ber,
                "q_db": s.q_db,
                "rx_power_dbm": s.rx_power_dbm,
            }
            for s in result
        ],
    }
    if fmt == "json":
        _echo_json(doc)
        return
    click.echo(f"{'added dB':>9s} {'gsnr dB':>8s} {'q dB':>7s} {'ber':>10s}")
    for s in result:
        click.echo(f"{s.added_loss_db:>9.2f} {s.gsnr_db:>8.2f} {s.q_db:>7.2f} {s.ber:>10.3e}")


@scenario.command("faults")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=10, show_default=True)
def scenario_faults(seed, count):
    """Seeded lossy-link scenarios on the DCX mesh with localization scores."""
    top1 = top3 = 0
    for s in range(seed, seed + count):
        sc = generate_fault_scenario(s)
        ranked = [l for l, _ in sc.hypothesis.ranked]
        hit1 = ranked[0] == sc.injected_link
        hit3 = sc.injected_link in ranked[:3]
        top1 += hit1
        top3 += hit3
        click.echo(
            f"seed {s}: injected {sc.injected_link} ({sc.injected_loss_db:.1f} dB), "
            f"top-1 {ranked[0]}{' HIT' if hit1 else ' miss'}"
        )
    click.echo(f"top-1 {top1}/{count}, top-3 {top3}/{count}")


@main.command()
@DATA_DIR_OPTION
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, envvar="ONTWIN_PORT", default=8040, show_default=True)
@click.option("--console-dir", default=None, help="Static console assets to mount at /ui.")
def serve(data_dir, host, port, console_dir):
    """Run the HTTP service on a data directory."""
    from .service_api import ServiceConfig, serve as run_service

    config = ServiceConfig(data_dir=data_dir, host=host, port=port, console_dir=console_dir)
    run_service(config)


def entrypoint(argv=None) -> int:
    """Testable wrapper: returns exit codes instead of raising SystemExit."""
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except TwinError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
