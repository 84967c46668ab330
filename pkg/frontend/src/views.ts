// View models and templates. View models are pure functions from API
// payloads to the exact values rendered; contract tests assert that every
// numeric in them is a verbatim service field.

import { circleLayout, linearScale, log10Scale, polyline } from "./chart.js";
import { db, dbm, decimate, sci, timestamp } from "./format.js";
import type { ViewState } from "./state.js";
import { canCommit } from "./state.js";
import type {
  FaultsResponse,
  HistoryResponse,
  LightpathsResponse,
  LightpathSummary,
  ProvisionReportDoc,
  SpanLossResponse,
  TopologyResponse,
  TrxCurveResponse,
} from "./types.js";

const W = 720;
const H = 420;

// ------------------------------------------------------------- topology map

export interface TopologyViewModel {
  nodes: { id: string; kind: string; x: number; y: number }[];
  links: {
    id: string;
    a: string;
    b: string;
    mode: string;
    lpIds: string[];
    worstState: string;
  }[];
}

const STATE_RANK = { failed: 3, degraded: 2, active: 1, planned: 0 } as const;

export function topologyViewModel(
  topo: TopologyResponse,
  lps: LightpathsResponse,
): TopologyViewModel {
  const roadms = topo.topology.nodes.filter((n) => n.kind === "roadm").map((n) => n.id);
  const sites = topo.topology.nodes.filter((n) => n.kind === "trx_site").map((n) => n.id);
  const positions = circleLayout(roadms, W / 2, H / 2, Math.min(W, H) / 2 - 80);
  const sitePositions = circleLayout(sites, W / 2, H / 2, Math.min(W, H) / 2 - 28);
  const nodes = topo.topology.nodes.map((n) => {
    const [x, y] = (n.kind === "roadm" ? positions : sitePositions).get(n.id) ?? [W / 2, H / 2];
    return { id: n.id, kind: n.kind, x, y };
  });
  const links = topo.topology.links.map((link) => {
    const carrying = lps.lightpaths.filter((s) => s.lightpath.route.includes(link.id));
    let worst = "";
    let rank = -1;
    for (const s of carrying) {
      const r = STATE_RANK[s.lightpath.state] ?? 0;
      if (r > rank) {
        rank = r;
        worst = s.lightpath.state;
      }
    }
    return {
      id: link.id,
      a: link.a,
      b: link.b,
      mode: link.mode,
      lpIds: carrying.map((s) => s.lightpath.id),
      worstState: worst,
    };
  });
  return { nodes, links };
}

export function renderTopology(model: TopologyViewModel, state: ViewState): string {
  const pos = new Map(model.nodes.map((n) => [n.id, [n.x, n.y] as [number, number]]));
  const edges = model.links
    .map((link) => {
      const [x1, y1] = pos.get(link.a)!;
      const [x2, y2] = pos.get(link.b)!;
      const cls = [
        "link",
        link.worstState,
        link.mode,
        state.selectedLink === link.id ? "selected" : "",
      ].join(" ");
      return `<line class="${cls}" data-link="${link.id}" x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}"><title>${link.id} (${link.mode}, ${link.lpIds.length} LPs)</title></line>`;
    })
    .join("\n");
  const dots = model.nodes
    .map((n) => {
      const r = n.kind === "roadm" ? 11 : 6;
      return `<g class="node ${n.kind}"><circle cx="${n.x.toFixed(1)}" cy="${n.y.toFixed(1)}" r="${r}"/><text x="${n.x.toFixed(1)}" y="${(n.y - r - 5).toFixed(1)}">${n.id}</text></g>`;
    })
    .join("\n");
  const selected = model.links.find((l) => l.id === state.selectedLink);
  const listing = selected
    ? `<div class="link-listing"><strong>${selected.id}</strong> carries: ${
        selected.lpIds.length ? selected.lpIds.map((i) => `<a data-lp="${i}" href="#">${i}</a>`).join(", ") : "no lightpaths"
      }</div>`
    : `<div class="link-listing dim">click a link to list its lightpaths</div>`;
  return `<svg viewBox="0 0 ${W} ${H}" class="topology">${edges}\n${dots}</svg>${listing}`;
}

// ----------------------------------------------------------- margin chart

export interface MarginChartModel {
  trxId: string;
  curve: [number, number][];
  fecLimitBer: number;
  gsnrAtFecDb: number;
  operating: { gsnrDb: number; ber: number; marginDb: number } | null;
}

export function marginChartModel(
  curve: TrxCurveResponse,
  summary: LightpathSummary,
): MarginChartModel {
  const latest = summary.latest;
  const operating =
    latest && latest.gsnr_db !== null && latest.margin_db !== null
      ? { gsnrDb: latest.gsnr_db, ber: latest.ber, marginDb: latest.margin_db }
      : null;
  return {
    trxId: curve.trx_id,
    curve: decimate(curve.points),
    fecLimitBer: curve.fec_limit_ber,
    gsnrAtFecDb: curve.gsnr_at_fec_db,
    operating,
  };
}

export function renderMarginChart(model: MarginChartModel): string {
  const bers = model.curve.map(([, b]) => b);
  const berLo = Math.max(Math.min(...bers), 1e-18);
  const berHi = Math.max(...bers, model.fecLimitBer);
  const x = linearScale(model.curve[0][0], model.curve[model.curve.length - 1][0], 50, W - 15);
  const y = log10Scale(berLo, berHi, H - 35, 15);
  const curvePath = polyline(
    model.curve.filter(([, b]) => b >= berLo),
    x,
    y,
  );
  const fecY = y(model.fecLimitBer).toFixed(1);
  let marker = "";
  let annotation = `<div class="annotation dim">no GSNR estimate for this lightpath yet</div>`;
  if (model.operating) {
    const px = x(model.operating.gsnrDb).toFixed(1);
    const py = y(Math.max(model.operating.ber, berLo)).toFixed(1);
    marker =
      `<circle class="op-point" cx="${px}" cy="${py}" r="5"/>` +
      `<line class="margin-gap" x1="${px}" y1="${py}" x2="${x(model.gsnrAtFecDb).toFixed(1)}" y2="${fecY}"/>`;
    annotation = `<div class="annotation">operating point: GSNR ${db(model.operating.gsnrDb)}, BER ${sci(model.operating.ber)} — margin <strong>${db(model.operating.marginDb)}</strong> above the FEC limit (${db(model.gsnrAtFecDb)})</div>`;
  }
  return (
    `<svg viewBox="0 0 ${W} ${H}" class="chart">` +
    `<path class="btb-curve" d="${curvePath}"/>` +
    `<line class="fec-limit" x1="50" y1="${fecY}" x2="${W - 15}" y2="${fecY}"/>` +
    `<text class="axis" x="${W - 18}" y="${Number(fecY) - 6}" text-anchor="end">FEC limit ${sci(model.fecLimitBer)}</text>` +
    `<text class="axis" x="${W / 2}" y="${H - 8}" text-anchor="middle">GSNR (dB) — TRx ${model.trxId}</text>` +
    marker +
    `</svg>` +
    annotation
  );
}

// ---------------------------------------------------------- history chart

export interface HistoryChartModel {
  lpId: string;
  points: { ts: number; marginDb: number }[];
}

export function historyChartModel(history: HistoryResponse): HistoryChartModel {
  const points = history.samples
    .filter((s) => s.margin_db !== null)
    .map((s) => ({ ts: s.timestamp, marginDb: s.margin_db as number }));
  return { lpId: history.lp_id, points: decimate(points) };
}

export function renderHistoryChart(model: HistoryChartModel): string {
  if (model.points.length === 0) {
    return `<div class="annotation dim">no margin history for ${model.lpId}</div>`;
  }
  const ts = model.points.map((p) => p.ts);
  const margins = model.points.map((p) => p.marginDb);
  const x = linearScale(Math.min(...ts), Math.max(...ts), 50, W - 15);
  const y = linearScale(Math.min(...margins, 0), Math.max(...margins) + 1, H - 35, 15);
  const path = polyline(model.points.map((p) => [p.ts, p.marginDb] as [number, number]), x, y);
  const last = model.points[model.points.length - 1];
  return (
    `<svg viewBox="0 0 ${W} ${H}" class="chart">` +
    `<path class="history-line" d="${path}"/>` +
    `<text class="axis" x="${W / 2}" y="${H - 8}" text-anchor="middle">margin (dB) over time — ${model.lpId}</text>` +
    `</svg>` +
    `<div class="annotation">latest margin ${db(last.marginDb)} at ${timestamp(last.ts)} (${model.points.length} samples)</div>`
  );
}

// --------------------------------------------------------- span-loss chart

export interface SpanLossChartModel {
  lpId: string;
  steps: { addedDb: number; qDb: number }[];
}

export function spanLossChartModel(response: SpanLossResponse): SpanLossChartModel {
  return {
    lpId: response.lp_id,
    steps: response.steps.map((s) => ({ addedDb: s.added_loss_db, qDb: s.q_db })),
  };
}

export function renderSpanLossChart(model: SpanLossChartModel): string {
  const xs = model.steps.map((s) => s.addedDb);
  const qs = model.steps.map((s) => s.qDb);
  const x = linearScale(Math.min(...xs), Math.max(...xs), 50, W - 15);
  const y = linearScale(Math.min(...qs) - 0.5, Math.max(...qs) + 0.5, H - 35, 15);
  const path = polyline(model.steps.map((s) => [s.addedDb, s.qDb] as [number, number]), x, y);
  const rows = model.steps
    .map((s) => `<tr><td>${s.addedDb.toFixed(2)}</td><td>${s.qDb.toFixed(2)}</td></tr>`)
    .join("");
  return (
    `<svg viewBox="0 0 ${W} ${H}" class="chart"><path class="q-line" d="${path}"/>` +
    `<text class="axis" x="${W / 2}" y="${H - 8}" text-anchor="middle">Q (dB) vs added per-span loss (dB) — ${model.lpId}</text></svg>` +
    `<table class="mini"><thead><tr><th>added dB</th><th>Q dB</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

// -------------------------------------------------------------- LP listing

export function renderLightpathTable(lps: LightpathsResponse, state: ViewState): string {
  const rows = lps.lightpaths
    .map((s) => {
      const lp = s.lightpath;
      const latest = s.latest;
      const cls = [lp.state, state.selectedLp === lp.id ? "selected" : ""].join(" ");
      return (
        `<tr class="${cls}" data-lp="${lp.id}">` +
        `<td>${lp.id}</td><td class="state">${lp.state}</td><td>${lp.trx_id}</td>` +
        `<td>${lp.src}→${lp.dst}</td>` +
        `<td>${latest ? db(latest.gsnr_db) : "-"}</td>` +
        `<td>${latest ? db(latest.margin_db) : "-"}</td>` +
        `<td>${latest ? db(latest.q_db) : "-"}</td>` +
        `</tr>`
      );
    })
    .join("\n");
  return (
    `<table class="lp-table"><thead><tr>` +
    `<th>lightpath</th><th>state</th><th>trx</th><th>path</th><th>gsnr</th><th>margin</th><th>q</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

// ------------------------------------------------------------------ wizard

export interface WizardImpactRow {
  lpId: string;
  beforeDb: number;
  afterDb: number;
  marginAfterDb: number;
  violated: boolean;
}

export function wizardImpactRows(report: ProvisionReportDoc): WizardImpactRow[] {
  return report.impacts.map((impact) => ({
    lpId: impact.lp_id,
    beforeDb: impact.gsnr_before_db,
    afterDb: impact.gsnr_after_db,
    marginAfterDb: impact.margin_after_db,
    violated: report.violated.includes(impact.lp_id),
  }));
}

export function renderWizard(state: ViewState): string {
  const { wizard } = state;
  const form = `
    <form id="whatif-form" class="wizard-form">
      <label>src <input name="src" required placeholder="T1"></label>
      <label>dst <input name="dst" required placeholder="T4"></label>
      <label>bitrate (Gb/s) <input name="bitrate" type="number" value="400" required></label>
      <label>target margin (dB) <input name="margin" type="number" step="0.1" value="2.0"></label>
      <button type="submit">run what-if</button>
    </form>`;
  if (!wizard.report) {
    const note =
      wizard.phase === "committed"
        ? `<div class="banner ok">committed ${wizard.committedLpId}</div>`
        : "";
    return form + note;
  }
  const report = wizard.report;
  const staleBanner =
    wizard.phase === "stale"
      ? `<div class="banner stale">store changed (report taken at revision ${report.revision}, now ${state.revision}) — re-run what-if${wizard.error ? ` — ${wizard.error}` : ""}</div>`
      : "";
  const verdictLine =
    report.verdict === "accept"
      ? `<div class="verdict accept">accept — ${report.trx_id} over ${report.route?.join(" · ")}, new LP GSNR ${db(report.new_lp?.gsnr_db)}, margin ${db(report.new_lp?.margin_db)}, rx ${dbm(report.new_lp?.rx_power_dbm)}</div>`
      : `<div class="verdict reject">reject — ${report.reason}</div>`;
  const impactRows = wizardImpactRows(report)
    .map(
      (row) =>
        `<tr class="${row.violated ? "violated" : ""}"><td>${row.lpId}</td>` +
        `<td>${db(row.beforeDb)}</td><td>${db(row.afterDb)}</td><td>${db(row.marginAfterDb)}</td>` +
        `<td>${row.violated ? "violated" : "ok"}</td></tr>`,
    )
    .join("\n");
  const impacts = report.impacts.length
    ? `<table class="impacts"><thead><tr><th>existing lp</th><th>gsnr before</th><th>gsnr after</th><th>margin after</th><th></th></tr></thead><tbody>${impactRows}</tbody></table>`
    : `<div class="annotation dim">no co-routed lightpaths affected</div>`;
  const commitDisabled = canCommit(state) ? "" : "disabled";
  const actions =
    report.verdict === "accept"
      ? `<button id="commit-btn" ${commitDisabled}>commit ${report.lp_id}</button>
         <button id="discard-btn" type="button">discard</button>`
      : `<button id="discard-btn" type="button">discard</button>`;
  return form + staleBanner + verdictLine + impacts + `<div class="actions">${actions}</div>`;
}

// ------------------------------------------------------------- fault board

export interface FaultBoardModel {
  rows: { linkId: string; score: number }[];
  evidence: string[];
  witnesses: string[];
  ticket: string;
  restoreDrafts: {
    lpId: string;
    backupRoute: string[] | null;
    request: { src: string; dst: string; requested_bitrate_gbps: number; target_margin_db: number; allow_trx: string[] };
  }[];
}

export function faultBoardModel(faults: FaultsResponse, lps: LightpathsResponse): FaultBoardModel {
  const byId = new Map(lps.lightpaths.map((s) => [s.lightpath.id, s.lightpath]));
  const restoreDrafts = faults.degraded
    .map((lpId) => byId.get(lpId))
    .filter((lp): lp is NonNullable<typeof lp> => lp !== undefined)
    .map((lp) => ({
      lpId: lp.id,
      backupRoute: lp.backups.length ? lp.backups[0].route : null,
      request: {
        src: lp.src,
        dst: lp.dst,
        requested_bitrate_gbps: bitrateOf(lp.trx_id),
        target_margin_db: lp.target_margin_db,
        allow_trx: [lp.trx_id],
      },
    }));
  return {
    rows: faults.hypotheses.map((h) => ({ linkId: h.link_id, score: h.score })),
    evidence: faults.degraded,
    witnesses: faults.healthy_witnesses,
    ticket: faults.ticket_text,
    restoreDrafts,
  };
}

export function bitrateOf(trxId: string): number {
  const match = trxId.match(/(\d+)g/);
  return match ? Number(match[1]) : 100;
}

export function renderFaultBoard(model: FaultBoardModel): string {
  if (model.rows.length === 0) {
    return `<div class="annotation dim">no degradation observed — board is empty</div>`;
  }
  const rows = model.rows
    .slice(0, 8)
    .map(
      (row, i) =>
        `<tr class="${i === 0 ? "prime" : ""}"><td>${i + 1}</td><td>${row.linkId}</td><td>${row.score.toFixed(2)}</td></tr>`,
    )
    .join("\n");
  const restores = model.restoreDrafts
    .map(
      (draft) =>
        `<li><a data-lp="${draft.lpId}" href="#">${draft.lpId}</a> ` +
        (draft.backupRoute
          ? `<button class="restore-btn" data-restore="${draft.lpId}">simulate restoration via ${draft.backupRoute.join(" · ")}</button>`
          : `<span class="dim">no precomputed backup</span>`),
    )
    .join("\n");
  return (
    `<table class="faults"><thead><tr><th>#</th><th>link</th><th>score</th></tr></thead><tbody>${rows}</tbody></table>` +
    `<pre class="ticket">${model.ticket}</pre>` +
    `<ul class="restores">${restores}</ul>`
  );
}
