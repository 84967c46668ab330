// Contract tests on recorded service fixtures: every numeric a view model
// exposes (and the views render) must equal the corresponding API field.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { initialState } from "../src/state.js";
import type {
  FaultsResponse,
  HistoryResponse,
  LightpathsResponse,
  ProvisionReportDoc,
  SpanLossResponse,
  TopologyResponse,
  TrxCurveResponse,
} from "../src/types.js";
import {
  faultBoardModel,
  historyChartModel,
  marginChartModel,
  renderFaultBoard,
  renderLightpathTable,
  renderMarginChart,
  renderWizard,
  spanLossChartModel,
  topologyViewModel,
  wizardImpactRows,
} from "../src/views.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8")) as T;
}

const topo = fixture<TopologyResponse>("topology.json");
const lps = fixture<LightpathsResponse>("lightpaths.json");
const curve = fixture<TrxCurveResponse>("trx_curve.json");
const history = fixture<HistoryResponse>("history.json");
const faults = fixture<FaultsResponse>("faults.json");
const accept = fixture<ProvisionReportDoc>("whatif_accept.json");
const reject = fixture<ProvisionReportDoc>("whatif_reject.json");
const spanLoss = fixture<SpanLossResponse>("span_loss.json");

describe("margin chart", () => {
  const summary = lps.lightpaths.find((s) => s.lightpath.id === "ring-lp01")!;
  const model = marginChartModel(curve, summary);

  it("takes curve, FEC limit and FEC-crossing GSNR verbatim from the API", () => {
    expect(model.fecLimitBer).toBe(curve.fec_limit_ber);
    expect(model.gsnrAtFecDb).toBe(curve.gsnr_at_fec_db);
    const recorded = new Set(curve.points.map(([g, b]) => `${g}:${b}`));
    for (const [g, b] of model.curve) {
      expect(recorded.has(`${g}:${b}`)).toBe(true); // decimation only selects
    }
  });

  it("places the operating point at the latest history fields", () => {
    expect(model.operating).not.toBeNull();
    expect(model.operating!.gsnrDb).toBe(summary.latest!.gsnr_db);
    expect(model.operating!.ber).toBe(summary.latest!.ber);
    expect(model.operating!.marginDb).toBe(summary.latest!.margin_db);
  });

  it("annotates the rendered chart with those exact numbers", () => {
    const html = renderMarginChart(model);
    expect(html).toContain(`${summary.latest!.gsnr_db!.toFixed(2)} dB`);
    expect(html).toContain(`${summary.latest!.margin_db!.toFixed(2)} dB`);
    expect(html).toContain(`${curve.gsnr_at_fec_db.toFixed(2)} dB`);
    expect(html).toContain(curve.fec_limit_ber.toExponential(2));
  });
});

describe("history chart", () => {
  it("is exactly the (timestamp, margin) series of the history endpoint", () => {
    const model = historyChartModel(history);
    const expected = history.samples
      .filter((s) => s.margin_db !== null)
      .map((s) => ({ ts: s.timestamp, marginDb: s.margin_db }));
    expect(model.points).toEqual(expected);
  });
});

describe("span-loss chart", () => {
  it("mirrors the scenario endpoint steps", () => {
    const model = spanLossChartModel(spanLoss);
    expect(model.steps).toEqual(
      spanLoss.steps.map((s) => ({ addedDb: s.added_loss_db, qDb: s.q_db })),
    );
  });
});

describe("topology map", () => {
  const model = topologyViewModel(topo, lps);

  it("renders every node and link of the topology document", () => {
    expect(model.nodes.map((n) => n.id).sort()).toEqual(
      topo.topology.nodes.map((n) => n.id).sort(),
    );
    expect(model.links.map((l) => l.id).sort()).toEqual(
      topo.topology.links.map((l) => l.id).sort(),
    );
  });

  it("lists traversing lightpaths per link from route membership", () => {
    for (const link of model.links) {
      const expected = lps.lightpaths
        .filter((s) => s.lightpath.route.includes(link.id))
        .map((s) => s.lightpath.id);
      expect(link.lpIds).toEqual(expected);
    }
  });

  it("styles a degraded lightpath's links distinctly", () => {
    const degradedLp = lps.lightpaths.find((s) => s.lightpath.state === "degraded")!;
    const onDegraded = model.links.find((l) => degradedLp.lightpath.route.includes(l.id))!;
    expect(onDegraded.worstState).toBe("degraded");
  });
});

describe("lightpath table", () => {
  it("prints the latest GSNR/margin/Q fields for every row", () => {
    const html = renderLightpathTable(lps, initialState());
    for (const summary of lps.lightpaths) {
      expect(html).toContain(summary.lightpath.id);
      if (summary.latest?.gsnr_db != null) {
        expect(html).toContain(`${summary.latest.gsnr_db.toFixed(2)} dB`);
      }
      if (summary.latest?.margin_db != null) {
        expect(html).toContain(`${summary.latest.margin_db.toFixed(2)} dB`);
      }
    }
  });
});

describe("provision wizard", () => {
  it("impact rows are the report's impact entries verbatim", () => {
    const rows = wizardImpactRows(accept);
    expect(rows.length).toBe(accept.impacts.length);
    rows.forEach((row, i) => {
      expect(row.lpId).toBe(accept.impacts[i].lp_id);
      expect(row.beforeDb).toBe(accept.impacts[i].gsnr_before_db);
      expect(row.afterDb).toBe(accept.impacts[i].gsnr_after_db);
      expect(row.marginAfterDb).toBe(accept.impacts[i].margin_after_db);
      expect(row.violated).toBe(accept.violated.includes(accept.impacts[i].lp_id));
    });
  });

  it("renders accept verdict numbers from the report fields", () => {
    const state = {
      ...initialState(),
      revision: accept.revision,
      wizard: {
        phase: "reviewing" as const,
        draft: null,
        report: accept,
        committedLpId: null,
        error: null,
      },
    };
    const html = renderWizard(state);
    expect(html).toContain(`${accept.new_lp!.gsnr_db.toFixed(2)} dB`);
    expect(html).toContain(`${accept.new_lp!.margin_db.toFixed(2)} dB`);
    expect(html).toContain(`commit ${accept.lp_id}`);
    expect(html).not.toContain("disabled");
  });

  it("reject verdict renders the reason and offers no commit affordance", () => {
    const state = {
      ...initialState(),
      revision: reject.revision,
      wizard: {
        phase: "reviewing" as const,
        draft: null,
        report: reject,
        committedLpId: null,
        error: null,
      },
    };
    const html = renderWizard(state);
    expect(html).toContain(`reject — ${reject.reason}`);
    expect(html).not.toContain("commit-btn");
  });
});

describe("fault board", () => {
  const model = faultBoardModel(faults, lps);

  it("ranks links exactly as the faults endpoint does", () => {
    expect(model.rows).toEqual(
      faults.hypotheses.map((h) => ({ linkId: h.link_id, score: h.score })),
    );
    expect(model.evidence).toEqual(faults.degraded);
    expect(model.ticket).toBe(faults.ticket_text);
  });

  it("builds restoration drafts from degraded LPs' own fields", () => {
    expect(model.restoreDrafts.length).toBeGreaterThan(0);
    for (const draft of model.restoreDrafts) {
      const lp = lps.lightpaths.find((s) => s.lightpath.id === draft.lpId)!.lightpath;
      expect(draft.request.src).toBe(lp.src);
      expect(draft.request.dst).toBe(lp.dst);
      expect(draft.request.target_margin_db).toBe(lp.target_margin_db);
      expect(draft.request.allow_trx).toEqual([lp.trx_id]);
      if (lp.backups.length) {
        expect(draft.backupRoute).toEqual(lp.backups[0].route);
      }
    }
  });

  it("renders the scores and ticket text", () => {
    const html = renderFaultBoard(model);
    expect(html).toContain(faults.hypotheses[0].link_id);
    expect(html).toContain(faults.hypotheses[0].score.toFixed(2));
    expect(html).toContain(faults.ticket_text);
  });

  it("renders an explicit empty board without degradation", () => {
    const empty = faultBoardModel(
      { hypotheses: [], degraded: [], healthy_witnesses: [], ticket_text: "" },
      lps,
    );
    expect(renderFaultBoard(empty)).toContain("board is empty");
  });
});
