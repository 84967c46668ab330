// Console bootstrap: 2-second polling, event delegation, view composition.
// All service calls are asynchronous; out-of-order poll responses are
// discarded by the ApiClient's per-channel sequence numbers.

import { ApiClient, ApiError } from "./api.js";
import type { ViewState } from "./state.js";
import {
  canCommit,
  initialState,
  onCommitDone,
  onCommitFailed,
  onCommitStart,
  onDiscard,
  onRevision,
  onWhatifResult,
} from "./state.js";
import type { ChartMode, LightpathsResponse, TopologyResponse } from "./types.js";
import {
  bitrateOf,
  faultBoardModel,
  historyChartModel,
  marginChartModel,
  renderFaultBoard,
  renderHistoryChart,
  renderLightpathTable,
  renderMarginChart,
  renderSpanLossChart,
  renderTopology,
  renderWizard,
  spanLossChartModel,
  topologyViewModel,
} from "./views.js";

const POLL_MS = 2000;
const api = new ApiClient("");

let state: ViewState = initialState();
let topo: TopologyResponse | null = null;
let lps: LightpathsResponse | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function setState(next: ViewState): void {
  state = next;
  render();
}

async function poll(): Promise<void> {
  try {
    const [topoResp, lpResp] = await Promise.all([api.topology(), api.lightpaths()]);
    if (topoResp) {
      topo = topoResp;
      setState(onRevision(state, topoResp.revision));
    }
    if (lpResp) {
      lps = lpResp;
    }
    render();
    void renderChartPane();
    void renderFaultPane();
  } catch (err) {
    el("status").textContent = `service unreachable: ${(err as Error).message}`;
  }
}

function render(): void {
  if (!topo || !lps) return;
  el("status").textContent = `revision ${state.revision} · ${lps.lightpaths.length} lightpaths`;
  el("topology-pane").innerHTML = renderTopology(topologyViewModel(topo, lps), state);
  el("lp-pane").innerHTML = renderLightpathTable(lps, state);
  el("wizard-pane").innerHTML = renderWizard(state);
  bindWizard();
}

async function renderChartPane(): Promise<void> {
  const pane = el("chart-pane");
  if (!state.selectedLp || !lps) {
    pane.innerHTML = `<div class="annotation dim">select a lightpath to chart it</div>`;
    return;
  }
  const summary = lps.lightpaths.find((s) => s.lightpath.id === state.selectedLp);
  if (!summary) return;
  try {
    if (state.chartMode === "ber-osnr") {
      const curve = await api.trxCurve(summary.lightpath.trx_id);
      if (curve) pane.innerHTML = renderMarginChart(marginChartModel(curve, summary));
    } else if (state.chartMode === "history") {
      const history = await api.history(summary.lightpath.id);
      if (history) pane.innerHTML = renderHistoryChart(historyChartModel(history));
    } else {
      const sweep = await api.spanLoss(summary.lightpath.id, [0, 0.5, 1, 1.5, 2, 2.5, 3]);
      pane.innerHTML = renderSpanLossChart(spanLossChartModel(sweep));
    }
  } catch (err) {
    pane.innerHTML = `<div class="annotation dim">chart unavailable: ${(err as Error).message}</div>`;
  }
}

async function renderFaultPane(): Promise<void> {
  if (!lps) return;
  const faults = await api.faults();
  if (faults) {
    el("fault-pane").innerHTML = renderFaultBoard(faultBoardModel(faults, lps));
  }
}

function bindWizard(): void {
  const form = document.getElementById("whatif-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const draft = {
      src: String(data.get("src")),
      dst: String(data.get("dst")),
      requested_bitrate_gbps: Number(data.get("bitrate")),
      target_margin_db: Number(data.get("margin") ?? 2.0),
    };
    void api
      .whatif(draft)
      .then((report) => setState(onWhatifResult(state, draft, report)))
      .catch((err: Error) => {
        el("status").textContent = `what-if failed: ${err.message}`;
      });
  });
  document.getElementById("commit-btn")?.addEventListener("click", () => {
    if (!canCommit(state) || !state.wizard.report) return;
    const report = state.wizard.report;
    setState(onCommitStart(state));
    void api
      .commit(report)
      .then(({ lp_id, revision }) => setState(onCommitDone(state, lp_id, revision)))
      .catch((err) => {
        if (err instanceof ApiError) setState(onCommitFailed(state, err.code, err.message));
        else setState(onCommitFailed(state, "HttpError", (err as Error).message));
      });
  });
  document.getElementById("discard-btn")?.addEventListener("click", () => setState(onDiscard(state)));
}

function bindGlobalEvents(): void {
  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const link = target.closest("[data-link]") as HTMLElement | null;
    if (link?.dataset.link) {
      setState({ ...state, selectedLink: link.dataset.link });
      return;
    }
    const restore = target.closest("[data-restore]") as HTMLElement | null;
    if (restore?.dataset.restore && lps) {
      const summary = lps.lightpaths.find((s) => s.lightpath.id === restore.dataset.restore);
      if (summary) {
        const lp = summary.lightpath;
        void api
          .whatif({
            src: lp.src,
            dst: lp.dst,
            requested_bitrate_gbps: bitrateOf(lp.trx_id),
            target_margin_db: lp.target_margin_db,
            allow_trx: [lp.trx_id],
          })
          .then((report) =>
            setState(onWhatifResult(state, { src: lp.src, dst: lp.dst, requested_bitrate_gbps: bitrateOf(lp.trx_id) }, report)),
          );
      }
      event.preventDefault();
      return;
    }
    const lpRow = target.closest("[data-lp]") as HTMLElement | null;
    if (lpRow?.dataset.lp) {
      // evidence links on the fault board navigate straight to the history chart
      const fromFaultBoard = lpRow.closest("#fault-pane") !== null;
      setState({
        ...state,
        selectedLp: lpRow.dataset.lp,
        chartMode: fromFaultBoard ? "history" : state.chartMode,
      });
      void renderChartPane();
      event.preventDefault();
    }
  });
  document.querySelectorAll<HTMLButtonElement>("[data-mode]").forEach((button) => {
    button.addEventListener("click", () => {
      setState({ ...state, chartMode: button.dataset.mode as ChartMode });
      document.querySelectorAll("[data-mode]").forEach((b) => b.classList.remove("active"));
      button.classList.add("active");
      void renderChartPane();
    });
  });
}

bindGlobalEvents();
void poll();
setInterval(() => void poll(), POLL_MS);
