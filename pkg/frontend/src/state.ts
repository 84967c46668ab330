// View state and the provisioning wizard state machine.
//
// Invariant enforced here: the commit action is available only while the
// wizard holds an accept report taken at the store's current revision.
// The moment polling observes a newer revision, the held report is stale
// and commit is disabled until a fresh what-if runs.

import type { ChartMode, ProvisionReportDoc, WhatifRequest } from "./types.js";

export type WizardPhase = "idle" | "reviewing" | "committing" | "committed" | "stale";

export interface WizardState {
  phase: WizardPhase;
  draft: WhatifRequest | null;
  report: ProvisionReportDoc | null;
  committedLpId: string | null;
  error: string | null;
}

export interface ViewState {
  selectedLp: string | null;
  selectedLink: string | null;
  chartMode: ChartMode;
  revision: number;
  wizard: WizardState;
}

export function initialState(): ViewState {
  return {
    selectedLp: null,
    selectedLink: null,
    chartMode: "ber-osnr",
    revision: -1,
    wizard: { phase: "idle", draft: null, report: null, committedLpId: null, error: null },
  };
}

export function canCommit(state: ViewState): boolean {
  const { wizard, revision } = state;
  return (
    wizard.phase === "reviewing" &&
    wizard.report !== null &&
    wizard.report.verdict === "accept" &&
    wizard.report.revision === revision
  );
}

export function reportHeld(state: ViewState): boolean {
  return state.wizard.report !== null && (state.wizard.phase === "reviewing" || state.wizard.phase === "stale");
}

/** Polling observed the store revision; stale out any held report. */
export function onRevision(state: ViewState, revision: number): ViewState {
  const next = { ...state, revision };
  const { wizard } = state;
  if (wizard.phase === "reviewing" && wizard.report && wizard.report.revision !== revision) {
    next.wizard = { ...wizard, phase: "stale" };
  }
  return next;
}

export function onWhatifResult(state: ViewState, draft: WhatifRequest, report: ProvisionReportDoc): ViewState {
  return {
    ...state,
    wizard: {
      phase: "reviewing",
      draft,
      report,
      committedLpId: null,
      error: null,
    },
  };
}

export function onCommitStart(state: ViewState): ViewState {
  return { ...state, wizard: { ...state.wizard, phase: "committing", error: null } };
}

export function onCommitDone(state: ViewState, lpId: string, revision: number): ViewState {
  return {
    ...state,
    revision,
    wizard: { phase: "committed", draft: null, report: null, committedLpId: lpId, error: null },
  };
}

export function onCommitFailed(state: ViewState, code: string, message: string): ViewState {
  const phase: WizardPhase = code === "StaleReport" || code === "SpectrumConflict" ? "stale" : "reviewing";
  return { ...state, wizard: { ...state.wizard, phase, error: `${code}: ${message}` } };
}

export function onDiscard(state: ViewState): ViewState {
  return { ...state, wizard: { phase: "idle", draft: null, report: null, committedLpId: null, error: null } };
}
