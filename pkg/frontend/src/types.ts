// API payload shapes, mirroring the service's JSON schemas.

export interface BandDoc {
  min_thz: number;
  max_thz: number;
  slot_width_ghz: number;
}

export interface NodeDoc {
  id: string;
  kind: "roadm" | "trx_site";
  insertion_loss_db?: number;
  target_per_channel_power_dbm?: number;
  access_loss_db?: number;
}

export interface LinkDoc {
  id: string;
  a: string;
  b: string;
  mode: "managed" | "unmanaged";
  operator_id: string;
  target_power_dbm: number;
  elements: { kind: string }[];
}

export interface TopologyDoc {
  version: number;
  band: BandDoc;
  nodes: NodeDoc[];
  links: LinkDoc[];
}

export interface TopologyResponse {
  revision: number;
  topology: TopologyDoc;
}

export interface SpectrumDoc {
  center_thz: number;
  width_ghz: number;
}

export interface LightpathDoc {
  id: string;
  src: string;
  dst: string;
  route: string[];
  spectrum: SpectrumDoc;
  trx_id: string;
  target_margin_db: number;
  service_class: string;
  state: "planned" | "active" | "degraded" | "failed";
  launch_power_dbm: number;
  backups: { route: string[]; spectrum: SpectrumDoc; margin_db: number }[];
}

export interface QotRecordDoc {
  timestamp: number;
  ber: number;
  gsnr_db: number | null;
  margin_db: number | null;
  q_db: number | null;
  source: "computed" | "telemetry";
}

export interface LightpathSummary {
  lightpath: LightpathDoc;
  latest: QotRecordDoc | null;
  history_len: number;
}

export interface LightpathsResponse {
  revision: number;
  lightpaths: LightpathSummary[];
}

export interface HistoryResponse {
  lp_id: string;
  samples: QotRecordDoc[];
}

export interface TrxCurveResponse {
  trx_id: string;
  points: [number, number][]; // [gsnr_db, ber]
  fec_limit_ber: number;
  gsnr_at_fec_db: number;
}

export interface ImpactDoc {
  lp_id: string;
  gsnr_before_db: number;
  gsnr_after_db: number;
  margin_after_db: number;
}

export interface ProvisionReportDoc {
  verdict: "accept" | "reject";
  revision: number;
  reason: string | null;
  lp_id: string | null;
  route: string[] | null;
  spectrum: SpectrumDoc | null;
  trx_id: string | null;
  new_lp: {
    gsnr_db: number;
    margin_db: number;
    ber: number;
    q_db: number;
    rx_power_dbm: number;
  } | null;
  impacts: ImpactDoc[];
  violated: string[];
  request: Record<string, unknown> | null;
}

export interface WhatifRequest {
  src: string;
  dst: string;
  requested_bitrate_gbps: number;
  target_margin_db?: number;
  service_class?: string;
  allow_trx?: string[] | null;
}

export interface FaultsResponse {
  hypotheses: { link_id: string; score: number }[];
  degraded: string[];
  healthy_witnesses: string[];
  ticket_text: string;
}

export interface SpanLossResponse {
  lp_id: string;
  steps: {
    added_loss_db: number;
    gsnr_db: number;
    ber: number;
    q_db: number;
    rx_power_dbm: number;
  }[];
}

export type ChartMode = "ber-osnr" | "history" | "span-loss";
