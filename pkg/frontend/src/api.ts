// Typed service client. Every GET is tagged with a sequence number so a
// late response from an older poll can never overwrite newer state.

import type {
  FaultsResponse,
  HistoryResponse,
  LightpathsResponse,
  ProvisionReportDoc,
  SpanLossResponse,
  TopologyResponse,
  TrxCurveResponse,
  WhatifRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.code ?? "HttpError", body.message ?? response.statusText);
  }
  return body as T;
}

export class ApiClient {
  private seq = 0;
  private lastDelivered = new Map<string, number>();

  constructor(private baseUrl: string = "") {}

  /** GET with stale-response discarding per logical channel. */
  private async get<T>(path: string, channel: string): Promise<T | null> {
    const mySeq = ++this.seq;
    const body = await parse<T>(await fetch(this.baseUrl + path));
    const newest = this.lastDelivered.get(channel) ?? 0;
    if (mySeq < newest) {
      return null; // an answer from a newer request already landed
    }
    this.lastDelivered.set(channel, mySeq);
    return body;
  }

  topology(): Promise<TopologyResponse | null> {
    return this.get<TopologyResponse>("/topology", "topology");
  }

  lightpaths(): Promise<LightpathsResponse | null> {
    return this.get<LightpathsResponse>("/lightpaths", "lightpaths");
  }

  history(lpId: string): Promise<HistoryResponse | null> {
    return this.get<HistoryResponse>(`/lightpaths/${lpId}/history`, `history:${lpId}`);
  }

  trxCurve(trxId: string): Promise<TrxCurveResponse | null> {
    return this.get<TrxCurveResponse>(`/trx-catalog/${trxId}/curve`, `curve:${trxId}`);
  }

  faults(): Promise<FaultsResponse | null> {
    return this.get<FaultsResponse>("/faults", "faults");
  }

  async whatif(request: WhatifRequest): Promise<ProvisionReportDoc> {
    const response = await fetch(this.baseUrl + "/whatif", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    return parse<ProvisionReportDoc>(response);
  }

  async commit(report: ProvisionReportDoc): Promise<{ lp_id: string; revision: number }> {
    const response = await fetch(this.baseUrl + `/lightpaths/${report.lp_id}/commit`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(report),
    });
    return parse(response);
  }

  async spanLoss(lpId: string, steps: number[]): Promise<SpanLossResponse> {
    const response = await fetch(this.baseUrl + "/scenario/span-loss", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ lp_id: lpId, added_losses_db: steps }),
    });
    return parse<SpanLossResponse>(response);
  }
}
