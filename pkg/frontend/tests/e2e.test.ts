// End-to-end against a live twin service (spawned ontwin process):
// the wizard flow completes accept -> commit, and a stale-revision commit
// is blocked server-side and surfaced as a stale report client-side.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { canCommit, initialState, onRevision, onWhatifResult } from "../src/state.js";

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess | null = null;
let dataDir = "";

async function waitReady(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/topology`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "ontwin-e2e-"));
  const init = spawnSync(
    "python3",
    ["-m", "ontwin.cli", "init", "--data-dir", dataDir, "--fixture", "ring", "--populate", "6"],
    { encoding: "utf-8" },
  );
  if (init.status !== 0) {
    throw new Error(`init failed: ${init.stderr}`);
  }
  service = spawn(
    "python3",
    ["-m", "ontwin.cli", "serve", "--data-dir", dataDir, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitReady();
}, 60_000);

afterAll(() => {
  service?.kill("SIGTERM");
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

describe("live provisioning wizard", () => {
  it("completes accept -> commit and the LP appears in the topology", async () => {
    const api = new ApiClient(BASE);
    const topo = await api.topology();
    let state = onRevision(initialState(), topo!.revision);

    const draft = { src: "T1", dst: "T4", requested_bitrate_gbps: 400 };
    const report = await api.whatif(draft);
    expect(report.verdict).toBe("accept");
    state = onWhatifResult(state, draft, report);
    expect(canCommit(state)).toBe(true);

    const committed = await api.commit(report);
    expect(committed.lp_id).toBe(report.lp_id);

    const listing = await api.lightpaths();
    const ids = listing!.lightpaths.map((s) => s.lightpath.id);
    expect(ids).toContain(report.lp_id);
  }, 30_000);

  it("blocks a stale-revision commit and the wizard shows it", async () => {
    const api = new ApiClient(BASE);
    const topo = await api.topology();
    let state = onRevision(initialState(), topo!.revision);

    const draft = { src: "T2", dst: "T6", requested_bitrate_gbps: 100 };
    const report = await api.whatif(draft);
    expect(report.verdict).toBe("accept");
    state = onWhatifResult(state, draft, report);

    // concurrent mutation: another operator takes a far-away slot
    const intruder = {
      id: "e2e-intruder",
      src: "T3",
      dst: "T4",
      route: ["acc-T3", "ring-R3-R4", "acc-T4"],
      spectrum: { center_thz: 191.3 + (43.75 * 50 + 43.75 / 2) / 1e3, width_ghz: 43.75 },
      trx_id: "trx-100g-qpsk-32gbd",
    };
    const posted = await fetch(`${BASE}/lightpaths`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(intruder),
    });
    expect(posted.status).toBe(201);

    // polling notices the new revision: held report goes stale client-side
    const fresh = await api.topology();
    state = onRevision(state, fresh!.revision);
    expect(state.wizard.phase).toBe("stale");
    expect(canCommit(state)).toBe(false);

    // and the server refuses it regardless
    let error: ApiError | null = null;
    try {
      await api.commit(report);
    } catch (err) {
      error = err as ApiError;
    }
    expect(error).not.toBeNull();
    expect(error!.status).toBe(409);
    expect(error!.code).toBe("StaleReport");
  }, 30_000);
});
