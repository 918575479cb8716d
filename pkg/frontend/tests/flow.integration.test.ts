// End-to-end UI flow against a live studyminer service: upload a fixture,
// extract with the mock backend, correct a field into gold, ask a
// question that must cite the right chunk, and render the evaluation
// dashboard from a posted report.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  appendTranscript,
  initialState,
  selectDocument,
  withEval,
  withRecord,
  type UiState,
} from "../src/state.js";
import { validateGold } from "../src/validation.js";
import {
  renderEvalDashboard,
  renderRecordReview,
  renderTranscript,
} from "../src/views.js";

const PORT = 18200 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

const FIXTURE_HTML = `<!DOCTYPE html><html><body>
<div>Method</div>
<p>We recruited 24 participants via Prolific for a user study.
Each participant completed 3 tasks and performed 12 trials.</p>
</body></html>`;

let server: ChildProcess;
let corpusDir: string;

beforeAll(async () => {
  corpusDir = mkdtempSync(join(tmpdir(), "studyminer-ui-"));
  server = spawn(
    "python3",
    ["-m", "studyminer.cli", "serve", corpusDir, "--listen", `127.0.0.1:${PORT}`],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not start");
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
  if (corpusDir) rmSync(corpusDir, { recursive: true, force: true });
});

describe("review-correct-ask-evaluate flow", () => {
  const api = new ApiClient(BASE);
  let state: UiState = initialState();

  it("uploads the fixture and selects it", async () => {
    const upload = await api.uploadDocument(
      new Blob([FIXTURE_HTML], { type: "text/html" }),
      "fixture.html",
    );
    const detail = await api.getDocument(upload.doc_id);
    state = selectDocument(state, detail);
    expect(state.selectedDocId).toBe(upload.doc_id);
    expect(detail.chunks.length).toBeGreaterThan(0);
  });

  it("extracts with the mock backend and shows participants 24", async () => {
    const record = await api.extractDocument(state.selectedDocId!, "mock");
    state = withRecord(state, record);
    expect(record.participants_total).toBe(24);
    const html = renderRecordReview(state.record, state.draftGold, {}, state.detail);
    expect(html).toContain('data-field="participants_total" value="24"');
  });

  it("corrects a field and saves gold", async () => {
    const draft = { ...state.draftGold!, num_trials: 13, annotator: "reviewer" };
    expect(validateGold(draft)).toEqual({});
    const saved = await api.putGold(state.selectedDocId!, draft);
    expect(saved.num_trials).toBe(13);
    const gold = await api.listGold();
    expect(gold).toHaveLength(1);
    expect(gold[0].annotator).toBe("reviewer");
  });

  it("rejects an invalid draft locally without a request", () => {
    const bad = { ...state.draftGold!, participants_total: -3 };
    const errors = validateGold(bad);
    expect(errors["participants_total"]).toBeDefined();
    const html = renderRecordReview(state.record, bad, errors, state.detail);
    expect(html).toContain("field-error");
  });

  it("asks a question and the answer cites the supporting chunk", async () => {
    const answer = await api.ask(state.selectedDocId!, "how many participants?");
    state = appendTranscript(state, { question: answer.question, answer });
    expect(answer.text).toContain("24");
    expect(answer.supporting_chunks.length).toBeGreaterThan(0);
    const citedId = answer.supporting_chunks[0][0];
    const cited = state.detail!.chunks.find((c) => c.id === citedId);
    expect(cited?.text).toContain("24 participants");
    const html = renderTranscript(state.transcript);
    expect(html).toContain(`data-chunk="${citedId}"`);
  });

  it("runs evaluation and renders the dashboard to three decimals", async () => {
    const report = await api.runEval({
      approximation_level: 1,
      tolerance: 1,
      baseline_trials: 200,
      seed: 3,
    });
    state = withEval(state, report);
    // gold corrected num_trials to 13 vs predicted 12: off by one
    expect(report.exact_accuracy).toBeLessThan(1);
    expect(report.numeric_tol_accuracy).toBe(1);
    const html = renderEvalDashboard(state.lastEval);
    expect(html).toContain("1.000");
    expect(html).toContain(report.exact_accuracy.toFixed(3));
  });

  it("transcript keeps error entries when the server rejects", async () => {
    try {
      await api.ask("no-such-doc", "anything?");
      expect.unreachable("expected a 404");
    } catch (error) {
      state = appendTranscript(state, { question: "anything?", error: String(error) });
    }
    expect(state.transcript).toHaveLength(2);
    const html = renderTranscript(state.transcript);
    expect(html).toContain("qa-retry");
  });
});
