import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Captured {
  url: string;
  method: string;
  body?: unknown;
  isForm?: boolean;
}

function clientCapturing(
  captured: Captured[],
  response: unknown = {},
  status = 200,
): ApiClient {
  return new ApiClient("", async (url, init) => {
    const entry: Captured = { url, method: init?.method ?? "GET" };
    if (init?.body instanceof FormData) {
      entry.isForm = true;
    } else if (typeof init?.body === "string") {
      entry.body = JSON.parse(init.body);
    }
    captured.push(entry);
    return new Response(JSON.stringify(response), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  });
}

describe("ApiClient", () => {
  it("uploads multipart to POST /documents", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, { doc_id: "d1", doc_ids: ["d1"] });
    const result = await api.uploadDocument(new Blob([b("<p>x</p>")]), "x.html");
    expect(result.doc_id).toBe("d1");
    expect(captured[0]).toMatchObject({ url: "/documents", method: "POST", isForm: true });
  });

  it("extract posts the backend choice", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, { doc_id: "d1" });
    await api.extractDocument("d1", "mock");
    expect(captured[0]).toMatchObject({
      url: "/documents/d1/extract",
      method: "POST",
      body: { backend: "mock" },
    });
  });

  it("gold goes out as PUT /gold/{id}", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, {});
    await api.putGold("d1", {
      doc_id: "d1",
      participants_total: 25,
      participants_stages: [],
      recruitment_method: null,
      num_tasks: null,
      experiment_type: null,
      variables: [],
      num_trials: null,
      annotator: "r",
      notes: "",
    });
    expect(captured[0].url).toBe("/gold/d1");
    expect(captured[0].method).toBe("PUT");
    expect(captured[0].body).toMatchObject({ participants_total: 25 });
  });

  it("qa posts doc_id, question, top_k", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, {
      question: "q", text: "a", supporting_chunks: [], latency: 0,
    });
    await api.ask("d1", "how many?", 2);
    expect(captured[0]).toMatchObject({
      url: "/qa",
      method: "POST",
      body: { doc_id: "d1", question: "how many?", top_k: 2 },
    });
  });

  it("eval posts the four knobs", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, { n: 0 });
    await api.runEval({ approximation_level: 1, tolerance: 1, baseline_trials: 10, seed: 3 });
    expect(captured[0].body).toEqual({
      approximation_level: 1,
      tolerance: 1,
      baseline_trials: 10,
      seed: 3,
    });
  });

  it("non-2xx turns into ApiError with the server detail", async () => {
    const api = clientCapturing([], { detail: "participants_total: must be nonnegative" }, 400);
    await expect(api.listDocuments()).rejects.toThrowError(ApiError);
    await expect(api.listDocuments()).rejects.toThrowError(/participants_total/);
  });

  it("encodes doc ids into paths", async () => {
    const captured: Captured[] = [];
    const api = clientCapturing(captured, {});
    await api.getDocument("a/b c");
    expect(captured[0].url).toBe("/documents/a%2Fb%20c");
  });
});

function b(text: string): Uint8Array {
  return new TextEncoder().encode(text);
}
