// Thin typed client over the studyminer HTTP API. The UI never computes
// metrics itself; every displayed value comes from one of these calls.

import type {
  Answer,
  DocumentDetail,
  DocumentListItem,
  EvalReport,
  EvalRequest,
  ExtractionRecord,
  GoldRecord,
  UploadResult,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return `${res.status} ${res.statusText}`;
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return (await res.json()) as T;
  }

  private postJson<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  uploadDocument(file: Blob, filename: string): Promise<UploadResult> {
    const form = new FormData();
    form.append("file", file, filename);
    return this.request("/documents", { method: "POST", body: form });
  }

  listDocuments(): Promise<DocumentListItem[]> {
    return this.request("/documents");
  }

  getDocument(docId: string): Promise<DocumentDetail> {
    return this.request(`/documents/${encodeURIComponent(docId)}`);
  }

  extractDocument(docId: string, backend = "mock"): Promise<ExtractionRecord> {
    return this.postJson(`/documents/${encodeURIComponent(docId)}/extract`, { backend });
  }

  listRecords(): Promise<ExtractionRecord[]> {
    return this.request("/records");
  }

  putGold(docId: string, gold: GoldRecord): Promise<GoldRecord> {
    return this.request(`/gold/${encodeURIComponent(docId)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(gold),
    });
  }

  listGold(): Promise<GoldRecord[]> {
    return this.request("/gold");
  }

  ask(docId: string, question: string, topK = 4): Promise<Answer> {
    return this.postJson("/qa", { doc_id: docId, question, top_k: topK });
  }

  runEval(request: EvalRequest): Promise<EvalReport> {
    return this.postJson("/eval", request);
  }
}
