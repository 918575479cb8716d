// DOM wiring: reads events, calls the API, applies state transitions, and
// re-renders the affected panes. All markup comes from views.ts.

import { ApiClient, ApiError } from "./api.js";
import {
  InFlightLock,
  UiState,
  appendTranscript,
  initialState,
  selectDocument,
  withDocuments,
  withDraft,
  withEval,
  withRecord,
} from "./state.js";
import type { GoldRecord } from "./types.js";
import {
  FieldErrors,
  parseCount,
  parseStages,
  parseVariables,
  validateGold,
} from "./validation.js";
import {
  renderChunkPane,
  renderDocumentList,
  renderEvalDashboard,
  renderRecordReview,
  renderTranscript,
} from "./views.js";

export class App {
  private state: UiState = initialState();
  private errors: FieldErrors = {};
  private highlight: number[] = [];
  private lock = new InFlightLock();

  constructor(
    private api: ApiClient = new ApiClient(),
    private root: Document = document,
  ) {}

  private pane(id: string): HTMLElement {
    const el = this.root.getElementById(id);
    if (!el) throw new Error(`missing pane #${id}`);
    return el;
  }

  private render(): void {
    this.pane("documents-pane").innerHTML = renderDocumentList(
      this.state.documents,
      this.state.selectedDocId,
    );
    this.pane("reader-pane").innerHTML = renderChunkPane(this.state.detail, this.highlight);
    this.pane("record-pane").innerHTML = renderRecordReview(
      this.state.record,
      this.state.draftGold,
      this.errors,
      this.state.detail,
    );
    this.pane("transcript-pane").innerHTML = renderTranscript(this.state.transcript);
    this.pane("eval-pane").innerHTML = renderEvalDashboard(this.state.lastEval);
    const ask = this.pane("ask-btn") as HTMLButtonElement;
    const question = this.pane("question-input") as HTMLInputElement;
    ask.disabled = question.value.trim() === "" || this.state.selectedDocId === null;
  }

  private async guarded(key: string, action: () => Promise<void>): Promise<void> {
    if (!this.lock.acquire(key)) return; // a click is already in flight
    try {
      await action();
    } finally {
      this.lock.release(key);
    }
  }

  private async refreshDocuments(): Promise<void> {
    this.state = withDocuments(this.state, await this.api.listDocuments());
  }

  private async select(docId: string): Promise<void> {
    const detail = await this.api.getDocument(docId);
    this.state = selectDocument(this.state, detail);
    this.errors = {};
    this.highlight = [];
    const records = await this.api.listRecords();
    const existing = records.find((r) => r.doc_id === docId);
    if (existing) this.state = withRecord(this.state, existing);
    this.render();
  }

  private applyDraftInput(field: string, value: string): void {
    const draft = this.state.draftGold;
    if (!draft) return;
    const next: GoldRecord = { ...draft };
    let parseError: string | null = null;
    if (field === "participants_total" || field === "num_tasks" || field === "num_trials") {
      const parsed = parseCount(value);
      if (parsed === undefined) parseError = "must be a nonnegative integer or empty";
      else next[field] = parsed;
    } else if (field === "participants_stages") {
      const parsed = parseStages(value);
      if (parsed === undefined) parseError = 'stages look like "12; 8"';
      else next.participants_stages = parsed;
    } else if (field === "variables") {
      const parsed = parseVariables(value);
      if (parsed === undefined) parseError = 'variables look like "name (role): a, b; ..."';
      else next.variables = parsed;
    } else if (field === "recruitment_method" || field === "experiment_type") {
      next[field] = value.trim() === "" ? null : value;
    } else if (field === "annotator") {
      next.annotator = value;
    }
    this.state = withDraft(this.state, next);
    this.errors = validateGold(next);
    if (parseError) this.errors[field] = parseError;
  }

  private scrollToChunk(chunkId: number): void {
    this.highlight = [chunkId];
    this.pane("reader-pane").innerHTML = renderChunkPane(this.state.detail, this.highlight);
    this.root.getElementById(`chunk-${chunkId}`)?.scrollIntoView({ behavior: "smooth" });
  }

  private async ask(question: string): Promise<void> {
    const docId = this.state.selectedDocId;
    if (!docId || question.trim() === "") return;
    await this.guarded("qa", async () => {
      try {
        const answer = await this.api.ask(docId, question);
        this.state = appendTranscript(this.state, { question, answer });
        if (answer.supporting_chunks.length > 0) {
          this.highlight = [answer.supporting_chunks[0][0]];
        }
      } catch (error) {
        const detail = error instanceof ApiError ? error.message : "request failed";
        this.state = appendTranscript(this.state, { question, error: detail });
      }
      this.render();
    });
  }

  async start(): Promise<void> {
    await this.refreshDocuments();
    this.render();

    this.pane("upload-form").addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.pane("upload-input") as HTMLInputElement;
      const file = input.files?.[0];
      if (!file) return;
      void this.guarded("upload", async () => {
        const result = await this.api.uploadDocument(file, file.name);
        await this.refreshDocuments();
        await this.select(result.doc_id);
      });
    });

    this.pane("documents-pane").addEventListener("click", (event) => {
      const item = (event.target as HTMLElement).closest<HTMLElement>("[data-doc]");
      if (item?.dataset.doc) void this.select(item.dataset.doc);
    });

    this.pane("record-pane").addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      if (target.id === "extract-btn" && this.state.selectedDocId) {
        const docId = this.state.selectedDocId;
        void this.guarded("extract", async () => {
          this.state = withRecord(this.state, await this.api.extractDocument(docId));
          this.errors = {};
          this.render();
        });
      }
      const cite = target.closest<HTMLElement>("[data-chunk]");
      if (cite?.dataset.chunk) this.scrollToChunk(Number(cite.dataset.chunk));
    });

    this.pane("record-pane").addEventListener("input", (event) => {
      const input = event.target as HTMLInputElement;
      if (!input.dataset.field) return;
      this.applyDraftInput(input.dataset.field, input.value);
      // re-render only error markers so typing keeps focus
      const form = this.pane("record-pane");
      for (const el of Array.from(form.querySelectorAll(".field-error"))) el.remove();
      for (const [field, message] of Object.entries(this.errors)) {
        const target = form.querySelector(`[data-field="${field}"]`);
        if (target) {
          const span = this.root.createElement("span");
          span.className = "field-error";
          span.textContent = message;
          target.after(span);
        }
      }
      const save = this.root.getElementById("save-gold") as HTMLButtonElement | null;
      if (save) save.disabled = Object.keys(this.errors).length > 0;
    });

    this.pane("record-pane").addEventListener("submit", (event) => {
      event.preventDefault();
      const draft = this.state.draftGold;
      const docId = this.state.selectedDocId;
      if (!draft || !docId) return;
      this.errors = validateGold(draft);
      if (Object.keys(this.errors).length > 0) {
        this.render(); // invalid draft: inline errors, no request sent
        return;
      }
      void this.guarded("save-gold", async () => {
        try {
          await this.api.putGold(docId, draft);
          this.render();
        } catch (error) {
          if (error instanceof ApiError) {
            this.errors = { participants_total: error.message };
            this.render();
          } else {
            throw error;
          }
        }
      });
    });

    this.pane("qa-form").addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.pane("question-input") as HTMLInputElement;
      void this.ask(input.value).then(() => {
        input.value = "";
        this.render();
      });
    });

    this.pane("question-input").addEventListener("input", () => {
      const ask = this.pane("ask-btn") as HTMLButtonElement;
      const question = this.pane("question-input") as HTMLInputElement;
      ask.disabled = question.value.trim() === "" || this.state.selectedDocId === null;
    });

    this.pane("transcript-pane").addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const cite = target.closest<HTMLElement>("[data-chunk]");
      if (cite?.dataset.chunk) this.scrollToChunk(Number(cite.dataset.chunk));
      const retry = target.closest<HTMLElement>(".qa-retry");
      if (retry?.dataset.question) void this.ask(retry.dataset.question);
    });

    this.pane("eval-pane").addEventListener("submit", (event) => {
      event.preventDefault();
      const read = (name: string, fallback: number): number => {
        const input = this.pane("eval-pane").querySelector<HTMLInputElement>(
          `[data-eval="${name}"]`,
        );
        const value = Number(input?.value ?? "");
        return Number.isFinite(value) ? value : fallback;
      };
      void this.guarded("eval", async () => {
        try {
          const report = await this.api.runEval({
            approximation_level: read("approximation_level", 1),
            tolerance: read("tolerance", 1),
            baseline_trials: read("baseline_trials", 1000),
            seed: read("seed", 0),
          });
          this.state = withEval(this.state, report);
        } catch (error) {
          const detail = error instanceof ApiError ? error.message : "evaluation failed";
          this.pane("eval-pane").insertAdjacentHTML(
            "beforeend",
            `<p class="field-error">${detail.replace(/</g, "&lt;")}</p>`,
          );
          return;
        }
        this.render();
      });
    });
  }
}
