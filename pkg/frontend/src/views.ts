// Pure HTML renderers: state in, markup string out. Keeping these free of
// DOM access makes the whole presentation layer testable in node.

import type { FieldErrors } from "./validation.js";
import { formatCount, formatStages } from "./validation.js";
import type {
  Chunk,
  DocumentDetail,
  DocumentListItem,
  EvalReport,
  ExtractionRecord,
  GoldRecord,
} from "./types.js";
import type { TranscriptEntry } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Render a metric to exactly three decimals; nulls render as a dash. */
export function fmt3(value: number | null | undefined): string {
  return value === null || value === undefined ? "–" : value.toFixed(3);
}

function numOrDash(value: unknown): string {
  return typeof value === "number" ? fmt3(value) : "–";
}

export function renderDocumentList(
  documents: DocumentListItem[],
  selectedId: string | null,
): string {
  if (documents.length === 0) {
    return `<p class="empty">No documents yet. Upload a paper to begin.</p>`;
  }
  const items = documents
    .map((doc) => {
      const name = doc.source_path.split("/").pop() ?? doc.doc_id;
      const selected = doc.doc_id === selectedId ? " selected" : "";
      return (
        `<li class="doc-item${selected}" data-doc="${escapeHtml(doc.doc_id)}">` +
        `<span class="doc-name">${escapeHtml(name)}</span>` +
        `<span class="doc-chunks">${doc.n_chunks} chunks</span></li>`
      );
    })
    .join("");
  return `<ul class="doc-list">${items}</ul>`;
}

export function renderChunkPane(detail: DocumentDetail | null, highlight: number[]): string {
  if (!detail) {
    return `<p class="empty">Select a document to read it here.</p>`;
  }
  return detail.chunks
    .map((chunk: Chunk) => {
      const marked = highlight.includes(chunk.id) ? " highlight" : "";
      return (
        `<div class="chunk${marked}" id="chunk-${chunk.id}">` +
        `<div class="chunk-head">chunk ${chunk.id} · ~${chunk.token_estimate} tokens</div>` +
        `<pre>${escapeHtml(chunk.text)}</pre></div>`
      );
    })
    .join("");
}

function fieldRow(
  label: string,
  field: string,
  value: string,
  errors: FieldErrors,
  placeholder = "",
): string {
  const error = errors[field]
    ? `<span class="field-error">${escapeHtml(errors[field])}</span>`
    : "";
  return (
    `<label class="field-row">${escapeHtml(label)}` +
    `<input data-field="${field}" value="${escapeHtml(value)}" placeholder="${escapeHtml(placeholder)}">` +
    `${error}</label>`
  );
}

export function formatVariables(variables: GoldRecord["variables"]): string {
  return variables
    .map((v) => {
      const levels = v.levels.length > 0 ? `: ${v.levels.join(", ")}` : "";
      return `${v.name} (${v.role})${levels}`;
    })
    .join("; ");
}

export function renderRecordReview(
  record: ExtractionRecord | null,
  draft: GoldRecord | null,
  errors: FieldErrors,
  detail: DocumentDetail | null,
): string {
  if (!record || !draft) {
    return (
      `<p class="empty">No record yet. Run extraction to populate the six fields.</p>` +
      `<button id="extract-btn">Extract (mock backend)</button>`
    );
  }
  const provenance = (detail?.chunks ?? [])
    .filter((chunk) => record.provenance.includes(chunk.id))
    .map(
      (chunk) =>
        `<blockquote class="provenance" data-chunk="${chunk.id}">` +
        `${escapeHtml(chunk.text.slice(0, 240))}</blockquote>`,
    )
    .join("");
  const saveDisabled = Object.keys(errors).length > 0 ? " disabled" : "";
  return `
<form id="gold-form" class="record-form">
  ${fieldRow("Number of Participants", "participants_total", formatCount(draft.participants_total), errors)}
  ${fieldRow("Participant stages", "participants_stages", formatStages(draft.participants_stages), errors, "e.g. 12; 8")}
  ${fieldRow("Recruitment Method", "recruitment_method", draft.recruitment_method ?? "", errors)}
  ${fieldRow("Number of Tasks", "num_tasks", formatCount(draft.num_tasks), errors)}
  ${fieldRow("Type of Experiment", "experiment_type", draft.experiment_type ?? "", errors)}
  ${fieldRow("Experimental Variables", "variables", formatVariables(draft.variables), errors, "name (role): level, level; ...")}
  ${fieldRow("Number of Trials", "num_trials", formatCount(draft.num_trials), errors)}
  ${fieldRow("Annotator", "annotator", draft.annotator, errors)}
  <button id="save-gold" type="submit"${saveDisabled}>Save as gold</button>
</form>
<div class="provenance-box"><h3>Provenance</h3>${provenance}</div>`;
}

export function renderTranscript(entries: TranscriptEntry[]): string {
  if (entries.length === 0) {
    return `<p class="empty">Ask a question about the selected document.</p>`;
  }
  return entries
    .map((entry) => {
      const question = `<div class="qa-q">${escapeHtml(entry.question)}</div>`;
      if (entry.error !== undefined) {
        return (
          `<div class="qa-entry error">${question}` +
          `<div class="qa-error">${escapeHtml(entry.error)}</div>` +
          `<button class="qa-retry" data-question="${escapeHtml(entry.question)}">retry</button></div>`
        );
      }
      const answer = entry.answer!;
      const cites = answer.supporting_chunks
        .map(
          ([chunkId]) =>
            `<button class="cite" data-chunk="${chunkId}">chunk ${chunkId}</button>`,
        )
        .join(" ");
      return (
        `<div class="qa-entry">${question}` +
        `<div class="qa-a">${escapeHtml(answer.text)}</div>` +
        `<div class="qa-cites">${cites}</div></div>`
      );
    })
    .join("");
}

export function renderEvalDashboard(report: EvalReport | null): string {
  const controls = `
<form id="eval-form" class="eval-controls">
  <label>approximation level <input data-eval="approximation_level" value="1"></label>
  <label>tolerance <input data-eval="tolerance" value="1"></label>
  <label>baseline trials <input data-eval="baseline_trials" value="1000"></label>
  <label>seed <input data-eval="seed" value="0"></label>
  <button id="run-eval" type="submit">Run evaluation</button>
</form>`;
  if (!report) {
    return `${controls}<p class="empty" id="eval-empty">No evaluation report yet. Save gold annotations, then run one.</p>`;
  }
  const headline = [
    ["papers", String(report.n)],
    ["exact accuracy", fmt3(report.exact_accuracy)],
    ["tolerance accuracy", fmt3(report.numeric_tol_accuracy)],
    ["MAE", fmt3(report.mae_true)],
    ["within-tolerance rate", fmt3(report.within_tol_rate)],
    ["baseline accuracy", fmt3(report.baseline_accuracy)],
    ["unknown pairs", String(report.unknown_pairs)],
  ]
    .map(([name, value]) => `<tr><td>${name}</td><td class="num">${value}</td></tr>`)
    .join("");
  const perField = Object.entries(report.per_field)
    .map(([field, scores]) => {
      const exact = fmt3(scores["accuracy_exact"] ?? scores["jaccard"]);
      const tol = fmt3(scores["accuracy_tol"]);
      const mae = fmt3(scores["mae"]);
      return `<tr><td>${escapeHtml(field)}</td><td class="num">${exact}</td><td class="num">${tol}</td><td class="num">${mae}</td></tr>`;
    })
    .join("");
  let perf = "";
  if (report.perf) {
    const count = report.perf["papers_processed"];
    const rows = [
      ["papers processed", typeof count === "number" ? String(count) : "–"],
      ["mean latency (s)", numOrDash(report.perf["mean_latency"])],
      ["processing speed (papers/sec)", numOrDash(report.perf["processing_speed"])],
      ["peak memory (MB)", numOrDash(report.perf["peak_memory"])],
    ]
      .map(([name, shown]) => `<tr><td>${name}</td><td class="num">${shown}</td></tr>`)
      .join("");
    perf = `<table class="metrics perf"><tbody>${rows}</tbody></table>`;
  }
  return `${controls}
<table class="metrics"><tbody>${headline}</tbody></table>
<table class="metrics per-field">
  <thead><tr><th>field</th><th>exact</th><th>tol</th><th>mae</th></tr></thead>
  <tbody>${perField}</tbody>
</table>${perf}`;
}
