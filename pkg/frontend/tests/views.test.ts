import { describe, expect, it } from "vitest";

import type {
  DocumentDetail,
  EvalReport,
  ExtractionRecord,
  GoldRecord,
} from "../src/types.js";
import {
  escapeHtml,
  fmt3,
  formatVariables,
  renderChunkPane,
  renderDocumentList,
  renderEvalDashboard,
  renderRecordReview,
  renderTranscript,
} from "../src/views.js";

const record: ExtractionRecord = {
  doc_id: "d1",
  participants_total: 24,
  participants_stages: [],
  recruitment_method: "Prolific",
  num_tasks: 3,
  experiment_type: "user study",
  variables: [{ name: "technique", role: "independent", levels: ["pen", "touch"] }],
  num_trials: 12,
  provenance: [0],
};

const draft: GoldRecord = {
  doc_id: "d1",
  participants_total: 24,
  participants_stages: [],
  recruitment_method: "Prolific",
  num_tasks: 3,
  experiment_type: "user study",
  variables: record.variables,
  num_trials: 12,
  annotator: "",
  notes: "",
};

const detail: DocumentDetail = {
  doc_id: "d1",
  source_path: "upload://paper.html",
  sections: [{ ordinal: 0, title: "Method" }],
  keywords: [["participants", 6]],
  n_entities: 2,
  chunks: [
    { id: 0, text: "We recruited 24 participants via Prolific.", token_estimate: 11, salience: 8 },
    { id: 1, text: "Unrelated closing remarks.", token_estimate: 7, salience: 0 },
  ],
};

const report: EvalReport = {
  n: 1,
  exact_accuracy: 1,
  numeric_tol_accuracy: 1,
  mae_true: 0,
  within_tol_rate: 1,
  per_field: {
    participants_total: { accuracy_exact: 1, accuracy_tol: 1, mae: 0, compared: 1 },
    variables: { jaccard: 1, compared: 1 },
  },
  baseline_accuracy: 0.13,
  unknown_pairs: 0,
  config: {},
};

describe("fmt3", () => {
  it("renders three decimals", () => {
    expect(fmt3(0.13)).toBe("0.130");
    expect(fmt3(1)).toBe("1.000");
    expect(fmt3(2 / 3)).toBe("0.667");
  });

  it("renders null as a dash", () => {
    expect(fmt3(null)).toBe("–");
  });
});

describe("renderRecordReview", () => {
  it("prefills the six fields from the record", () => {
    const html = renderRecordReview(record, draft, {}, detail);
    expect(html).toContain('data-field="participants_total" value="24"');
    expect(html).toContain('data-field="recruitment_method" value="Prolific"');
    expect(html).toContain('data-field="num_tasks" value="3"');
    expect(html).toContain('data-field="experiment_type" value="user study"');
    expect(html).toContain("technique (independent): pen, touch");
    expect(html).toContain('data-field="num_trials" value="12"');
  });

  it("shows provenance excerpts for cited chunks only", () => {
    const html = renderRecordReview(record, draft, {}, detail);
    expect(html).toContain("We recruited 24 participants");
    expect(html).not.toContain("Unrelated closing remarks");
  });

  it("renders inline field errors and disables save", () => {
    const html = renderRecordReview(record, draft, {
      participants_total: "must be a nonnegative integer or empty",
    }, detail);
    expect(html).toContain("field-error");
    expect(html).toContain("nonnegative");
    expect(html).toContain("disabled");
  });

  it("offers extraction when no record exists", () => {
    const html = renderRecordReview(null, null, {}, detail);
    expect(html).toContain("extract-btn");
  });
});

describe("renderTranscript", () => {
  it("renders answers with clickable chunk citations", () => {
    const html = renderTranscript([
      {
        question: "how many participants?",
        answer: {
          question: "how many participants?",
          text: "24 participants",
          supporting_chunks: [[0, 2.4]],
          latency: 0.01,
        },
      },
    ]);
    expect(html).toContain("24 participants");
    expect(html).toContain('data-chunk="0"');
  });

  it("keeps error entries with a retry control", () => {
    const html = renderTranscript([{ question: "q", error: "server down" }]);
    expect(html).toContain("server down");
    expect(html).toContain("qa-retry");
    expect(html).toContain('data-question="q"');
  });

  it("escapes markup in questions", () => {
    const html = renderTranscript([{ question: "<script>x</script>", error: "e" }]);
    expect(html).not.toContain("<script>");
  });
});

describe("renderEvalDashboard", () => {
  it("shows the empty-state panel without a report", () => {
    const html = renderEvalDashboard(null);
    expect(html).toContain("eval-empty");
    expect(html).toContain("run-eval");
  });

  it("renders metrics to three decimals", () => {
    const html = renderEvalDashboard(report);
    expect(html).toContain("0.130"); // baseline 13%
    expect(html).toContain("1.000");
    expect(html).toContain("participants_total");
  });

  it("shows perf figures when the report carries them", () => {
    const withPerf = {
      ...report,
      perf: {
        papers_processed: 20,
        mean_latency: 4.5236741273,
        processing_speed: 0.2210592478,
        peak_memory: 166.4164453125,
      },
    };
    const html = renderEvalDashboard(withPerf);
    expect(html).toContain("4.524");
    expect(html).toContain("0.221");
    expect(html).toContain("166.416");
    expect(renderEvalDashboard(report)).not.toContain("peak memory");
  });
});

describe("renderDocumentList and chunk pane", () => {
  it("lists documents with selection marker", () => {
    const html = renderDocumentList(
      [{ doc_id: "d1", source_path: "upload://paper.html", n_chunks: 2 }],
      "d1",
    );
    expect(html).toContain("selected");
    expect(html).toContain("paper.html");
  });

  it("empty list invites an upload", () => {
    expect(renderDocumentList([], null)).toContain("Upload");
  });

  it("chunk pane anchors chunks by id and highlights citations", () => {
    const html = renderChunkPane(detail, [0]);
    expect(html).toContain('id="chunk-0"');
    expect(html).toContain("chunk highlight");
    expect(html).toContain('id="chunk-1"');
  });
});

describe("helpers", () => {
  it("escapeHtml neutralizes markup", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });

  it("formatVariables renders the grammar", () => {
    expect(formatVariables(record.variables)).toBe("technique (independent): pen, touch");
  });
});
