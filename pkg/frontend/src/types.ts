// Wire types for the studyminer HTTP API. Field names match the JSON
// serialization exactly; unknown values travel as null.

export type VariableRole = "independent" | "dependent" | "control";

export interface Variable {
  name: string;
  role: VariableRole;
  levels: string[];
}

export interface ExtractionRecord {
  doc_id: string;
  participants_total: number | null;
  participants_stages: number[];
  recruitment_method: string | null;
  num_tasks: number | null;
  experiment_type: string | null;
  variables: Variable[];
  num_trials: number | null;
  provenance: number[];
}

export interface GoldRecord extends Omit<ExtractionRecord, "provenance"> {
  annotator: string;
  notes: string;
}

export interface DocumentListItem {
  doc_id: string;
  source_path: string;
  n_chunks: number;
}

export interface Chunk {
  id: number;
  text: string;
  token_estimate: number;
  salience: number;
}

export interface DocumentDetail {
  doc_id: string;
  source_path: string | null;
  sections: { ordinal: number; title: string }[];
  keywords: [string, number][];
  n_entities: number;
  chunks: Chunk[];
}

export interface Answer {
  question: string;
  text: string;
  supporting_chunks: [number, number][]; // [chunk id, score], best first
  latency: number;
}

export interface EvalRequest {
  approximation_level: number;
  tolerance: number;
  baseline_trials: number;
  seed: number;
}

export interface EvalReport {
  n: number;
  exact_accuracy: number;
  numeric_tol_accuracy: number;
  mae_true: number | null;
  within_tol_rate: number | null;
  per_field: Record<string, Record<string, number | null>>;
  baseline_accuracy: number | null;
  unknown_pairs: number;
  config: Record<string, number>;
  perf?: Record<string, unknown>;
}

export interface UploadResult {
  doc_id: string;
  doc_ids: string[];
}
