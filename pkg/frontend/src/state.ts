// UI state and pure transitions. Views render from this; handlers apply
// transitions and re-render. The Q&A transcript is append-only.

import type {
  Answer,
  DocumentDetail,
  DocumentListItem,
  EvalReport,
  ExtractionRecord,
  GoldRecord,
} from "./types.js";

export interface TranscriptEntry {
  question: string;
  answer?: Answer;
  error?: string;
}

export interface UiState {
  documents: DocumentListItem[];
  selectedDocId: string | null;
  detail: DocumentDetail | null;
  record: ExtractionRecord | null;
  draftGold: GoldRecord | null;
  transcript: TranscriptEntry[];
  lastEval: EvalReport | null;
}

export function initialState(): UiState {
  return {
    documents: [],
    selectedDocId: null,
    detail: null,
    record: null,
    draftGold: null,
    transcript: [],
    lastEval: null,
  };
}

export function withDocuments(state: UiState, documents: DocumentListItem[]): UiState {
  return { ...state, documents };
}

export function selectDocument(state: UiState, detail: DocumentDetail): UiState {
  return {
    ...state,
    selectedDocId: detail.doc_id,
    detail,
    record: null,
    draftGold: null,
  };
}

export function draftFromRecord(record: ExtractionRecord): GoldRecord {
  const { provenance: _provenance, ...fields } = record;
  return { ...fields, annotator: "", notes: "" };
}

export function withRecord(state: UiState, record: ExtractionRecord): UiState {
  return { ...state, record, draftGold: draftFromRecord(record) };
}

export function withDraft(state: UiState, draftGold: GoldRecord): UiState {
  return { ...state, draftGold };
}

export function appendTranscript(state: UiState, entry: TranscriptEntry): UiState {
  return { ...state, transcript: [...state.transcript, entry] };
}

export function withEval(state: UiState, report: EvalReport): UiState {
  return { ...state, lastEval: report };
}

/** Per-control in-flight lock: a held key rejects re-entry, so a double
 *  click cannot issue a second request before the first settles. */
export class InFlightLock {
  private held = new Set<string>();

  acquire(key: string): boolean {
    if (this.held.has(key)) return false;
    this.held.add(key);
    return true;
  }

  release(key: string): void {
    this.held.delete(key);
  }

  isHeld(key: string): boolean {
    return this.held.has(key);
  }
}
