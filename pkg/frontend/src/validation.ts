// Client-side validation mirroring the server's gold-record rules, so a
// bad draft never leaves the browser.

import type { GoldRecord, Variable, VariableRole } from "./types.js";

export type FieldErrors = Record<string, string>;

const ROLES: VariableRole[] = ["independent", "dependent", "control"];

/** Parse "name (role): level, level; ..." into variables; "" means none. */
export function parseVariables(input: string): Variable[] | undefined {
  const text = input.trim();
  if (text === "") return [];
  const variables: Variable[] = [];
  for (const item of text.split(";")) {
    const m = /^\s*([^():]+?)\s*(?:\(([^)]*)\))?\s*(?::\s*(.+))?\s*$/.exec(item);
    if (!m || !m[1]?.trim()) return undefined;
    const roleText = (m[2] ?? "independent").trim().toLowerCase();
    const role = ROLES.find((r) => r.startsWith(roleText.slice(0, 3)));
    if (!role) return undefined;
    const levels = (m[3] ?? "")
      .split(",")
      .map((level) => level.trim())
      .filter((level) => level.length > 0);
    variables.push({ name: m[1].trim(), role, levels });
  }
  return variables;
}

/** Parse a count input: "" means unknown (null); undefined means invalid. */
export function parseCount(input: string): number | null | undefined {
  const text = input.trim();
  if (text === "") return null;
  if (!/^-?\d+$/.test(text)) return undefined;
  const value = Number(text);
  return value < 0 ? undefined : value;
}

/** Parse "12; 8" style stage lists; "" means no stages. */
export function parseStages(input: string): number[] | undefined {
  const text = input.trim();
  if (text === "") return [];
  const parts = text.split(";").map((part) => part.trim());
  const stages: number[] = [];
  for (const part of parts) {
    if (!/^\d+$/.test(part)) return undefined;
    stages.push(Number(part));
  }
  return stages;
}

export function formatCount(value: number | null): string {
  return value === null ? "" : String(value);
}

export function formatStages(stages: number[]): string {
  return stages.join("; ");
}

export function validateGold(draft: GoldRecord): FieldErrors {
  const errors: FieldErrors = {};
  const counts: [string, number | null][] = [
    ["participants_total", draft.participants_total],
    ["num_tasks", draft.num_tasks],
    ["num_trials", draft.num_trials],
  ];
  for (const [field, value] of counts) {
    if (value !== null && (!Number.isInteger(value) || value < 0)) {
      errors[field] = "must be a nonnegative integer or empty";
    }
  }
  if (draft.participants_stages.some((s) => !Number.isInteger(s) || s < 0)) {
    errors["participants_stages"] = "stages must be nonnegative integers";
  } else if (draft.participants_stages.length > 0) {
    const sum = draft.participants_stages.reduce((a, b) => a + b, 0);
    if (draft.participants_total !== sum) {
      errors["participants_total"] = `must equal the stage sum (${sum})`;
    }
  }
  draft.variables.forEach((variable, i) => {
    if (!variable.name.trim()) {
      errors[`variables[${i}].name`] = "name must be non-empty";
    }
  });
  return errors;
}
