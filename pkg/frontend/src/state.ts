/** UI state and its pure transitions.
 *
 * All truth values displayed in the model table come verbatim from service
 * responses; nothing here computes or filters models locally. Filtering is
 * a service call; on a filter error the previous rows are kept.
 */

import type { DiagnosticJson, ModelRow, SolveResponse, NextResponse } from "./api.js";
import { ApiError } from "./api.js";

export type Polarity = "all" | "true-only" | "false-only";

export interface UiState {
  source: string;
  setsText: string;
  latex: string;
  diagnostics: DiagnosticJson[];
  sessionId: string | null;
  status: string; // "" | sat | unsat | unknown | exhausted | error
  rows: ModelRow[];
  filter: string;
  polarity: Polarity;
  pending: boolean;
  notice: string;
}

export function initialState(): UiState {
  return {
    source: "",
    setsText: "",
    latex: "",
    diagnostics: [],
    sessionId: null,
    status: "",
    rows: [],
    filter: "",
    polarity: "all",
    pending: false,
    notice: "",
  };
}

/** Sets-tab lines are concatenated before the formulas on submit. */
export function mergedSource(s: UiState): string {
  const sets = s.setsText.trim();
  if (!sets) {
    return s.source;
  }
  return `${s.setsText.replace(/\s+$/, "")}\n${s.source}`;
}

export function canCompile(s: UiState): boolean {
  return !s.pending && mergedSource(s).trim().length > 0;
}

export function canSolve(s: UiState): boolean {
  return canCompile(s);
}

export function canNext(s: UiState): boolean {
  return !s.pending && s.sessionId !== null && s.status === "sat";
}

export function startRequest(s: UiState): UiState {
  return { ...s, pending: true, notice: "" };
}

export function applyCompile(
  s: UiState,
  resp: { ok: boolean; latex: string; diagnostics: DiagnosticJson[] },
): UiState {
  return {
    ...s,
    pending: false,
    latex: resp.ok ? resp.latex : "",
    diagnostics: resp.diagnostics,
    notice: resp.ok ? "" : "compilation failed",
  };
}

export function applySolve(s: UiState, resp: SolveResponse): UiState {
  const rows = resp.model ?? [];
  return {
    ...s,
    pending: false,
    sessionId: resp.session_id,
    status: resp.status,
    rows,
    diagnostics: resp.diagnostics ?? [],
    notice:
      resp.status === "sat"
        ? ""
        : resp.status === "unsat"
          ? "unsatisfiable"
          : resp.status === "error"
            ? "compilation failed"
            : "no answer (unknown)",
  };
}

export function applyNext(s: UiState, resp: NextResponse): UiState {
  if (resp.status !== "sat") {
    const notice =
      resp.status === "exhausted" ? "no more models" : `no answer (${resp.status})`;
    return { ...s, pending: false, status: resp.status, notice };
  }
  return { ...s, pending: false, status: "sat", rows: resp.model ?? [], notice: "" };
}

/** Rows come from GET /sessions/{id}/model with the current filter. */
export function applyFiltered(s: UiState, rows: ModelRow[]): UiState {
  return { ...s, pending: false, rows, notice: "" };
}

export function applyError(s: UiState, err: unknown): UiState {
  const message =
    err instanceof ApiError
      ? err.status > 0
        ? `service error ${err.status}: ${err.message}`
        : err.message
      : String(err);
  return { ...s, pending: false, notice: message };
}
