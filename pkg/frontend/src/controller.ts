/** Async actions: one service call per user action, no local solving. */

import type { Client } from "./api.js";
import {
  applyCompile,
  applyError,
  applyFiltered,
  applyNext,
  applySolve,
  canCompile,
  canNext,
  canSolve,
  mergedSource,
  startRequest,
  type UiState,
} from "./state.js";

export async function doCompile(client: Client, s: UiState): Promise<UiState> {
  if (!canCompile(s)) {
    return s;
  }
  const started = startRequest(s);
  try {
    return applyCompile(started, await client.compile(mergedSource(s)));
  } catch (err) {
    return applyError(started, err);
  }
}

export async function doSolve(client: Client, s: UiState): Promise<UiState> {
  if (!canSolve(s)) {
    return s;
  }
  const started = startRequest(s);
  try {
    return applySolve(started, await client.solve(mergedSource(s)));
  } catch (err) {
    return applyError(started, err);
  }
}

export async function doNext(client: Client, s: UiState): Promise<UiState> {
  if (!canNext(s) || s.sessionId === null) {
    return s;
  }
  const started = startRequest(s);
  try {
    return applyNext(started, await client.next(s.sessionId));
  } catch (err) {
    return applyError(started, err);
  }
}

/** Re-fetch the current model narrowed by filter/polarity. On an invalid
 * pattern (422) the previous rows are kept and the error is surfaced. */
export async function doFilter(client: Client, s: UiState): Promise<UiState> {
  if (s.pending || s.sessionId === null || s.status !== "sat") {
    return s;
  }
  const started = startRequest(s);
  try {
    const resp = await client.model(s.sessionId, s.filter, s.polarity);
    return applyFiltered(started, resp.model);
  } catch (err) {
    return applyError(started, err);
  }
}
