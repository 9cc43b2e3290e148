/** DOM wiring for the workbench page. All logic lives in the service;
 * this file only moves strings between widgets and the API client. */

import { Client } from "./api.js";
import { doCompile, doFilter, doNext, doSolve } from "./controller.js";
import { renderMathLines } from "./math.js";
import { highlightHtml, spanToEditor } from "./spans.js";
import { canCompile, canNext, canSolve, initialState, type Polarity, type UiState } from "./state.js";

const client = new Client("..");
let state: UiState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const sourceBox = el<HTMLTextAreaElement>("source");
const setsBox = el<HTMLTextAreaElement>("sets");
const sourceBackdrop = el<HTMLDivElement>("source-backdrop");
const setsBackdrop = el<HTMLDivElement>("sets-backdrop");
const compileBtn = el<HTMLButtonElement>("compile");
const solveBtn = el<HTMLButtonElement>("solve");
const nextBtn = el<HTMLButtonElement>("next");
const filterBox = el<HTMLInputElement>("filter");
const latexPane = el<HTMLDivElement>("latex");
const diagList = el<HTMLUListElement>("diagnostics");
const modelBody = el<HTMLTableSectionElement>("model-body");
const noticeLine = el<HTMLDivElement>("notice");
const statusLine = el<HTMLSpanElement>("status");

function showTab(name: "formulas" | "sets"): void {
  el<HTMLDivElement>("tab-formulas").classList.toggle("active", name === "formulas");
  el<HTMLDivElement>("tab-sets").classList.toggle("active", name === "sets");
  el<HTMLButtonElement>("tabbtn-formulas").classList.toggle("active", name === "formulas");
  el<HTMLButtonElement>("tabbtn-sets").classList.toggle("active", name === "sets");
}

function jumpToSpan(start: number, end: number): void {
  const range = spanToEditor(state.setsText, state.source, [start, end]);
  const box = range.editor === "sets" ? setsBox : sourceBox;
  showTab(range.editor);
  box.focus();
  box.setSelectionRange(range.from, range.to);
}

function renderHighlights(): void {
  const bySets: Array<[number, number]> = [];
  const byFormulas: Array<[number, number]> = [];
  for (const d of state.diagnostics) {
    if (d.severity !== "error") {
      continue;
    }
    const range = spanToEditor(state.setsText, state.source, d.span);
    (range.editor === "sets" ? bySets : byFormulas).push([range.from, range.to]);
  }
  setsBackdrop.innerHTML = highlightHtml(setsBox.value, bySets);
  sourceBackdrop.innerHTML = highlightHtml(sourceBox.value, byFormulas);
}

function syncScroll(): void {
  sourceBackdrop.scrollTop = sourceBox.scrollTop;
  setsBackdrop.scrollTop = setsBox.scrollTop;
}

function render(): void {
  compileBtn.disabled = !canCompile(state);
  solveBtn.disabled = !canSolve(state);
  nextBtn.disabled = !canNext(state);
  filterBox.disabled = state.sessionId === null;

  latexPane.innerHTML = state.latex ? renderMathLines(state.latex) : "";
  statusLine.textContent = state.status;
  noticeLine.textContent = state.notice;
  noticeLine.classList.toggle("visible", state.notice.length > 0);
  renderHighlights();

  diagList.replaceChildren(
    ...state.diagnostics.map((d) => {
      const li = document.createElement("li");
      li.className = d.severity;
      li.textContent = `${d.severity}: ${d.message}`;
      li.title = d.note ?? "";
      li.addEventListener("click", () => jumpToSpan(d.span[0], d.span[1]));
      return li;
    }),
  );

  modelBody.replaceChildren(
    ...state.rows.map((row) => {
      const tr = document.createElement("tr");
      const atom = document.createElement("td");
      atom.textContent = row.atom;
      const value = document.createElement("td");
      value.textContent = row.value ? "true" : "false";
      value.className = row.value ? "val-true" : "val-false";
      tr.append(atom, value);
      return tr;
    }),
  );
}

function update(next: UiState): void {
  state = next;
  render();
}

function syncInputs(): void {
  state = {
    ...state,
    source: sourceBox.value,
    setsText: setsBox.value,
    filter: filterBox.value,
    polarity: (document.querySelector<HTMLInputElement>(
      'input[name="polarity"]:checked',
    )?.value ?? "all") as Polarity,
  };
}

function action(run: (s: UiState) => Promise<UiState>): () => Promise<void> {
  // show the pending view while the request is in flight, but hand the
  // controller the non-pending state it acts on
  return async () => {
    syncInputs();
    const current = state;
    if (current.pending) {
      return;
    }
    update({ ...current, pending: true });
    update(await run(current));
  };
}

compileBtn.addEventListener("click", action((s) => doCompile(client, s)));
solveBtn.addEventListener("click", action((s) => doSolve(client, s)));
nextBtn.addEventListener("click", action((s) => doNext(client, s)));

let filterTimer: number | undefined;
function filterChanged(): void {
  syncInputs();
  window.clearTimeout(filterTimer);
  filterTimer = window.setTimeout(async () => {
    const current = state;
    if (current.pending) {
      return;
    }
    update(await doFilter(client, current));
  }, 200);
}

filterBox.addEventListener("input", filterChanged);
for (const radio of document.querySelectorAll<HTMLInputElement>('input[name="polarity"]')) {
  radio.addEventListener("change", filterChanged);
}

sourceBox.addEventListener("input", () => {
  // edits invalidate old spans; drop stale highlights with the diagnostics
  state = { ...state, diagnostics: [] };
  syncInputs();
  render();
});
setsBox.addEventListener("input", () => {
  state = { ...state, diagnostics: [] };
  syncInputs();
  render();
});
sourceBox.addEventListener("scroll", syncScroll);
setsBox.addEventListener("scroll", syncScroll);

el<HTMLButtonElement>("tabbtn-formulas").addEventListener("click", () => showTab("formulas"));
el<HTMLButtonElement>("tabbtn-sets").addEventListener("click", () => showTab("sets"));

showTab("formulas");
render();
