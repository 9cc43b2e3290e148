import { describe, expect, it } from "vitest";

import type { Client, ModelRow } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { doCompile, doFilter, doNext, doSolve } from "../src/controller.js";
import {
  applyError,
  applyNext,
  applySolve,
  canCompile,
  canNext,
  canSolve,
  initialState,
  mergedSource,
  startRequest,
} from "../src/state.js";

function state(overrides = {}) {
  return { ...initialState(), source: "p or q", ...overrides };
}

describe("state transitions", () => {
  it("merges the sets tab before the formulas on submit", () => {
    const s = state({ setsText: "sets:\n  $N = (1..9)\n", source: "formulas:\nP\n" });
    expect(mergedSource(s)).toBe("sets:\n  $N = (1..9)\nformulas:\nP\n");
    expect(mergedSource(state({ setsText: "   " }))).toBe("p or q");
  });

  it("compile/solve disabled on empty editor or while pending", () => {
    expect(canCompile(state({ source: "" }))).toBe(false);
    expect(canCompile(state())).toBe(true);
    expect(canCompile(startRequest(state()))).toBe(false);
    expect(canSolve(startRequest(state()))).toBe(false);
  });

  it("next enabled only with a live sat session", () => {
    expect(canNext(state())).toBe(false);
    const live = applySolve(state(), { session_id: "s1", status: "sat", model: [] });
    expect(canNext(live)).toBe(true);
    const exhausted = applyNext(live, { status: "exhausted", model: null });
    expect(canNext(exhausted)).toBe(false);
    expect(exhausted.notice).toBe("no more models");
    expect(canNext(startRequest(live))).toBe(false);
  });

  it("unsat and unknown surface notices", () => {
    const unsat = applySolve(state(), { session_id: "s", status: "unsat", model: null });
    expect(unsat.notice).toBe("unsatisfiable");
    const unknown = applySolve(state(), { session_id: "s", status: "unknown", model: null });
    expect(unknown.notice).toContain("unknown");
  });

  it("api errors become visible notices", () => {
    const s = applyError(state(), new ApiError(429, "too many sessions"));
    expect(s.notice).toContain("429");
    expect(s.notice).toContain("too many sessions");
    expect(s.pending).toBe(false);
  });
});

// -- mocked-service contract tests ------------------------------------------

function mockClient(overrides: Partial<Record<keyof Client, unknown>>): Client {
  const base = {
    compile: async () => ({ ok: true, latex: "", stats: {}, diagnostics: [] }),
    solve: async () => ({ session_id: "sid", status: "sat", model: [] }),
    next: async () => ({ status: "sat", model: [] }),
    model: async () => ({ model: [] }),
    health: async () => ({ ok: true }),
  };
  return { ...base, ...overrides } as unknown as Client;
}

describe("controller against a mocked service", () => {
  it("displays exactly the truth values the service returned", async () => {
    // deliberately "wrong-looking" rows: the UI must not recompute anything
    const rows: ModelRow[] = [
      { atom: "P(1)", value: false },
      { atom: "P(1)", value: true },
      { atom: "_weird", value: true },
    ];
    const client = mockClient({
      solve: async () => ({ session_id: "sid", status: "sat", model: rows }),
    });
    const s = await doSolve(client, state());
    expect(s.rows).toEqual(rows);
  });

  it("compile stores latex and diagnostics verbatim", async () => {
    const diags = [
      { severity: "error" as const, message: "boom", span: [0, 1] as [number, number], note: null },
    ];
    const client = mockClient({
      compile: async () => ({ ok: false, latex: "IGNORED", stats: {}, diagnostics: diags }),
    });
    const s = await doCompile(client, state());
    expect(s.diagnostics).toEqual(diags);
    expect(s.latex).toBe(""); // failed compiles show no stale formula pane
    const ok = await doCompile(
      mockClient({
        compile: async () => ({
          ok: true,
          latex: "\\bigwedge_{i \\in N} P_{i}",
          stats: {},
          diagnostics: [],
        }),
      }),
      state(),
    );
    expect(ok.latex).toContain("\\bigwedge");
  });

  it("next loop yields models until exhaustion disables the button", async () => {
    const models = [
      [{ atom: "p", value: true }],
      [{ atom: "p", value: false }],
    ];
    let calls = 0;
    const client = mockClient({
      solve: async () => ({ session_id: "sid", status: "sat", model: models[0] }),
      next: async () => {
        calls += 1;
        return calls < 2
          ? { status: "sat", model: models[calls] }
          : { status: "exhausted", model: null };
      },
    });
    let s = await doSolve(client, state());
    const seen = [s.rows];
    s = await doNext(client, s);
    seen.push(s.rows);
    expect(canNext(s)).toBe(true);
    s = await doNext(client, s);
    expect(s.status).toBe("exhausted");
    expect(canNext(s)).toBe(false);
    expect(new Set(seen.map((r) => JSON.stringify(r))).size).toBe(2);
  });

  it("filtering narrows rows via the service, not locally", async () => {
    let requested: [string, string] | null = null;
    const client = mockClient({
      model: async (_sid: string, filter: string, polarity: string) => {
        requested = [filter, polarity];
        return { model: [{ atom: "A(1)", value: true }] };
      },
    });
    const live = applySolve(state(), {
      session_id: "sid",
      status: "sat",
      model: [
        { atom: "A(1)", value: true },
        { atom: "B(1)", value: false },
      ],
    });
    const s = await doFilter(client, { ...live, filter: "^A", polarity: "true-only" });
    expect(requested).toEqual(["^A", "true-only"]);
    expect(s.rows).toEqual([{ atom: "A(1)", value: true }]);
  });

  it("an invalid filter keeps the previous rows and shows the 422 message", async () => {
    const client = mockClient({
      model: async () => {
        throw new ApiError(422, "invalid filter pattern: missing ]");
      },
    });
    const live = applySolve(state(), {
      session_id: "sid",
      status: "sat",
      model: [{ atom: "p", value: true }],
    });
    const s = await doFilter(client, { ...live, filter: "([" });
    expect(s.rows).toEqual([{ atom: "p", value: true }]); // unchanged
    expect(s.notice).toContain("422");
  });

  it("404 and 429 service errors are surfaced, never silent", async () => {
    const gone = mockClient({
      next: async () => {
        throw new ApiError(404, "unknown or expired session");
      },
    });
    const live = applySolve(state(), { session_id: "sid", status: "sat", model: [] });
    const s = await doNext(gone, live);
    expect(s.notice).toContain("404");
    const busy = mockClient({
      solve: async () => {
        throw new ApiError(429, "too many sessions");
      },
    });
    const s2 = await doSolve(busy, state());
    expect(s2.notice).toContain("429");
  });

  it("actions are no-ops while a request is pending (single in-flight)", async () => {
    let calls = 0;
    const client = mockClient({
      compile: async () => {
        calls += 1;
        return { ok: true, latex: "", stats: {}, diagnostics: [] };
      },
    });
    const pending = startRequest(state());
    await doCompile(client, pending);
    expect(calls).toBe(0);
    await doNext(client, pending);
    await doFilter(client, pending);
    expect(calls).toBe(0);
  });
});
