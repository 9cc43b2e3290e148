/** Typed client for the twistc service JSON API. */

export interface DiagnosticJson {
  severity: "error" | "warning";
  message: string;
  span: [number, number];
  note: string | null;
}

export interface Stats {
  n_atoms: number;
  n_clauses: number;
  n_vars: number;
}

export interface CompileResponse {
  ok: boolean;
  latex: string;
  stats: Stats;
  diagnostics: DiagnosticJson[];
}

export interface ModelRow {
  atom: string;
  value: boolean;
}

export interface SolveResponse {
  session_id: string | null;
  status: string; // sat | unsat | unknown | error
  model: ModelRow[] | null;
  diagnostics?: DiagnosticJson[];
}

export interface NextResponse {
  status: string; // sat | exhausted | unknown
  model: ModelRow[] | null;
}

export interface ModelResponse {
  model: ModelRow[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    /* non-JSON error body */
  }
  if (!resp.ok) {
    const msg =
      body && typeof body === "object" && "error" in body
        ? String((body as { error: unknown }).error)
        : `HTTP ${resp.status}`;
    throw new ApiError(resp.status, msg);
  }
  return body as T;
}

export class Client {
  constructor(private base: string = "") {}

  compile(source: string): Promise<CompileResponse> {
    return request(`${this.base}/compile`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ source }),
    });
  }

  solve(source: string, seed = 0): Promise<SolveResponse> {
    return request(`${this.base}/solve`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ source, seed }),
    });
  }

  next(sessionId: string): Promise<NextResponse> {
    return request(`${this.base}/sessions/${encodeURIComponent(sessionId)}/next`, {
      method: "POST",
    });
  }

  model(sessionId: string, filter: string, polarity: string): Promise<ModelResponse> {
    const params = new URLSearchParams({ filter, polarity });
    return request(
      `${this.base}/sessions/${encodeURIComponent(sessionId)}/model?${params}`,
    );
  }

  health(): Promise<{ ok: boolean }> {
    return request(`${this.base}/healthz`);
  }
}
