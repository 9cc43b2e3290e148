"""Local HTTP/JSON facade for the compile/solve/enumerate loop.

Thin adapter over the library: compile and solve behave exactly like the
CLI on the same source. Sessions are in-memory, capped, and expire after
30 minutes idle. Binds to localhost unless told otherwise.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import modelview, smt
from .pipeline import Compiled, compile_source, stats
from .sat import Session

MAX_BODY = 1 << 20  # 1 MiB
SESSION_CAP = 64
SESSION_IDLE_SECONDS = 30 * 60


class CompileRequest(BaseModel):
    source: str


class SolveRequest(BaseModel):
    source: str
    seed: int = 0
    encoding: str | None = None


@dataclass
class SessionRecord:
    id: str
    kind: str  # "sat" | "smt"
    session: Session | None
    compiled: Compiled
    view: modelview.ModelView | None
    created: float
    last_used: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, now=time.monotonic, cap: int = SESSION_CAP, idle: float = SESSION_IDLE_SECONDS):
        self._records: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()
        self._now = now
        self.cap = cap
        self.idle = idle

    def _expire(self) -> None:
        deadline = self._now() - self.idle
        for sid in [s for s, r in self._records.items() if r.last_used < deadline]:
            del self._records[sid]

    def create(self, kind: str, session: Session | None, compiled: Compiled) -> SessionRecord | None:
        with self._lock:
            self._expire()
            if len(self._records) >= self.cap:
                return None
            sid = secrets.token_urlsafe(16)  # 128 bits
            now = self._now()
            rec = SessionRecord(sid, kind, session, compiled, None, now, now)
            self._records[sid] = rec
            return rec

    def get(self, sid: str) -> SessionRecord | None:
        with self._lock:
            self._expire()
            rec = self._records.get(sid)
            if rec is not None:
                rec.last_used = self._now()
            return rec


def _diag_json(diags) -> list[dict]:
    return [
        {"severity": d.severity, "message": d.message, "span": list(d.span), "note": d.note}
        for d in diags
    ]


def _model_json(view: modelview.ModelView) -> list[dict]:
    return modelview.rows_json(view)


def create_app(store: SessionStore | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="twistc service")
    sessions = store if store is not None else SessionStore()

    @app.exception_handler(RequestValidationError)
    async def bad_request(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and int(length) > MAX_BODY:
            return JSONResponse(status_code=413, content={"error": "body too large"})
        return await call_next(request)

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.post("/compile")
    def compile_endpoint(req: CompileRequest):
        c = compile_source(req.source)
        return {
            "ok": c.ok,
            "latex": c.latex,
            "stats": stats(c),
            "diagnostics": _diag_json(c.diagnostics),
        }

    @app.post("/solve")
    def solve_endpoint(req: SolveRequest):
        c = compile_source(req.source, encoding=req.encoding)
        if not c.ok:
            return {
                "session_id": None,
                "status": "error",
                "model": None,
                "diagnostics": _diag_json(c.diagnostics),
            }
        if c.kind == "smt":
            return _solve_smt(c)
        session = Session(c.db, seed=req.seed)
        rec = sessions.create("sat", session, c)
        if rec is None:
            return JSONResponse(status_code=429, content={"error": "too many sessions"})
        with rec.lock:
            res = session.solve()
            model = None
            if res.status == "sat":
                rec.view = modelview.decode(res.model, c.db)
                model = _model_json(rec.view)
        return {"session_id": rec.id, "status": res.status, "model": model}

    def _solve_smt(c: Compiled):
        cmd = os.environ.get("TWISTC_SMT_CMD")
        if not cmd:
            return {
                "session_id": None,
                "status": "unknown",
                "model": None,
                "diagnostics": [
                    {
                        "severity": "error",
                        "message": "program needs an SMT solver; set TWISTC_SMT_CMD",
                        "span": [0, 0],
                        "note": None,
                    }
                ],
            }
        result = smt.run_external(c.script.text, cmd)
        model = None
        rec = sessions.create("smt", None, c)
        if rec is None:
            return JSONResponse(status_code=429, content={"error": "too many sessions"})
        if result.status == "sat":
            if not smt.verify_smt_model(c.formula, result.values):
                return JSONResponse(
                    status_code=500, content={"error": "SMT model failed re-checking"}
                )
            rows = tuple(
                sorted(
                    ((name, bool(result.values.get(name, False))) for name in c.script.bools),
                    key=lambda r: modelview.natural_key(r[0]),
                )
            )
            rec.view = modelview.ModelView(rows)
            model = _model_json(rec.view)
        return {"session_id": rec.id, "status": result.status, "model": model}

    @app.post("/sessions/{sid}/next")
    def next_endpoint(sid: str):
        rec = sessions.get(sid)
        if rec is None:
            return JSONResponse(status_code=404, content={"error": "unknown or expired session"})
        with rec.lock:
            if rec.kind != "sat" or rec.session is None or rec.session.last is None:
                return {"status": "exhausted", "model": None}
            res = rec.session.next_model()
            if res.status != "sat":
                return {"status": res.status, "model": None}
            rec.view = modelview.decode(res.model, rec.compiled.db)
            return {"status": "sat", "model": _model_json(rec.view)}

    @app.get("/sessions/{sid}/model")
    def model_endpoint(sid: str, filter: str = "", polarity: str = "all"):
        rec = sessions.get(sid)
        if rec is None:
            return JSONResponse(status_code=404, content={"error": "unknown or expired session"})
        with rec.lock:
            if rec.view is None:
                return JSONResponse(status_code=404, content={"error": "no model in session"})
            try:
                filtered = modelview.apply_filter(rec.view, filter, polarity)
            except modelview.InvalidPatternError as err:
                return JSONResponse(status_code=422, content={"error": err.message})
            except Exception as err:  # bad polarity value
                return JSONResponse(status_code=422, content={"error": str(err)})
            return {"model": _model_json(filtered)}

    ui_path = Path(ui_dir) if ui_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_path.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app


def main(argv: list[str] | None = None) -> int:
    import argparse

    import uvicorn

    p = argparse.ArgumentParser(prog="twistc-service")
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8737)
    p.add_argument("--ui-dir", default=None)
    args = p.parse_args(argv)
    uvicorn.run(create_app(ui_dir=args.ui_dir), host=args.bind, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
