"""HTTP surface over sessions.

One writer per session: commands take the session's lock and are applied
in arrival order, while readers always see the latest published revision
(the store swaps whole immutable sessions). Every accepted command is
snapshotted to the data directory, one JSON file per session, so a
restarted service picks sessions back up.

Endpoints (JSON bodies throughout):

* ``POST /sessions`` — create; body carries ``domain``/``problem`` text or a
  bundled ``example`` name, plus optional ``config``.
* ``GET /sessions/{id}`` — full session view.
* ``POST /sessions/{id}/commands`` — one command document; responds with the
  new revision and fresh advisories.
* ``GET /sessions/{id}/advisories`` — advisories of the current revision.
* ``GET /sessions/{id}/landmarks`` — landmark graph with statuses.
* ``POST /sessions/{id}/suggest`` — plan completion search (read-only).
* ``GET /health``.

Errors are structured problem documents ``{"code", "message", "details"}``
with the machine-readable codes of the underlying errors.
"""

from __future__ import annotations

import json
import os
import threading
from collections import defaultdict
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import bundled
from .advisor import suggest_actions
from .errors import (
    DispatchBlockedError,
    EngineError,
    InvalidCommandError,
    StepNotApplicableError,
    UnknownSessionError,
)
from .landmarks import extract_landmarks, landmark_status
from .session import (
    CommandResult,
    Session,
    SessionConfig,
    command_from_doc,
    create_session,
    handle,
    restore,
    snapshot,
)

_STATUS_BY_CODE = {
    "UnknownSession": 404,
    "StepNotApplicable": 409,
    "DispatchBlocked": 409,
    "NotApplicable": 409,
}


class SessionStore:
    """In-memory session registry with per-session write serialization and
    optional snapshot persistence."""

    def __init__(self, data_dir: str | os.PathLike | None = None,
                 default_config: SessionConfig | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.default_config = default_config or SessionConfig()
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                session = restore(json.loads(path.read_text(encoding="utf-8")))
            except (EngineError, json.JSONDecodeError):
                continue  # unreadable snapshots are skipped, not fatal
            self._sessions[session.id] = session

    def _persist(self, session: Session) -> None:
        if not self.data_dir:
            return
        path = self.data_dir / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(snapshot(session), indent=2) + "\n", encoding="utf-8")
        tmp.replace(path)

    def create(self, domain_text: str, problem_text: str,
               config: SessionConfig | None = None) -> Session:
        session = create_session(domain_text, problem_text,
                                 config or self.default_config)
        with self._registry_lock:
            self._sessions[session.id] = session
        self._persist(session)
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no session {session_id!r}")
        return session

    def ids(self) -> list[str]:
        return sorted(self._sessions)

    def command(self, session_id: str, cmd) -> CommandResult:
        with self._locks[session_id]:
            session = self.get(session_id)
            result = handle(session, cmd)
            self._sessions[session_id] = result.session
            self._persist(result.session)
            return result

    def flush(self) -> None:
        for session in list(self._sessions.values()):
            self._persist(session)


class CreateSessionBody(BaseModel):
    domain: Optional[str] = None
    problem: Optional[str] = None
    example: Optional[str] = None
    config: Optional[dict] = None


class SuggestBody(BaseModel):
    budget: Optional[float] = None


def session_view(session: Session) -> dict:
    report = session.plan_report()
    verdict_by_index = dict(enumerate(report.steps))
    return {
        "id": session.id,
        "revision": session.revision,
        "domain": session.domain.name,
        "problem": session.problem.name,
        "config": session.config.to_doc(),
        "goals": sorted(str(g) for g in session.goals),
        "state": session.current.to_doc(),
        "trace_length": len(session.trace),
        "plan": [
            {"action": rec.action_id, "executed": rec.executed,
             "verdict": verdict_by_index.get(i, "not-evaluated")}
            for i, rec in enumerate(session.plan)
        ],
        "plan_report": report.to_doc(),
        "advisories": [adv.to_doc() for adv in session.advisories],
    }


def landmark_view(session: Session) -> dict:
    ctx = session.context()
    graph = extract_landmarks(ctx.current, ctx.goals, ctx.actions)
    statuses = {st.landmark.key: st for st in
                landmark_status(graph, ctx.trace, ctx.current, ctx.actions)}
    nodes = []
    for lm in graph.nodes:
        st = statuses[lm.key]
        node = {**lm.to_doc(), "level": graph.levels.get(lm.key),
                "status": st.status}
        if st.resource_alternatives:
            node["resource_alternatives"] = st.to_doc()["resource_alternatives"]
        nodes.append(node)
    return {
        "revision": session.revision,
        "nodes": nodes,
        "edges": [{"from": a, "to": b, "kind": kind} for a, b, kind in graph.orders],
    }


def create_app(store: SessionStore | None = None,
               ui_dir: str | os.PathLike | None = None) -> FastAPI:
    store = store or SessionStore()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.flush()  # graceful shutdown leaves every snapshot on disk

    app = FastAPI(title="plansight", docs_url=None, redoc_url=None,
                  lifespan=lifespan)
    app.state.store = store

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=exc.to_doc())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "sessions": len(store.ids())}

    @app.post("/sessions", status_code=201)
    def create(body: CreateSessionBody) -> dict:
        if body.example:
            domain_text, problem_text = bundled.load_example(body.example)
        elif body.domain and body.problem:
            domain_text, problem_text = body.domain, body.problem
        else:
            raise InvalidCommandError(
                "provide either 'example' or both 'domain' and 'problem'")
        config = (SessionConfig.from_doc(body.config) if body.config
                  else store.default_config)
        session = store.create(domain_text, problem_text, config)
        return {
            "id": session.id,
            "revision": session.revision,
            "advisories": [adv.to_doc() for adv in session.advisories],
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return session_view(store.get(session_id))

    @app.post("/sessions/{session_id}/commands")
    def post_command(session_id: str, body: dict) -> dict:
        cmd = command_from_doc(body)
        result = store.command(session_id, cmd)
        doc = {
            "revision": result.session.revision,
            "advisories": [adv.to_doc() for adv in result.advisories],
        }
        if result.result is not None:
            doc["result"] = result.result
        return doc

    @app.get("/sessions/{session_id}/advisories")
    def get_advisories(session_id: str) -> dict:
        session = store.get(session_id)
        return {
            "revision": session.revision,
            "advisories": [adv.to_doc() for adv in session.advisories],
        }

    @app.get("/sessions/{session_id}/landmarks")
    def get_landmarks(session_id: str) -> dict:
        return landmark_view(store.get(session_id))

    @app.post("/sessions/{session_id}/suggest")
    def post_suggest(session_id: str, body: SuggestBody | None = None) -> dict:
        session = store.get(session_id)
        budget = (body.budget if body and body.budget is not None
                  else session.config.suggest_budget)
        if budget <= 0:
            raise InvalidCommandError("budget must be positive")
        report = session.plan_report()
        result = suggest_actions(report.end_state, session.goals,
                                 session.catalog, budget)
        return {"revision": session.revision, "suggestion": result.to_doc()}

    ui_path = Path(ui_dir) if ui_dir else Path(__file__).parent / "web"
    if ui_path.is_dir() and (ui_path / "index.html").exists():
        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app
