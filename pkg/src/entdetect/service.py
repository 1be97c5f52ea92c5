"""HTTP service for interactive measurement sessions.

The server recommends the next setting but never recomputes physics: the
experimenter feeds externally measured values and the service only does the
criterion bookkeeping.  Sessions are journaled as JSON-lines event logs,
one file per session, and the store is rebuilt by replaying them.

Endpoints
---------
POST /sessions {n_qubits, threshold?, mode?}         -> {id, first_setting}
GET  /sessions/{id}                                  -> full session view
POST /sessions/{id}/record {setting, value, stderr?} -> {status, sum, next_setting}
GET  /sessions/{id}/whatif?setting=S&value=v         -> hypothetical view
GET  /trees/{n}?seed=W                               -> branch JSON

Errors: 404 unknown id, 409 out-of-order or duplicate setting, 422 invalid
values.  Every response body carries a schema version field "v".
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse
from pydantic import BaseModel

from .engine import DecisionPolicy, Session, SessionError
from .pauli import PauliStringError
from .strings import build_branch

log = logging.getLogger("entdetect.service")

SCHEMA_VERSION = 1


class CreateSessionBody(BaseModel):
    n_qubits: int
    threshold: float | None = None
    mode: str = "manual"


class RecordBody(BaseModel):
    setting: str
    value: float
    stderr: float | None = None


@dataclass
class StoredSession:
    session: Session
    created_at: float
    mode: str
    stderrs: list[float | None] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session map with an append-only journal per session."""

    def __init__(self, data_dir: str | None = None):
        self.data_dir = data_dir
        self.sessions: dict[str, StoredSession] = {}
        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            self._replay_all()

    # -- journaling ---------------------------------------------------------

    def _journal_path(self, session_id: str) -> str:
        return os.path.join(self.data_dir, f"{session_id}.jsonl")

    def _append(self, session_id: str, event: dict) -> None:
        if not self.data_dir:
            return
        with open(self._journal_path(session_id), "a") as fh:
            fh.write(json.dumps(event) + "\n")

    def _replay_all(self) -> None:
        for name in sorted(os.listdir(self.data_dir)):
            if not name.endswith(".jsonl"):
                continue
            session_id = name[: -len(".jsonl")]
            try:
                self._replay_one(session_id)
            except Exception as exc:  # noqa: BLE001 - a bad journal must not kill the store
                log.warning("skipping journal %s: %s", name, exc)

    def _replay_one(self, session_id: str) -> None:
        stored = None
        with open(self._journal_path(session_id)) as fh:
            for lineno, line in enumerate(fh, start=1):
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    log.warning(
                        "journal %s: stopping replay at corrupt line %d",
                        session_id,
                        lineno,
                    )
                    break
                if event["event"] == "created":
                    policy = DecisionPolicy(event["n_qubits"], threshold=event["threshold"])
                    stored = StoredSession(
                        session=Session(policy),
                        created_at=event["created_at"],
                        mode=event["mode"],
                    )
                elif event["event"] == "recorded" and stored is not None:
                    stored.session.record(event["setting"], event["value"])
                    stored.stderrs.append(event.get("stderr"))
        if stored is not None:
            self.sessions[session_id] = stored

    # -- operations ---------------------------------------------------------

    def create(self, n_qubits: int, threshold: float | None, mode: str) -> tuple[str, StoredSession]:
        policy = DecisionPolicy(n_qubits, threshold=threshold)
        stored = StoredSession(session=Session(policy), created_at=time.time(), mode=mode)
        session_id = uuid.uuid4().hex[:12]
        self.sessions[session_id] = stored
        self._append(
            session_id,
            {
                "v": SCHEMA_VERSION,
                "event": "created",
                "n_qubits": n_qubits,
                "threshold": policy.threshold,
                "mode": mode,
                "created_at": stored.created_at,
            },
        )
        return session_id, stored

    def get(self, session_id: str) -> StoredSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session id") from None

    def record(self, session_id: str, setting: str, value: float, stderr: float | None):
        stored = self.get(session_id)
        with stored.lock:  # one in-flight mutation per session
            stored.session.record(setting, value)
            stored.stderrs.append(stderr)
            self._append(
                session_id,
                {
                    "v": SCHEMA_VERSION,
                    "event": "recorded",
                    "setting": setting.upper(),
                    "value": value,
                    "stderr": stderr,
                },
            )
        return stored


def _session_view(session_id: str, stored: StoredSession) -> dict:
    session = stored.session
    history = []
    total = 0.0
    for (word, value), err in zip(session.log, stored.stderrs):
        total += value**2
        history.append({"setting": word, "value": value, "stderr": err, "sum": total})
    return {
        "v": SCHEMA_VERSION,
        "id": session_id,
        "n_qubits": session.n_qubits,
        "threshold": session.policy.threshold,
        "mode": stored.mode,
        "created_at": stored.created_at,
        "status": session.status.value,
        "sum": session.running_sum,
        "history": history,
        "next_setting": session.recommendation(),
    }


def create_app(data_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="entdetect session service", version=str(SCHEMA_VERSION))
    # the browser guide may be served from a different origin (dev server)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(data_dir)
    app.state.store = store

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if not 2 <= body.n_qubits <= 8:
            raise HTTPException(status_code=422, detail="n_qubits must be in 2..8")
        if body.threshold is not None and not 0.0 < body.threshold < 1.0:
            raise HTTPException(status_code=422, detail="threshold must be in (0, 1)")
        session_id, stored = store.create(body.n_qubits, body.threshold, body.mode)
        return {
            "v": SCHEMA_VERSION,
            "id": session_id,
            "threshold": stored.session.policy.threshold,
            "first_setting": stored.session.next_setting(),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(session_id, store.get(session_id))

    @app.post("/sessions/{session_id}/record")
    def record(session_id: str, body: RecordBody):
        if abs(body.value) > 1.0 + 1e-9:
            raise HTTPException(status_code=422, detail="value outside [-1, 1]")
        try:
            stored = store.record(session_id, body.setting, body.value, body.stderr)
        except SessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except PauliStringError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        session = stored.session
        return {
            "v": SCHEMA_VERSION,
            "status": session.status.value,
            "sum": session.running_sum,
            "next_setting": session.recommendation(),
        }

    @app.get("/sessions/{session_id}/whatif")
    def whatif(session_id: str, setting: str = Query(...), value: float = Query(...)):
        stored = store.get(session_id)
        if abs(value) > 1.0 + 1e-9:
            raise HTTPException(status_code=422, detail="value outside [-1, 1]")
        try:
            total, status = stored.session.whatif(setting, value)
        except SessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except PauliStringError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {"v": SCHEMA_VERSION, "sum": total, "status": status.value}

    @app.get("/trees/{n_qubits}")
    def tree(n_qubits: int, seed: str | None = None):
        if not 2 <= n_qubits <= 5:
            raise HTTPException(status_code=422, detail="trees served for 2..5 qubits")
        try:
            branch = build_branch(n_qubits, seed)
        except PauliStringError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return json.loads(branch.to_json()) | {"v": SCHEMA_VERSION}

    @app.get("/", response_class=HTMLResponse)
    def index():
        page = os.path.join(os.path.dirname(__file__), "static", "index.html")
        if os.path.exists(page):
            with open(page) as fh:
                return fh.read()
        return "<html><body>entdetect session service</body></html>"

    return app
