"""Tutor console service: JSON-over-HTTP session API with live stage events.

Workflow: a tutor submits a student's buggy code, enters preliminary
guidance, watches the conversational repair stages stream in, then approves
a reply. Events carry sequence numbers so reconnecting clients replay
gap-free from any cursor.
"""

from __future__ import annotations

import difflib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .corpus import Submission
from .llm import SamplingParams
from .strategies import StrategyRunner

__all__ = ["create_app", "SessionHub"]


class CreateSessionBody(BaseModel):
    problem_id: str
    incorrect_code: str


class GuidanceBody(BaseModel):
    guidance: str


class ApproveBody(BaseModel):
    reply: str


@dataclass
class SessionEvent:
    seq: int
    kind: str  # StageStarted | StageValidated | ExtractionFailed | Finished
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload}


@dataclass
class LiveSession:
    id: str
    problem_id: str
    incorrect_code: str
    state: str = "AwaitingGuidance"  # AwaitingGuidance | Running | Succeeded | Failed | Approved
    running_stage: int | None = None
    succeeded_stage: int | None = None
    guidance: str | None = None
    attempt: dict | None = None
    reply_draft: str | None = None
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)
    events: list[SessionEvent] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    done: threading.Event = field(default_factory=threading.Event, repr=False)


class SessionHub:
    """Owns live sessions; one repair run per session, serialized per-session."""

    def __init__(self, corpus, sandbox, registry, provider_id: str,
                 params: SamplingParams | None = None, store_dir: str | Path | None = None,
                 max_concurrent_runs: int = 2):
        self.corpus = corpus
        self.sandbox = sandbox
        self.registry = registry
        self.provider_id = provider_id
        self.params = params or SamplingParams()
        self.store_dir = Path(store_dir) if store_dir else None
        self.sessions: dict[str, LiveSession] = {}
        self._run_gate = threading.BoundedSemaphore(max_concurrent_runs)

    def create(self, problem_id: str, incorrect_code: str) -> LiveSession:
        try:
            self.corpus.problem(problem_id)
        except KeyError:
            raise HTTPException(404, f"unknown problem {problem_id!r}")
        if not incorrect_code.strip():
            raise HTTPException(422, "incorrect_code must be non-empty")
        session = LiveSession(
            id=uuid.uuid4().hex[:12], problem_id=problem_id, incorrect_code=incorrect_code
        )
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> LiveSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return session

    def _push(self, session: LiveSession, kind: str, payload: dict) -> None:
        with session.lock:
            session.events.append(SessionEvent(len(session.events) + 1, kind, payload))
            session.updated_at = time.time()

    def submit_guidance(self, session_id: str, guidance: str) -> LiveSession:
        session = self.get(session_id)
        with session.lock:
            if session.state != "AwaitingGuidance":
                raise HTTPException(409, f"session is {session.state}, not AwaitingGuidance")
            if not guidance.strip():
                raise HTTPException(422, "guidance must be non-empty")
            session.guidance = guidance
            session.state = "Running"
            session.running_stage = 1
            session.updated_at = time.time()
        threading.Thread(target=self._run_repair, args=(session,), daemon=True).start()
        return session

    def _run_repair(self, session: LiveSession) -> None:
        def listener(kind, stage_index, payload):
            if kind == "StageStarted":
                with session.lock:
                    session.running_stage = stage_index
            self._push(session, kind, {"stage": stage_index, **payload})

        runner = StrategyRunner(self.corpus, self.sandbox, self.registry, stage_listener=listener)
        submission = Submission(
            id=f"console-{session.problem_id}",
            problem_id=session.problem_id,
            student_id="console",
            incorrect_code=session.incorrect_code,
            tutor_guidance=session.guidance,
            corrected_code="",
        )
        with self._run_gate:
            try:
                attempt = runner.run_cref(submission, self.provider_id, self.params, trial=1)
            except Exception as e:
                with session.lock:
                    session.state = "Failed"
                    session.running_stage = None
                self._push(session, "Finished", {"success": False, "error": str(e)})
                session.done.set()
                return
        with session.lock:
            session.attempt = attempt.to_dict()
            session.succeeded_stage = attempt.succeeded_stage
            session.state = "Succeeded" if attempt.success else "Failed"
            session.running_stage = None
        self._push(
            session,
            "Finished",
            {"success": attempt.success, "succeeded_stage": attempt.succeeded_stage},
        )
        if self.store_dir is not None:
            self.store_dir.mkdir(parents=True, exist_ok=True)
            (self.store_dir / f"{session.id}.json").write_text(
                json.dumps(self.view(session.id), indent=2, sort_keys=True)
            )
        session.done.set()

    def approve(self, session_id: str, reply: str) -> LiveSession:
        session = self.get(session_id)
        with session.lock:
            if session.state not in ("Succeeded", "Failed"):
                raise HTTPException(409, f"session is {session.state}, cannot approve")
            if not reply.strip():
                raise HTTPException(422, "reply must be non-empty")
            session.reply_draft = reply
            session.state = "Approved"
            session.updated_at = time.time()
        if self.store_dir is not None:
            self.store_dir.mkdir(parents=True, exist_ok=True)
            (self.store_dir / f"{session.id}.json").write_text(
                json.dumps(self.view(session_id), indent=2, sort_keys=True)
            )
        return session

    def repaired_code(self, session: LiveSession) -> str | None:
        if not session.attempt:
            return None
        code = None
        for stage in session.attempt["stages"]:
            if stage["extracted_code"] is not None:
                code = stage["extracted_code"]
        return code

    def view(self, session_id: str) -> dict:
        session = self.get(session_id)
        with session.lock:
            repaired = self.repaired_code(session)
            diff = None
            if repaired is not None:
                diff = "".join(
                    difflib.unified_diff(
                        session.incorrect_code.splitlines(keepends=True),
                        repaired.splitlines(keepends=True),
                        fromfile="incorrect.cpp",
                        tofile="repaired.cpp",
                    )
                )
            verdicts = None
            attempt = session.attempt
            if attempt and attempt["stages"]:
                last_run = None
                for stage in attempt["stages"]:
                    if stage["run_report"] is not None:
                        last_run = stage["run_report"]
                if last_run is not None:
                    verdicts = [
                        {"test_index": t["test_index"], "verdict": t["verdict"]}
                        for t in last_run["per_test"]
                    ]
            return {
                "id": session.id,
                "problem_id": session.problem_id,
                "incorrect_code": session.incorrect_code,
                "state": session.state,
                "running_stage": session.running_stage,
                "succeeded_stage": session.succeeded_stage,
                "guidance": session.guidance,
                "attempt": attempt,
                "repaired_code": repaired,
                "diff": diff,
                "test_verdicts": verdicts,
                "reply_draft": session.reply_draft,
                "created_at": session.created_at,
                "updated_at": session.updated_at,
                "event_count": len(session.events),
            }

    def events_since(self, session_id: str, from_seq: int) -> list[dict]:
        session = self.get(session_id)
        with session.lock:
            return [e.to_dict() for e in session.events if e.seq >= from_seq]


def create_app(hub: SessionHub, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="repairbench tutor console")
    app.state.hub = hub

    @app.get("/problems")
    def list_problems():
        return [
            {
                "id": p.id,
                "title": p.title,
                "tier": p.tier,
                "category": p.category,
                "time_limit_ms": p.time_limit_ms,
                "memory_limit_kb": p.memory_limit_kb,
            }
            for p in hub.corpus.problems
        ]

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = hub.create(body.problem_id, body.incorrect_code)
        return hub.view(session.id)

    @app.post("/sessions/{session_id}/guidance")
    def submit_guidance(session_id: str, body: GuidanceBody):
        hub.submit_guidance(session_id, body.guidance)
        return hub.view(session_id)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return hub.view(session_id)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, from_seq: int = 1, stream: bool = False,
                   timeout_s: float = 30.0):
        """Event feed. Default: JSON snapshot (polling fallback). With
        stream=true: server-sent events until the session finishes."""
        hub.get(session_id)
        if not stream:
            return hub.events_since(session_id, from_seq)

        def sse():
            cursor = from_seq
            session = hub.get(session_id)
            deadline = time.time() + timeout_s
            while True:
                batch = hub.events_since(session_id, cursor)
                for event in batch:
                    cursor = event["seq"] + 1
                    yield f"id: {event['seq']}\ndata: {json.dumps(event)}\n\n"
                    if event["kind"] == "Finished":
                        return
                if time.time() > deadline:
                    return
                session.done.wait(0.05)

        return StreamingResponse(sse(), media_type="text/event-stream")

    @app.post("/sessions/{session_id}/approve")
    def approve(session_id: str, body: ApproveBody):
        hub.approve(session_id, body.reply)
        return hub.view(session_id)

    @app.exception_handler(HTTPException)
    async def error_body(request, exc: HTTPException):
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=exc.status_code,
            content={"code": exc.status_code, "message": str(exc.detail)},
        )

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
