"""Multiplayer session service: lobby, action submission, ordered event
stream, and write-ahead log persistence over a small HTTP API.

Within a session every mutation runs under one lock (single writer); reads
serialize a snapshot. Accepted events are appended to the on-disk log before
they are broadcast, so a crash-restart replays to the last acknowledged
state. Event streams are server-sent events with gap-free sequence numbers,
resumable via ``?after=`` or ``Last-Event-ID``.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
import time
from pathlib import Path
from typing import Any, Iterator, Optional

from fastapi import Body, FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse

from . import engine, logio, outcomes, risk
from .canon import canonical_dumps
from .config import GameConfig
from .errors import ConfigError, RuleViolation, SchemaError
from .models import Action, GameState

log = logging.getLogger("woodlot.service")

SESSION_FORMAT = "woodlot-session/1"
EVENT_POLL_SECONDS = 0.5
STREAM_HEARTBEAT_SECONDS = 15.0


class Session:
    """One hosted game: seats, authoritative state, event buffer, WAL."""

    def __init__(self, session_id: str, config: GameConfig, data_dir: Path):
        self.id = session_id
        self.config = config
        self.data_dir = data_dir
        self.status = "lobby"
        self.seats: list[dict[str, Any]] = []  # {"seat", "name", "token"}
        self.state: Optional[GameState] = None
        self.report_doc: Optional[dict[str, Any]] = None
        self.events: list[dict[str, Any]] = []  # {"seq", "kind", ...}
        self.lock = threading.RLock()
        self.changed = threading.Condition(self.lock)
        self._log_handle = None
        self._flushed_events = 0

    # -- paths

    @property
    def log_path(self) -> Path:
        return self.data_dir / f"{self.id}.log"

    @property
    def meta_path(self) -> Path:
        return self.data_dir / f"{self.id}.session.json"

    @property
    def report_path(self) -> Path:
        return self.data_dir / f"{self.id}.report.json"

    # -- persistence

    def save_meta(self) -> None:
        doc = {
            "format": SESSION_FORMAT,
            "id": self.id,
            "status": self.status,
            "config": self.config.to_doc(),
            "seats": self.seats,
        }
        self.meta_path.write_text(canonical_dumps(doc), encoding="utf-8")

    def _broadcast(self, kind: str, payload: dict[str, Any]) -> None:
        with self.changed:  # reentrant: callers may already hold the lock
            event = {"seq": len(self.events) + 1, "kind": kind, **payload}
            self.events.append(event)
            self.changed.notify_all()

    def _flush_log_events(self) -> None:
        """Write-ahead: persist newly appended log events, then broadcast."""
        assert self.state is not None
        fresh = self.state.log.events[self._flushed_events :]
        for event in fresh:
            logio.append_event(self._log_handle, event)
        self._flushed_events = len(self.state.log.events)
        for event in fresh:
            self._broadcast("log", {"event": event})

    # -- lifecycle

    def join(self, name: str) -> dict[str, Any]:
        with self.lock:
            if self.status != "lobby":
                raise RuleViolation("seats_full", "game already started")
            seat = len(self.seats)
            token = secrets.token_hex(16)
            self.seats.append({"seat": seat, "name": name, "token": token})
            self.save_meta()
            self._broadcast("joined", {"seat": seat, "name": name})
            if len(self.seats) == self.config.players:
                self._start()
            return {"seat": seat, "token": token}

    def _start(self) -> None:
        names = tuple(s["name"] for s in self.seats)
        self.config = GameConfig.from_doc({**self.config.to_doc(), "player_names": list(names)})
        self.state = engine.new_game(self.config)
        self._log_handle = logio.open_log_writer(self.log_path, self.state.log)
        self._flushed_events = 0
        self.status = "active"
        self.save_meta()
        self._broadcast("started", {"players": self.config.players})

    def resolve_seat(self, token: str) -> int:
        for entry in self.seats:
            if secrets.compare_digest(entry["token"], token):
                return entry["seat"]
        raise RuleViolation("bad_token", "no seat matches this token")

    def submit(self, seat: int, action_doc: dict[str, Any]) -> dict[str, Any]:
        with self.lock:
            if self.status != "active" or self.state is None:
                raise RuleViolation("not_active", f"session is {self.status}")
            try:
                action = Action.from_doc({**action_doc, "actor": seat})
            except Exception as exc:
                raise RuleViolation("malformed_action", str(exc)) from exc
            engine.apply_action(self.state, action)
            self._flush_log_events()
            self._auto_advance()
            return {"accepted": True, "event_count": len(self.state.log.events)}

    def _auto_advance(self) -> None:
        """Advance through completed phases (risk draws included) until the
        game waits on a player again or finishes."""
        assert self.state is not None
        while not self.state.finished and engine.phase_complete(self.state):
            engine.advance_phase(self.state)
            self._flush_log_events()
        if self.state.finished:
            self._finish()

    def _finish(self) -> None:
        assert self.state is not None
        report = outcomes.build_report(self.state.log, state=self.state)
        self.report_doc = report.to_doc()
        self.report_path.write_text(canonical_dumps(self.report_doc), encoding="utf-8")
        self.status = "finished"
        self.save_meta()
        if self._log_handle is not None:
            self._log_handle.close()
            self._log_handle = None
        self._broadcast("finished", {"report_available": True})

    # -- views

    def state_view(self, seat: Optional[int]) -> dict[str, Any]:
        with self.lock:
            view: dict[str, Any] = {
                "id": self.id,
                "status": self.status,
                "seats": [{"seat": s["seat"], "name": s["name"]} for s in self.seats],
                "players_expected": self.config.players,
                "event_seq": len(self.events),
            }
            if self.state is not None:
                view["state"] = engine.public_view(self.state, seat)
            return view

    def events_since(self, after: int) -> list[dict[str, Any]]:
        with self.lock:
            return list(self.events[after:])

    # -- restart recovery

    @classmethod
    def load(cls, meta_path: Path, data_dir: Path) -> "Session":
        doc = json.loads(meta_path.read_text(encoding="utf-8"))
        if doc.get("format") != SESSION_FORMAT:
            raise SchemaError(f"unsupported session format {doc.get('format')!r}")
        session = cls(doc["id"], GameConfig.from_doc(doc["config"]), data_dir)
        session.status = doc["status"]
        session.seats = list(doc["seats"])
        for entry in session.seats:
            session._broadcast("joined", {"seat": entry["seat"], "name": entry["name"]})
        if session.status in ("active", "finished") and session.log_path.exists():
            game_log = logio.read_log(session.log_path)
            session.state = engine.replay(game_log)
            session._broadcast("started", {"players": session.config.players})
            for event in session.state.log.events:
                session._broadcast("log", {"event": event})
            session._flushed_events = len(session.state.log.events)
        if session.status == "active" and session.state is not None:
            session._log_handle = logio.open_log_writer(session.log_path, session.state.log)
            # A crash can land between an accepted action and the phase
            # advance it completed; resume the pending transition.
            session._auto_advance()
        if session.status == "finished":
            if session.report_path.exists():
                session.report_doc = json.loads(session.report_path.read_text(encoding="utf-8"))
            elif session.state is not None:
                report = outcomes.build_report(session.state.log, state=session.state)
                session.report_doc = report.to_doc()
            session._broadcast("finished", {"report_available": True})
        return session


def _sse_chunk(event: dict[str, Any]) -> str:
    return f"id: {event['seq']}\ndata: {canonical_dumps(event)}\n\n"


def create_app(
    data_dir: str | Path, preload: bool = True, ui_dir: str | Path | None = None
) -> FastAPI:
    """Build the service app; sessions persist under ``data_dir`` and are
    reloaded from disk on startup. ``ui_dir`` mounts a built web client at
    ``/app`` (expects ``index.html``, ``style.css``, and ``dist/``)."""
    data_path = Path(data_dir)
    data_path.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="woodlot session service")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=Path(ui_dir), html=True), name="ui")

    if preload:
        for meta_path in sorted(data_path.glob("*.session.json")):
            try:
                session = Session.load(meta_path, data_path)
                sessions[session.id] = session
            except Exception:  # a corrupt session must not block the service
                log.exception("could not reload session from %s", meta_path)

    def get_session(game_id: str) -> Session:
        session = sessions.get(game_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def rule_error(exc: RuleViolation) -> HTTPException:
        return HTTPException(status_code=409, detail={"reason": exc.reason, "message": str(exc)})

    @app.post("/games")
    def create_game(body: dict[str, Any] = Body(default={})) -> dict[str, Any]:
        try:
            config = GameConfig.from_doc(body.get("config", {}))
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session_id = secrets.token_hex(8)
        session = Session(session_id, config, data_path)
        session.save_meta()
        sessions[session_id] = session
        return {"id": session_id, "players_expected": config.players}

    @app.post("/games/{game_id}/join")
    def join_game(game_id: str, body: dict[str, Any] = Body(default={})) -> dict[str, Any]:
        session = get_session(game_id)
        name = str(body.get("name") or f"Player {len(session.seats) + 1}")
        try:
            return session.join(name)
        except RuleViolation as exc:
            raise rule_error(exc) from exc

    @app.get("/games/{game_id}/state")
    def get_state(game_id: str, token: Optional[str] = Query(default=None)) -> dict[str, Any]:
        session = get_session(game_id)
        seat: Optional[int] = None
        if token is not None:
            try:
                seat = session.resolve_seat(token)
            except RuleViolation as exc:
                raise rule_error(exc) from exc
        return session.state_view(seat)

    @app.post("/games/{game_id}/actions")
    def post_action(game_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        session = get_session(game_id)
        token = body.get("token")
        if not token:
            raise HTTPException(status_code=401, detail="token required")
        try:
            seat = session.resolve_seat(str(token))
            return session.submit(seat, body.get("action") or {})
        except RuleViolation as exc:
            raise rule_error(exc) from exc

    @app.get("/games/{game_id}/report")
    def get_report(game_id: str) -> dict[str, Any]:
        session = get_session(game_id)
        with session.lock:
            if session.report_doc is None:
                raise HTTPException(status_code=409, detail="game not finished")
            return session.report_doc

    @app.get("/games/{game_id}/events")
    def stream_events(
        game_id: str,
        request: Request,
        after: int = Query(default=0, ge=0),
        wait: float = Query(default=STREAM_HEARTBEAT_SECONDS, ge=0),
    ) -> StreamingResponse:
        session = get_session(game_id)
        last_id = request.headers.get("last-event-id")
        start = int(last_id) if last_id and last_id.isdigit() else after

        def generate() -> Iterator[str]:
            cursor = start
            deadline = time.monotonic() + wait
            while True:
                batch = session.events_since(cursor)
                for event in batch:
                    cursor = event["seq"]
                    yield _sse_chunk(event)
                if batch:
                    deadline = time.monotonic() + wait
                    continue
                if time.monotonic() >= deadline:
                    if wait == 0:
                        return
                    yield ": heartbeat\n\n"
                    deadline = time.monotonic() + wait
                    continue
                with session.changed:
                    session.changed.wait(EVENT_POLL_SECONDS)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/meta/cards")
    def get_card_texts() -> dict[str, Any]:
        return risk.card_texts()

    return app
