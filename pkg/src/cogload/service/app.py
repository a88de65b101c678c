"""HTTP and realtime front door for live sessions.

Lifecycle: POST /sessions creates an engine; the session clock arms when
the first stream subscriber connects.  Inputs arrive as client-stamped
events plus the negotiated clock offset; the server converts them to the
session clock and rejects stamps that drift more than 250 ms from its
own receive time.  Exports are available once the session is finished.
"""

from __future__ import annotations

import asyncio
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect

from ..config import ConfigError, parse_config
from ..session import EmptyEntry, IllegalInMode
from .registry import (
    MAX_CLOCK_DEVIATION_MS,
    ExportNotReady,
    Registry,
    SessionNotFound,
    SessionNotStarted,
    SessionRuntime,
    host_now_ms,
)
from .schemas import (
    EventAck,
    EventBody,
    SessionCreateRequest,
    SessionCreated,
    TimeReply,
    TimeRequest,
    ViewReply,
)


def create_app(data_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="cogload service")
    registry = Registry(data_dir)
    app.state.registry = registry

    def lookup(session_id: str) -> SessionRuntime:
        try:
            return registry.get(session_id)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail="no such session") from None

    @app.post("/sessions", response_model=SessionCreated, status_code=201)
    async def create_session(body: SessionCreateRequest) -> SessionCreated:
        try:
            config = parse_config(body.config_text)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        runtime = registry.create(config, body.time_scale)
        return SessionCreated(id=runtime.id)

    @app.post("/time", response_model=TimeReply)
    async def time_probe(body: TimeRequest) -> TimeReply:
        t1 = host_now_ms()
        return TimeReply(t0_ms=body.t0_ms, t1_ms=t1, t2_ms=host_now_ms())

    @app.get("/sessions/{session_id}/view", response_model=ViewReply)
    async def session_view(session_id: str) -> ViewReply:
        runtime = lookup(session_id)
        async with runtime.lock:
            if runtime.started and not runtime.recorder.finished:
                runtime.recorder.advance(runtime.to_session_ms(host_now_ms()))
            return ViewReply(**asdict(runtime.recorder.engine.current_view()))

    @app.post("/sessions/{session_id}/events", response_model=EventAck)
    async def post_event(session_id: str, body: EventBody) -> EventAck:
        runtime = lookup(session_id)
        if not runtime.started:
            raise HTTPException(status_code=409, detail="session not started")
        host_at = body.client_at_ms + body.offset_ms
        if abs(host_at - host_now_ms()) > MAX_CLOCK_DEVIATION_MS:
            raise HTTPException(status_code=409, detail="clock drift beyond limit")
        session_at = runtime.to_session_ms(host_at)
        if body.idempotency_key is not None:
            if body.idempotency_key in runtime.seen_keys:
                return EventAck(accepted=True, duplicate=True,
                                session_ms=session_at, emitted=[])
            runtime.seen_keys.add(body.idempotency_key)
        try:
            ev = body.to_input(session_at)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        try:
            emitted = await runtime.apply_event(session_at, ev)
        except (IllegalInMode, EmptyEntry) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return EventAck(accepted=True, session_ms=session_at,
                        emitted=[r.name for r in emitted])

    @app.get("/sessions/{session_id}/export/events.csv")
    async def export_events(session_id: str) -> Response:
        runtime = lookup(session_id)
        try:
            text = runtime.export_csv()
        except ExportNotReady:
            raise HTTPException(status_code=409, detail="session not finished") from None
        return Response(content=text, media_type="text/csv")

    @app.get("/sessions/{session_id}/export/summary.txt")
    async def export_summary(session_id: str) -> Response:
        runtime = lookup(session_id)
        try:
            text = runtime.export_summary()
        except ExportNotReady:
            raise HTTPException(status_code=409, detail="session not finished") from None
        return Response(content=text, media_type="text/plain; charset=utf-8")

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str) -> None:
        try:
            runtime = registry.get(session_id)
        except SessionNotFound:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        async with runtime.lock:
            runtime.ensure_started()
            client = runtime.subscribe()
        receiver = asyncio.create_task(websocket.receive())
        try:
            done_sending = False
            while not done_sending:
                waker = asyncio.create_task(client.wake.wait())
                done, _ = await asyncio.wait({waker, receiver},
                                             return_when=asyncio.FIRST_COMPLETED)
                if receiver in done:   # client spoke or went away; channel is one-way
                    message = receiver.result()
                    if message.get("type") == "websocket.disconnect":
                        waker.cancel()
                        break
                    receiver = asyncio.create_task(websocket.receive())
                if waker not in done:
                    waker.cancel()
                    continue
                client.wake.clear()
                while client.commands:
                    command = client.commands.popleft()
                    await websocket.send_json(command)
                    if command.get("type") == "finished":
                        done_sending = True
                if client.snapshot is not None:
                    snapshot, client.snapshot = client.snapshot, None
                    await websocket.send_json(snapshot)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            receiver.cancel()
            runtime.unsubscribe(client)

    return app


__all__ = ["create_app", "SessionNotStarted"]
