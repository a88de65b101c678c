"""In-memory session registry and the per-session tick loop.

One SessionRuntime owns one engine behind an asyncio lock; all mutation
(ticker steps and posted inputs) is serialized through it.  Stream
subscribers get droppable state snapshots (latest wins) plus a reliable
command queue for messages that must not be lost (beep commands, the
finished notice).
"""

from __future__ import annotations

import asyncio
import time
import uuid
from collections import deque
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..config import ExperimentConfig
from ..runner import SessionRecorder
from ..session import InputEvent
from ..telemetry import EventRecord, write_log

TICK_INTERVAL_S = 0.02
SNAPSHOT_INTERVAL_MS = 50.0          # 20 Hz push rate
MAX_CLOCK_DEVIATION_MS = 250.0


class SessionNotFound(Exception):
    pass


class ExportNotReady(Exception):
    pass


class SessionNotStarted(Exception):
    pass


class ClockDrift(Exception):
    pass


def host_now_ms() -> float:
    return time.monotonic() * 1000.0


@dataclass(eq=False)      # identity semantics: one object per subscriber
class StreamClient:
    commands: deque = field(default_factory=deque)
    wake: asyncio.Event = field(default_factory=asyncio.Event)
    snapshot: dict | None = None


class SessionRuntime:
    """One live session: engine, subscribers, and its host-clock mapping."""

    def __init__(self, config: ExperimentConfig, time_scale: float = 1.0,
                 data_dir: Path | None = None):
        self.id = uuid.uuid4().hex[:12]
        self.recorder = SessionRecorder(config)
        self.time_scale = time_scale
        self.data_dir = data_dir
        self.lock = asyncio.Lock()
        self.epoch_host_ms: float | None = None
        self.clients: set[StreamClient] = set()
        self.seen_keys: set[str] = set()
        self.started_at = datetime.now(timezone.utc)
        self._ticker: asyncio.Task | None = None
        self._last_snapshot_host_ms = 0.0
        self._finished_announced = False

    # -- clock mapping -----------------------------------------------------

    @property
    def started(self) -> bool:
        return self.epoch_host_ms is not None

    def to_session_ms(self, host_ms: float) -> float:
        if self.epoch_host_ms is None:
            raise SessionNotStarted(self.id)
        return max(0.0, (host_ms - self.epoch_host_ms) * self.time_scale)

    def ensure_started(self) -> None:
        """Arm the session clock and the tick loop on first subscription."""
        if self.epoch_host_ms is None:
            self.epoch_host_ms = host_now_ms()
            self._ticker = asyncio.get_running_loop().create_task(self._run())

    # -- streaming ---------------------------------------------------------

    def subscribe(self) -> StreamClient:
        client = StreamClient()
        self.clients.add(client)
        client.snapshot = self.snapshot_message()
        client.wake.set()
        return client

    def unsubscribe(self, client: StreamClient) -> None:
        self.clients.discard(client)

    def snapshot_message(self) -> dict:
        view = self.recorder.engine.current_view()
        return {"type": "snapshot", "session_ms": self.recorder.clock_ms,
                "view": asdict(view)}

    def _broadcast(self, events: list[EventRecord]) -> None:
        commands = []
        for record in events:
            if record.name == "beep_onset":
                commands.append({"type": "beep",
                                 "onset_ms": int(record.get("onset_ms")),
                                 "index": int(record.get("index"))})
        if self.recorder.finished and not self._finished_announced:
            self._finished_announced = True
            commands.append({"type": "finished",
                             "session_ms": self.recorder.clock_ms})
        now = host_now_ms()
        push_snapshot = (now - self._last_snapshot_host_ms >= SNAPSHOT_INTERVAL_MS
                         or self.recorder.finished)
        if push_snapshot:
            self._last_snapshot_host_ms = now
            snapshot = self.snapshot_message()
        for client in self.clients:
            client.commands.extend(commands)
            if push_snapshot:
                client.snapshot = snapshot
            if commands or push_snapshot:
                client.wake.set()

    # -- lifecycle ---------------------------------------------------------

    async def _run(self) -> None:
        while not self.recorder.finished:
            await asyncio.sleep(TICK_INTERVAL_S)
            async with self.lock:
                emitted = self.recorder.advance(self.to_session_ms(host_now_ms()))
                self._broadcast(emitted)
        if self.data_dir is not None:
            self.write_artifacts(self.data_dir)

    async def apply_event(self, at_session_ms: float, ev: InputEvent
                          ) -> list[EventRecord]:
        """Advance to the event's converted time, then apply it.

        Returns only the events the input itself produced; catch-up tick
        events still reach stream subscribers.
        """
        async with self.lock:
            caught_up: list[EventRecord] = []
            if at_session_ms > self.recorder.clock_ms:
                caught_up = self.recorder.advance(at_session_ms)
            emitted = self.recorder.handle_input(ev)
            self._broadcast(caught_up + emitted)
            return emitted

    def export_csv(self) -> str:
        if not self.recorder.finished:
            raise ExportNotReady(self.id)
        return write_log(self.recorder.records)

    def export_summary(self) -> str:
        if not self.recorder.finished:
            raise ExportNotReady(self.id)
        return self.recorder.summary_text()

    def artifact_stem(self) -> str:
        config = self.recorder.engine.config
        stamp = self.started_at.strftime("%Y%m%dT%H%M%SZ")
        return f"{config.user_id}_{config.scene.value}_{stamp}"

    def write_artifacts(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = self.artifact_stem()
        (out_dir / f"{stem}.csv").write_text(self.export_csv(), encoding="utf-8")
        (out_dir / f"{stem}.txt").write_text(self.export_summary(), encoding="utf-8")


class Registry:
    def __init__(self, data_dir: Path | None = None):
        self.sessions: dict[str, SessionRuntime] = {}
        self.data_dir = data_dir

    def create(self, config: ExperimentConfig, time_scale: float) -> SessionRuntime:
        runtime = SessionRuntime(config, time_scale, self.data_dir)
        self.sessions[runtime.id] = runtime
        return runtime

    def get(self, session_id: str) -> SessionRuntime:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFound(session_id) from None
