"""Glue between the session engine, the sensor source, and the CSV log.

The recorder owns exactly one session: it steps the engine, pulls one
physiological frame per timestep from the configured source, and appends
everything to the log in timestamp order.  Frames flow from the first
tick after session_start until the step on which the session finishes.
"""

from __future__ import annotations

from pathlib import Path
from typing import TextIO

from .config import ExperimentConfig, SensorSource
from .scoring import SessionSummary, render_summary, summarize
from .session import ClockRegression, InputEvent, Mode, Session, start_session
from .tasks import TIMESTEP_MS
from .telemetry import (
    EventRecord,
    LogWriter,
    ReplaySensorSource,
    Record,
    SensorFrame,
    SensorSimulator,
    read_log,
    split_log,
)


def open_sensor_source(config: ExperimentConfig):
    kind = config.sensor_source.kind
    if kind == SensorSource.NONE:
        return None
    if kind == SensorSource.SIMULATED:
        return SensorSimulator(config.rng_seed)
    frames = [r for r in read_log(Path(config.sensor_source.path).read_text())
              if isinstance(r, SensorFrame)]
    return ReplaySensorSource(frames)


class SessionRecorder:
    """One session plus its telemetry, advanced step by step."""

    def __init__(self, config: ExperimentConfig, stream: TextIO | None = None):
        self.engine: Session = start_session(config)
        self.records: list[Record] = []
        self._writer = LogWriter(stream) if stream is not None else None
        self._sensors = open_sensor_source(config)
        for record in self.engine.event_log:
            self._record(record)

    def _record(self, record: Record) -> None:
        self.records.append(record)
        if self._writer is not None:
            self._writer.append(record)

    @property
    def finished(self) -> bool:
        return self.engine.finished

    @property
    def clock_ms(self) -> int:
        return self.engine.clock_ms

    def advance(self, now_ms: float) -> list[EventRecord]:
        """Advance the fixed-timestep loop to now_ms, logging as we go."""
        emitted: list[EventRecord] = []
        if now_ms < self.engine.clock_ms:
            raise ClockRegression(f"advance to {now_ms} behind clock {self.engine.clock_ms}")
        if self.engine.mode is Mode.IDLE:
            # the first tick leaves idle even before a full step has elapsed
            leave_events = self.engine.tick(self.engine.clock_ms)
            emitted.extend(leave_events)
            for record in leave_events:
                self._record(record)
        while not self.engine.finished and self.engine.clock_ms + TIMESTEP_MS <= now_ms:
            step_events = self.engine.tick(self.engine.clock_ms + TIMESTEP_MS)
            emitted.extend(step_events)
            for record in step_events:
                self._record(record)
            if self._sensors is not None and not self.engine.finished:
                frame = self._sensors.sample(self.engine.clock_ms, self.engine.sensor_level)
                if frame is not None:
                    self._record(frame)
        return emitted

    def handle_input(self, ev: InputEvent) -> list[EventRecord]:
        emitted = self.engine.handle_input(ev)
        for record in emitted:
            self._record(record)
        return emitted

    def build_summary(self) -> SessionSummary:
        events, frames = split_log(self.records)
        return summarize(events, frames, self.engine.responses)

    def summary_text(self) -> str:
        return render_summary(self.build_summary())
