"""Session log: one CSV holding both events and physiological frames.

Schema (UTF-8, LF, RFC-4180 quoting), one header row then one row per
record.  Event rows fill the first four columns and leave the sensor
columns empty; sensor rows do the opposite (record_type plus 13 channels):

    timestamp_ms,record_type,event_name,payload,heart_rate_bpm,pupil_l_mm,
    pupil_r_mm,gaze_x,gaze_y,gaze_z,accel_x,accel_y,accel_z,gyro_x,gyro_y,
    gyro_z,cognitive_load

The payload cell is a semicolon-joined list of key=value pairs.  Channel
values are written with fixed precision (see _CHANNEL_PRECISION); sources
quantize at frame creation, which makes write->read lossless.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from enum import IntEnum
from typing import Iterable, TextIO, Union

import numpy as np

from .rng import STREAM_SENSORS, stream_rng

EVENT_NAMES = frozenset({
    "session_start", "phase_start", "phase_end",
    "task_start", "task_success", "task_failure",
    "beep_onset", "beep_hit", "beep_miss", "false_alarm",
    "excursion", "tlx_submitted", "paas_submitted", "session_end",
})

HEADER = (
    "timestamp_ms", "record_type", "event_name", "payload",
    "heart_rate_bpm", "pupil_l_mm", "pupil_r_mm",
    "gaze_x", "gaze_y", "gaze_z",
    "accel_x", "accel_y", "accel_z",
    "gyro_x", "gyro_y", "gyro_z",
    "cognitive_load",
)

SENSOR_RATE_HZ = 50
FRAME_INTERVAL_MS = 1000 // SENSOR_RATE_HZ


class TimestampRegression(Exception):
    pass


class IoFailure(Exception):
    pass


class SchemaViolation(Exception):
    def __init__(self, line: int, detail: str):
        self.line = line
        super().__init__(f"line {line}: {detail}")


@dataclass(frozen=True)
class EventRecord:
    timestamp_ms: int
    name: str
    payload: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.name not in EVENT_NAMES:
            raise ValueError(f"unknown event name {self.name!r}")
        for key, value in self.payload:
            if "=" in key or ";" in key or ";" in value or "\n" in value:
                raise ValueError(f"illegal payload pair {key!r}={value!r}")

    def get(self, key: str) -> str | None:
        for k, v in self.payload:
            if k == key:
                return v
        return None


def event(timestamp_ms: int, name: str, **payload: object) -> EventRecord:
    return EventRecord(timestamp_ms, name,
                       tuple((k, str(v)) for k, v in payload.items()))


# channel -> decimal places written to the CSV
_CHANNEL_PRECISION = {
    "heart_rate_bpm": 1,
    "pupil_l_mm": 2, "pupil_r_mm": 2,
    "gaze_x": 4, "gaze_y": 4, "gaze_z": 4,
    "accel_x": 3, "accel_y": 3, "accel_z": 3,
    "gyro_x": 4, "gyro_y": 4, "gyro_z": 4,
    "cognitive_load": 3,
}


def quantize(value: float, decimals: int) -> float:
    """Round to the written precision; format->parse stable by construction."""
    return float(f"{value:.{decimals}f}")


@dataclass(frozen=True)
class SensorFrame:
    timestamp_ms: int
    heart_rate_bpm: float
    pupil_l_mm: float
    pupil_r_mm: float
    gaze_x: float
    gaze_y: float
    gaze_z: float
    accel_x: float
    accel_y: float
    accel_z: float
    gyro_x: float
    gyro_y: float
    gyro_z: float
    cognitive_load: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.cognitive_load <= 1.0:
            raise ValueError(f"cognitive_load out of [0,1]: {self.cognitive_load}")
        if self.heart_rate_bpm <= 0 or self.pupil_l_mm <= 0 or self.pupil_r_mm <= 0:
            raise ValueError("heart rate and pupil diameters must be positive")
        norm = math.sqrt(self.gaze_x**2 + self.gaze_y**2 + self.gaze_z**2)
        if not 0.99 <= norm <= 1.01:
            raise ValueError(f"gaze vector norm {norm} outside [0.99, 1.01]")


_SENSOR_FIELDS = [f.name for f in fields(SensorFrame) if f.name != "timestamp_ms"]

Record = Union[EventRecord, SensorFrame]


def _encode_payload(payload: tuple[tuple[str, str], ...]) -> str:
    return ";".join(f"{k}={v}" for k, v in payload)


def _decode_payload(cell: str) -> tuple[tuple[str, str], ...]:
    if not cell:
        return ()
    pairs = []
    for item in cell.split(";"):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"payload item without '=': {item!r}")
        pairs.append((key, value))
    return tuple(pairs)


def _event_row(record: EventRecord) -> list[str]:
    return [str(record.timestamp_ms), "event", record.name,
            _encode_payload(record.payload)] + [""] * len(_SENSOR_FIELDS)


def _sensor_row(frame: SensorFrame) -> list[str]:
    row = [str(frame.timestamp_ms), "sensor", "", ""]
    for name in _SENSOR_FIELDS:
        row.append(f"{getattr(frame, name):.{_CHANNEL_PRECISION[name]}f}")
    return row


_FLUSH_EVENTS = frozenset({"phase_start", "phase_end", "session_end"})


class LogWriter:
    """Appends records to one session's CSV stream, enforcing time order."""

    def __init__(self, stream: TextIO):
        self._stream = stream
        self._csv = csv.writer(stream, lineterminator="\n")
        self._last_ms: int | None = None
        try:
            self._csv.writerow(HEADER)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    def append(self, record: Record) -> None:
        if self._last_ms is not None and record.timestamp_ms < self._last_ms:
            raise TimestampRegression(
                f"{record.timestamp_ms} after {self._last_ms}")
        self._last_ms = record.timestamp_ms
        try:
            if isinstance(record, EventRecord):
                self._csv.writerow(_event_row(record))
                if record.name in _FLUSH_EVENTS:
                    self._stream.flush()
            else:
                self._csv.writerow(_sensor_row(record))
        except OSError as exc:
            raise IoFailure(str(exc)) from exc


def write_log(records: Iterable[Record]) -> str:
    buf = io.StringIO()
    writer = LogWriter(buf)
    for record in records:
        writer.append(record)
    return buf.getvalue()


def read_log(text: str) -> list[Record]:
    """Lossless parse of a session CSV; read_log(write_log(r)) == r."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != HEADER:
        raise SchemaViolation(1, "missing or wrong header")
    records: list[Record] = []
    last_ms: int | None = None
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(HEADER):
            raise SchemaViolation(line_no, f"expected {len(HEADER)} cells, got {len(row)}")
        try:
            ts = int(row[0])
            kind = row[1]
            if kind == "event":
                if row[2] not in EVENT_NAMES:
                    raise ValueError(f"unknown event name {row[2]!r}")
                if any(cell != "" for cell in row[4:]):
                    raise ValueError("event row with sensor cells")
                records.append(EventRecord(ts, row[2], _decode_payload(row[3])))
            elif kind == "sensor":
                if row[2] != "" or row[3] != "":
                    raise ValueError("sensor row with event cells")
                values = [float(cell) for cell in row[4:]]
                records.append(SensorFrame(ts, *values))
            else:
                raise ValueError(f"unknown record_type {kind!r}")
        except ValueError as exc:
            raise SchemaViolation(line_no, str(exc)) from exc
        if last_ms is not None and ts < last_ms:
            raise SchemaViolation(line_no, f"timestamp {ts} after {last_ms}")
        last_ms = ts
    return records


def split_log(records: Iterable[Record]) -> tuple[list[EventRecord], list[SensorFrame]]:
    events: list[EventRecord] = []
    frames: list[SensorFrame] = []
    for record in records:
        (events if isinstance(record, EventRecord) else frames).append(record)
    return events, frames


class LoadLevel(IntEnum):
    """Coarse difficulty driving the simulated physiology."""

    REST = 0
    EASY = 1
    HARD = 2

    @property
    def scale(self) -> float:
        return {LoadLevel.REST: 0.0, LoadLevel.EASY: 0.5, LoadLevel.HARD: 1.0}[self]


# AR(1) noise: e_t = PHI * e_{t-1} + n_t with n_t gaussian; sigma below is
# the stationary standard deviation of e_t.
_AR_PHI = 0.9
_AR_INNOVATION = math.sqrt(1 - _AR_PHI**2)
_CL_SIGMA = 0.05
_HR_SIGMA = 2.0


class SensorSimulator:
    """Synthetic stand-in for the headset's physiological channels.

    cognitive_load = clamp(0.3 + 0.2 * level_scale + e_t, 0, 1) and
    heart_rate = 70 + 10 * level_scale + e'_t, each with its own AR(1)
    noise; the remaining channels are plausible constants plus white
    noise.  Draws come from the sensors stream of the session seed.
    """

    def __init__(self, seed: int, noise: float = 1.0):
        self._rng = stream_rng(seed, STREAM_SENSORS)
        self._noise = noise
        self._e_cl = 0.0
        self._e_hr = 0.0

    def sample(self, timestamp_ms: int, level: LoadLevel) -> SensorFrame:
        z = self._rng.standard_normal(12)
        self._e_cl = _AR_PHI * self._e_cl + _CL_SIGMA * _AR_INNOVATION * self._noise * z[0]
        self._e_hr = _AR_PHI * self._e_hr + _HR_SIGMA * _AR_INNOVATION * self._noise * z[1]
        cl = min(1.0, max(0.0, 0.3 + 0.2 * level.scale + self._e_cl))
        gaze = np.array([0.05 * self._noise * z[4], 0.05 * self._noise * z[5], 1.0])
        gaze = gaze / np.linalg.norm(gaze)
        return SensorFrame(
            timestamp_ms=timestamp_ms,
            heart_rate_bpm=quantize(70.0 + 10.0 * level.scale + self._e_hr, 1),
            pupil_l_mm=quantize(3.5 + 0.1 * self._noise * z[2], 2),
            pupil_r_mm=quantize(3.5 + 0.1 * self._noise * z[3], 2),
            gaze_x=quantize(gaze[0], 4),
            gaze_y=quantize(gaze[1], 4),
            gaze_z=quantize(gaze[2], 4),
            accel_x=quantize(0.05 * self._noise * z[6], 3),
            accel_y=quantize(0.05 * self._noise * z[7], 3),
            accel_z=quantize(9.81 + 0.05 * self._noise * z[8], 3),
            gyro_x=quantize(0.02 * self._noise * z[9], 4),
            gyro_y=quantize(0.02 * self._noise * z[10], 4),
            gyro_z=quantize(0.02 * self._noise * z[11], 4),
            cognitive_load=quantize(cl, 3),
        )


def simulate_sensors(seed: int, difficulty_timeline: Iterable[tuple[float, LoadLevel]],
                     noise: float = 1.0) -> list[SensorFrame]:
    """Run the simulator over (duration_s, level) segments at 50 Hz."""
    sim = SensorSimulator(seed, noise=noise)
    frames: list[SensorFrame] = []
    t_ms = 0
    for duration_s, level in difficulty_timeline:
        for _ in range(round(duration_s * SENSOR_RATE_HZ)):
            t_ms += FRAME_INTERVAL_MS
            frames.append(sim.sample(t_ms, level))
    return frames


class ReplaySensorSource:
    """Feeds frames from a recording, aligned to the running session clock.

    At each pull the newest recorded frame not yet delivered and not newer
    than the clock is restamped to the current clock; recorded frames the
    clock has already passed are dropped.
    """

    def __init__(self, frames: Iterable[SensorFrame]):
        self._frames = list(frames)
        for prev, cur in zip(self._frames, self._frames[1:]):
            if cur.timestamp_ms < prev.timestamp_ms:
                raise SchemaViolation(0, "replay frames not time-ordered")
        self._next = 0

    def sample(self, timestamp_ms: int, level: LoadLevel) -> SensorFrame | None:
        chosen: SensorFrame | None = None
        while (self._next < len(self._frames)
               and self._frames[self._next].timestamp_ms <= timestamp_ms):
            chosen = self._frames[self._next]
            self._next += 1
        if chosen is None:
            return None
        if chosen.timestamp_ms == timestamp_ms:
            return chosen
        return SensorFrame(timestamp_ms, *[getattr(chosen, n) for n in _SENSOR_FIELDS])
