import io

import pytest

from cogload.runner import SessionRecorder, open_sensor_source
from cogload.session import ClockRegression, Mode
from cogload.telemetry import EventRecord, SensorFrame, read_log, split_log, write_log

from support import make_config

FAST = dict(phase_duration_s=10.0, pause_duration_s=1.0, tlx_enabled=False)


def run_to_end(rec, chunk_ms=500):
    now = float(rec.clock_ms)
    while not rec.finished:
        now += chunk_ms
        rec.advance(now)
        assert now < 10_000_000
    return rec


def test_no_frames_without_a_sensor_source():
    rec = run_to_end(SessionRecorder(make_config(**FAST)))
    events, frames = split_log(rec.records)
    assert frames == []
    assert events == rec.engine.event_log


def test_frames_run_at_50hz_strictly_inside_the_session():
    rec = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST)))
    events, frames = split_log(rec.records)
    end_ms = events[-1].timestamp_ms
    stamps = [f.timestamp_ms for f in frames]
    # one frame per 20 ms step, starting after the first step, none on or
    # after the finishing step
    assert stamps == list(range(20, end_ms, 20))


def test_records_are_in_timestamp_order_and_round_trip():
    rec = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST)))
    stamps = [r.timestamp_ms for r in rec.records]
    assert stamps == sorted(stamps)
    assert read_log(write_log(rec.records)) == rec.records


def test_streaming_writer_matches_batch_serialization():
    buf = io.StringIO()
    rec = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST),
                                     stream=buf))
    assert buf.getvalue() == write_log(rec.records)


def test_advance_rejects_clock_regression():
    rec = SessionRecorder(make_config(**FAST))
    rec.advance(1000)
    with pytest.raises(ClockRegression):
        rec.advance(400)


def test_advance_flushes_idle_exit_immediately():
    rec = SessionRecorder(make_config(**FAST))
    emitted = rec.advance(0)
    assert [r.name for r in emitted] == ["phase_start", "task_start"]
    assert rec.engine.mode is Mode.RUNNING_PHASE


def test_sensor_level_follows_phase_difficulty():
    rec = SessionRecorder(make_config(sensor_source="simulated", **FAST))
    levels = {}
    now = 0.0
    while not rec.finished:
        now += 20
        rec.advance(now)
        levels.setdefault((rec.engine.mode, rec.engine.current_phase), rec.engine.sensor_level)
    assert levels[(Mode.RUNNING_PHASE, 1)].name == "EASY"
    assert levels[(Mode.RUNNING_PHASE, 2)].name == "HARD"
    assert levels[(Mode.PAUSED_BREAK, 1)].name == "REST"


def test_replay_source_reproduces_recorded_channels(tmp_path):
    live = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST)))
    path = tmp_path / "recorded.csv"
    path.write_text(write_log(live.records), encoding="utf-8")

    replayed = run_to_end(SessionRecorder(
        make_config(sensor_source=f"replay:{path}", **FAST)))
    _, live_frames = split_log(live.records)
    _, replay_frames = split_log(replayed.records)
    assert replay_frames == live_frames


def test_open_sensor_source_kinds(tmp_path):
    assert open_sensor_source(make_config()) is None
    assert open_sensor_source(make_config(sensor_source="simulated")) is not None
    live = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST)))
    path = tmp_path / "r.csv"
    path.write_text(write_log(live.records), encoding="utf-8")
    source = open_sensor_source(make_config(sensor_source=f"replay:{path}"))
    assert source.sample(20, None) is not None


def test_build_summary_matches_engine_counters():
    rec = run_to_end(SessionRecorder(make_config(sensor_source="simulated", **FAST)))
    summary = rec.build_summary()
    for phase_summary in summary.phases:
        counters = rec.engine.counters[phase_summary.phase]
        assert phase_summary.task_successes == counters.task_successes
        assert phase_summary.task_failures == counters.task_failures
    events, _ = split_log(rec.records)
    assert summary.miss_count == sum(1 for e in events if e.name == "beep_miss")
    assert 0.0 <= summary.mean_cognitive_load <= 1.0
