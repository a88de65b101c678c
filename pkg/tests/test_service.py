import itertools
import re
import time

import pytest
from fastapi.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from cogload.scoring import render_summary, summarize
from cogload.service import create_app
from cogload.telemetry import read_log, split_log
from cogload.timesync import ClockSyncSample, clock_offset


def config_text(**overrides):
    pairs = {
        "user_id": "webuser",
        "scene": "progressive",
        "phase_duration_s": "10",
        "pause_duration_s": "1",
        "rng_seed": "7",
        "sensor_source": "simulated",
        "tlx_enabled": "false",
    }
    pairs.update(overrides)
    return "".join(f"{key} = {value}\n" for key, value in pairs.items())


def now_ms():
    return time.monotonic() * 1000.0


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def create_session(client, **kwargs):
    payload = {"config_text": config_text(**kwargs.pop("config", {}))}
    payload.update(kwargs)
    reply = client.post("/sessions", json=payload)
    assert reply.status_code == 201, reply.text
    return reply.json()["id"]


def post_event(client, session_id, kind, **fields):
    body = {"kind": kind, "client_at_ms": now_ms(), "offset_ms": 0.0}
    body.update(fields)
    return client.post(f"/sessions/{session_id}/events", json=body)


# ---------------------------------------------------------------- lifecycle


def test_create_session_returns_id(client):
    session_id = create_session(client)
    assert re.fullmatch(r"[0-9a-f]{12}", session_id)


def test_invalid_config_rejected(client):
    reply = client.post("/sessions", json={"config_text": "scene = dual\n"})
    assert reply.status_code == 422


def test_invalid_time_scale_rejected(client):
    reply = client.post("/sessions",
                        json={"config_text": config_text(), "time_scale": 0})
    assert reply.status_code == 422


def test_unknown_session_is_404(client):
    assert client.get("/sessions/feedbeef0000/view").status_code == 404
    assert post_event(client, "feedbeef0000", "beep_button").status_code == 404
    assert client.get("/sessions/feedbeef0000/export/events.csv").status_code == 404


def test_unknown_session_stream_refused(client):
    with pytest.raises(WebSocketDisconnect):
        with client.websocket_connect("/sessions/feedbeef0000/stream"):
            pass


def test_view_is_idle_until_first_subscriber(client):
    session_id = create_session(client)
    view = client.get(f"/sessions/{session_id}/view").json()
    assert view["mode"] == "idle"
    assert view["exports_ready"] is False


def test_events_rejected_before_session_starts(client):
    session_id = create_session(client)
    reply = post_event(client, session_id, "beep_button")
    assert reply.status_code == 409
    assert "not started" in reply.json()["detail"]


def test_exports_gated_until_finished(client):
    session_id = create_session(client)
    assert client.get(f"/sessions/{session_id}/export/events.csv").status_code == 409
    assert client.get(f"/sessions/{session_id}/export/summary.txt").status_code == 409


# ---------------------------------------------------------------- time probes


def test_time_probe_echoes_and_stamps(client):
    before = now_ms()
    reply = client.post("/time", json={"t0_ms": 123.5}).json()
    after = now_ms()
    assert reply["t0_ms"] == 123.5
    assert before <= reply["t1_ms"] <= reply["t2_ms"] <= after


def test_loopback_clock_sync_offset_is_tiny(client):
    samples = []
    for _ in range(8):
        t0 = now_ms()
        reply = client.post("/time", json={"t0_ms": t0}).json()
        t3 = now_ms()
        samples.append(ClockSyncSample(reply["t0_ms"], reply["t1_ms"],
                                       reply["t2_ms"], t3))
    offset, rtt = clock_offset(samples)
    # same physical clock on both ends: estimate must sit within half the
    # round trip of zero
    assert abs(offset) <= rtt / 2.0
    assert rtt < 1000.0


# ---------------------------------------------------------------- event path


def test_stale_client_stamp_rejected(client):
    session_id = create_session(client)
    with client.websocket_connect(f"/sessions/{session_id}/stream"):
        reply = post_event(client, session_id, "beep_button",
                           client_at_ms=now_ms() - 10_000)
        assert reply.status_code == 409
        assert "drift" in reply.json()["detail"]


def test_unknown_kind_rejected(client):
    session_id = create_session(client)
    with client.websocket_connect(f"/sessions/{session_id}/stream"):
        reply = post_event(client, session_id, "teleport")
        assert reply.status_code == 422


def test_illegal_input_for_mode_is_conflict(client):
    session_id = create_session(client, config={"tlx_enabled": "true"})
    with client.websocket_connect(f"/sessions/{session_id}/stream"):
        reply = post_event(client, session_id, "tlx_submit",
                           tlx={"mental": 50, "physical": 50, "temporal": 50,
                                "performance": 50, "effort": 50, "frustration": 50})
        assert reply.status_code == 409


def test_duplicate_idempotency_key_applies_once(client):
    session_id = create_session(client)
    with client.websocket_connect(f"/sessions/{session_id}/stream"):
        first = post_event(client, session_id, "beep_button", idempotency_key="k1")
        assert first.status_code == 200
        assert first.json()["duplicate"] is False
        assert first.json()["emitted"] == ["false_alarm"]
        second = post_event(client, session_id, "beep_button", idempotency_key="k1")
        assert second.status_code == 200
        assert second.json()["duplicate"] is True
        assert second.json()["emitted"] == []


def test_snapshots_carry_advancing_session_clock(client):
    session_id = create_session(client, time_scale=20.0)
    with client.websocket_connect(f"/sessions/{session_id}/stream") as ws:
        stamps = []
        while len(stamps) < 5:
            message = ws.receive_json()
            if message["type"] == "snapshot":
                stamps.append(message["session_ms"])
        assert stamps == sorted(stamps)
        assert stamps[-1] > stamps[0]
        view = message["view"]
        assert view["mode"] in ("idle", "running_phase")
        assert view["scene"] == "progressive"


# ---------------------------------------------------------------- full session


def drive_web_session(client, session_id):
    """Play a whole session over the wire; returns (beep_count, hit_acks)."""
    keys = (f"key-{i}" for i in itertools.count())
    beeps = 0
    hit_acks = 0
    last_problem = None
    forms_done = set()
    with client.websocket_connect(f"/sessions/{session_id}/stream") as ws:
        while True:
            message = ws.receive_json()
            if message["type"] == "finished":
                return beeps, hit_acks
            if message["type"] == "beep":
                beeps += 1
                ack = post_event(client, session_id, "beep_button",
                                 idempotency_key=next(keys))
                if ack.status_code == 200 and "beep_hit" in ack.json()["emitted"]:
                    hit_acks += 1
                continue
            view = message["view"]
            if view["show_tlx"] and (view["phase"], "tlx") not in forms_done:
                forms_done.add((view["phase"], "tlx"))
                post_event(client, session_id, "tlx_submit",
                           tlx={"mental": 50, "physical": 50, "temporal": 50,
                                "performance": 50, "effort": 50, "frustration": 50},
                           idempotency_key=next(keys))
            elif view["problem"] and view["problem"] != last_problem:
                last_problem = view["problem"]
                a, b = (int(part) for part in view["problem"].split(" + "))
                for digit in str(a + b):
                    post_event(client, session_id, "keypad", key=digit,
                               idempotency_key=next(keys))
                post_event(client, session_id, "keypad", key="submit",
                           idempotency_key=next(keys))


def test_accelerated_session_end_to_end(tmp_path):
    with TestClient(create_app(data_dir=tmp_path)) as client:
        session_id = create_session(
            client, time_scale=25.0,
            config={"tlx_enabled": "true", "phase_duration_s": "12"})
        beeps, hit_acks = drive_web_session(client, session_id)
        assert beeps > 0

        csv_reply = client.get(f"/sessions/{session_id}/export/events.csv")
        txt_reply = client.get(f"/sessions/{session_id}/export/summary.txt")
        assert csv_reply.status_code == 200
        assert txt_reply.status_code == 200

        records = read_log(csv_reply.text)
        events, frames = split_log(records)
        names = [e.name for e in events]
        assert names[0] == "session_start"
        assert names[-1] == "session_end"
        assert names.count("phase_start") == 2
        assert names.count("tlx_submitted") == 2
        assert names.count("beep_onset") == beeps
        assert names.count("beep_hit") == hit_acks
        assert names.count("beep_hit") + names.count("beep_miss") == beeps
        assert any(n in ("task_success", "task_failure") for n in names)
        assert len(frames) > 0

        # recount from the exported log reproduces the summary artifact
        assert render_summary(summarize(events, frames)) == txt_reply.text

        view = client.get(f"/sessions/{session_id}/view").json()
        assert view["mode"] == "finished"
        assert view["exports_ready"] is True

        # the ticker persists both artifacts once the session ends
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline:
            csv_files = list(tmp_path.glob("webuser_progressive_*.csv"))
            txt_files = list(tmp_path.glob("webuser_progressive_*.txt"))
            if csv_files and txt_files:
                break
            time.sleep(0.05)
        assert csv_files and txt_files
        assert csv_files[0].read_text(encoding="utf-8") == csv_reply.text
        assert txt_files[0].read_text(encoding="utf-8") == txt_reply.text
        assert csv_files[0].stem == txt_files[0].stem
        assert re.fullmatch(r"webuser_progressive_\d{8}T\d{6}Z", csv_files[0].stem)
