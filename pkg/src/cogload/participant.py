"""Scripted participant: a behavioral model that plays a whole session.

Reaction times are lognormal with an additive penalty in the high-load
phase, answers are typed digit by digit with difficulty-dependent slip
rates, the line is held below the interval midpoint, and questionnaire
ratings track phase difficulty (hard anchors sit 15 points above easy
ones, each answer jittered one grid step).  All behavior is drawn from
one dedicated RNG stream, so a (config, model, seed) triple replays
bit-exactly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from pathlib import Path

from .config import ExperimentConfig
from .rng import STREAM_PARTICIPANT, stream_rng
from .runner import SessionRecorder
from .scoring import PaasResponse, TlxResponse, TLX_SUBSCALES
from .session import IllegalInMode, InputEvent, Mode
from .tasks import TIMESTEP_MS
from .telemetry import write_log

LINE_POLICIES = ("hold_below_midpoint",)

# questionnaire anchors: hard phases are rated a fixed 15 points higher
# (one grid step of jitter on top), mirroring the intended load contrast
TLX_BASE_EASY = 40
TLX_BASE_HARD = 55
PAAS_BASE_EASY = 4
PAAS_BASE_HARD = 7

FORM_DELAY_MS = 2500.0
HARD_PHASE = 2


@dataclass(frozen=True)
class ParticipantModel:
    """Behavioral knobs; defaults give a competent, slightly sloppy player."""

    rt_lognormal_mu: float = math.log(400.0)    # log-ms, median 400 ms
    rt_lognormal_sigma: float = 0.25
    rt_dual_penalty_ms: float = 0.0             # added in the high-load phase
    answer_latency_ms_per_digit: float = 350.0
    error_prob_easy: float = 0.05
    error_prob_hard: float = 0.12
    miss_prob: float = 0.02
    line_policy: str = "hold_below_midpoint"

    def __post_init__(self) -> None:
        if self.rt_lognormal_sigma <= 0:
            raise ValueError("rt_lognormal_sigma must be > 0")
        for name in ("error_prob_easy", "error_prob_hard", "miss_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")
        if self.line_policy not in LINE_POLICIES:
            raise ValueError(f"unknown line policy {self.line_policy!r}")

    def error_prob(self, phase: int) -> float:
        return self.error_prob_hard if phase == HARD_PHASE else self.error_prob_easy


class ScriptedParticipant:
    """Drives one SessionRecorder from idle to finished."""

    def __init__(self, model: ParticipantModel, seed: int):
        self.model = model
        self.rng = stream_rng(seed, STREAM_PARTICIPANT)
        # heap of (at_ms, seq, phase_slot, modes, InputEvent); the slot and
        # mode guard drop plans whose moment has passed (e.g. phase rolled)
        self._plans: list[tuple[float, int, int, tuple[Mode, ...], InputEvent]] = []
        self._seq = 0
        self._holding = False

    # -- planning ----------------------------------------------------------

    def _plan(self, at_ms: float, ev: InputEvent, slot: int,
              modes: tuple[Mode, ...]) -> None:
        heapq.heappush(self._plans, (at_ms, self._seq, slot, modes, ev))
        self._seq += 1

    def _plan_beep_response(self, rec: SessionRecorder, onset_abs_ms: int) -> None:
        model = self.model
        ignored = self.rng.random() < model.miss_prob
        rt = self.rng.lognormal(model.rt_lognormal_mu, model.rt_lognormal_sigma)
        if rec.engine.current_phase == HARD_PHASE:
            rt += model.rt_dual_penalty_ms
        if ignored or rt > rec.engine.config.beep_window_ms - 10:
            return                       # never pressed: resolves as a miss
        press_at = onset_abs_ms + rt
        self._plan(press_at, InputEvent(press_at, "beep_button"),
                   rec.engine.phase_slot, (Mode.RUNNING_PHASE,))

    def _plan_answer(self, rec: SessionRecorder, a: int, b: int) -> None:
        model = self.model
        answer = a + b
        if self.rng.random() < model.error_prob(rec.engine.current_phase):
            offset = int(self.rng.integers(1, 10))
            answer = max(0, answer + (offset if self.rng.random() < 0.5 else -offset))
        at = float(rec.clock_ms)
        slot = rec.engine.phase_slot
        for digit in str(answer):
            at += model.answer_latency_ms_per_digit * self.rng.uniform(0.8, 1.2)
            self._plan(at, InputEvent(at, "keypad", key=digit),
                       slot, (Mode.RUNNING_PHASE,))
        at += model.answer_latency_ms_per_digit * self.rng.uniform(0.8, 1.2)
        self._plan(at, InputEvent(at, "keypad", key="submit"),
                   slot, (Mode.RUNNING_PHASE,))

    def _grid_jitter(self, base: int) -> int:
        return min(100, max(0, base + 5 * int(self.rng.integers(-1, 2))))

    def _plan_forms(self, rec: SessionRecorder, phase: int) -> None:
        config = rec.engine.config
        hard = phase == HARD_PHASE
        at = rec.clock_ms + FORM_DELAY_MS * self.rng.uniform(0.8, 1.6)
        slot = rec.engine.phase_slot
        if config.tlx_enabled:
            base = TLX_BASE_HARD if hard else TLX_BASE_EASY
            values = {name: self._grid_jitter(base) for name in TLX_SUBSCALES}
            self._plan(at, InputEvent(at, "tlx_submit", tlx=TlxResponse(**values)),
                       slot, (Mode.BREAK_QUESTIONNAIRE,))
            at += FORM_DELAY_MS * self.rng.uniform(0.5, 1.0)
        if config.paas_enabled:
            base = PAAS_BASE_HARD if hard else PAAS_BASE_EASY
            paas = PaasResponse(
                difficulty=min(9, max(1, base + int(self.rng.integers(-1, 2)))),
                effort=min(9, max(1, base + int(self.rng.integers(-1, 2)))))
            self._plan(at, InputEvent(at, "paas_submit", paas=paas),
                       slot, (Mode.BREAK_QUESTIONNAIRE,))

    # -- reacting ----------------------------------------------------------

    def _observe(self, rec: SessionRecorder, events) -> None:
        for record in events:
            if record.name == "task_start":
                self._plan_answer(rec, int(record.get("a")), int(record.get("b")))
            elif record.name == "beep_onset":
                self._plan_beep_response(rec, int(record.get("onset_ms")))
            elif record.name == "phase_end":
                self._plan_forms(rec, int(record.get("phase")))
            elif record.name == "phase_start":
                self._holding = False

    def _fly_line(self, rec: SessionRecorder) -> None:
        engine = rec.engine
        if engine.mode is not Mode.RUNNING_PHASE or engine.line is None:
            return
        midpoint = (engine.line.interval_low + engine.line.interval_high) / 2
        want_hold = engine.line.position < midpoint
        if want_hold != self._holding:
            kind = "line_button_down" if want_hold else "line_button_up"
            rec.handle_input(InputEvent(float(engine.clock_ms), kind))
            self._holding = want_hold

    # -- main loop ---------------------------------------------------------

    def _deliver(self, rec: SessionRecorder,
                 plan: tuple[float, int, int, tuple[Mode, ...], InputEvent]) -> None:
        at_ms, _, slot, modes, ev = plan
        if at_ms > rec.clock_ms:
            self._observe(rec, rec.advance(at_ms))
        if rec.engine.phase_slot != slot or rec.engine.mode not in modes:
            return
        try:
            self._observe(rec, rec.handle_input(ev))
        except IllegalInMode:
            pass

    def drive(self, rec: SessionRecorder, max_ms: float = 24 * 3600 * 1000) -> None:
        self._observe(rec, rec.advance(rec.clock_ms))   # flush leaving idle
        while not rec.finished:
            if rec.clock_ms > max_ms:
                raise RuntimeError("session did not finish in time")
            next_tick = rec.clock_ms + TIMESTEP_MS
            if self._plans and self._plans[0][0] < next_tick:
                self._deliver(rec, heapq.heappop(self._plans))
                continue
            self._observe(rec, rec.advance(next_tick))
            self._fly_line(rec)


@dataclass(frozen=True)
class PlayedSession:
    recorder: SessionRecorder
    events_csv: str
    summary_txt: str


def play_session(config: ExperimentConfig,
                 model: ParticipantModel | None = None,
                 seed: int | None = None,
                 out_dir: Path | None = None) -> PlayedSession:
    """Run one full scripted session; optionally write its two artifacts.

    The participant draws from its own RNG stream, seeded from the config
    seed unless overridden, so the same call is bit-reproducible.
    """
    model = model if model is not None else ParticipantModel()
    participant_seed = seed if seed is not None else config.rng_seed
    recorder = SessionRecorder(config)
    ScriptedParticipant(model, participant_seed).drive(recorder)
    events_csv = write_log(recorder.records)
    summary_txt = recorder.summary_text()
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "events.csv").write_text(events_csv, encoding="utf-8")
        (out_dir / "summary.txt").write_text(summary_txt, encoding="utf-8")
    return PlayedSession(recorder, events_csv, summary_txt)
