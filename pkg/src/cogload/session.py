"""Authoritative session state machine.

A session runs on a fixed 20 ms timestep driven by `tick`; all
participant actions enter through `handle_input`.  Replaying the same
config, seed, and input sequence (with the same tick interleaving)
reproduces the event log bit-exactly.

Mode graph: idle -> (tutorial) -> running_phase -> break_questionnaire
(when any questionnaire is enabled) -> paused_break -> running_phase ...
-> finished.  The questionnaire is answered first; whatever remains of
the configured pause then runs out before the next phase starts.

Log rows are stamped with the engine clock at emission time.  Reaction
times, by contrast, are computed from the client-side timestamps carried
inside the input events (audio start -> button press on the same clock),
which keeps network jitter out of the measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .config import ExperimentConfig, Scene
from .rng import STREAM_ARITHMETIC, STREAM_BEEPS, stream_rng
from .scoring import PaasResponse, TlxResponse, TLX_SUBSCALES
from .tasks import (
    ArithmeticProblem,
    BeepOutcome,
    BeepTrial,
    Difficulty,
    EmptyEntry,
    LineState,
    TIMESTEP_MS,
    check_answer,
    entry_append,
    gen_arithmetic,
    line_step,
    make_line_state,
    resolve_beep,
    schedule_beeps,
)
from .telemetry import EventRecord, LoadLevel, event, quantize

TUTORIAL_DURATION_MS = 10_000


class ClockRegression(Exception):
    pass


class IllegalInMode(Exception):
    def __init__(self, kind: str, mode: "Mode"):
        self.kind, self.mode = kind, mode
        super().__init__(f"input {kind!r} not legal in mode {mode.value}")


class Mode(str, Enum):
    IDLE = "idle"
    TUTORIAL = "tutorial"
    RUNNING_PHASE = "running_phase"
    BREAK_QUESTIONNAIRE = "break_questionnaire"
    PAUSED_BREAK = "paused_break"
    FINISHED = "finished"


INPUT_KINDS = ("line_button_down", "line_button_up", "beep_button",
               "keypad", "tlx_submit", "paas_submit", "beep_played")


@dataclass(frozen=True)
class InputEvent:
    """One participant action, stamped on the session clock by the sender."""

    at_ms: float
    kind: str
    key: str | None = None                 # keypad: digit, "clear" or "submit"
    tlx: TlxResponse | None = None
    paas: PaasResponse | None = None

    def __post_init__(self) -> None:
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")


@dataclass(frozen=True)
class ViewModel:
    """Render-ready snapshot; never contains the expected answer."""

    mode: str
    scene: str
    phase: int | None
    clock_ms: int
    phase_remaining_ms: int | None
    pause_remaining_ms: int | None
    problem: str | None
    entry: str
    line_position: float | None
    line_low: float | None
    line_high: float | None
    show_tlx: bool
    show_paas: bool
    exports_ready: bool


@dataclass
class PhaseCounters:
    task_successes: int = 0
    task_failures: int = 0
    false_alarms: int = 0


def arithmetic_difficulty(scene: Scene, phase: int) -> Difficulty | None:
    """Which sums a phase shows, if any: the progressive scene escalates
    from two- to three-digit operands; the dual scene adds two-digit sums
    on top of the line task in its second phase only."""
    if scene is Scene.PROGRESSIVE:
        return Difficulty.TWO_DIGIT if phase == 1 else Difficulty.THREE_DIGIT
    return Difficulty.TWO_DIGIT if phase == 2 else None


class Session:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.clock_ms = 0
        self.mode = Mode.IDLE
        self.phase_slot = -1
        self.phase_started_ms = 0
        self.pause_anchor_ms = 0
        self.mode_entered_ms = 0
        self.line: LineState | None = None
        self.line_held = False
        self.problem: ArithmeticProblem | None = None
        self.entry = ""
        self.counters: dict[int, PhaseCounters] = {1: PhaseCounters(), 2: PhaseCounters()}
        self.responses: dict[int, tuple[TlxResponse | None, PaasResponse | None]] = {}
        self.event_log: list[EventRecord] = []
        self._pending_forms: set[str] = set()

        self._arith_rng = stream_rng(config.rng_seed, STREAM_ARITHMETIC)
        beep_rng = stream_rng(config.rng_seed, STREAM_BEEPS)
        self.schedules: list[list[BeepTrial]] = [
            [BeepTrial(onset) for onset in schedule_beeps(
                config.phase_duration_s, config.beep_period_s,
                config.beep_jitter_frac, config.beep_window_ms, beep_rng)]
            for _ in config.phase_order
        ]
        self._beep_cursor = 0
        self._active_beep: int | None = None   # index into the current schedule
        self._played_at_ms: float | None = None

        payload = {
            "user_id": config.user_id, "scene": config.scene.value,
            "phase_order": ",".join(str(p) for p in config.phase_order),
            "phase_duration_s": config.phase_duration_s,
            "pause_duration_s": config.pause_duration_s,
            "tlx_enabled": config.tlx_enabled, "paas_enabled": config.paas_enabled,
            "tutorial_enabled": config.tutorial_enabled,
            "beep_period_s": config.beep_period_s,
            "beep_jitter_frac": config.beep_jitter_frac,
            "beep_window_ms": config.beep_window_ms,
            "rng_seed": config.rng_seed,
            "sensor_source": config.sensor_source.render(),
        }
        if config.user_age is not None:
            payload["user_age"] = config.user_age
        self._emit([], "session_start", **payload)

    # -- helpers ---------------------------------------------------------

    @property
    def current_phase(self) -> int | None:
        if self.phase_slot < 0:
            return None
        return self.config.phase_order[self.phase_slot]

    @property
    def finished(self) -> bool:
        return self.mode is Mode.FINISHED

    @property
    def sensor_level(self) -> LoadLevel:
        if self.mode is Mode.RUNNING_PHASE:
            return LoadLevel.EASY if self.current_phase == 1 else LoadLevel.HARD
        return LoadLevel.REST

    def _emit(self, out: list[EventRecord], name: str, **payload: object) -> EventRecord:
        record = event(self.clock_ms, name, **payload)
        self.event_log.append(record)
        out.append(record)
        return record

    def _current_schedule(self) -> list[BeepTrial]:
        return self.schedules[self.phase_slot]

    # -- lifecycle -------------------------------------------------------

    def tick(self, now_ms: float) -> list[EventRecord]:
        """Advance the fixed-timestep loop up to now_ms (session clock)."""
        if now_ms < self.clock_ms:
            raise ClockRegression(f"tick to {now_ms} behind clock {self.clock_ms}")
        emitted: list[EventRecord] = []
        if self.mode is Mode.IDLE:
            self._leave_idle(emitted)
        while self.clock_ms + TIMESTEP_MS <= now_ms and self.mode is not Mode.FINISHED:
            self.clock_ms += TIMESTEP_MS
            self._step(emitted)
        return emitted

    def _leave_idle(self, out: list[EventRecord]) -> None:
        if self.config.tutorial_enabled:
            self.mode = Mode.TUTORIAL
            self.mode_entered_ms = self.clock_ms
        else:
            self._start_phase(0, out)

    def _start_phase(self, slot: int, out: list[EventRecord]) -> None:
        self.phase_slot = slot
        self.phase_started_ms = self.clock_ms
        self.mode = Mode.RUNNING_PHASE
        self.mode_entered_ms = self.clock_ms
        self._beep_cursor = 0
        self._active_beep = None
        self._played_at_ms = None
        phase = self.current_phase
        self._emit(out, "phase_start", phase=phase)
        if self.config.scene is Scene.DUAL:
            self.line = make_line_state()
            self.line_held = False
        else:
            self.line = None
        difficulty = arithmetic_difficulty(self.config.scene, phase)
        if difficulty is not None:
            self._present_problem(difficulty, out)
        else:
            self.problem = None
            self.entry = ""

    def _present_problem(self, difficulty: Difficulty, out: list[EventRecord]) -> None:
        self.problem = gen_arithmetic(difficulty, self._arith_rng)
        self.entry = ""
        self._emit(out, "task_start", phase=self.current_phase,
                   a=self.problem.a, b=self.problem.b,
                   difficulty=difficulty.value)

    def _step(self, out: list[EventRecord]) -> None:
        if self.mode is Mode.TUTORIAL:
            if self.clock_ms - self.mode_entered_ms >= TUTORIAL_DURATION_MS:
                self._start_phase(0, out)
            return
        if self.mode is Mode.RUNNING_PHASE:
            self._step_phase(out)
            return
        if self.mode is Mode.PAUSED_BREAK:
            if self.clock_ms >= self.pause_anchor_ms + self.config.pause_duration_ms:
                if self.phase_slot + 1 < len(self.config.phase_order):
                    self._start_phase(self.phase_slot + 1, out)
                else:
                    self.mode = Mode.FINISHED
                    self._emit(out, "session_end")
            return
        # break_questionnaire advances only through form submissions

    def _step_phase(self, out: list[EventRecord]) -> None:
        elapsed = self.clock_ms - self.phase_started_ms
        if self.line is not None:
            self.line, line_events = line_step(self.line, self.line_held)
            for _ in line_events:
                self._emit(out, "excursion", phase=self.current_phase,
                           count=self.line.excursions)
        schedule = self._current_schedule()
        while (self._beep_cursor < len(schedule)
               and schedule[self._beep_cursor].onset_ms <= elapsed):
            self._expire_active_beep(out)   # overlapping window closes as a miss
            index = self._beep_cursor
            self._active_beep = index
            self._played_at_ms = None
            self._beep_cursor = index + 1
            self._emit(out, "beep_onset", index=index + 1,
                       onset_ms=self.phase_started_ms + schedule[index].onset_ms)
        if self._active_beep is not None:
            trial = schedule[self._active_beep]
            if (trial.outcome is BeepOutcome.PENDING
                    and elapsed >= trial.onset_ms + self.config.beep_window_ms):
                self._expire_active_beep(out)
        if elapsed >= self.config.phase_duration_ms:
            self._expire_active_beep(out)
            self._emit(out, "phase_end", phase=self.current_phase)
            self.problem = None
            self.entry = ""
            self.pause_anchor_ms = self.clock_ms
            self._pending_forms = set()
            if self.config.tlx_enabled:
                self._pending_forms.add("tlx")
            if self.config.paas_enabled:
                self._pending_forms.add("paas")
            self.mode = (Mode.BREAK_QUESTIONNAIRE if self._pending_forms
                         else Mode.PAUSED_BREAK)
            self.mode_entered_ms = self.clock_ms

    def _expire_active_beep(self, out: list[EventRecord]) -> None:
        if self._active_beep is None:
            return
        schedule = self._current_schedule()
        trial = schedule[self._active_beep]
        if trial.outcome is BeepOutcome.PENDING:
            schedule[self._active_beep] = resolve_beep(
                trial, None, self.config.beep_window_ms)
            self._emit(out, "beep_miss",
                       onset_ms=self.phase_started_ms + trial.onset_ms)
        self._active_beep = None
        self._played_at_ms = None

    # -- inputs ----------------------------------------------------------

    def handle_input(self, ev: InputEvent) -> list[EventRecord]:
        emitted: list[EventRecord] = []
        handler = getattr(self, f"_on_{ev.kind}")
        handler(ev, emitted)
        return emitted

    def _require(self, ev: InputEvent, *modes: Mode) -> None:
        if self.mode not in modes:
            raise IllegalInMode(ev.kind, self.mode)

    def _on_line_button_down(self, ev: InputEvent, out: list[EventRecord]) -> None:
        self._require(ev, Mode.RUNNING_PHASE)
        if self.line is None:
            raise IllegalInMode(ev.kind, self.mode)
        self.line_held = True

    def _on_line_button_up(self, ev: InputEvent, out: list[EventRecord]) -> None:
        self._require(ev, Mode.RUNNING_PHASE)
        if self.line is None:
            raise IllegalInMode(ev.kind, self.mode)
        self.line_held = False

    def _on_beep_button(self, ev: InputEvent, out: list[EventRecord]) -> None:
        self._require(ev, Mode.RUNNING_PHASE)
        schedule = self._current_schedule()
        if self._active_beep is not None:
            trial = schedule[self._active_beep]
            if trial.outcome is BeepOutcome.PENDING:
                reference = (self._played_at_ms if self._played_at_ms is not None
                             else self.phase_started_ms + trial.onset_ms)
                response = quantize(ev.at_ms - reference, 1)
                if 0 <= response <= self.config.beep_window_ms:
                    schedule[self._active_beep] = resolve_beep(
                        trial, trial.onset_ms + response, self.config.beep_window_ms)
                    self._emit(out, "beep_hit", response_ms=response,
                               onset_ms=self.phase_started_ms + trial.onset_ms)
                    self._active_beep = None
                    self._played_at_ms = None
                    return
        self.counters[self.current_phase].false_alarms += 1
        self._emit(out, "false_alarm", phase=self.current_phase)

    def _on_beep_played(self, ev: InputEvent, out: list[EventRecord]) -> None:
        # bookkeeping only: remembers when the client actually started the
        # tone, so reaction time is measured from real audio onset
        if self.mode is not Mode.RUNNING_PHASE or self._active_beep is None:
            return
        if self._current_schedule()[self._active_beep].outcome is BeepOutcome.PENDING:
            if self._played_at_ms is None:
                self._played_at_ms = ev.at_ms

    def _on_keypad(self, ev: InputEvent, out: list[EventRecord]) -> None:
        self._require(ev, Mode.RUNNING_PHASE)
        if self.problem is None or ev.key is None:
            raise IllegalInMode(ev.kind, self.mode)
        if ev.key == "clear":
            self.entry = ""
            return
        if ev.key != "submit":
            self.entry = entry_append(self.entry, ev.key)
            return
        if self.entry == "":
            raise EmptyEntry("submit with empty entry")
        problem = self.problem
        correct = check_answer(problem, self.entry)
        counters = self.counters[self.current_phase]
        if correct:
            counters.task_successes += 1
        else:
            counters.task_failures += 1
        self._emit(out, "task_success" if correct else "task_failure",
                   phase=self.current_phase, a=problem.a, b=problem.b,
                   entered=self.entry, answer=problem.answer)
        self._present_problem(problem.difficulty, out)

    def _submit_form(self, which: str, ev: InputEvent) -> None:
        self._require(ev, Mode.BREAK_QUESTIONNAIRE)
        if which not in self._pending_forms:
            raise IllegalInMode(ev.kind, self.mode)
        if which == "paas" and "tlx" in self._pending_forms:
            raise IllegalInMode(ev.kind, self.mode)   # workload form comes first
        self._pending_forms.discard(which)
        if not self._pending_forms:
            self.mode = Mode.PAUSED_BREAK
            self.mode_entered_ms = self.clock_ms

    def _on_tlx_submit(self, ev: InputEvent, out: list[EventRecord]) -> None:
        if ev.tlx is None:
            raise IllegalInMode(ev.kind, self.mode)
        self._submit_form("tlx", ev)
        phase = self.current_phase
        tlx, paas = self.responses.get(phase, (None, None))
        self.responses[phase] = (ev.tlx, paas)
        payload = {"phase": phase}
        payload.update({name: getattr(ev.tlx, name) for name in TLX_SUBSCALES})
        self._emit(out, "tlx_submitted", **payload)

    def _on_paas_submit(self, ev: InputEvent, out: list[EventRecord]) -> None:
        if ev.paas is None:
            raise IllegalInMode(ev.kind, self.mode)
        self._submit_form("paas", ev)
        phase = self.current_phase
        tlx, _ = self.responses.get(phase, (None, None))
        self.responses[phase] = (tlx, ev.paas)
        self._emit(out, "paas_submitted", phase=phase,
                   difficulty=ev.paas.difficulty, effort=ev.paas.effort)

    # -- view ------------------------------------------------------------

    def current_view(self) -> ViewModel:
        running = self.mode is Mode.RUNNING_PHASE
        in_break = self.mode in (Mode.BREAK_QUESTIONNAIRE, Mode.PAUSED_BREAK)
        phase_remaining = None
        if running:
            phase_remaining = max(
                0, self.phase_started_ms + self.config.phase_duration_ms - self.clock_ms)
        pause_remaining = None
        if in_break:
            pause_remaining = max(
                0, self.pause_anchor_ms + self.config.pause_duration_ms - self.clock_ms)
        return ViewModel(
            mode=self.mode.value,
            scene=self.config.scene.value,
            phase=self.current_phase if (running or in_break) else None,
            clock_ms=self.clock_ms,
            phase_remaining_ms=phase_remaining,
            pause_remaining_ms=pause_remaining,
            problem=self.problem.text if (running and self.problem) else None,
            entry=self.entry if running else "",
            line_position=self.line.position if (running and self.line) else None,
            line_low=self.line.interval_low if (running and self.line) else None,
            line_high=self.line.interval_high if (running and self.line) else None,
            show_tlx="tlx" in self._pending_forms and self.mode is Mode.BREAK_QUESTIONNAIRE,
            show_paas=("paas" in self._pending_forms and "tlx" not in self._pending_forms
                       and self.mode is Mode.BREAK_QUESTIONNAIRE),
            exports_ready=self.finished,
        )


def start_session(config: ExperimentConfig) -> Session:
    """Create a session in idle with both phases' probe schedules precomputed."""
    return Session(config)
