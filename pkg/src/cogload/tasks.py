"""Pure kernels for the three load-bearing tasks.

Arithmetic sums, the line-keeping task, and the auditory probe are all
implemented as deterministic functions over explicit state, so a session
can be re-simulated bit-exactly from its seed and input tape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

# Line motion law: the line falls at a constant rate and rises at a
# constant rate while the button is held, clamped to [0, 1].
LINE_RISE_PER_S = 0.25
LINE_FALL_PER_S = 0.15
DEFAULT_INTERVAL = (0.35, 0.65)

TIMESTEP_MS = 20


class EmptyEntry(Exception):
    pass


class AlreadyResolved(Exception):
    pass


class Difficulty(str, Enum):
    TWO_DIGIT = "two_digit"
    THREE_DIGIT = "three_digit"


_OPERAND_RANGE = {
    Difficulty.TWO_DIGIT: (10, 99),
    Difficulty.THREE_DIGIT: (100, 999),
}


@dataclass(frozen=True)
class ArithmeticProblem:
    a: int
    b: int
    difficulty: Difficulty

    @property
    def answer(self) -> int:
        return self.a + self.b

    @property
    def text(self) -> str:
        return f"{self.a} + {self.b}"


def gen_arithmetic(difficulty: Difficulty, rng: np.random.Generator) -> ArithmeticProblem:
    """Draw operands uniformly over the difficulty's range (a first, then b)."""
    lo, hi = _OPERAND_RANGE[difficulty]
    a = int(rng.integers(lo, hi + 1))
    b = int(rng.integers(lo, hi + 1))
    return ArithmeticProblem(a, b, difficulty)


def entry_append(entry: str, digit: str) -> str:
    """Append one keypad digit: at most 4 digits, '0' is replaced, not led."""
    if digit not in "0123456789" or len(digit) != 1:
        raise ValueError(f"not a keypad digit: {digit!r}")
    if entry == "0":
        return digit
    if len(entry) >= 4:
        return entry
    return entry + digit


def check_answer(problem: ArithmeticProblem, entry: str) -> bool:
    if entry == "":
        raise EmptyEntry("cannot check an empty entry")
    return int(entry) == problem.answer


@dataclass(frozen=True)
class LineState:
    position: float
    interval_low: float
    interval_high: float
    inside: bool
    excursions: int = 0
    time_inside_ms: int = 0
    time_outside_ms: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.interval_low < self.interval_high <= 1:
            raise ValueError(
                f"bad interval [{self.interval_low}, {self.interval_high}]")


def make_line_state(interval_low: float = DEFAULT_INTERVAL[0],
                    interval_high: float = DEFAULT_INTERVAL[1]) -> LineState:
    """Fresh line state starting at the interval midpoint."""
    position = (interval_low + interval_high) / 2
    return LineState(position, interval_low, interval_high, inside=True)


def line_step(state: LineState, button_held: bool, dt_ms: int = TIMESTEP_MS
              ) -> tuple[LineState, list[str]]:
    """Advance the line one timestep; emits 'excursion' on inside->outside."""
    rate = LINE_RISE_PER_S if button_held else -LINE_FALL_PER_S
    position = state.position + rate * dt_ms / 1000.0
    position = min(1.0, max(0.0, position))
    inside = state.interval_low <= position <= state.interval_high
    events: list[str] = []
    excursions = state.excursions
    if state.inside and not inside:
        excursions += 1
        events.append("excursion")
    new_state = replace(
        state,
        position=position,
        inside=inside,
        excursions=excursions,
        time_inside_ms=state.time_inside_ms + (dt_ms if inside else 0),
        time_outside_ms=state.time_outside_ms + (0 if inside else dt_ms),
    )
    return new_state, events


class BeepOutcome(str, Enum):
    PENDING = "pending"
    HIT = "hit"
    MISS = "miss"


@dataclass(frozen=True)
class BeepTrial:
    """One auditory probe; onset is relative to the owning phase's start."""

    onset_ms: int
    response_ms: float | None = None
    outcome: BeepOutcome = BeepOutcome.PENDING


def schedule_beeps(phase_duration_s: float, beep_period_s: float,
                   beep_jitter_frac: float, beep_window_ms: int,
                   rng: np.random.Generator) -> list[int]:
    """Probe onsets (ms from phase start) at k*T plus uniform jitter.

    Jitter is drawn as integer milliseconds uniform on [-J, +J] with
    J = floor(jitter_frac * T_ms), so |onset_k - k*T_ms| <= J exactly and
    onsets are strictly increasing.  Only onsets whose response window
    closes by the end of the phase are kept.
    """
    period_ms = round(beep_period_s * 1000)
    jitter_ms = math.floor(beep_jitter_frac * period_ms)
    phase_end_ms = round(phase_duration_s * 1000)
    onsets: list[int] = []
    k = 1
    while True:
        jitter = int(rng.integers(-jitter_ms, jitter_ms + 1)) if jitter_ms else 0
        onset = k * period_ms + jitter
        if onset + beep_window_ms > phase_end_ms:
            return onsets
        onsets.append(onset)
        k += 1


def resolve_beep(trial: BeepTrial, press_at_ms: float | None,
                 beep_window_ms: int) -> BeepTrial:
    """Resolve a pending probe: an in-window press is a hit, anything else a miss.

    `press_at_ms` is on the same clock as `trial.onset_ms`.  Presses outside
    the window never count as late hits; the caller logs them separately.
    """
    if trial.outcome is not BeepOutcome.PENDING:
        raise AlreadyResolved(f"trial at {trial.onset_ms} already {trial.outcome.value}")
    if press_at_ms is not None:
        response = press_at_ms - trial.onset_ms
        if 0 <= response <= beep_window_ms:
            return replace(trial, response_ms=response, outcome=BeepOutcome.HIT)
    return replace(trial, outcome=BeepOutcome.MISS)
