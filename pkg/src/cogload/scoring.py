"""Questionnaire scoring and the session summary artifact.

The six-item workload form is scored as the unweighted mean of its
subscales (raw score, no pairwise weighting).  Sliders run 0..100 in
steps of 5.  The performance subscale is stored exactly as answered;
any inversion is left to analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .tasks import BeepOutcome, BeepTrial
from .telemetry import EventRecord, SensorFrame

TLX_SUBSCALES = ("mental", "physical", "temporal", "performance", "effort", "frustration")


class UnresolvedTrial(Exception):
    pass


class SessionNotFinished(Exception):
    pass


@dataclass(frozen=True)
class TlxResponse:
    mental: int
    physical: int
    temporal: int
    performance: int
    effort: int
    frustration: int

    def __post_init__(self) -> None:
        for name in TLX_SUBSCALES:
            value = getattr(self, name)
            if not 0 <= value <= 100 or value % 5 != 0:
                raise ValueError(f"{name} must be in 0..100 on the 5-step grid, got {value}")

    def values(self) -> tuple[int, ...]:
        return tuple(getattr(self, name) for name in TLX_SUBSCALES)


@dataclass(frozen=True)
class PaasResponse:
    difficulty: int
    effort: int

    def __post_init__(self) -> None:
        for name in ("difficulty", "effort"):
            value = getattr(self, name)
            if not 1 <= value <= 9:
                raise ValueError(f"{name} must be in 1..9, got {value}")


def score_tlx(response: TlxResponse) -> float:
    """Raw workload score: arithmetic mean of the six subscales."""
    return sum(response.values()) / 6.0


def mean_reaction_time(trials: Iterable[BeepTrial]) -> float | None:
    """Mean response time over hits only; None when there are no hits."""
    responses = []
    for trial in trials:
        if trial.outcome is BeepOutcome.PENDING:
            raise UnresolvedTrial(f"trial at {trial.onset_ms} still pending")
        if trial.outcome is BeepOutcome.HIT:
            responses.append(trial.response_ms)
    if not responses:
        return None
    return sum(responses) / len(responses)


@dataclass(frozen=True)
class PhaseSummary:
    phase: int
    tlx: TlxResponse | None
    paas: PaasResponse | None
    task_successes: int
    task_failures: int

    @property
    def raw_tlx(self) -> float | None:
        return None if self.tlx is None else score_tlx(self.tlx)


@dataclass(frozen=True)
class SessionSummary:
    user_id: str
    scene: str
    phases: tuple[PhaseSummary, ...]
    hit_count: int
    miss_count: int
    false_alarm_count: int
    mean_secondary_rt_ms: float | None
    mean_cognitive_load: float | None

    def __post_init__(self) -> None:
        if (self.mean_secondary_rt_ms is None) != (self.hit_count == 0):
            raise ValueError("mean_secondary_rt_ms must be absent iff there were no hits")
        if self.mean_cognitive_load is not None and not 0 <= self.mean_cognitive_load <= 1:
            raise ValueError(f"mean_cognitive_load out of [0,1]: {self.mean_cognitive_load}")


def _tlx_from_payload(record: EventRecord) -> TlxResponse:
    return TlxResponse(**{name: int(record.get(name) or 0) for name in TLX_SUBSCALES})


def responses_from_events(events: Sequence[EventRecord]
                          ) -> dict[int, tuple[TlxResponse | None, PaasResponse | None]]:
    """Recover per-phase questionnaire answers from submitted-form events."""
    out: dict[int, tuple[TlxResponse | None, PaasResponse | None]] = {}
    for record in events:
        if record.name not in ("tlx_submitted", "paas_submitted"):
            continue
        phase = int(record.get("phase") or 0)
        tlx, paas = out.get(phase, (None, None))
        if record.name == "tlx_submitted":
            tlx = _tlx_from_payload(record)
        else:
            paas = PaasResponse(difficulty=int(record.get("difficulty") or 0),
                                effort=int(record.get("effort") or 0))
        out[phase] = (tlx, paas)
    return out


def phase_intervals(events: Sequence[EventRecord]) -> list[tuple[int, int, int]]:
    """(phase, start_ms, end_ms) for each executed phase, in execution order."""
    intervals = []
    start: tuple[int, int] | None = None
    for record in events:
        if record.name == "phase_start":
            start = (int(record.get("phase") or 0), record.timestamp_ms)
        elif record.name == "phase_end" and start is not None:
            intervals.append((start[0], start[1], record.timestamp_ms))
            start = None
    return intervals


def summarize(events: Sequence[EventRecord], frames: Sequence[SensorFrame],
              responses: Mapping[int, tuple[TlxResponse | None, PaasResponse | None]] | None = None,
              ) -> SessionSummary:
    """Aggregate one finished session's log into its summary.

    The cognitive-load mean covers frames inside phase intervals only;
    breaks and the tutorial are excluded.
    """
    if not any(r.name == "session_end" for r in events):
        raise SessionNotFinished("no session_end in event log")
    if responses is None:
        responses = responses_from_events(events)

    start = next(r for r in events if r.name == "session_start")
    user_id = start.get("user_id") or ""
    scene = start.get("scene") or ""

    intervals = phase_intervals(events)
    phases = []
    for phase, start_ms, end_ms in intervals:
        successes = failures = 0
        for record in events:
            if start_ms <= record.timestamp_ms <= end_ms:
                if record.name == "task_success":
                    successes += 1
                elif record.name == "task_failure":
                    failures += 1
        tlx, paas = responses.get(phase, (None, None))
        phases.append(PhaseSummary(phase, tlx, paas, successes, failures))

    hits = [record for record in events if record.name == "beep_hit"]
    misses = sum(1 for record in events if record.name == "beep_miss")
    false_alarms = sum(1 for record in events if record.name == "false_alarm")
    rts = [float(record.get("response_ms") or 0) for record in hits]
    mean_rt = sum(rts) / len(rts) if rts else None

    in_phase = [f.cognitive_load for f in frames
                if any(s <= f.timestamp_ms <= e for _, s, e in intervals)]
    mean_cl = sum(in_phase) / len(in_phase) if in_phase else None

    return SessionSummary(
        user_id=user_id, scene=scene, phases=tuple(phases),
        hit_count=len(hits), miss_count=misses, false_alarm_count=false_alarms,
        mean_secondary_rt_ms=mean_rt, mean_cognitive_load=mean_cl,
    )


def render_summary(summary: SessionSummary) -> str:
    """The TXT artifact, bit-exact (UTF-8, LF)."""
    lines = [f"user_id: {summary.user_id}", f"scene: {summary.scene}"]
    for phase in summary.phases:
        if phase.tlx is not None:
            answers = " ".join(f"{name}={getattr(phase.tlx, name)}" for name in TLX_SUBSCALES)
            lines.append(f"phase {phase.phase} tlx: {answers} raw={phase.raw_tlx:.1f}")
        lines.append(f"phase {phase.phase} errors: "
                     f"successes={phase.task_successes} failures={phase.task_failures}")
    rt = "na" if summary.mean_secondary_rt_ms is None else f"{summary.mean_secondary_rt_ms:.1f}"
    lines.append(f"secondary_task: hits={summary.hit_count} misses={summary.miss_count} "
                 f"false_alarms={summary.false_alarm_count} avg_response_time_ms={rt}")
    cl = "na" if summary.mean_cognitive_load is None else f"{summary.mean_cognitive_load:.3f}"
    lines.append(f"avg_cognitive_load: {cl}")
    return "\n".join(lines) + "\n"
