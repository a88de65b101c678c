"""Correlation analysis of the load channel against the other measures.

Works purely on session logs: per-phase aggregates (mean cognitive load,
mean probe reaction time, raw workload score, failure count) plus
Pearson and Spearman coefficients between every pair of measures, and a
trial-level pairing of pre-probe cognitive load with reaction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .scoring import SessionNotFinished, phase_intervals, responses_from_events, score_tlx
from .tasks import BeepOutcome, BeepTrial
from .telemetry import EventRecord, Record, SensorFrame, split_log


class LengthMismatch(Exception):
    pass


class DegenerateVariance(Exception):
    pass


@dataclass(frozen=True)
class PairedSamples:
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise LengthMismatch(f"{len(self.xs)} xs vs {len(self.ys)} ys")
        if any(math.isnan(v) for v in self.xs + self.ys):
            raise ValueError("missing values are not allowed in paired samples")


def _validate_pair(xs: Sequence[float], ys: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} xs vs {len(ys)} ys")
    if len(xs) < 2:
        raise LengthMismatch(f"need at least 2 points, got {len(xs)}")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateVariance("zero variance in at least one vector")
    return x, y


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = _validate_pair(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    return float((dx * dy).sum() / math.sqrt((dx * dx).sum() * (dy * dy).sum()))


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties averaged."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation: Pearson over midranks."""
    x, y = _validate_pair(xs, ys)
    return pearson(midranks(x), midranks(y))


def trials_from_events(events: Sequence[EventRecord]) -> list[BeepTrial]:
    """Rebuild resolved probe trials, with onsets on the session clock."""
    trials: dict[int, BeepTrial] = {}
    for record in events:
        if record.name == "beep_onset":
            onset = int(record.get("onset_ms") or 0)
            trials[onset] = BeepTrial(onset)
        elif record.name == "beep_hit":
            onset = int(record.get("onset_ms") or 0)
            trials[onset] = BeepTrial(onset, float(record.get("response_ms") or 0),
                                      BeepOutcome.HIT)
        elif record.name == "beep_miss":
            onset = int(record.get("onset_ms") or 0)
            trials[onset] = BeepTrial(onset, None, BeepOutcome.MISS)
    return [trials[k] for k in sorted(trials)]


def align_cl_to_trials(frames: Sequence[SensorFrame], trials: Sequence[BeepTrial],
                       window_s: float = 5.0) -> PairedSamples:
    """Pair each hit's reaction time with the mean load just before its onset.

    x is the mean cognitive_load over [onset - window, onset]; hits with no
    frames in that window are dropped.  Trial onsets must be on the same
    clock as the frames (see trials_from_events).
    """
    window_ms = round(window_s * 1000)
    xs: list[float] = []
    ys: list[float] = []
    for trial in trials:
        if trial.outcome is not BeepOutcome.HIT:
            continue
        lo = trial.onset_ms - window_ms
        values = [f.cognitive_load for f in frames
                  if lo <= f.timestamp_ms <= trial.onset_ms]
        if not values:
            continue
        xs.append(sum(values) / len(values))
        ys.append(float(trial.response_ms))
    return PairedSamples(tuple(xs), tuple(ys), label="pre_onset_cl_vs_rt")


@dataclass(frozen=True)
class PhaseRow:
    session: str
    phase: int
    mean_cognitive_load: float | None
    mean_rt_ms: float | None
    raw_tlx: float | None
    failures: int


@dataclass(frozen=True)
class MeasurePair:
    x: str
    y: str
    n: int
    pearson_r: float | None
    spearman_rho: float | None


MEASURES = ("mean_cognitive_load", "mean_rt_ms", "raw_tlx", "failures")


def _phase_rows(label: str, records: Sequence[Record]) -> list[PhaseRow]:
    events, frames = split_log(records)
    if not any(r.name == "session_end" for r in events):
        raise SessionNotFinished(f"session {label!r} has no session_end")
    responses = responses_from_events(events)
    rows = []
    for phase, start_ms, end_ms in phase_intervals(events):
        in_phase = lambda r: start_ms <= r.timestamp_ms <= end_ms
        cl = [f.cognitive_load for f in frames if in_phase(f)]
        rts = [float(r.get("response_ms") or 0) for r in events
               if r.name == "beep_hit" and in_phase(r)]
        failures = sum(1 for r in events if r.name == "task_failure" and in_phase(r))
        tlx, _ = responses.get(phase, (None, None))
        rows.append(PhaseRow(
            session=label, phase=phase,
            mean_cognitive_load=sum(cl) / len(cl) if cl else None,
            mean_rt_ms=sum(rts) / len(rts) if rts else None,
            raw_tlx=None if tlx is None else score_tlx(tlx),
            failures=failures,
        ))
    return rows


def _correlate(rows: Sequence[PhaseRow]) -> list[MeasurePair]:
    pairs = []
    for i, mx in enumerate(MEASURES):
        for my in MEASURES[i + 1:]:
            points = [(getattr(r, mx), getattr(r, my)) for r in rows
                      if getattr(r, mx) is not None and getattr(r, my) is not None]
            xs = [float(p[0]) for p in points]
            ys = [float(p[1]) for p in points]
            try:
                r = pearson(xs, ys)
                rho = spearman(xs, ys)
            except (LengthMismatch, DegenerateVariance):
                r = rho = None
            pairs.append(MeasurePair(mx, my, len(points), r, rho))
    return pairs


@dataclass(frozen=True)
class PhaseReport:
    rows: tuple[PhaseRow, ...]
    correlations: tuple[MeasurePair, ...]
    trial_level: PairedSamples
    trial_pearson: float | None

    def to_csv(self) -> str:
        def cell(value: float | None, fmt: str) -> str:
            return "na" if value is None else format(value, fmt)

        lines = ["session,phase,mean_cognitive_load,mean_rt_ms,raw_tlx,failures"]
        for row in self.rows:
            lines.append(",".join([
                row.session, str(row.phase),
                cell(row.mean_cognitive_load, ".4f"),
                cell(row.mean_rt_ms, ".1f"),
                cell(row.raw_tlx, ".1f"),
                str(row.failures),
            ]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        def val(value: float | None) -> str:
            return "na" if value is None else f"{value:.4f}"

        lines = ["phase-level measures", "--------------------"]
        lines.append(f"{'session':<24}{'phase':>6}{'mean_cl':>10}{'mean_rt_ms':>12}"
                     f"{'raw_tlx':>9}{'failures':>10}")
        for row in self.rows:
            lines.append(
                f"{row.session:<24}{row.phase:>6}"
                f"{val(row.mean_cognitive_load):>10}"
                f"{'na' if row.mean_rt_ms is None else f'{row.mean_rt_ms:.1f}':>12}"
                f"{'na' if row.raw_tlx is None else f'{row.raw_tlx:.1f}':>9}"
                f"{row.failures:>10}")
        lines += ["", "phase-level correlations", "------------------------"]
        for pair in self.correlations:
            lines.append(f"{pair.x} ~ {pair.y}: pearson={val(pair.pearson_r)} "
                         f"spearman={val(pair.spearman_rho)} (n={pair.n})")
        lines += ["", "trial-level pre-onset load vs reaction time",
                  "-------------------------------------------"]
        lines.append(f"pairs={len(self.trial_level.xs)} pearson={val(self.trial_pearson)}")
        return "\n".join(lines) + "\n"


def phase_report(session_logs: Mapping[str, Sequence[Record]],
                 window_s: float = 5.0) -> PhaseReport:
    """Aggregate finished sessions into the phase-level validity report."""
    rows: list[PhaseRow] = []
    all_xs: list[float] = []
    all_ys: list[float] = []
    for label in sorted(session_logs):
        records = session_logs[label]
        rows.extend(_phase_rows(label, records))
        events, frames = split_log(records)
        aligned = align_cl_to_trials(frames, trials_from_events(events), window_s)
        all_xs.extend(aligned.xs)
        all_ys.extend(aligned.ys)
    trial_level = PairedSamples(tuple(all_xs), tuple(all_ys), label="pre_onset_cl_vs_rt")
    try:
        trial_r = pearson(trial_level.xs, trial_level.ys)
    except (LengthMismatch, DegenerateVariance):
        trial_r = None
    return PhaseReport(tuple(rows), tuple(_correlate(rows)), trial_level, trial_r)
