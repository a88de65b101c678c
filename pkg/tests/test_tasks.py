import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogload.rng import (
    STREAM_ARITHMETIC,
    STREAM_BEEPS,
    STREAM_PARTICIPANT,
    STREAM_SENSORS,
    stream_rng,
)
from cogload.tasks import (
    AlreadyResolved,
    ArithmeticProblem,
    BeepOutcome,
    BeepTrial,
    Difficulty,
    EmptyEntry,
    LINE_FALL_PER_S,
    LINE_RISE_PER_S,
    LineState,
    check_answer,
    entry_append,
    gen_arithmetic,
    line_step,
    make_line_state,
    resolve_beep,
    schedule_beeps,
)

# ---------------------------------------------------------------- rng streams


def test_streams_are_independent():
    base = stream_rng(99, STREAM_ARITHMETIC)
    first = base.integers(0, 2**32)
    for stream in (STREAM_BEEPS, STREAM_SENSORS, STREAM_PARTICIPANT):
        assert stream_rng(99, stream).integers(0, 2**32) != first


def test_stream_rng_rejects_bad_seed():
    with pytest.raises(ValueError):
        stream_rng(-1, STREAM_ARITHMETIC)
    with pytest.raises(ValueError):
        stream_rng(2**64, STREAM_ARITHMETIC)


# ---------------------------------------------------------------- arithmetic


def test_first_two_digit_draw_seed_42_is_frozen():
    problem = gen_arithmetic(Difficulty.TWO_DIGIT, stream_rng(42, STREAM_ARITHMETIC))
    assert (problem.a, problem.b, problem.answer) == (16, 52, 68)


def test_first_three_digit_draw_seed_42_is_frozen():
    problem = gen_arithmetic(Difficulty.THREE_DIGIT, stream_rng(42, STREAM_ARITHMETIC))
    assert (problem.a, problem.b, problem.answer) == (167, 520, 687)


def test_answer_is_sum():
    assert ArithmeticProblem(57, 34, Difficulty.TWO_DIGIT).answer == 91
    assert ArithmeticProblem(57, 34, Difficulty.TWO_DIGIT).text == "57 + 34"


@pytest.mark.parametrize("difficulty,lo,hi,crit", [
    # chi-square upper 0.1% points for df = bins - 1, frozen from the
    # reference distribution at authoring time
    (Difficulty.TWO_DIGIT, 10, 99, 135.97756707124026),
    (Difficulty.THREE_DIGIT, 100, 999, 1035.753195112913),
])
def test_operands_in_range_and_uniform(difficulty, lo, hi, crit):
    rng = stream_rng(7, STREAM_ARITHMETIC)
    n = 50_000
    counts = np.zeros(hi - lo + 1)
    for _ in range(n):
        problem = gen_arithmetic(difficulty, rng)
        assert lo <= problem.a <= hi and lo <= problem.b <= hi
        assert problem.answer == problem.a + problem.b
        counts[problem.a - lo] += 1
        counts[problem.b - lo] += 1
    expected = 2 * n / len(counts)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < crit, f"operand distribution not uniform: chi2={chi2}"


# ---------------------------------------------------------------- keypad


def test_entry_append_caps_at_four_digits():
    entry = ""
    for digit in "123456":
        entry = entry_append(entry, digit)
    assert entry == "1234"


def test_entry_append_replaces_bare_zero():
    assert entry_append("0", "7") == "7"
    assert entry_append("", "0") == "0"
    assert entry_append("10", "0") == "100"


def test_entry_append_rejects_non_digit():
    with pytest.raises(ValueError):
        entry_append("1", "x")
    with pytest.raises(ValueError):
        entry_append("1", "12")


def test_check_answer():
    problem = ArithmeticProblem(57, 34, Difficulty.TWO_DIGIT)
    assert check_answer(problem, "91") is True
    assert check_answer(problem, "90") is False
    big = ArithmeticProblem(100, 999, Difficulty.THREE_DIGIT)
    assert check_answer(big, "1099") is True
    with pytest.raises(EmptyEntry):
        check_answer(problem, "")


# ---------------------------------------------------------------- line task


def test_line_step_rises_while_held():
    state = make_line_state()
    assert state.position == 0.5
    state, events = line_step(state, True)
    assert state.position == pytest.approx(0.505)
    assert events == []


def test_line_clamps_at_floor():
    state = LineState(0.003, 0.35, 0.65, inside=False)
    state, _ = line_step(state, False)
    assert state.position == 0.0


def test_line_clamps_at_ceiling():
    state = LineState(0.999, 0.35, 0.65, inside=False)
    state, _ = line_step(state, True)
    assert state.position == 1.0


def test_first_excursion_after_four_falling_steps():
    # 0.36 - k*0.003 drops below 0.35 at k=4
    state = LineState(0.36, 0.35, 0.65, inside=True)
    for step in range(1, 5):
        state, events = line_step(state, False)
        if step < 4:
            assert events == [] and state.inside
        else:
            assert events == ["excursion"] and not state.inside
    assert state.excursions == 1


def test_excursion_counted_on_crossing_not_per_tick():
    state = LineState(0.351, 0.35, 0.65, inside=True)
    total = 0
    for _ in range(50):
        state, events = line_step(state, False)
        total += len(events)
    assert total == 1
    assert state.excursions == 1


def brute_force_line(tape):
    """Independent step-by-step oracle for the line kernel."""
    position, low, high = 0.5, 0.35, 0.65
    inside, excursions = True, 0
    t_in = t_out = 0
    for held in tape:
        position += (LINE_RISE_PER_S if held else -LINE_FALL_PER_S) * 0.02
        position = min(1.0, max(0.0, position))
        now_inside = low <= position <= high
        if inside and not now_inside:
            excursions += 1
        inside = now_inside
        if now_inside:
            t_in += 20
        else:
            t_out += 20
    return position, excursions, t_in, t_out


@settings(max_examples=300, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=400))
def test_line_matches_brute_force_oracle(tape):
    state = make_line_state()
    for held in tape:
        state, _ = line_step(state, held)
    position, excursions, t_in, t_out = brute_force_line(tape)
    assert state.position == pytest.approx(position)
    assert state.excursions == excursions
    assert state.time_inside_ms == t_in
    assert state.time_outside_ms == t_out
    assert state.time_inside_ms + state.time_outside_ms == len(tape) * 20
    assert 0.0 <= state.position <= 1.0


def test_line_state_validates_interval():
    with pytest.raises(ValueError):
        LineState(0.5, 0.7, 0.3, inside=True)


# ---------------------------------------------------------------- beeps


def test_schedule_without_jitter_is_arithmetic_progression():
    rng = stream_rng(1, STREAM_BEEPS)
    onsets = schedule_beeps(60.0, 10.0, 0.0, 2000, rng)
    assert onsets == [10000, 20000, 30000, 40000, 50000]


def test_schedule_seed_42_is_frozen():
    onsets = schedule_beeps(60.0, 10.0, 0.2, 2000, stream_rng(42, STREAM_BEEPS))
    assert onsets == [10813, 18285, 31088, 40841, 48426]


@settings(max_examples=300, deadline=None)
@given(
    duration_s=st.floats(10, 300),
    period_s=st.floats(4, 30),
    jitter=st.floats(0, 0.5, exclude_max=True),
    window_ms=st.integers(100, 3000),
    seed=st.integers(0, 2**32),
)
def test_schedule_bounds(duration_s, period_s, jitter, window_ms, seed):
    period_ms = round(period_s * 1000)
    if window_ms >= period_s * (1 - jitter) * 1000:
        window_ms = max(1, int(period_s * (1 - jitter) * 1000) - 1)
    onsets = schedule_beeps(duration_s, period_s, jitter, window_ms,
                            stream_rng(seed, STREAM_BEEPS))
    phase_end = round(duration_s * 1000)
    for k, onset in enumerate(onsets, start=1):
        assert abs(onset - k * period_ms) <= jitter * period_ms
        assert onset + window_ms <= phase_end
    assert all(b > a for a, b in zip(onsets, onsets[1:]))


def test_adjacent_gap_bound_with_default_jitter():
    # period 10 s, jitter 0.2 -> adjacent onsets differ by 6..14 s
    rng = stream_rng(3, STREAM_BEEPS)
    for _ in range(50):
        onsets = schedule_beeps(120.0, 10.0, 0.2, 2000, rng)
        for a, b in zip(onsets, onsets[1:]):
            assert 6000 <= b - a <= 14000


def test_resolve_hit():
    trial = BeepTrial(10000)
    hit = resolve_beep(trial, 10450, 2000)
    assert hit.outcome is BeepOutcome.HIT
    assert hit.response_ms == 450


def test_resolve_miss_without_press():
    miss = resolve_beep(BeepTrial(10000), None, 2000)
    assert miss.outcome is BeepOutcome.MISS
    assert miss.response_ms is None


def test_resolve_late_press_is_miss():
    late = resolve_beep(BeepTrial(10000), 12500, 2000)
    assert late.outcome is BeepOutcome.MISS


def test_resolve_twice_raises():
    hit = resolve_beep(BeepTrial(10000), 10450, 2000)
    with pytest.raises(AlreadyResolved):
        resolve_beep(hit, 10500, 2000)


def test_window_edge_press_is_hit():
    edge = resolve_beep(BeepTrial(10000), 12000, 2000)
    assert edge.outcome is BeepOutcome.HIT
    assert edge.response_ms == 2000
