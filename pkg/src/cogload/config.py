"""Experiment configuration: file format, parsing, validation, rendering.

A configuration is a flat UTF-8 text file (LF or CRLF), one `key = value`
per line; blank lines and lines starting with `#` are ignored.  Unknown
keys are errors.

Keys, in canonical order:

    key               required  default      meaning
    ----------------  --------  -----------  ----------------------------------
    user_id           yes       -            participant code, [A-Za-z0-9_-]+
    user_age          no        (absent)     participant age in years
    scene             yes       -            progressive | dual
    phase_order       no        1,2          execution order of the two phases
    phase_duration_s  yes       -            length of each phase, >= 10
    pause_duration_s  no        60           break length after each phase
    tlx_enabled       no        true         show the six-item workload form
    paas_enabled      no        false        show the two-item 9-point form
    tutorial_enabled  no        false        play the tutorial segment first
    beep_period_s     no        10           base interval between audio probes
    beep_jitter_frac  no        0.2          probe onset jitter, in [0, 0.5)
    beep_window_ms    no        2000         response window after each probe
    rng_seed          yes       -            64-bit unsigned master seed
    sensor_source     no        none         none | simulated | replay:<path>
    output_dir        no        .            where session artifacts are written

Cross-field rules: phase_order must contain each of 1 and 2 exactly once,
and the probe response window must close before the earliest possible next
probe (beep_window_ms < beep_period_s * (1 - beep_jitter_frac) * 1000).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class ConfigError(Exception):
    """Base class for configuration problems."""


class UnknownKey(ConfigError):
    def __init__(self, name: str, line: int):
        self.name, self.line = name, line
        super().__init__(f"unknown key {name!r} on line {line}")


class MissingKey(ConfigError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing mandatory key {name!r}")


class BadValue(ConfigError):
    def __init__(self, name: str, line: int, detail: str = ""):
        self.name, self.line = name, line
        msg = f"bad value for {name!r} on line {line}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class InvariantViolation(ConfigError):
    def __init__(self, description: str):
        self.description = description
        super().__init__(description)


class Scene(str, Enum):
    PROGRESSIVE = "progressive"
    DUAL = "dual"


@dataclass(frozen=True)
class SensorSource:
    """Where physiological frames come from: none, simulated, or a replay file."""

    kind: str  # "none" | "simulated" | "replay"
    path: str | None = None

    NONE = "none"
    SIMULATED = "simulated"
    REPLAY = "replay"

    def __post_init__(self) -> None:
        if self.kind not in (self.NONE, self.SIMULATED, self.REPLAY):
            raise InvariantViolation(f"unknown sensor source kind {self.kind!r}")
        if self.kind == self.REPLAY and not self.path:
            raise InvariantViolation("replay sensor source needs a file path")
        if self.kind != self.REPLAY and self.path is not None:
            raise InvariantViolation(f"sensor source {self.kind!r} takes no path")

    def render(self) -> str:
        return f"replay:{self.path}" if self.kind == self.REPLAY else self.kind

    @classmethod
    def parse(cls, text: str) -> "SensorSource":
        if text in (cls.NONE, cls.SIMULATED):
            return cls(text)
        if text.startswith("replay:"):
            return cls(cls.REPLAY, text[len("replay:"):])
        raise ValueError(f"expected none, simulated or replay:<path>, got {text!r}")


_USER_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")

MANDATORY_KEYS = ("user_id", "scene", "phase_duration_s", "rng_seed")


@dataclass(frozen=True)
class ExperimentConfig:
    user_id: str
    scene: Scene
    phase_duration_s: float
    rng_seed: int
    user_age: int | None = None
    phase_order: tuple[int, int] = (1, 2)
    pause_duration_s: float = 60.0
    tlx_enabled: bool = True
    paas_enabled: bool = False
    tutorial_enabled: bool = False
    beep_period_s: float = 10.0
    beep_jitter_frac: float = 0.2
    beep_window_ms: int = 2000
    sensor_source: SensorSource = field(default_factory=lambda: SensorSource("none"))
    output_dir: str = "."

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase_order", tuple(self.phase_order))
        if not _USER_ID_RE.match(self.user_id):
            raise InvariantViolation(
                f"user_id must match [A-Za-z0-9_-]+, got {self.user_id!r}")
        if self.user_age is not None and not 0 < self.user_age < 150:
            raise InvariantViolation(f"user_age out of range: {self.user_age}")
        if sorted(self.phase_order) != [1, 2]:
            raise InvariantViolation(
                f"phase_order must contain each of 1 and 2 exactly once, got {self.phase_order}")
        if self.phase_duration_s < 10:
            raise InvariantViolation(
                f"phase_duration_s must be at least 10, got {self.phase_duration_s}")
        if self.pause_duration_s <= 0:
            raise InvariantViolation("pause_duration_s must be positive")
        if self.beep_period_s <= 0:
            raise InvariantViolation("beep_period_s must be positive")
        if not 0 <= self.beep_jitter_frac < 0.5:
            raise InvariantViolation(
                f"beep_jitter_frac must lie in [0, 0.5), got {self.beep_jitter_frac}")
        if self.beep_window_ms <= 0:
            raise InvariantViolation("beep_window_ms must be positive")
        earliest_next_probe_ms = self.beep_period_s * (1 - self.beep_jitter_frac) * 1000
        if not self.beep_window_ms < earliest_next_probe_ms:
            raise InvariantViolation(
                "beep_window_ms must close before the earliest next probe: "
                f"{self.beep_window_ms} >= {earliest_next_probe_ms}")
        if not 0 <= self.rng_seed < 2**64:
            raise InvariantViolation("rng_seed must be a 64-bit unsigned integer")
        if not self.output_dir:
            raise InvariantViolation("output_dir must be non-empty")

    @property
    def phase_duration_ms(self) -> int:
        return round(self.phase_duration_s * 1000)

    @property
    def pause_duration_ms(self) -> int:
        return round(self.pause_duration_s * 1000)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_phase_order(text: str) -> tuple[int, ...]:
    return tuple(int(part.strip()) for part in text.split(","))


def _parse_age(text: str) -> int | None:
    return None if text == "" else int(text)


# key -> parser; insertion order is the canonical rendering order.
_FIELD_PARSERS = {
    "user_id": str,
    "user_age": _parse_age,
    "scene": Scene,
    "phase_order": _parse_phase_order,
    "phase_duration_s": float,
    "pause_duration_s": float,
    "tlx_enabled": _parse_bool,
    "paas_enabled": _parse_bool,
    "tutorial_enabled": _parse_bool,
    "beep_period_s": float,
    "beep_jitter_frac": float,
    "beep_window_ms": int,
    "rng_seed": int,
    "sensor_source": SensorSource.parse,
    "output_dir": str,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text into a validated ExperimentConfig.

    Pure: depends only on `text`.  Raises UnknownKey, MissingKey, BadValue,
    or InvariantViolation.
    """
    values: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BadValue(line.split()[0], line_no, "expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_PARSERS:
            raise UnknownKey(key, line_no)
        if key in values:
            raise BadValue(key, line_no, "duplicate key")
        try:
            values[key] = _FIELD_PARSERS[key](value)
        except (ValueError, KeyError) as exc:
            raise BadValue(key, line_no, str(exc)) from exc
    for key in MANDATORY_KEYS:
        if key not in values:
            raise MissingKey(key)
    if values.get("user_age") is None:
        values.pop("user_age", None)
    return ExperimentConfig(**values)  # type: ignore[arg-type]


def _render_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Scene):
        return value.value
    if isinstance(value, SensorSource):
        return value.render()
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def render_config(config: ExperimentConfig) -> str:
    """Render a config in the canonical form; parse(render(c)) == c."""
    lines = []
    for key in _FIELD_PARSERS:
        value = getattr(config, key)
        if key == "user_age" and value is None:
            continue
        lines.append(f"{key} = {_render_value(value)}")
    return "\n".join(lines) + "\n"
