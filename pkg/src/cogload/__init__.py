"""Deterministic cognitive-load experiment platform.

Core pieces: a validated experiment config, pure task kernels (sums,
line keeping, auditory probes), a fixed-timestep session engine, mixed
event/sensor CSV telemetry, questionnaire scoring, correlation analysis,
a scripted participant, and an HTTP/WebSocket service for live clients.
"""

from .config import ExperimentConfig, Scene, parse_config, render_config
from .participant import ParticipantModel, play_session
from .runner import SessionRecorder
from .scoring import PaasResponse, TlxResponse, score_tlx, summarize
from .session import InputEvent, Mode, Session, start_session
from .telemetry import read_log, write_log

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "InputEvent",
    "Mode",
    "PaasResponse",
    "ParticipantModel",
    "Scene",
    "Session",
    "SessionRecorder",
    "TlxResponse",
    "parse_config",
    "play_session",
    "read_log",
    "render_config",
    "score_tlx",
    "start_session",
    "summarize",
    "write_log",
    "__version__",
]
