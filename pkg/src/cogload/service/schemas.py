"""Request and response bodies for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..scoring import PaasResponse, TlxResponse
from ..session import INPUT_KINDS, InputEvent


class SessionCreateRequest(BaseModel):
    config_text: str
    # test facility: multiplies session time against the host clock, so a
    # full session can be exercised in seconds without touching the engine
    time_scale: float = Field(default=1.0, gt=0.0, le=1000.0)


class SessionCreated(BaseModel):
    id: str


class TimeRequest(BaseModel):
    t0_ms: float


class TimeReply(BaseModel):
    t0_ms: float
    t1_ms: float
    t2_ms: float


class TlxBody(BaseModel):
    mental: int
    physical: int
    temporal: int
    performance: int
    effort: int
    frustration: int

    def to_response(self) -> TlxResponse:
        return TlxResponse(**self.model_dump())


class PaasBody(BaseModel):
    difficulty: int
    effort: int

    def to_response(self) -> PaasResponse:
        return PaasResponse(**self.model_dump())


class EventBody(BaseModel):
    """One participant action, stamped on the client's clock.

    The server converts client_at_ms + offset_ms to its own clock and
    rejects events that land more than 250 ms from the receive time.
    """

    kind: str
    client_at_ms: float
    offset_ms: float = 0.0
    key: str | None = None
    tlx: TlxBody | None = None
    paas: PaasBody | None = None
    idempotency_key: str | None = None

    def to_input(self, at_ms: float) -> InputEvent:
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")
        return InputEvent(
            at_ms=at_ms,
            kind=self.kind,
            key=self.key,
            tlx=self.tlx.to_response() if self.tlx else None,
            paas=self.paas.to_response() if self.paas else None,
        )


class EventAck(BaseModel):
    accepted: bool
    duplicate: bool = False
    session_ms: float
    emitted: list[str]


class ViewReply(BaseModel):
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
