"""Clock offset estimation between a client and the session host.

Classic four-timestamp exchange: the client notes send (t0) and receive
(t3) on its own clock, the host reports receive (t1) and reply (t2) on
its clock.  Offset is estimated as ((t1 - t0) + (t2 - t3)) / 2, which is
exact when the path is symmetric and off by at most half the round trip
otherwise.  Across several probes the minimum-round-trip sample wins,
since queueing delay only ever inflates rtt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class NoSamples(Exception):
    pass


@dataclass(frozen=True)
class ClockSyncSample:
    t0_ms: float        # client send
    t1_ms: float        # host receive
    t2_ms: float        # host reply
    t3_ms: float        # client receive

    def __post_init__(self) -> None:
        if self.t3_ms < self.t0_ms:
            raise ValueError("client receive precedes send")
        if self.t2_ms < self.t1_ms:
            raise ValueError("host reply precedes receive")

    @property
    def offset_ms(self) -> float:
        """Host clock minus client clock."""
        return ((self.t1_ms - self.t0_ms) + (self.t2_ms - self.t3_ms)) / 2.0

    @property
    def rtt_ms(self) -> float:
        """Round trip time excluding host processing."""
        return (self.t3_ms - self.t0_ms) - (self.t2_ms - self.t1_ms)


def clock_offset(samples: Sequence[ClockSyncSample]) -> tuple[float, float]:
    """(offset, rtt) of the lowest-rtt probe in the batch."""
    if not samples:
        raise NoSamples("need at least one probe")
    best = min(samples, key=lambda s: s.rtt_ms)
    return best.offset_ms, best.rtt_ms
