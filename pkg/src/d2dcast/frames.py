"""On-air frame record shared by the engine, interference, and traces."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Frame:
    """One transmission: who sent what, when, and on which resource."""

    origin: str  # "gateway" | "ed" | "interferer"
    origin_id: int
    kind: str  # "downlink" | "d2d" | "noise"
    sf: int
    channel: int
    start_s: float
    duration_s: float
    tx_power_dbm: float
    seq: int | None = None
    batch: int | None = None

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s
