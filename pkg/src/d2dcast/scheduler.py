"""Slot arithmetic for the Class-B broadcast schedule.

Time is a grid of ping slots of duration T_p. A downlink frame occupies a
superslot of G_p slots, is followed by a D2D window of S_D2D superslots of
E_p slots each, and the next downlink frame starts W_p slots after this one
so the gateway stays within its duty cycle. Everything here is a pure
function of the frame index and the parameters; no RNG is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phy import SF_MAX, SF_MIN, PhyParams, airtime


@dataclass(frozen=True)
class SlotPlanParams:
    """Protocol timing knobs."""

    ping_slot_s: float = 0.03  # T_p
    duty_cycle_pct: float = 1.0  # tau
    max_window_superslots: int = 20  # S*
    start_sf: int = 7  # L
    frames_per_sf: int | None = 300  # w; None means the SF never steps
    sf_d2d: int = 10
    fragment_bytes: int = 50  # b

    def __post_init__(self):
        if self.ping_slot_s <= 0:
            raise ValueError("ping_slot_s must be positive")
        if not 0 < self.duty_cycle_pct <= 100:
            raise ValueError("duty_cycle_pct must be in (0, 100]")
        if self.max_window_superslots < 1:
            raise ValueError("max_window_superslots must be >= 1")
        if not SF_MIN <= self.start_sf <= SF_MAX:
            raise ValueError("start_sf must be in [7, 12]")
        if self.frames_per_sf is not None and self.frames_per_sf < 1:
            raise ValueError("frames_per_sf must be >= 1 or None")
        if not SF_MIN <= self.sf_d2d <= SF_MAX:
            raise ValueError("sf_d2d must be in [7, 12]")
        if self.fragment_bytes < 1:
            raise ValueError("fragment_bytes must be >= 1")


def downlink_superslot_len(sf: int, plan: SlotPlanParams, phy: PhyParams) -> int:
    """G_p: ping slots covered by one downlink frame at `sf`."""
    return max(1, math.ceil(airtime(sf, plan.fragment_bytes, phy) / plan.ping_slot_s))


def silent_slots(sf: int, plan: SlotPlanParams, phy: PhyParams) -> int:
    """W_p: slots from the start of a downlink frame to the start of the next."""
    t = airtime(sf, plan.fragment_bytes, phy)
    return math.ceil(100.0 * t / (plan.duty_cycle_pct * plan.ping_slot_s))


def d2d_superslot_len(plan: SlotPlanParams, phy: PhyParams) -> int:
    """E_p: ping slots covered by one D2D frame."""
    return downlink_superslot_len(plan.sf_d2d, plan, phy)


def d2d_window_size(w_p: int, g_p: int, e_p: int, s_star: int) -> int:
    """S_D2D: whole superslots that fit between a frame and the next one.

    Floored so the window never encroaches on the next downlink superslot;
    a non-positive slot budget yields an empty window rather than an error.
    """
    if w_p <= g_p:
        return 0
    return min((w_p - g_p) // e_p, s_star)


def downlink_sf_at(frame_index: int, start_sf: int, frames_per_sf: int | None) -> int:
    """SF of downlink frame `frame_index` under the stepped-SF progression."""
    if frame_index < 0:
        raise ValueError("frame_index must be non-negative")
    if frames_per_sf is None:
        return start_sf
    return min(start_sf + frame_index // frames_per_sf, SF_MAX)


@dataclass(frozen=True)
class DownlinkSlotPlan:
    """Materialized per-frame schedule for one session of up to M frames."""

    params: SlotPlanParams
    sf: np.ndarray  # (M,) int
    g_p: np.ndarray  # (M,) int
    w_p: np.ndarray  # (M,) int
    s_d2d: np.ndarray  # (M,) int
    start_slot: np.ndarray  # (M,) int64, absolute ping-slot index
    e_p: int
    airtime_s: np.ndarray  # (M,) downlink frame durations

    @property
    def n_frames(self) -> int:
        return len(self.sf)

    @property
    def horizon_slots(self) -> int:
        return int(self.start_slot[-1] + self.w_p[-1])

    def frame_start_s(self, n: int) -> float:
        return self.start_slot[n] * self.params.ping_slot_s

    def window_start_slot(self, n: int) -> int:
        return int(self.start_slot[n] + self.g_p[n])

    def write_csv(self, fileobj) -> None:
        fileobj.write("n,sf,G_p,W_p,E_p,S_D2D,start_slot\n")
        for n in range(self.n_frames):
            fileobj.write(
                f"{n},{self.sf[n]},{self.g_p[n]},{self.w_p[n]},"
                f"{self.e_p},{self.s_d2d[n]},{self.start_slot[n]}\n"
            )


def build_slot_plan(
    max_frames: int, plan: SlotPlanParams, phy: PhyParams
) -> DownlinkSlotPlan:
    """Slot table for frames 0..max_frames-1 of one session."""
    if max_frames < 1:
        raise ValueError("max_frames must be >= 1")
    idx = np.arange(max_frames)
    if plan.frames_per_sf is None:
        sf = np.full(max_frames, plan.start_sf, dtype=np.int64)
    else:
        sf = np.minimum(plan.start_sf + idx // plan.frames_per_sf, SF_MAX)
    e_p = d2d_superslot_len(plan, phy)
    g_p = np.empty(max_frames, dtype=np.int64)
    w_p = np.empty(max_frames, dtype=np.int64)
    s_d2d = np.empty(max_frames, dtype=np.int64)
    dur = np.empty(max_frames)
    for s in np.unique(sf):
        s = int(s)
        mask = sf == s
        g = downlink_superslot_len(s, plan, phy)
        w = silent_slots(s, plan, phy)
        g_p[mask] = g
        w_p[mask] = w
        s_d2d[mask] = d2d_window_size(w, g, e_p, plan.max_window_superslots)
        dur[mask] = airtime(s, plan.fragment_bytes, phy)
    start = np.zeros(max_frames, dtype=np.int64)
    np.cumsum(w_p[:-1], out=start[1:])
    return DownlinkSlotPlan(
        params=plan,
        sf=sf,
        g_p=g_p,
        w_p=w_p,
        s_d2d=s_d2d,
        start_slot=start,
        e_p=e_p,
        airtime_s=dur,
    )
