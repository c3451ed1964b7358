"""External interferer field: Poisson-placed nodes with pure-ALOHA traffic.

Interferer frames are never decoded; they exist only to collide with the
session's frames. The engine consumes them through `InterfererTraffic`,
which materializes the aggregate arrival process lazily in time order so a
run only ever generates traffic up to the last instant it actually needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import Frame
from .phy import SF_MAX, SF_MIN, PhyParams, airtime


@dataclass(frozen=True)
class InterfererField:
    """Density and traffic law of the surrounding uncoordinated network."""

    intensity_per_m2: float = 1e-5
    region_radius_m: float = 2000.0
    frames_per_second: float = 1.0 / 600.0
    payload_min_bytes: int = 1
    payload_max_bytes: int = 20
    n_channels: int = 8
    sf_min: int = SF_MIN
    sf_max: int = SF_MAX

    def __post_init__(self):
        if self.intensity_per_m2 < 0:
            raise ValueError("intensity_per_m2 must be non-negative")
        if self.region_radius_m <= 0:
            raise ValueError("region_radius_m must be positive")
        if self.frames_per_second < 0:
            raise ValueError("frames_per_second must be non-negative")
        if not 1 <= self.payload_min_bytes <= self.payload_max_bytes:
            raise ValueError("payload byte range is invalid")
        if self.n_channels < 1:
            raise ValueError("n_channels must be >= 1")
        if not SF_MIN <= self.sf_min <= self.sf_max <= SF_MAX:
            raise ValueError("sf range must lie within [7, 12]")


def sample_disk(radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform on the disk of `radius` centered at the origin."""
    r = radius * np.sqrt(rng.random(n))
    theta = rng.random(n) * 2.0 * np.pi
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def spawn_interferers(field: InterfererField, rng: np.random.Generator) -> np.ndarray:
    """Interferer positions: Poisson count, uniform over the region disk."""
    mean = field.intensity_per_m2 * math.pi * field.region_radius_m**2
    n = int(rng.poisson(mean)) if mean > 0 else 0
    return sample_disk(field.region_radius_m, n, rng)


def _duration_table(field: InterfererField, phy: PhyParams) -> np.ndarray:
    """Airtime lookup [sf - sf_min, payload - payload_min]."""
    sfs = range(field.sf_min, field.sf_max + 1)
    payloads = range(field.payload_min_bytes, field.payload_max_bytes + 1)
    return np.array([[airtime(sf, b, phy) for b in payloads] for sf in sfs])


def interferer_frames(
    node_id: int,
    position: np.ndarray,
    horizon_s: float,
    field: InterfererField,
    phy: PhyParams,
    rng: np.random.Generator,
) -> list[Frame]:
    """One node's pure-ALOHA frames over [0, horizon_s)."""
    if horizon_s <= 0:
        raise ValueError("horizon_s must be positive")
    frames: list[Frame] = []
    if field.frames_per_second <= 0:
        return frames
    t = rng.exponential(1.0 / field.frames_per_second)
    while t < horizon_s:
        sf = int(rng.integers(field.sf_min, field.sf_max + 1))
        payload = int(rng.integers(field.payload_min_bytes, field.payload_max_bytes + 1))
        channel = int(rng.integers(field.n_channels))
        frames.append(
            Frame(
                origin="interferer",
                origin_id=node_id,
                kind="noise",
                sf=sf,
                channel=channel,
                start_s=t,
                duration_s=airtime(sf, payload, phy),
                tx_power_dbm=phy.tx_power_interferer_dbm,
            )
        )
        t += rng.exponential(1.0 / field.frames_per_second)
    return frames


class InterfererTraffic:
    """Time-ordered aggregate interferer traffic, generated on demand.

    The superposition of the per-node Poisson processes is one Poisson
    process at the summed rate whose arrivals are attributed to nodes
    uniformly at random. Frames are stored as parallel arrays; per-frame
    per-receiver fading draws are memoized so a long frame presents the same
    gain to a receiver however many session frames it overlaps.
    """

    _CHUNK = 4096

    def __init__(
        self,
        field: InterfererField,
        phy: PhyParams,
        positions: np.ndarray,
        arrivals_rng: np.random.Generator,
        fades_rng: np.random.Generator,
        fading_enabled: bool = True,
    ):
        self.field = field
        self.phy = phy
        self.positions = positions
        self.n_nodes = len(positions)
        self.rate = self.n_nodes * field.frames_per_second
        self._rng = arrivals_rng
        self._fading_rng = fades_rng
        self._fading_enabled = fading_enabled
        self._durations = _duration_table(field, phy)
        self.max_duration = float(self._durations.max()) if self._durations.size else 0.0
        self.start = np.empty(0)
        self.duration = np.empty(0)
        self.channel = np.empty(0, dtype=np.int64)
        self.sf = np.empty(0, dtype=np.int64)
        self.node = np.empty(0, dtype=np.int64)
        self._clock = 0.0  # time of the last generated arrival
        self._lo = 0  # frames before this index can no longer overlap anything
        self._fades_db: dict[int, dict[int, float]] = {}

    def _extend(self) -> None:
        rng = self._rng
        gaps = rng.exponential(1.0 / self.rate, self._CHUNK)
        starts = self._clock + np.cumsum(gaps)
        self._clock = float(starts[-1])
        sf = rng.integers(self.field.sf_min, self.field.sf_max + 1, self._CHUNK)
        payload = rng.integers(
            self.field.payload_min_bytes, self.field.payload_max_bytes + 1, self._CHUNK
        )
        channel = rng.integers(self.field.n_channels, size=self._CHUNK)
        node = rng.integers(self.n_nodes, size=self._CHUNK)
        dur = self._durations[sf - self.field.sf_min, payload - self.field.payload_min_bytes]
        self.start = np.concatenate((self.start, starts))
        self.duration = np.concatenate((self.duration, dur))
        self.channel = np.concatenate((self.channel, channel))
        self.sf = np.concatenate((self.sf, sf))
        self.node = np.concatenate((self.node, node))

    def frames_overlapping(self, t0: float, t1: float, channel: int) -> np.ndarray:
        """Indices of `channel` frames whose on-air interval meets [t0, t1).

        Queries must be issued in non-decreasing t0 order; earlier frames are
        pruned as the query window advances.
        """
        if self.rate <= 0:
            return np.empty(0, dtype=np.int64)
        while self._clock < t1:
            self._extend()
        lo = self._lo
        while lo < len(self.start) and self.start[lo] + self.max_duration <= t0:
            self._fades_db.pop(lo, None)
            lo += 1
        self._lo = lo
        hi = int(np.searchsorted(self.start, t1, side="left"))
        if hi <= lo:
            return np.empty(0, dtype=np.int64)
        idx = np.arange(lo, hi)
        mask = (self.channel[idx] == channel) & (
            self.start[idx] + self.duration[idx] > t0
        )
        return idx[mask]

    def fades_db(self, frame_idx: np.ndarray, rx_ids: np.ndarray) -> np.ndarray:
        """Fading gains in dB for each (interferer frame, receiver) pair."""
        if not self._fading_enabled:
            return np.zeros((len(frame_idx), len(rx_ids)))
        out = np.empty((len(frame_idx), len(rx_ids)))
        for row, fi in enumerate(frame_idx):
            memo = self._fades_db.setdefault(int(fi), {})
            missing = [int(r) for r in rx_ids if int(r) not in memo]
            if missing:
                draws = 10.0 * np.log10(
                    self._fading_rng.standard_exponential(len(missing))
                )
                for r, v in zip(missing, draws):
                    memo[r] = float(v)
            out[row] = [memo[int(r)] for r in rx_ids]
        return out
