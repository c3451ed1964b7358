"""LoRa physical-layer model: frame airtimes, link budget, capture outcomes.

All powers are in dBm, times in seconds, distances in meters. Randomness
(fading draws) enters only through explicitly passed generators, so every
function here is safe to call from any context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

SF_MIN = 7
SF_MAX = 12
SPREADING_FACTORS = tuple(range(SF_MIN, SF_MAX + 1))

#: Receiver sensitivity per SF7..SF12 at 125 kHz (dBm). Typical transceiver
#: datasheet values; fully overridable from the scenario config.
DEFAULT_SENSITIVITY_DBM = (-123.0, -126.0, -129.0, -132.0, -134.5, -137.0)

#: Capture thresholds xi[sf_target - 7][sf_other - 7] in dB: a frame is lost
#: to an overlapping same-channel frame when its power margin falls below the
#: entry. Measured imperfect-orthogonality values (+1 dB co-SF capture,
#: -8..-25 dB cross-SF rejection); fully overridable from the config.
DEFAULT_CAPTURE_DB = (
    (1.0, -8.0, -9.0, -9.0, -9.0, -9.0),
    (-11.0, 1.0, -11.0, -12.0, -13.0, -13.0),
    (-15.0, -13.0, 1.0, -13.0, -14.0, -15.0),
    (-19.0, -18.0, -17.0, 1.0, -17.0, -18.0),
    (-22.0, -22.0, -21.0, -20.0, 1.0, -20.0),
    (-25.0, -25.0, -25.0, -24.0, -23.0, 1.0),
)

#: Default link constant. Calibrated so that with 14 dBm transmit power and
#: path-loss exponent 2.5 the mean received power at 1 km sits at the SF12
#: sensitivity floor, which makes a 1 km cell exactly the regime where low
#: SFs fail at the edge and SF12 is marginal.
DEFAULT_GAMMA0 = 2.5e-8


def default_capture_matrix() -> tuple[tuple[float, ...], ...]:
    """6x6 capture-threshold matrix xi[sf_target-7][sf_other-7] in dB."""
    return DEFAULT_CAPTURE_DB


class FrameOutcome(IntEnum):
    """Per-receiver fate of a frame. Values match the kernel codes."""

    RECEIVED = 0
    LOST_SENSITIVITY = 1
    LOST_COLLISION = 2


@dataclass(frozen=True)
class PhyParams:
    """Radio and propagation parameters shared by every link in a run."""

    preamble_symbols: float = 8.0
    bandwidth_hz: float = 125_000.0
    explicit_header: int = 1  # h
    code_rate: int = 1  # c, 1..4
    ldro: tuple[int, ...] = (0, 0, 0, 0, 1, 1)  # y per SF7..SF12
    pathloss_exponent: float = 2.5  # alpha
    gamma0: float = DEFAULT_GAMMA0
    rayleigh_fading: bool = True  # False pins the fading gain A to 1
    shadow_sigma_db: float = 0.0  # 0 disables shadowing
    sensitivity_dbm: tuple[float, ...] = DEFAULT_SENSITIVITY_DBM
    capture_threshold_db: tuple[tuple[float, ...], ...] = None  # type: ignore[assignment]
    tx_power_gateway_dbm: float = 14.0
    tx_power_ed_dbm: float = 14.0
    tx_power_interferer_dbm: float = 14.0

    def __post_init__(self):
        if self.capture_threshold_db is None:
            object.__setattr__(self, "capture_threshold_db", default_capture_matrix())
        else:
            object.__setattr__(
                self,
                "capture_threshold_db",
                tuple(tuple(float(x) for x in row) for row in self.capture_threshold_db),
            )
        object.__setattr__(self, "ldro", tuple(int(y) for y in self.ldro))
        object.__setattr__(
            self, "sensitivity_dbm", tuple(float(s) for s in self.sensitivity_dbm)
        )
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.pathloss_exponent <= 0:
            raise ValueError("pathloss_exponent must be positive")
        if self.code_rate not in (1, 2, 3, 4):
            raise ValueError("code_rate must be in 1..4")
        if self.explicit_header not in (0, 1):
            raise ValueError("explicit_header must be 0 or 1")
        if len(self.ldro) != 6 or any(y not in (0, 1) for y in self.ldro):
            raise ValueError("ldro must be six 0/1 flags for SF7..SF12")
        if len(self.sensitivity_dbm) != 6:
            raise ValueError("sensitivity_dbm must list SF7..SF12")
        for a, b in zip(self.sensitivity_dbm, self.sensitivity_dbm[1:]):
            if a < b:
                raise ValueError("sensitivity_dbm must not improve with lower SF")
        if len(self.capture_threshold_db) != 6 or any(
            len(row) != 6 for row in self.capture_threshold_db
        ):
            raise ValueError("capture_threshold_db must be a 6x6 matrix")
        if self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")
        if self.shadow_sigma_db < 0:
            raise ValueError("shadow_sigma_db must be non-negative")

    def ldro_flag(self, sf: int) -> int:
        return self.ldro[sf - SF_MIN]

    def sensitivity(self, sf: int) -> float:
        return self.sensitivity_dbm[sf - SF_MIN]

    def capture_db(self, sf_target: int, sf_other: int) -> float:
        return self.capture_threshold_db[sf_target - SF_MIN][sf_other - SF_MIN]

    @property
    def gamma0_db(self) -> float:
        return 10.0 * math.log10(self.gamma0)


@dataclass(frozen=True)
class LinkSample:
    """One realization of a link: distance plus fading/shadowing draws."""

    distance_m: float
    fading_gain: float = 1.0  # A, unit-mean exponential
    shadow_db: float = 0.0  # X, static per ordered node pair

    def __post_init__(self):
        if self.distance_m < 0:
            raise ValueError("distance_m must be non-negative")
        if self.fading_gain < 0:
            raise ValueError("fading_gain must be non-negative")


def _check_sf(sf: int) -> None:
    if not SF_MIN <= sf <= SF_MAX:
        raise ValueError(f"sf must be in [{SF_MIN}, {SF_MAX}], got {sf}")


def airtime(sf: int, payload_bytes: int, phy: PhyParams) -> float:
    """On-air duration in seconds of a frame with `payload_bytes` at `sf`.

    Symbol count is preamble + 4.25 sync + 8 base payload symbols plus the
    ceil payload term; the payload term is clamped at zero for tiny payloads.
    """
    _check_sf(sf)
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be non-negative")
    y = phy.ldro_flag(sf)
    denom = sf - 2 * y
    if denom <= 0:
        raise ValueError(f"sf - 2*ldro must be positive (sf={sf}, ldro={y})")
    numer = 2 * payload_bytes - sf - 5 * phy.explicit_header + 11
    extra = max(-(-numer // denom) * (phy.code_rate + 4), 0)
    symbols = phy.preamble_symbols + 4.25 + 8 + extra
    return symbols * (2.0**sf) / phy.bandwidth_hz


def received_power_dbm(tx_power_dbm: float, link: LinkSample, phy: PhyParams) -> float:
    """Received power over one link realization (dBm)."""
    if link.distance_m <= 0:
        raise ValueError("distance_m must be positive (co-located nodes unsupported)")
    if link.fading_gain == 0.0:
        return float("-inf")
    return (
        tx_power_dbm
        + phy.gamma0_db
        + 10.0 * math.log10(link.fading_gain)
        - 10.0 * phy.pathloss_exponent * math.log10(link.distance_m)
        + link.shadow_db
    )


def sample_fading(rng: np.random.Generator, size=None):
    """Unit-mean exponential fading gain draws."""
    return rng.standard_exponential(size)


def capture_outcome(
    target: tuple[float, int],
    overlapping: list[tuple[float, int, int]],
    target_channel: int,
    phy: PhyParams,
) -> FrameOutcome:
    """Fate of a frame under the dominant-interferer model.

    `target` is (received power dBm, sf); `overlapping` lists
    (received power dBm, sf, channel) of every frame whose on-air interval
    intersects the target's. Frames on other channels never cause loss.
    """
    power, sf = target
    _check_sf(sf)
    if power < phy.sensitivity(sf):
        return FrameOutcome.LOST_SENSITIVITY
    for other_power, other_sf, channel in overlapping:
        _check_sf(other_sf)
        if channel != target_channel:
            continue
        if power - other_power < phy.capture_db(sf, other_sf):
            return FrameOutcome.LOST_COLLISION
    return FrameOutcome.RECEIVED
