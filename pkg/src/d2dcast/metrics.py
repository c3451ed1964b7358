"""Evaluation metrics: per-device energy and distance-binned aggregates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnergyParams:
    """Transceiver current draw and supply voltage."""

    tx_current_a: float = 0.083  # I_t
    rx_current_a: float = 0.038  # I_r
    battery_volts: float = 3.7  # V_b

    def __post_init__(self):
        if min(self.tx_current_a, self.rx_current_a, self.battery_volts) <= 0:
            raise ValueError("energy parameters must be positive")


def energy_joules(tx_seconds, rx_seconds, params: EnergyParams):
    """Radio energy (I_t*T_t + I_r*T_r) * V_b; sleep energy is excluded.

    Accepts scalars or arrays.
    """
    if np.any(np.asarray(tx_seconds) < 0) or np.any(np.asarray(rx_seconds) < 0):
        raise ValueError("times must be non-negative")
    return (
        params.tx_current_a * tx_seconds + params.rx_current_a * rx_seconds
    ) * params.battery_volts


@dataclass(frozen=True)
class BinStat:
    """Means over every (ED, run) sample whose distance falls in one bin."""

    bin_center_m: float
    n: int
    n_decoded: int
    mean_completion_s: float  # over decoded samples; nan if none
    mean_activity_s: float
    mean_tx_s: float
    mean_rx_s: float
    mean_energy_j: float
    mean_tx_energy_j: float
    mean_rx_energy_j: float


AGGREGATE_COLUMNS = (
    "bin_center_m",
    "mean_completion_s",
    "mean_activity_s",
    "mean_energy_J",
    "n",
    "n_decoded",
    "mean_tx_s",
    "mean_rx_s",
    "mean_tx_energy_J",
    "mean_rx_energy_J",
)


def aggregate(
    results,
    bin_width_m: float,
    energy: EnergyParams,
    radius_m: float | None = None,
) -> list[BinStat]:
    """Distance-binned means over all (ED, run) pairs of a replication set.

    Bins cover [0, radius_m] (the largest observed distance when not given);
    a sample exactly at the outer radius falls into the outermost bin. Empty
    bins are emitted with n = 0 and no means.
    """
    if not results:
        raise ValueError("results must be non-empty")
    if bin_width_m <= 0:
        raise ValueError("bin_width_m must be positive")
    distance = np.concatenate([r.distances for r in results])
    completion = np.concatenate([r.completion_s for r in results])
    decoded = np.concatenate([r.decoded for r in results])
    tx = np.concatenate([r.tx_seconds for r in results])
    rx = np.concatenate([r.rx_seconds for r in results])
    radius = float(distance.max()) if radius_m is None else float(radius_m)
    n_bins = max(1, math.ceil(radius / bin_width_m))
    which = np.minimum((distance // bin_width_m).astype(int), n_bins - 1)
    tx_e = energy.tx_current_a * tx * energy.battery_volts
    rx_e = energy.rx_current_a * rx * energy.battery_volts
    stats = []
    for b in range(n_bins):
        mask = which == b
        n = int(mask.sum())
        center = (b + 0.5) * bin_width_m
        if n == 0:
            stats.append(
                BinStat(center, 0, 0, math.nan, math.nan, math.nan, math.nan,
                        math.nan, math.nan, math.nan)
            )
            continue
        dec = mask & decoded
        n_dec = int(dec.sum())
        mean_completion = float(completion[dec].mean()) if n_dec else math.nan
        stats.append(
            BinStat(
                bin_center_m=center,
                n=n,
                n_decoded=n_dec,
                mean_completion_s=mean_completion,
                mean_activity_s=float((tx[mask] + rx[mask]).mean()),
                mean_tx_s=float(tx[mask].mean()),
                mean_rx_s=float(rx[mask].mean()),
                mean_energy_j=float((tx_e[mask] + rx_e[mask]).mean()),
                mean_tx_energy_j=float(tx_e[mask].mean()),
                mean_rx_energy_j=float(rx_e[mask].mean()),
            )
        )
    return stats


def cell_edge(stats: list[BinStat]) -> BinStat:
    """Outermost non-empty bin."""
    for stat in reversed(stats):
        if stat.n > 0:
            return stat
    raise ValueError("all bins are empty")


def _cell(value: float) -> str:
    return "" if isinstance(value, float) and math.isnan(value) else repr(value)


def write_aggregate_csv(stats: list[BinStat], fileobj) -> None:
    fileobj.write(",".join(AGGREGATE_COLUMNS) + "\n")
    for s in stats:
        row = (
            _cell(s.bin_center_m),
            _cell(s.mean_completion_s),
            _cell(s.mean_activity_s),
            _cell(s.mean_energy_j),
            str(s.n),
            str(s.n_decoded),
            _cell(s.mean_tx_s),
            _cell(s.mean_rx_s),
            _cell(s.mean_tx_energy_j),
            _cell(s.mean_rx_energy_j),
        )
        fileobj.write(",".join(row) + "\n")
