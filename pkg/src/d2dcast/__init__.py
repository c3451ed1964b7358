"""Simulator of D2D-assisted update broadcast over a LoRaWAN downlink.

A seedable discrete-event model of a single-gateway cell distributing a
rateless-coded update to many Class-B end devices, with device-to-device
relaying of coded fragments, duty-cycled multi-SF downlink scheduling, a
dominant-interferer capture channel, and the fixed-SF / groupless multi-SF /
perfect-schedule-information benchmarks.
"""

from .coding import CodingParams, FragmentLedger
from .engine import RunResult, SimConfig, run_once, run_replications
from .interference import InterfererField
from .metrics import EnergyParams
from .phy import PhyParams
from .scheduler import SlotPlanParams

__version__ = "0.1.0"

__all__ = [
    "CodingParams",
    "EnergyParams",
    "FragmentLedger",
    "InterfererField",
    "PhyParams",
    "RunResult",
    "SimConfig",
    "SlotPlanParams",
    "run_once",
    "run_replications",
    "__version__",
]
