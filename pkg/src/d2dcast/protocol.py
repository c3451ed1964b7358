"""Gateway and end-device protocol logic.

Covers the adaptive D2D frame-count rule, the per-ED D2D transmission
schedule, the listening policy (including the perfect-schedule-information
variant and batched delivery), and the gateway stop rule. The state machines
are mutated only by the single-threaded event loop of one run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import CodingParams, FragmentLedger, d2d_sequence, decode_attempt
from .scheduler import DownlinkSlotPlan

SCHEME_D2D = "d2d"
SCHEME_D2D_PSI = "d2d-psi"
SCHEME_GL_MSF = "gl-msf"
FSF_PREFIX = "fsf-"

SCHEMES = (SCHEME_D2D, SCHEME_D2D_PSI, SCHEME_GL_MSF) + tuple(
    f"{FSF_PREFIX}{i}" for i in range(7, 13)
)


def scheme_uses_d2d(scheme: str) -> bool:
    return scheme in (SCHEME_D2D, SCHEME_D2D_PSI)


def scheme_fixed_sf(scheme: str) -> int | None:
    """SF of a fixed-SF benchmark, or None for multi-SF schemes."""
    if scheme.startswith(FSF_PREFIX):
        return int(scheme[len(FSF_PREFIX):])
    return None


def success_ratio(beta: int, scale: float, n_ed: int) -> float:
    """Scaled estimate of the already-updated fraction from beta senders heard.

    May exceed 1 when beta > scale * n_ed; callers clamp via the frame-count
    rule, not here.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if not 0 < scale <= 1:
        raise ValueError("scale must be in (0, 1]")
    if n_ed < 1:
        raise ValueError("n_ed must be >= 1")
    return beta / (scale * n_ed)


def num_d2d_frames(eta: float, n_max: int, n_min: int) -> int:
    """D2D frames an ED commits to at decode time, clamped to [n_min, n_max]."""
    if n_min > n_max:
        raise ValueError("n_min must be <= n_max")
    n = max(math.ceil((1.0 - eta) * n_max), n_min)
    return min(n, n_max)


@dataclass(frozen=True)
class D2dTransmission:
    """One planned D2D frame: which window, which superslot, which fragment."""

    frame_index: int  # downlink frame whose D2D window carries this
    superslot: int
    seq: int
    batch: int


def schedule_d2d(
    ed_index: int,
    decode_frame: int,
    processing_delay: int,
    n_frames: int,
    plan: DownlinkSlotPlan,
    rng: np.random.Generator,
    coding: CodingParams,
    batch: int = 0,
    next_seq_index: int = 0,
) -> tuple[list[D2dTransmission], int]:
    """Plan an ED's D2D frames after it decodes `batch` at frame `decode_frame`.

    Targets consecutive eligible windows starting after downlink frame
    decode_frame + processing_delay, one frame per window, each in a
    uniformly random superslot. Windows of other batches and empty windows
    (S_D2D = 0) are skipped forward; the plan truncates at the session
    horizon. Returns the entries and the ED's advanced sequence counter.
    """
    if processing_delay < 1:
        raise ValueError("processing_delay must be a positive integer")
    if n_frames < 0:
        raise ValueError("n_frames must be non-negative")
    nu = coding.n_batches
    entries: list[D2dTransmission] = []
    m = decode_frame + processing_delay
    j = next_seq_index
    while len(entries) < n_frames and m < plan.n_frames:
        if m % nu != batch or plan.s_d2d[m] == 0:
            m += 1
            continue
        slot = int(rng.integers(plan.s_d2d[m]))
        entries.append(
            D2dTransmission(
                frame_index=m,
                superslot=slot,
                seq=d2d_sequence(ed_index, j, coding),
                batch=batch,
            )
        )
        j += 1
        m += 1
    return entries, j


def d2d_listen_start_frame(batch: int, coding: CodingParams) -> int:
    """First downlink frame whose D2D window can carry batch traffic.

    Nobody can decode a batch before the gateway has sent its fragment count
    for that batch, so earlier windows of that batch are provably silent.
    """
    nu = coding.n_batches
    return (coding.batch_fragments[batch] - 1) * nu + batch


@dataclass(frozen=True)
class DownlinkSlot:
    frame_index: int


@dataclass(frozen=True)
class D2dSlot:
    frame_index: int
    superslot: int
    has_transmission: bool = False


def ed_listen_policy(
    ledger: FragmentLedger,
    slot: DownlinkSlot | D2dSlot,
    scheme: str,
    coding: CodingParams,
) -> bool:
    """Whether a not-yet-finished ED keeps its receiver on for `slot`.

    Fully decoded EDs stop listening entirely; callers short-circuit that
    case. Downlink superslots are always monitored until then. D2D windows
    are monitored only once the gateway could have produced decoders for the
    window's batch, only while that batch is undecoded, and for the PSI
    variant only in superslots that actually carry a transmission.
    """
    if ledger.fully_decoded:
        return False
    if isinstance(slot, DownlinkSlot):
        return True
    if not scheme_uses_d2d(scheme):
        return False
    batch = slot.frame_index % coding.n_batches
    if ledger.decoded[batch]:
        return False
    if slot.frame_index < d2d_listen_start_frame(batch, coding):
        return False
    if scheme == SCHEME_D2D_PSI:
        return slot.has_transmission
    return True


@dataclass
class EdState:
    """One recipient's identity, ledger, and transmission plan."""

    ed_id: int
    x: float
    y: float
    distance_m: float
    ledger: FragmentLedger
    processing_delay: int = 1  # lambda, in downlink superslots
    next_seq_index: int = 0
    pending_tx: list[D2dTransmission] = field(default_factory=list)
    tx_seconds: float = 0.0
    rx_seconds: float = 0.0
    completion_s: float | None = None

    @property
    def decoded(self) -> bool:
        return self.ledger.fully_decoded


@dataclass
class GatewayState:
    """Gateway-side session progress."""

    scheme: str
    max_frames: int
    frames_sent: int = 0
    confirmed_updated: set[int] = field(default_factory=set)


def gateway_step(gw: GatewayState, all_confirmed: bool) -> str:
    """'transmit' the next frame or 'stop' on budget/completion."""
    if gw.frames_sent >= gw.max_frames or all_confirmed:
        return "stop"
    return "transmit"


def on_d2d_frame_received(
    ed: EdState,
    sender: int,
    seq: int,
    batch: int,
    rng: np.random.Generator,
    decode_model: str = "literal",
) -> bool:
    """Apply one successfully captured D2D frame to an ED; True on new decode.

    The sender joins the batch's heard-set before any decode attempt, so the
    triggering sender is part of the beta snapshot used for the frame count.
    """
    ledger = ed.ledger
    if ledger.decoded[batch]:
        raise RuntimeError(
            "D2D frame delivered for an already-decoded batch; the listen "
            "policy must make this unreachable"
        )
    ledger.note_sender(sender, batch)
    if not ledger.add_fragment(seq, batch):
        return False
    l = ledger.counts[batch]
    k_batch = ledger.batch_fragments[batch]
    if l < k_batch:
        return False
    if decode_attempt(l, k_batch, rng, decode_model):
        ledger.mark_decoded(batch)
        return True
    return False
