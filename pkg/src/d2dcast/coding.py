"""Fragment bookkeeping: sequence allocation, decode model, batches.

The rateless code itself is abstracted: every transmitted coded fragment
carries a globally unique sequence number, and decodability after l distinct
fragments is a Bernoulli draw with the published failure probabilities
(1 for l < k, 0.85 at l = k, 0.567 beyond). Linear-dependence effects are
captured by that model, not by simulating XOR algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DECODE_FAIL_AT_K = 0.85
DECODE_FAIL_BEYOND_K = 0.567

DECODE_MODELS = ("literal", "exponential-tail")


@dataclass(frozen=True)
class CodingParams:
    """Update sizing, sequence-number plan, and D2D transmit budgets."""

    update_bytes: int = 10_000  # 10 kB -> 200 fragments of 50 B
    fragment_bytes: int = 50  # b
    max_gateway_frames: int = 10000  # M
    max_sequence: int = 65536  # M0
    d2d_frames_max: int = 25  # N_D2D^max, also the per-ED sequence block width
    d2d_frames_min: int = 10  # N_D2D^min
    success_scale: float = 0.25  # c
    n_batches: int = 1  # nu
    batch_frames_max: int = 5  # per-batch cap when nu > 1
    batch_frames_min: int = 2
    decode_model: str = "literal"

    def __post_init__(self):
        if self.update_bytes < 1 or self.fragment_bytes < 1:
            raise ValueError("update_bytes and fragment_bytes must be >= 1")
        if self.max_gateway_frames <= self.k:
            raise ValueError("max_gateway_frames must exceed the fragment count k")
        if self.max_sequence < self.max_gateway_frames:
            raise ValueError("max_sequence must be >= max_gateway_frames")
        if not 0 < self.success_scale <= 1:
            raise ValueError("success_scale must be in (0, 1]")
        if self.d2d_frames_min > self.d2d_frames_max:
            raise ValueError("d2d_frames_min must be <= d2d_frames_max")
        if self.d2d_frames_min < 0:
            raise ValueError("d2d_frames_min must be non-negative")
        if self.n_batches < 1:
            raise ValueError("n_batches must be >= 1")
        if self.n_batches > 1:
            if self.batch_frames_min > self.batch_frames_max:
                raise ValueError("batch_frames_min must be <= batch_frames_max")
            if self.n_batches * self.batch_frames_max > self.d2d_frames_max:
                raise ValueError(
                    "n_batches * batch_frames_max must fit the per-ED "
                    "sequence block (d2d_frames_max)"
                )
            if self.n_batches > self.k:
                raise ValueError("n_batches must not exceed the fragment count k")
            sizes = self.batch_fragments
            if min(sizes) < 1:
                raise ValueError("every batch needs at least one fragment")
        if self.decode_model not in DECODE_MODELS:
            raise ValueError(f"decode_model must be one of {DECODE_MODELS}")

    @property
    def k(self) -> int:
        """Source fragments in the update."""
        return math.ceil(self.update_bytes / self.fragment_bytes)

    @property
    def batch_fragments(self) -> tuple[int, ...]:
        """Fragments per batch; the last batch takes any remainder."""
        k, nu = self.k, self.n_batches
        if nu == 1:
            return (k,)
        if k % nu == 0:
            return (k // nu,) * nu
        head = math.ceil(k / nu)
        return (head,) * (nu - 1) + (k - head * (nu - 1),)

    @property
    def per_batch_limits(self) -> tuple[int, int]:
        """(max, min) D2D frames per decode event for the active batching."""
        if self.n_batches == 1:
            return self.d2d_frames_max, self.d2d_frames_min
        return self.batch_frames_max, self.batch_frames_min


def gateway_sequence(n: int, params: CodingParams) -> int:
    """Sequence number of the gateway's n-th downlink frame (0-based)."""
    if not 0 <= n < params.max_gateway_frames:
        raise ValueError(
            f"gateway frame index {n} outside budget [0, {params.max_gateway_frames})"
        )
    return n


def d2d_sequence(ed_index: int, frame_index: int, params: CodingParams) -> int:
    """Globally unique sequence number of ED `ed_index`'s j-th D2D frame."""
    if ed_index < 0:
        raise ValueError("ed_index must be non-negative")
    if not 0 <= frame_index < params.d2d_frames_max:
        raise ValueError(
            f"frame_index {frame_index} outside [0, {params.d2d_frames_max})"
        )
    seq = params.max_gateway_frames + ed_index * params.d2d_frames_max + frame_index
    if seq >= params.max_sequence:
        raise ValueError(
            f"sequence {seq} exceeds the representable maximum {params.max_sequence}"
        )
    return seq


def max_supported_eds(params: CodingParams) -> int:
    """Recipients the sequence-number plan can accommodate."""
    if params.d2d_frames_max == 0:
        return 0
    return (params.max_sequence - params.max_gateway_frames) // params.d2d_frames_max


def decode_failure_probability(l: int, k_batch: int, model: str = "literal") -> float:
    """Probability that decoding fails after l distinct fragments."""
    if l < k_batch:
        return 1.0
    if model == "exponential-tail":
        return DECODE_FAIL_AT_K * DECODE_FAIL_BEYOND_K ** (l - k_batch)
    return DECODE_FAIL_AT_K if l == k_batch else DECODE_FAIL_BEYOND_K


def decode_attempt(
    l: int, k_batch: int, rng: np.random.Generator, model: str = "literal"
) -> bool:
    """One Bernoulli decode try after the arrival of the l-th fragment.

    Draws are independent across calls; no RNG is consumed while l < k_batch.
    """
    p_fail = decode_failure_probability(l, k_batch, model)
    if p_fail >= 1.0:
        return False
    return rng.random() >= p_fail


def batch_of_downlink_frame(n: int, nu: int) -> int:
    """Batch served by downlink frame n under round-robin cycling."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    return n % nu


class FragmentLedger:
    """Per-device record of distinct fragments and D2D senders heard.

    One instance tracks all batches of one ED. Counts only move on new
    distinct sequence numbers, the decoded flag latches, and senders are
    remembered only until the corresponding batch decodes.
    """

    __slots__ = ("batch_fragments", "counts", "decoded", "senders", "_seqs")

    def __init__(self, batch_fragments: Sequence[int]):
        nb = len(batch_fragments)
        self.batch_fragments = tuple(batch_fragments)
        self.counts = [0] * nb
        self.decoded = [False] * nb
        self.senders = [set() for _ in range(nb)]
        self._seqs = [set() for _ in range(nb)]

    def add_fragment(self, seq: int, batch: int) -> bool:
        """Record a received coded fragment; True if it was new."""
        seqs = self._seqs[batch]
        if seq in seqs:
            return False
        seqs.add(seq)
        self.counts[batch] += 1
        return True

    def note_sender(self, sender: int, batch: int) -> None:
        if not self.decoded[batch]:
            self.senders[batch].add(sender)

    def beta(self, batch: int) -> int:
        return len(self.senders[batch])

    def mark_decoded(self, batch: int) -> None:
        if self.counts[batch] < self.batch_fragments[batch]:
            raise RuntimeError("decode latched with fewer fragments than required")
        self.decoded[batch] = True

    @property
    def fully_decoded(self) -> bool:
        return all(self.decoded)
