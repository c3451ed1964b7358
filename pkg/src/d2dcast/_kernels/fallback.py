"""Pure-numpy reception kernels, the fallback when the extension is absent.

Both backends compute the same IEEE-754 expressions in the same order, so a
simulation run is bit-identical whichever one is active.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def assemble_powers(
    base_dbm: float,
    fade_db: np.ndarray,
    pathloss_db: np.ndarray,
    shadow_db: np.ndarray | None,
) -> np.ndarray:
    """Received power matrix (frames x receivers) in dBm.

    base_dbm folds transmit power and the link constant; fade, path loss and
    shadow are per (frame, receiver).
    """
    powers = (base_dbm + fade_db) - pathloss_db
    if shadow_db is not None:
        powers = powers + shadow_db
    return powers


def resolve_event(
    powers: np.ndarray,
    sensitivity_dbm: float,
    co_capture_db: float,
    ext_powers: np.ndarray | None,
    ext_capture_db: np.ndarray | None,
) -> np.ndarray:
    """Outcome codes for F mutually overlapping frames at R receivers.

    powers is (F, R); all F frames share one SF and channel and overlap
    fully, so each pair contends at `co_capture_db`. ext_powers (I, R) holds
    external interferer powers with per-frame thresholds ext_capture_db (I,).
    Codes: 0 received, 1 below sensitivity, 2 lost to collision.
    """
    n_frames, n_rx = powers.shape
    lost = np.zeros((n_frames, n_rx), dtype=bool)
    if n_frames > 1:
        cols = np.arange(n_rx)
        top_idx = np.argmax(powers, axis=0)
        top = powers[top_idx, cols]
        rest = powers.copy()
        rest[top_idx, cols] = -np.inf
        second = rest.max(axis=0)
        others_max = np.where(
            np.arange(n_frames)[:, None] == top_idx[None, :], second, top
        )
        lost |= (powers - others_max) < co_capture_db
    if ext_powers is not None and len(ext_powers):
        threshold = (ext_powers + ext_capture_db[:, None]).max(axis=0)
        lost |= powers < threshold[None, :]
    codes = np.where(powers < sensitivity_dbm, 1, np.where(lost, 2, 0))
    return codes.astype(np.uint8)
