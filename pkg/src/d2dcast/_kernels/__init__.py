"""Reception-kernel backend selection.

The compiled extension is preferred when it imports; the numpy fallback is
used otherwise. `D2DCAST_BACKEND=python|cython` forces a choice at import
time, and `select_backend` switches at runtime (used by the benchmark and
the parity tests). Both backends are bit-compatible.
"""

from __future__ import annotations

import os

from . import fallback

try:
    from . import _ext
except ImportError:  # extension not built
    _ext = None

_FORCED = os.environ.get("D2DCAST_BACKEND", "auto")
if _FORCED == "cython" and _ext is None:
    raise ImportError(
        "D2DCAST_BACKEND=cython but the compiled extension is not available"
    )

_active = fallback if (_FORCED == "python" or _ext is None) else _ext


def available_backends() -> tuple[str, ...]:
    return ("python", "cython") if _ext is not None else ("python",)


def active_backend() -> str:
    return _active.BACKEND_NAME


def select_backend(name: str) -> None:
    global _active
    if name == "python":
        _active = fallback
    elif name == "cython":
        if _ext is None:
            raise ValueError("compiled extension is not available")
        _active = _ext
    else:
        raise ValueError(f"unknown backend {name!r}")


def assemble_powers(base_dbm, fade_db, pathloss_db, shadow_db):
    return _active.assemble_powers(base_dbm, fade_db, pathloss_db, shadow_db)


def resolve_event(powers, sensitivity_dbm, co_capture_db, ext_powers, ext_capture_db):
    return _active.resolve_event(
        powers, sensitivity_dbm, co_capture_db, ext_powers, ext_capture_db
    )
