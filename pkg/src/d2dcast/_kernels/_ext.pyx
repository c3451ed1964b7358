# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled reception kernels: power assembly and capture resolution.

Mirrors fallback.py expression by expression so both backends produce
bit-identical outcomes.
"""

import numpy as np

BACKEND_NAME = "cython"


def assemble_powers(double base_dbm, fade_db, pathloss_db, shadow_db):
    cdef double[:, ::1] fade = fade_db
    cdef double[:, ::1] pl = pathloss_db
    cdef double[:, ::1] sh
    cdef Py_ssize_t n_frames = fade.shape[0]
    cdef Py_ssize_t n_rx = fade.shape[1]
    out = np.empty((n_frames, n_rx))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t f, r
    if shadow_db is None:
        for f in range(n_frames):
            for r in range(n_rx):
                o[f, r] = (base_dbm + fade[f, r]) - pl[f, r]
    else:
        sh = shadow_db
        for f in range(n_frames):
            for r in range(n_rx):
                o[f, r] = (base_dbm + fade[f, r]) - pl[f, r] + sh[f, r]
    return out


def resolve_event(powers, double sensitivity_dbm, double co_capture_db,
                  ext_powers, ext_capture_db):
    cdef double[:, ::1] p = powers
    cdef Py_ssize_t n_frames = p.shape[0]
    cdef Py_ssize_t n_rx = p.shape[1]
    out = np.empty((n_frames, n_rx), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef double[:, ::1] ep
    cdef double[::1] exi
    cdef bint has_ext = ext_powers is not None and len(ext_powers) > 0
    cdef Py_ssize_t n_ext = 0
    if has_ext:
        ep = ext_powers
        exi = ext_capture_db
        n_ext = ep.shape[0]
    cdef Py_ssize_t f, r, i, top_idx
    cdef double top, second, threshold, val, others_max
    cdef bint lost
    for r in range(n_rx):
        top = -np.inf
        second = -np.inf
        top_idx = 0
        if n_frames > 1:
            for f in range(n_frames):
                val = p[f, r]
                if val > top:
                    second = top
                    top = val
                    top_idx = f
                elif val > second:
                    second = val
        threshold = -np.inf
        if has_ext:
            for i in range(n_ext):
                val = ep[i, r] + exi[i]
                if val > threshold:
                    threshold = val
        for f in range(n_frames):
            val = p[f, r]
            if val < sensitivity_dbm:
                o[f, r] = 1
                continue
            lost = 0
            if n_frames > 1:
                others_max = second if f == top_idx else top
                if (val - others_max) < co_capture_db:
                    lost = 1
            if not lost and has_ext:
                if val < threshold:
                    lost = 1
            o[f, r] = 2 if lost else 0
    return out
