"""Kernel dispatch: numba-compiled hot paths with a pure-Python fallback.

Set NOTEQA_NO_NUMBA=1 to force the fallback (also used automatically when
numba cannot be imported). ``benchmarks/bench_kernels.py`` compares the
two paths.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("NOTEQA_NO_NUMBA", "").strip() in {"1", "true", "yes"}

if not _DISABLED:
    try:
        from . import jit as _jit
    except ImportError:  # pragma: no cover - numba missing entirely
        _jit = None
        _DISABLED = True

JIT_ENABLED = not _DISABLED


def encode(s: str) -> np.ndarray:
    """String -> int32 array of Unicode code points."""
    return np.frombuffer(s.encode("utf-32-le"), dtype="<u4").astype(np.int32)


def _remap(text_arr: np.ndarray, body_arr: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Map text chars to dense ids, body chars not in text to a sentinel."""
    uniq = np.unique(text_arr)
    k = len(uniq)
    text_m = np.searchsorted(uniq, text_arr).astype(np.int32)
    if k == 0:
        return text_m, np.zeros(len(body_arr), dtype=np.int32), 0
    pos = np.searchsorted(uniq, body_arr).clip(0, k - 1)
    body_m = np.where(uniq[pos] == body_arr, pos, k).astype(np.int32)
    return text_m, body_m, k


def similarity_ratio(a: str, b: str) -> float:
    """Greedy longest-common-substring decomposition ratio, symmetric."""
    if JIT_ENABLED:
        return float(_jit.ratio(encode(a), encode(b)))
    from . import pyref

    return pyref.ratio_str(a, b)


def best_fuzzy_window(
    text: str, body: str, wmin: int, wmax: int, threshold: float
) -> tuple[int, int, float] | None:
    """Best-scoring window of body against text, or None below threshold.

    Returns (start, length, score); ties go to the earliest start, then
    the shortest window.
    """
    if JIT_ENABLED:
        text_arr = encode(text)
        body_arr = encode(body)
        text_m, body_m, n_mapped = _remap(text_arr, body_arr)
        found, s, w, r = _jit.best_window(
            text_arr, text_m, body_arr, body_m, n_mapped, wmin, wmax, threshold
        )
    else:
        from . import pyref

        found, s, w, r = pyref.best_window_str(text, body, wmin, wmax, threshold)
    if not found:
        return None
    return int(s), int(w), float(r)
