"""Pure-Python twin of the compiled kernels.

Used when NOTEQA_NO_NUMBA=1 (or numba is unavailable). Results must be
bit-identical to ``jit.py``; the similarity ratio leans on
difflib.SequenceMatcher, which implements the same greedy decomposition
with the same tie-break.
"""

from __future__ import annotations

from difflib import SequenceMatcher


def ratio_str(a: str, b: str) -> float:
    """Symmetric similarity ratio on the canonically ordered string pair."""
    if not a and not b:
        return 1.0
    if b < a:
        a, b = b, a
    return SequenceMatcher(None, a, b, autojunk=False).ratio()


def best_window_str(
    text: str, body: str, wmin: int, wmax: int, threshold: float
) -> tuple[bool, int, int, float]:
    """Best fuzzy window of ``body`` for ``text``; see jit.best_window.

    Same scan order, pruning bound, and tie-breaks as the compiled
    kernel, with difflib doing the per-window ratio work.
    """
    lt = len(text)
    n = len(body)
    if lt == 0 or n == 0 or wmin > n or wmin < 1:
        return False, 0, 0, 0.0

    cnt_text: dict[str, int] = {}
    for ch in text:
        cnt_text[ch] = cnt_text.get(ch, 0) + 1
    cnt_win: dict[str, int] = {}
    inter = 0

    def _add(ch: str) -> None:
        nonlocal inter
        limit = cnt_text.get(ch)
        if limit is None:
            return
        cnt_win[ch] = cnt_win.get(ch, 0) + 1
        if cnt_win[ch] <= limit:
            inter += 1

    def _remove(ch: str) -> None:
        nonlocal inter
        limit = cnt_text.get(ch)
        if limit is None:
            return
        if cnt_win[ch] <= limit:
            inter -= 1
        cnt_win[ch] -= 1

    best_r = 0.0
    best_s = -1
    best_w = 0
    for s in range(0, n - wmin + 1):
        if s == 0:
            for p in range(wmin):
                _add(body[p])
        else:
            _remove(body[s - 1])
            _add(body[s + wmin - 1])
        grown = 0
        for w in range(wmin, wmax + 1):
            if s + w > n:
                break
            if w > wmin:
                _add(body[s + w - 1])
                grown += 1
            bound = 2.0 * inter / (lt + w)
            if best_s >= 0:
                if bound <= best_r:
                    continue
            elif bound < threshold:
                continue
            window = body[s : s + w]
            if window < text:
                r = SequenceMatcher(None, window, text, autojunk=False).ratio()
            else:
                r = SequenceMatcher(None, text, window, autojunk=False).ratio()
            if r >= threshold and r > best_r:
                best_r = r
                best_s = s
                best_w = w
        for p in range(s + wmin, s + wmin + grown):
            _remove(body[p])
    return best_s >= 0, best_s, best_w, best_r
