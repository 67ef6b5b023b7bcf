"""Numba-compiled string-matching kernels.

These are the hot paths: the greedy longest-common-substring decomposition
behind the character similarity metric, and the sliding-window search used
to locate fuzzy answer spans inside long note bodies. A pure-Python twin
lives in ``pyref.py``; both must produce bit-identical results.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Extra slots beyond the worst-case number of pending sub-intervals.
_STACK_PAD = 8


@njit(cache=True)
def lex_less(a, la, b, lb):
    """Code-point lexicographic a < b (same ordering as Python str <)."""
    n = min(la, lb)
    for i in range(n):
        if a[i] != b[i]:
            return a[i] < b[i]
    return la < lb


@njit(cache=True)
def matched_chars(a, la, b, lb, j2len, stack):
    """Total characters matched by greedy longest-block decomposition.

    Tie-break between equally long blocks: earliest start in ``a``, then
    earliest start in ``b`` (SequenceMatcher semantics, no junk). ``j2len``
    must have at least ``lb`` slots and ``stack`` at least
    ``la + lb + _STACK_PAD`` rows; both are caller-provided so batch
    drivers can reuse them.
    """
    if la == 0 or lb == 0:
        return 0
    total = 0
    sp = 0
    stack[sp, 0] = 0
    stack[sp, 1] = la
    stack[sp, 2] = 0
    stack[sp, 3] = lb
    sp += 1
    while sp > 0:
        sp -= 1
        alo = stack[sp, 0]
        ahi = stack[sp, 1]
        blo = stack[sp, 2]
        bhi = stack[sp, 3]
        besti = alo
        bestj = blo
        bestsize = 0
        for j in range(blo, bhi):
            j2len[j] = 0
        for i in range(alo, ahi):
            # j2len[j] holds, from the previous row, the length of the
            # common run ending at (i-1, j); `prev` carries the value at
            # j-1 so the row can be updated in place.
            prev = 0
            for j in range(blo, bhi):
                cur = j2len[j]
                if a[i] == b[j]:
                    k = prev + 1
                    j2len[j] = k
                    if k > bestsize:
                        besti = i - k + 1
                        bestj = j - k + 1
                        bestsize = k
                else:
                    j2len[j] = 0
                prev = cur
        if bestsize > 0:
            total += bestsize
            if besti > alo and bestj > blo:
                stack[sp, 0] = alo
                stack[sp, 1] = besti
                stack[sp, 2] = blo
                stack[sp, 3] = bestj
                sp += 1
            if besti + bestsize < ahi and bestj + bestsize < bhi:
                stack[sp, 0] = besti + bestsize
                stack[sp, 1] = ahi
                stack[sp, 2] = bestj + bestsize
                stack[sp, 3] = bhi
                sp += 1
    return total


@njit(cache=True)
def ratio_canonical(a, la, b, lb, j2len, stack):
    """Similarity ratio 2M/(la+lb) on the canonically ordered pair.

    The lexicographically smaller string is always placed first so the
    ratio is symmetric even when the greedy decomposition is
    tie-ambiguous.
    """
    if la + lb == 0:
        return 1.0
    if lex_less(b, lb, a, la):
        m = matched_chars(b, lb, a, la, j2len, stack)
    else:
        m = matched_chars(a, la, b, lb, j2len, stack)
    return 2.0 * m / (la + lb)


@njit(cache=True)
def ratio(a, b):
    """Convenience single-pair ratio over int32 code-point arrays."""
    la = a.shape[0]
    lb = b.shape[0]
    j2len = np.zeros(max(la, lb) + 2, dtype=np.int32)
    stack = np.zeros((la + lb + _STACK_PAD, 4), dtype=np.int32)
    return ratio_canonical(a, la, b, lb, j2len, stack)


@njit(cache=True)
def best_window(text_raw, text_m, body_raw, body_m, n_mapped, wmin, wmax, threshold):
    """Best fuzzy window of ``body`` for ``text`` by similarity ratio.

    ``*_raw`` are code-point arrays (used for canonical ordering);
    ``*_m`` are the same strings remapped so text characters are dense
    ids < ``n_mapped`` and other body characters equal ``n_mapped``.
    Windows of length wmin..wmax are scanned left to right; a character
    multiset intersection bound prunes windows that cannot beat the
    current best. Returns (found, start, length, score); ties resolve to
    the earliest start, then the shortest window.
    """
    lt = text_raw.shape[0]
    n = body_raw.shape[0]
    if lt == 0 or n == 0 or wmin > n or wmin < 1:
        return False, 0, 0, 0.0

    cnt_text = np.zeros(n_mapped + 1, dtype=np.int32)
    for p in range(lt):
        cnt_text[text_m[p]] += 1
    cnt_win = np.zeros(n_mapped + 1, dtype=np.int32)

    j2len = np.zeros(n + 2, dtype=np.int32)
    stack = np.zeros((lt + wmax + _STACK_PAD, 4), dtype=np.int32)

    best_r = 0.0
    best_s = -1
    best_w = 0
    inter = 0
    for s in range(0, n - wmin + 1):
        if s == 0:
            for p in range(wmin):
                c = body_m[p]
                if c < n_mapped:
                    cnt_win[c] += 1
                    if cnt_win[c] <= cnt_text[c]:
                        inter += 1
        else:
            c = body_m[s - 1]
            if c < n_mapped:
                if cnt_win[c] <= cnt_text[c]:
                    inter -= 1
                cnt_win[c] -= 1
            c = body_m[s + wmin - 1]
            if c < n_mapped:
                cnt_win[c] += 1
                if cnt_win[c] <= cnt_text[c]:
                    inter += 1
        grown = 0
        for w in range(wmin, wmax + 1):
            if s + w > n:
                break
            if w > wmin:
                c = body_m[s + w - 1]
                grown += 1
                if c < n_mapped:
                    cnt_win[c] += 1
                    if cnt_win[c] <= cnt_text[c]:
                        inter += 1
            bound = 2.0 * inter / (lt + w)
            if best_s >= 0:
                if bound <= best_r:
                    continue
            elif bound < threshold:
                continue
            win_raw = body_raw[s : s + w]
            win_m = body_m[s : s + w]
            if lex_less(win_raw, w, text_raw, lt):
                r = 2.0 * matched_chars(win_m, w, text_m, lt, j2len, stack) / (lt + w)
            else:
                r = 2.0 * matched_chars(text_m, lt, win_m, w, j2len, stack) / (lt + w)
            if r >= threshold and r > best_r:
                best_r = r
                best_s = s
                best_w = w
        # undo the grown tail so the base window can roll to s+1
        for p in range(s + wmin, s + wmin + grown):
            c = body_m[p]
            if c < n_mapped:
                if cnt_win[c] <= cnt_text[c]:
                    inter -= 1
                cnt_win[c] -= 1
    return best_s >= 0, best_s, best_w, best_r
