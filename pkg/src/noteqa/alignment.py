"""Locate a model answer as a character span inside a note body.

Three stages, cheapest first:

1. exact substring (score 1.0)
2. case-insensitive, whitespace-collapsed substring (score 0.99),
   reported in original body coordinates
3. fuzzy sliding window over the body, window length within +/-25% of
   the answer length, maximizing the similarity ratio; accepted at
   ratio >= 0.75

Offsets are Unicode code points throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels

FUZZY_THRESHOLD = 0.75
STAGE2_SCORE = 0.99


@dataclass(frozen=True, slots=True)
class AnswerSpan:
    """Verbatim slice of a note body: body[start:end] == text."""

    text: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span offsets [{self.start}, {self.end})")
        if self.end - self.start != len(self.text):
            raise ValueError("span length does not match text length")


def fold_for_match(text: str) -> str:
    """Stage-2 normal form: lowercase, whitespace runs -> single space."""
    folded, _ = _fold_with_map(text)
    return folded.strip()


def _fold_with_map(body: str) -> tuple[str, list[int]]:
    """Fold the body, keeping a folded-index -> original-index map.

    Whitespace runs collapse to one space mapped to the run's first
    character; multi-character lowercase expansions all map back to the
    original character.
    """
    chars: list[str] = []
    idx: list[int] = []
    prev_space = False
    for i, ch in enumerate(body):
        if ch.isspace():
            if not prev_space:
                chars.append(" ")
                idx.append(i)
                prev_space = True
        else:
            prev_space = False
            for low in ch.lower():
                chars.append(low)
                idx.append(i)
    return "".join(chars), idx


def _window_bounds(text_len: int, body_len: int) -> tuple[int, int]:
    wmin = max(1, (3 * text_len) // 4)
    wmax = min(body_len, (5 * text_len + 3) // 4)
    return wmin, wmax


def align_span(model_text: str, body: str) -> tuple[AnswerSpan, float] | None:
    """Find the answer span for ``model_text`` in ``body``, if any.

    Returns (span, score) or None; span.text is always the exact body
    slice. Ties at equal score resolve to the earliest start offset.
    """
    if not model_text:
        raise ValueError("model_text must be non-empty")

    # stage 1: exact substring
    pos = body.find(model_text)
    if pos >= 0:
        end = pos + len(model_text)
        return AnswerSpan(body[pos:end], pos, end), 1.0

    # stage 2: case/whitespace-folded substring, original coordinates
    folded_body, idx_map = _fold_with_map(body)
    folded_text = fold_for_match(model_text)
    if folded_text:
        fpos = folded_body.find(folded_text)
        if fpos >= 0:
            start = idx_map[fpos]
            end = idx_map[fpos + len(folded_text) - 1] + 1
            return AnswerSpan(body[start:end], start, end), STAGE2_SCORE

    # stage 3: fuzzy window search
    wmin, wmax = _window_bounds(len(model_text), len(body))
    hit = kernels.best_fuzzy_window(model_text, body, wmin, wmax, FUZZY_THRESHOLD)
    if hit is None:
        return None
    start, length, score = hit
    end = start + length
    return AnswerSpan(body[start:end], start, end), score
