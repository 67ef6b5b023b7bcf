"""Interactive extractive QA over clinical notes.

Physician questions plus a selected note go through a zero-shot
extractive prompt to an LLM; the reply is aligned back to a verbatim
character span for in-note highlighting. Companion modules reproduce the
metric pipeline and the persona-based usability assessment.
"""

from .alignment import AnswerSpan, align_span
from .gateway import (
    ChatMessage,
    ChatRequest,
    Completion,
    LlmGateway,
    RetryPolicy,
    gateway_from_env,
)
from .metrics import MetricRow, bertscore, exact_similarity, normalized_overlap, word_overlap
from .notes import ClinicalNote, NoteStore, NoteSummary, load_notes
from .qa import HistoryLog, QaAnswer, QaEngine, QaExchange, QaQuery, build_prompt

__all__ = [
    "AnswerSpan",
    "align_span",
    "ChatMessage",
    "ChatRequest",
    "Completion",
    "LlmGateway",
    "RetryPolicy",
    "gateway_from_env",
    "MetricRow",
    "bertscore",
    "exact_similarity",
    "normalized_overlap",
    "word_overlap",
    "ClinicalNote",
    "NoteStore",
    "NoteSummary",
    "load_notes",
    "HistoryLog",
    "QaAnswer",
    "QaEngine",
    "QaExchange",
    "QaQuery",
    "build_prompt",
]
