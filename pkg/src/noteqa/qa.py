"""Extractive QA engine: prompt construction, answering, suggestions.

The prompt instructs the model to copy a contiguous span verbatim from
the note; the reply is then aligned back to character offsets so the UI
can highlight it. Every round is appended to a JSON Lines history file.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .alignment import AnswerSpan, align_span
from .gateway import ChatMessage, ChatRequest, LlmGateway, RetryPolicy
from .notes import ClinicalNote, NoteStore

SYSTEM_PROMPT = (
    "You are an AI assistant that helps doctors answer clinical questions "
    "based on patient contexts."
)

EXTRACT_INSTRUCTION = (
    "Extract the exact answer span from the provided context that directly "
    "answers the question. The answer must be a contiguous span of text "
    "copied verbatim from the context. Do not generate or infer. Do not "
    "include any explanation."
)

STATIC_SUGGESTIONS = (
    "What is the patient's age?",
    "What medications is the patient taking?",
    "What is the primary diagnosis?",
    "What symptoms are reported?",
)


class NoteNotFoundError(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class QaQuery:
    note_id: str
    question: str

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("question must be non-empty")


@dataclass(frozen=True, slots=True)
class QaAnswer:
    raw_model_text: str
    span: AnswerSpan | None
    verbatim: bool
    alignment_score: float


@dataclass(frozen=True, slots=True)
class QaExchange:
    ts: str
    note_id: str
    question: str
    answer: QaAnswer

    def to_json(self) -> dict:
        a = self.answer
        return {
            "ts": self.ts,
            "note_id": self.note_id,
            "question": self.question,
            "answer": {
                "raw": a.raw_model_text,
                "start": a.span.start if a.span else None,
                "end": a.span.end if a.span else None,
                "verbatim": a.verbatim,
                "score": a.alignment_score,
            },
        }


def build_prompt(question: str, note: ClinicalNote) -> tuple[ChatMessage, ChatMessage]:
    """System + user message pair for one extractive question."""
    if not question.strip():
        raise ValueError("question must be non-empty")
    user_text = (
        f"{EXTRACT_INSTRUCTION}\n\n\nContext:\n{note.body}\n\nQuestion:\n{question}"
    )
    return (
        ChatMessage(role="system", text=SYSTEM_PROMPT),
        ChatMessage(role="user", text=user_text),
    )


class HistoryLog:
    """Append-only JSON Lines log of QA exchanges; writers serialized."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, exchange: QaExchange) -> None:
        line = json.dumps(exchange.to_json(), ensure_ascii=False) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)
                f.flush()

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out


def _strip_code_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        lines = text.splitlines()
        if len(lines) >= 2 and lines[-1].strip().startswith("```"):
            return "\n".join(lines[1:-1]).strip()
    return text


def _parse_suggestions(text: str, n: int) -> list[str] | None:
    try:
        parsed = json.loads(_strip_code_fences(text))
    except (json.JSONDecodeError, ValueError):
        return None
    if not isinstance(parsed, list):
        return None
    items = [s.strip() for s in parsed if isinstance(s, str) and s.strip()]
    if len(items) < n:
        return None
    return items[:n]


class QaEngine:
    """Answers questions about stored notes through the LLM gateway."""

    def __init__(
        self,
        store: NoteStore,
        gateway: LlmGateway,
        history: HistoryLog | None = None,
        retry_policy: RetryPolicy | None = None,
    ):
        self.store = store
        self.gateway = gateway
        self.history = history
        self.retry_policy = retry_policy

    def _note(self, note_id: str) -> ClinicalNote:
        note = self.store.get_note(note_id)
        if note is None:
            raise NoteNotFoundError(note_id)
        return note

    def answer(self, query: QaQuery) -> QaAnswer:
        """One QA round: prompt, complete, align, log.

        verbatim is true only when the reply was found exactly in the
        note (score 1.0); upstream retry exhaustion propagates.
        """
        note = self._note(query.note_id)
        request = ChatRequest(
            model_id=self.gateway.chat_model,
            messages=build_prompt(query.question, note),
        )
        completion = self.gateway.complete(request, policy=self.retry_policy)
        raw = completion.text
        span = None
        score = 0.0
        if raw.strip():
            aligned = align_span(raw, note.body)
            if aligned is not None:
                span, score = aligned
        answer = QaAnswer(
            raw_model_text=raw,
            span=span,
            verbatim=score == 1.0,
            alignment_score=score,
        )
        if self.history is not None:
            self.history.append(
                QaExchange(
                    ts=datetime.now(timezone.utc).isoformat(),
                    note_id=query.note_id,
                    question=query.question,
                    answer=answer,
                )
            )
        return answer

    def suggest_questions(self, note_id: str, n: int = 4) -> list[str]:
        """n note-specific questions; static templates on any failure."""
        if not 1 <= n <= 10:
            raise ValueError("n must be in [1, 10]")
        note = self._note(note_id)
        user_text = (
            f"Read the clinical note below and propose {n} questions a "
            f"physician might ask that can be answered verbatim from the "
            f"note. Respond with only a JSON array of {n} strings.\n\n"
            f"Note:\n{note.body}"
        )
        request = ChatRequest(
            model_id=self.gateway.chat_model,
            messages=(
                ChatMessage(role="system", text=SYSTEM_PROMPT),
                ChatMessage(role="user", text=user_text),
            ),
        )
        try:
            completion = self.gateway.complete(request, policy=self.retry_policy)
        except Exception:
            return list(STATIC_SUGGESTIONS[:n])
        suggestions = _parse_suggestions(completion.text, n)
        if suggestions is None:
            return list(STATIC_SUGGESTIONS[:n])
        return suggestions
