"""Clinical note corpus: load once from JSON, then read-only."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

PREVIEW_CODEPOINTS = 120


class NoteStoreError(Exception):
    """Raised for unloadable note files (missing, malformed, invalid)."""


@dataclass(frozen=True, slots=True)
class ClinicalNote:
    id: str
    title: str
    body: str
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class NoteSummary:
    id: str
    title: str
    body_preview: str


class NoteStore:
    """Immutable corpus of notes addressed by id, in file order."""

    def __init__(self, notes: list[ClinicalNote]):
        self._notes = list(notes)
        self._by_id = {n.id: n for n in self._notes}

    def __len__(self) -> int:
        return len(self._notes)

    def get_note(self, note_id: str) -> ClinicalNote | None:
        return self._by_id.get(note_id)

    def list_notes(self) -> list[NoteSummary]:
        return [
            NoteSummary(n.id, n.title, n.body[:PREVIEW_CODEPOINTS]) for n in self._notes
        ]


def load_notes(path: str | Path) -> NoteStore:
    """Load and validate the note corpus.

    The file must be a UTF-8 JSON array of objects with string ``id``,
    ``title``, ``body`` and an optional string->string ``meta`` map.
    Duplicate ids and empty bodies are rejected with the offending id.
    """
    path = Path(path)
    if not path.exists():
        raise NoteStoreError(f"note file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise NoteStoreError(
            f"malformed JSON in {path} at offset {e.pos}: {e.msg}"
        ) from e
    if not isinstance(raw, list):
        raise NoteStoreError(f"note file {path} must contain a JSON array")

    notes: list[ClinicalNote] = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise NoteStoreError(f"note #{i} is not a JSON object")
        note_id = item.get("id")
        if not isinstance(note_id, str) or not note_id:
            raise NoteStoreError(f"note #{i} has a missing or empty id")
        if note_id in seen:
            raise NoteStoreError(f"duplicate note id {note_id!r}")
        seen.add(note_id)
        title = item.get("title", "")
        body = item.get("body", "")
        if not isinstance(title, str) or not isinstance(body, str):
            raise NoteStoreError(f"note {note_id!r}: title and body must be strings")
        if not body.strip():
            raise NoteStoreError(f"note {note_id!r} has an empty body")
        meta = item.get("meta", {})
        if not isinstance(meta, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
        ):
            raise NoteStoreError(f"note {note_id!r}: meta must map strings to strings")
        notes.append(ClinicalNote(id=note_id, title=title, body=body, meta=dict(meta)))
    return NoteStore(notes)
