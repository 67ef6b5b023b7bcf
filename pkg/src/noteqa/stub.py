"""Deterministic stub provider for tests and offline runs.

Chat behavior is driven by an optional scripted response queue, then by
the model id and prompt shape; embeddings are unit-norm one-hot vectors
at a seeded hash of the text, so identical strings embed identically and
distinct strings are (almost surely) orthogonal. That makes embedding
metrics exactly reproducible: cosines are 0 or 1.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gateway import ChatRequest, Completion, UpstreamError

EMBED_DIM = 256


@dataclass(frozen=True, slots=True)
class StubReply:
    text: str


@dataclass(frozen=True, slots=True)
class StubFailure:
    status: int = 429
    retryable: bool = True
    message: str = "stubbed upstream failure"


def _extract_context(prompt: str) -> str | None:
    marker = "Context:\n"
    start = prompt.find(marker)
    if start < 0:
        return None
    start += len(marker)
    qpos = prompt.rfind("\nQuestion:")
    if qpos < start:
        return None
    return prompt[start:qpos].strip("\n")


class StubProvider:
    """Deterministic provider; same inputs always produce same outputs."""

    supports_images = True

    def __init__(self, seed: int = 0, script: Sequence[StubReply | StubFailure] | None = None):
        self.seed = seed
        self._script = list(script or [])
        self._lock = threading.Lock()
        self.chat_calls = 0
        self.embed_calls = 0

    def _digest(self, text: str) -> bytes:
        return hashlib.sha256(f"{self.seed}:{text}".encode("utf-8")).digest()

    def chat(self, request: ChatRequest) -> Completion:
        with self._lock:
            self.chat_calls += 1
            entry = self._script.pop(0) if self._script else None
        if entry is not None:
            if isinstance(entry, StubFailure):
                raise UpstreamError(entry.message, status=entry.status, retryable=entry.retryable)
            return Completion(text=entry.text, model_id=request.model_id)

        model = request.model_id
        prompt = request.messages[-1].text
        if model.startswith("fail"):
            raise UpstreamError("stub model always fails", status=429, retryable=True)
        if model.startswith("flaky") and self._digest(prompt)[-1] % 2 == 0:
            # deterministic per-prompt failure: retries of the same prompt
            # keep failing, other prompts succeed
            raise UpstreamError("stub model flaked", status=503, retryable=True)
        if model.startswith("empty"):
            return Completion(text="", model_id=model)

        if '"usability"' in prompt:
            d = self._digest(prompt)
            scores = {
                "usability": 1 + d[0] % 5,
                "efficiency": 1 + d[1] % 5,
                "trust": 1 + d[2] % 5,
                "feedback": "Scores generated by the deterministic stub judge.",
            }
            return Completion(text=json.dumps(scores), model_id=model)
        context = _extract_context(prompt)
        if context is not None:
            return Completion(text=context, model_id=model)
        return Completion(text="stub reply", model_id=model)

    def embed(self, texts: Sequence[str], model: str) -> np.ndarray:
        with self._lock:
            self.embed_calls += 1
        out = np.zeros((len(texts), EMBED_DIM), dtype=np.float64)
        for i, t in enumerate(texts):
            idx = int.from_bytes(self._digest(t)[:8], "big") % EMBED_DIM
            out[i, idx] = 1.0
        return out
