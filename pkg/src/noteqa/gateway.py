"""Single point of contact with LLM services.

Chat completions and embeddings go through one gateway that owns retry
with exponential backoff + jitter, a concurrency bound, and provider
selection (OpenAI-compatible HTTP endpoint, or the deterministic stub
used in tests and offline runs).
"""

from __future__ import annotations

import base64
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

ROLES = ("system", "user", "assistant")

DEFAULT_CHAT_MODEL = "o3-mini"
DEFAULT_EMBED_MODEL = "text-embedding-3-small"
DEFAULT_TEMPERATURE = 0.1
DEFAULT_MAX_OUTPUT_TOKENS = 256
DEFAULT_MAX_CONCURRENCY = 8


class GatewayError(Exception):
    """Base class for gateway failures."""


class UpstreamError(GatewayError):
    """A single upstream call failed."""

    def __init__(self, message: str, status: int | None = None, retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.retryable = retryable


class RetriesExhausted(GatewayError):
    """All attempts failed; carries the last upstream error."""

    def __init__(self, attempts: int, last: UpstreamError):
        super().__init__(f"gave up after {attempts} attempts: {last}")
        self.attempts = attempts
        self.last = last
        self.status = last.status


@dataclass(frozen=True, slots=True)
class ImageAttachment:
    data: bytes
    media_type: str  # image/png or image/jpeg

    def __post_init__(self) -> None:
        if self.media_type not in ("image/png", "image/jpeg"):
            raise ValueError(f"unsupported media type {self.media_type!r}")


@dataclass(frozen=True, slots=True)
class ChatMessage:
    role: str
    text: str = ""
    image: ImageAttachment | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not self.text and self.image is None:
            raise ValueError("message needs text or an image")


@dataclass(frozen=True, slots=True)
class ChatRequest:
    model_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")
        for i, m in enumerate(self.messages):
            if m.role == "system" and i != 0:
                raise ValueError("system message must come first")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True, slots=True)
class RetryPolicy:
    max_attempts: int = 5
    base_delay: float = 1.0
    backoff_factor: float = 2.0
    jitter_fraction: float = 0.1

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.base_delay < 0:
            raise ValueError("base_delay must be >= 0")
        if self.backoff_factor < 1.0:
            raise ValueError("backoff_factor must be >= 1 (delays non-decreasing)")
        if not 0.0 <= self.jitter_fraction <= 1.0:
            raise ValueError("jitter_fraction must be in [0, 1]")

    def delay_before_jitter(self, attempt: int) -> float:
        """Nominal delay after failed attempt ``attempt`` (1-based)."""
        return self.base_delay * self.backoff_factor ** (attempt - 1)


@dataclass(frozen=True, slots=True)
class Completion:
    text: str
    model_id: str
    usage: dict[str, int] = field(default_factory=dict)
    attempts: int = 1


@dataclass(frozen=True, slots=True)
class TokenEmbeddings:
    tokens: tuple[str, ...]
    vectors: np.ndarray
    contextual: bool


class Provider(Protocol):
    supports_images: bool

    def chat(self, request: ChatRequest) -> Completion: ...

    def embed(self, texts: Sequence[str], model: str) -> np.ndarray: ...


class HttpProvider:
    """OpenAI-compatible chat-completions and embeddings endpoints."""

    supports_images = True

    def __init__(self, base_url: str, api_key: str = "", timeout: float = 60.0):
        import httpx

        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
            timeout=timeout,
        )
        self._httpx = httpx

    def _post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload)
        except self._httpx.TimeoutException as e:
            raise UpstreamError(f"timeout calling {path}: {e}", retryable=True) from e
        except self._httpx.TransportError as e:
            raise UpstreamError(f"transport error calling {path}: {e}", retryable=True) from e
        if resp.status_code >= 400:
            retryable = resp.status_code == 429 or resp.status_code >= 500
            raise UpstreamError(
                f"{path} returned {resp.status_code}: {resp.text[:200]}",
                status=resp.status_code,
                retryable=retryable,
            )
        return resp.json()

    @staticmethod
    def _wire_message(m: ChatMessage) -> dict:
        if m.image is None:
            return {"role": m.role, "content": m.text}
        parts: list[dict] = []
        if m.text:
            parts.append({"type": "text", "text": m.text})
        b64 = base64.b64encode(m.image.data).decode("ascii")
        parts.append(
            {
                "type": "image_url",
                "image_url": {"url": f"data:{m.image.media_type};base64,{b64}"},
            }
        )
        return {"role": m.role, "content": parts}

    def chat(self, request: ChatRequest) -> Completion:
        data = self._post(
            "/chat/completions",
            {
                "model": request.model_id,
                "messages": [self._wire_message(m) for m in request.messages],
                "temperature": request.temperature,
                "max_tokens": request.max_output_tokens,
            },
        )
        try:
            text = data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as e:
            raise UpstreamError(f"malformed chat response: {e}", retryable=False) from e
        usage = {k: v for k, v in (data.get("usage") or {}).items() if isinstance(v, int)}
        return Completion(text=text, model_id=request.model_id, usage=usage)

    def embed(self, texts: Sequence[str], model: str) -> np.ndarray:
        data = self._post("/embeddings", {"model": model, "input": list(texts)})
        try:
            rows = sorted(data["data"], key=lambda d: d["index"])
            return np.array([r["embedding"] for r in rows], dtype=np.float64)
        except (KeyError, TypeError) as e:
            raise UpstreamError(f"malformed embeddings response: {e}", retryable=False) from e


class LlmGateway:
    """Retrying, concurrency-bounded facade over a provider."""

    def __init__(
        self,
        provider: Provider,
        chat_model: str = DEFAULT_CHAT_MODEL,
        embed_model: str = DEFAULT_EMBED_MODEL,
        retry_policy: RetryPolicy | None = None,
        max_concurrency: int = DEFAULT_MAX_CONCURRENCY,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.provider = provider
        self.chat_model = chat_model
        self.embed_model = embed_model
        self.retry_policy = retry_policy or RetryPolicy()
        self._sem = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._usage_lock = threading.Lock()
        self.usage = {"completions": 0, "embedding_calls": 0, "retries": 0}

    def _bump(self, key: str, n: int = 1) -> None:
        with self._usage_lock:
            self.usage[key] += n

    def _with_retries(self, fn: Callable[[], object], policy: RetryPolicy):
        last: UpstreamError | None = None
        for attempt in range(1, policy.max_attempts + 1):
            try:
                with self._sem:
                    return fn(), attempt
            except UpstreamError as e:
                if not e.retryable:
                    raise
                last = e
                if attempt < policy.max_attempts:
                    self._bump("retries")
                    jitter = 1.0 + policy.jitter_fraction * (2.0 * self._rng.random() - 1.0)
                    self._sleep(policy.delay_before_jitter(attempt) * jitter)
        assert last is not None
        raise RetriesExhausted(policy.max_attempts, last)

    def complete(self, request: ChatRequest, policy: RetryPolicy | None = None) -> Completion:
        """First successful completion under the retry policy."""
        policy = policy or self.retry_policy
        completion, attempts = self._with_retries(lambda: self.provider.chat(request), policy)
        self._bump("completions")
        return Completion(
            text=completion.text,
            model_id=completion.model_id,
            usage=completion.usage,
            attempts=attempts,
        )

    def _checked_vectors(self, texts: Sequence[str], out: np.ndarray) -> np.ndarray:
        out = np.asarray(out, dtype=np.float64)
        if out.ndim != 2 or out.shape[0] != len(texts):
            raise GatewayError("provider returned a wrong number of embeddings")
        if not np.all(np.isfinite(out)):
            raise GatewayError("provider returned non-finite embedding values")
        return out

    def embed_sentences(self, texts: Sequence[str], policy: RetryPolicy | None = None) -> np.ndarray:
        """One embedding row per input text, order preserved."""
        if not texts:
            raise ValueError("texts must be non-empty")
        policy = policy or self.retry_policy
        vecs, _ = self._with_retries(
            lambda: self.provider.embed(texts, self.embed_model), policy
        )
        self._bump("embedding_calls")
        return self._checked_vectors(texts, vecs)

    def embed_tokens(self, text: str, policy: RetryPolicy | None = None) -> TokenEmbeddings:
        """Whitespace tokens with one embedding per token.

        Hosted embedding APIs do not expose contextual per-token vectors,
        so each token is embedded independently and the result is marked
        contextual=False; metric reports surface this as degradation.
        """
        if not text:
            raise ValueError("text must be non-empty")
        tokens = tuple(text.split())
        if not tokens:
            return TokenEmbeddings(tokens=(), vectors=np.zeros((0, 0)), contextual=False)
        vectors = self.embed_sentences(list(tokens), policy=policy)
        return TokenEmbeddings(tokens=tokens, vectors=vectors, contextual=False)


def gateway_from_env(env: dict[str, str] | None = None) -> LlmGateway:
    """Build a gateway from LLM_* environment variables.

    LLM_BASE_URL selects the provider: ``stub:<seed>`` for the
    deterministic stub, anything else is an OpenAI-compatible base URL.
    LLM_MAX_ATTEMPTS and LLM_BASE_DELAY tune the retry policy.
    """
    env = dict(os.environ if env is None else env)
    base_url = env.get("LLM_BASE_URL", "stub:0")
    if base_url.startswith("stub:"):
        from .stub import StubProvider

        seed_text = base_url[len("stub:") :] or "0"
        provider: Provider = StubProvider(seed=int(seed_text))
    else:
        provider = HttpProvider(base_url, api_key=env.get("LLM_API_KEY", ""))
    policy = RetryPolicy(
        max_attempts=int(env.get("LLM_MAX_ATTEMPTS", "5")),
        base_delay=float(env.get("LLM_BASE_DELAY", "1.0")),
    )
    return LlmGateway(
        provider,
        chat_model=env.get("LLM_CHAT_MODEL", DEFAULT_CHAT_MODEL),
        embed_model=env.get("LLM_EMBED_MODEL", DEFAULT_EMBED_MODEL),
        retry_policy=policy,
        max_concurrency=int(env.get("LLM_MAX_CONCURRENCY", DEFAULT_MAX_CONCURRENCY)),
    )
