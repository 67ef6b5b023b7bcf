"""Span comparison metrics: lexical and embedding-based.

Five measures are produced per (prediction, gold) pair: character
similarity, raw and normalized token overlap, sentence-embedding cosine,
and greedy token-matching F1 (reported as "bertscore-greedy" since no
idf weighting or baseline rescaling is applied).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True, slots=True)
class MetricRow:
    """Per-sample scores, each in [0, 1]."""

    exact_similarity: float
    word_overlap: float
    normalized_overlap: float
    sentence_similarity: float
    bertscore_f1: float
    embedding_degraded: bool = False


@dataclass(frozen=True, slots=True)
class BertScore:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


def exact_similarity(a: str, b: str) -> float:
    """Character-level similarity 2M/(|a|+|b|).

    M counts characters matched by recursive longest-common-substring
    decomposition; the pair is canonically ordered first so the result
    is symmetric. Two empty strings score 1.0.
    """
    return kernels.similarity_ratio(a, b)


def tokenize(text: str) -> set[str]:
    """Distinct whitespace-separated tokens."""
    return set(text.split())


def normalize(text: str) -> str:
    """Lowercase, drop Unicode punctuation, collapse whitespace runs."""
    lowered = text.lower()
    kept = "".join(c for c in lowered if not unicodedata.category(c).startswith("P"))
    return " ".join(kept.split())


def word_overlap(pred: str, gold: str) -> float:
    """Jaccard index over distinct token sets; both empty -> 1.0."""
    p = tokenize(pred)
    g = tokenize(gold)
    if not p and not g:
        return 1.0
    union = p | g
    if not union:
        return 1.0
    return len(p & g) / len(union)


def normalized_overlap(pred: str, gold: str) -> float:
    """Token overlap after normalizing both spans."""
    return word_overlap(normalize(pred), normalize(gold))


def _clamped_cos(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return max(0.0, float(np.dot(u, v) / (nu * nv)))


def sentence_similarity(pred: str, gold: str, embedder) -> float:
    """Cosine of the two sentence embeddings, clamped to [0, 1].

    ``embedder`` maps a list of strings to a (n, d) array. Empty-vs-empty
    scores 1.0 and empty-vs-nonempty 0.0 without calling the embedder.
    """
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    vecs = np.asarray(embedder([pred, gold]), dtype=np.float64)
    return _clamped_cos(vecs[0], vecs[1])


def bertscore(pred: str, gold: str, token_embedder) -> BertScore:
    """Greedy token-matching precision/recall/F1 with clamped cosines.

    ``token_embedder`` maps text to (tokens, (n, d) array). Either side
    tokenizing to nothing is degenerate and scores 0 across the board.
    """
    if not pred.strip() or not gold.strip():
        return BertScore(0.0, 0.0, 0.0, degenerate=True)
    pred_tokens, pred_vecs = token_embedder(pred)
    gold_tokens, gold_vecs = token_embedder(gold)
    if len(pred_tokens) == 0 or len(gold_tokens) == 0:
        return BertScore(0.0, 0.0, 0.0, degenerate=True)
    p = np.asarray(pred_vecs, dtype=np.float64)
    g = np.asarray(gold_vecs, dtype=np.float64)
    p_norm = np.linalg.norm(p, axis=1, keepdims=True)
    g_norm = np.linalg.norm(g, axis=1, keepdims=True)
    p_unit = np.divide(p, p_norm, out=np.zeros_like(p), where=p_norm != 0)
    g_unit = np.divide(g, g_norm, out=np.zeros_like(g), where=g_norm != 0)
    sims = np.clip(p_unit @ g_unit.T, 0.0, None)  # pred x gold
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return BertScore(precision, recall, f1)
