"""Batch model evaluation on SQuAD-v2-format datasets.

Loads a dataset, samples a reproducible subset, runs each model through
the extractive prompt, scores predictions against gold spans with the
five metrics, and renders a comparison table (markdown and CSV).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics
from .gateway import ChatRequest, GatewayError, LlmGateway
from .notes import ClinicalNote
from .qa import build_prompt

REPORT_COLUMNS = (
    "Model",
    "Exact Match",
    "Word Overlap",
    "Norm. Overlap",
    "ST Sim. (%)",
    "BERTScore (%)",
)

GOLD_REPAIR_RADIUS = 32


class EvalHarnessError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class GoldAnswer:
    text: str
    answer_start: int
    repaired: bool = False
    misaligned: bool = False


@dataclass(frozen=True, slots=True)
class EvalSample:
    id: str
    question: str
    context: str
    gold_answers: tuple[GoldAnswer, ...]
    unanswerable: bool = False


@dataclass(frozen=True, slots=True)
class RowResult:
    sample_id: str
    prediction: str
    metrics: metrics.MetricRow


@dataclass(frozen=True, slots=True)
class SampleFailure:
    sample_id: str
    error: str


@dataclass(slots=True)
class EvalRun:
    model_id: str
    rows: list[RowResult] = field(default_factory=list)
    failures: list[SampleFailure] = field(default_factory=list)
    unanswerable_count: int = 0
    elapsed_s: float = 0.0


def _check_gold(context: str, text: str, start: int) -> GoldAnswer:
    """Verify a gold span against its context, repairing nearby drift."""
    if 0 <= start and context[start : start + len(text)] == text:
        return GoldAnswer(text, start)
    search_from = max(0, start - GOLD_REPAIR_RADIUS)
    pos = context.find(text, search_from, start + GOLD_REPAIR_RADIUS + len(text))
    if pos >= 0:
        return GoldAnswer(text, pos, repaired=True)
    return GoldAnswer(text, start, misaligned=True)


def _sample_from_record(rec: dict, where: str) -> EvalSample:
    context = rec.get("context")
    question = rec.get("question")
    sample_id = rec.get("id")
    if not isinstance(sample_id, str) or not sample_id:
        raise EvalHarnessError(f"{where}: missing sample id")
    if not isinstance(context, str) or not context.strip():
        raise EvalHarnessError(f"{where}: sample {sample_id!r} has an empty context")
    if not isinstance(question, str):
        raise EvalHarnessError(f"{where}: sample {sample_id!r} has no question")
    unanswerable = bool(rec.get("is_impossible", False))
    golds = []
    for ans in rec.get("answers", []):
        text = ans.get("text", "")
        start = int(ans.get("answer_start", -1))
        if not text:
            continue
        golds.append(_check_gold(context, text, start))
    if not unanswerable and not golds:
        raise EvalHarnessError(
            f"{where}: answerable sample {sample_id!r} has no gold answers"
        )
    return EvalSample(
        id=sample_id,
        question=question,
        context=context,
        gold_answers=tuple(golds),
        unanswerable=unanswerable,
    )


def load_dataset(path: str | Path) -> list[EvalSample]:
    """Parse SQuAD v2.0 JSON or the flat JSON Lines variant.

    Gold spans are verified against their context; offsets drifted by up
    to 32 characters are repaired, others flagged as misaligned.
    """
    path = Path(path)
    if not path.exists():
        raise EvalHarnessError(f"dataset not found: {path}")
    text = path.read_text(encoding="utf-8")

    samples: list[EvalSample] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict) and "data" in doc:
        for article in doc["data"]:
            for para in article.get("paragraphs", []):
                context = para.get("context", "")
                for qa in para.get("qas", []):
                    rec = dict(qa)
                    rec["context"] = context
                    samples.append(_sample_from_record(rec, str(path)))
    elif doc is None:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise EvalHarnessError(f"{path}:{lineno}: malformed JSON line: {e.msg}") from e
            samples.append(_sample_from_record(rec, f"{path}:{lineno}"))
    else:
        raise EvalHarnessError(f"{path}: neither SQuAD v2.0 JSON nor JSON Lines")

    seen: set[str] = set()
    for s in samples:
        if s.id in seen:
            raise EvalHarnessError(f"{path}: duplicate sample id {s.id!r}")
        seen.add(s.id)
    return samples


def sample_subset(samples: list[EvalSample], n: int, seed: int) -> list[EvalSample]:
    """Uniform sample without replacement, deterministic per seed."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n >= len(samples):
        return list(samples)
    return random.Random(seed).sample(samples, n)


def score_prediction(pred: str, golds: tuple[GoldAnswer, ...], gateway: LlmGateway) -> metrics.MetricRow:
    """Best score over gold answers, independently per metric."""
    degraded = False

    def token_embedder(text: str):
        nonlocal degraded
        te = gateway.embed_tokens(text)
        degraded = degraded or not te.contextual
        return te.tokens, te.vectors

    texts = [g.text for g in golds]
    return metrics.MetricRow(
        exact_similarity=max(metrics.exact_similarity(pred, t) for t in texts),
        word_overlap=max(metrics.word_overlap(pred, t) for t in texts),
        normalized_overlap=max(metrics.normalized_overlap(pred, t) for t in texts),
        sentence_similarity=max(
            metrics.sentence_similarity(pred, t, gateway.embed_sentences) for t in texts
        ),
        bertscore_f1=max(metrics.bertscore(pred, t, token_embedder).f1 for t in texts),
        embedding_degraded=degraded,
    )


def run_eval(
    gateway: LlmGateway,
    model_id: str,
    samples: list[EvalSample],
    concurrency: int = 8,
) -> EvalRun:
    """Evaluate one model over the answerable samples.

    Gateway failures are recorded per sample, never as zero scores;
    unanswerable samples are excluded and counted. Output ordering is a
    deterministic sort by sample id, independent of completion order.
    """
    run = EvalRun(model_id=model_id)
    answerable = [s for s in samples if not s.unanswerable]
    run.unanswerable_count = len(samples) - len(answerable)
    t0 = time.perf_counter()

    def _one(sample: EvalSample):
        note = ClinicalNote(id=sample.id, title="", body=sample.context)
        request = ChatRequest(model_id=model_id, messages=build_prompt(sample.question, note))
        completion = gateway.complete(request)
        row = RowResult(
            sample_id=sample.id,
            prediction=completion.text,
            metrics=score_prediction(completion.text, sample.gold_answers, gateway),
        )
        return row

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        futures = {pool.submit(_one, s): s for s in answerable}
        for fut, sample in futures.items():
            try:
                run.rows.append(fut.result())
            except GatewayError as e:
                run.failures.append(SampleFailure(sample_id=sample.id, error=str(e)))

    run.rows.sort(key=lambda r: r.sample_id)
    run.failures.sort(key=lambda f: f.sample_id)
    run.elapsed_s = time.perf_counter() - t0
    return run


@dataclass(slots=True)
class EvalReport:
    runs: list[EvalRun]
    seed: int | None = None

    def _percent_cells(self, run: EvalRun) -> list[str]:
        n = len(run.rows)
        sums = [0.0] * 5
        for r in run.rows:
            m = r.metrics
            for i, v in enumerate(
                (m.exact_similarity, m.word_overlap, m.normalized_overlap,
                 m.sentence_similarity, m.bertscore_f1)
            ):
                sums[i] += v
        return [f"{100.0 * s / n:.2f}" for s in sums]

    def to_csv(self) -> str:
        lines = [",".join(REPORT_COLUMNS)]
        for run in self.runs:
            lines.append(",".join([run.model_id] + self._percent_cells(run)))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        header = "| " + " | ".join(REPORT_COLUMNS) + " |"
        rule = "|" + "|".join("---" for _ in REPORT_COLUMNS) + "|"
        lines = ["# Model comparison", "", header, rule]
        for run in self.runs:
            lines.append("| " + " | ".join([run.model_id] + self._percent_cells(run)) + " |")
        lines.append("")
        lines.append(
            "BERTScore column is greedy token-matching F1 (\"bertscore-greedy\", "
            "no idf weighting or baseline rescaling)."
        )
        degraded = any(r.metrics.embedding_degraded for run in self.runs for r in run.rows)
        if degraded:
            lines.append(
                "Token embeddings were non-contextual (per-token fallback); "
                "BERTScore figures are degraded accordingly."
            )
        if self.seed is not None:
            lines.append(f"Sampling seed: {self.seed}.")
        for run in self.runs:
            lines.append(
                f"{run.model_id}: {len(run.rows)} scored, "
                f"{len(run.failures)} failed, "
                f"{run.unanswerable_count} unanswerable excluded, "
                f"{run.elapsed_s:.1f}s."
            )
        return "\n".join(lines) + "\n"


def emit_report(runs: list[EvalRun], seed: int | None = None) -> EvalReport:
    """Aggregate per-model runs into the comparison report."""
    if not runs:
        raise EvalHarnessError("no scored samples")
    for run in runs:
        if not run.rows:
            raise EvalHarnessError("no scored samples")
    return EvalReport(runs=list(runs), seed=seed)


def rows_to_jsonl(run: EvalRun) -> str:
    """Serialize one run as typed JSON Lines records."""
    out = [
        json.dumps(
            {
                "type": "meta",
                "model": run.model_id,
                "unanswerable": run.unanswerable_count,
                "elapsed_s": run.elapsed_s,
            },
            ensure_ascii=False,
        )
    ]
    for r in run.rows:
        m = r.metrics
        out.append(
            json.dumps(
                {
                    "type": "row",
                    "model": run.model_id,
                    "sample_id": r.sample_id,
                    "prediction": r.prediction,
                    "metrics": {
                        "exact_similarity": m.exact_similarity,
                        "word_overlap": m.word_overlap,
                        "normalized_overlap": m.normalized_overlap,
                        "sentence_similarity": m.sentence_similarity,
                        "bertscore_f1": m.bertscore_f1,
                        "embedding_degraded": m.embedding_degraded,
                    },
                },
                ensure_ascii=False,
            )
        )
    for f in run.failures:
        out.append(
            json.dumps(
                {
                    "type": "failure",
                    "model": run.model_id,
                    "sample_id": f.sample_id,
                    "error": f.error,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(out) + "\n"


def runs_from_jsonl(text: str) -> list[EvalRun]:
    """Rebuild runs from rows JSONL, preserving first-seen model order."""
    runs: dict[str, EvalRun] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        model = rec.get("model")
        if not model:
            raise EvalHarnessError(f"rows line {lineno}: missing model")
        run = runs.setdefault(model, EvalRun(model_id=model))
        kind = rec.get("type")
        if kind == "meta":
            run.unanswerable_count = int(rec.get("unanswerable", 0))
            run.elapsed_s = float(rec.get("elapsed_s", 0.0))
        elif kind == "row":
            m = rec["metrics"]
            run.rows.append(
                RowResult(
                    sample_id=rec["sample_id"],
                    prediction=rec.get("prediction", ""),
                    metrics=metrics.MetricRow(
                        exact_similarity=m["exact_similarity"],
                        word_overlap=m["word_overlap"],
                        normalized_overlap=m["normalized_overlap"],
                        sentence_similarity=m["sentence_similarity"],
                        bertscore_f1=m["bertscore_f1"],
                        embedding_degraded=bool(m.get("embedding_degraded", False)),
                    ),
                )
            )
        elif kind == "failure":
            run.failures.append(
                SampleFailure(sample_id=rec["sample_id"], error=rec.get("error", ""))
            )
        else:
            raise EvalHarnessError(f"rows line {lineno}: unknown record type {kind!r}")
    for run in runs.values():
        run.rows.sort(key=lambda r: r.sample_id)
        run.failures.sort(key=lambda f: f.sample_id)
    return list(runs.values())


def samples_to_jsonl(samples: list[EvalSample]) -> str:
    """Serialize samples in the flat dataset format (load_dataset reads it)."""
    lines = []
    for s in samples:
        lines.append(
            json.dumps(
                {
                    "id": s.id,
                    "question": s.question,
                    "context": s.context,
                    "answers": [
                        {"text": g.text, "answer_start": g.answer_start}
                        for g in s.gold_answers
                    ],
                    "is_impossible": s.unanswerable,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
