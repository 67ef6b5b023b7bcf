"""Simulated-clinician usability evaluation.

Seven built-in personas (five physicians, two nurses) each work through
a scripted scenario against the QA engine; an LLM judge embodies the
persona and returns structured 1-5 scores on usability, efficiency, and
trust, which are aggregated into a short report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .gateway import ChatMessage, ChatRequest, ImageAttachment, LlmGateway, RetryPolicy
from .notes import NoteStore
from .qa import QaEngine, QaExchange, QaQuery

SCORE_FIELDS = ("usability", "efficiency", "trust")

JUDGE_SYSTEM_PROMPT = (
    "You are role-playing a clinician evaluating a question answering tool "
    "for clinical notes. Stay fully in character for the persona you are "
    "given and judge only from that persona's point of view."
)

_JUDGE_FORMAT = (
    'Respond with only a JSON object of the form {"usability": 1-5, '
    '"efficiency": 1-5, "trust": 1-5, "feedback": "<one or two sentences>"}. '
    "Scores are integers from 1 (poor) to 5 (excellent)."
)

_JUDGE_REPROMPT = (
    "Your previous reply was not a valid JSON object with integer scores "
    "from 1 to 5. " + _JUDGE_FORMAT
)


class JudgeOutputError(Exception):
    """Judge reply stayed malformed or out of range after the re-prompt."""


@dataclass(frozen=True, slots=True)
class Persona:
    name: str
    role: str  # physician | nurse
    department: str
    age_band: str  # 30s | 40s | 50s
    experience: str  # junior | mid | senior
    tech_comfort: str  # low | medium | high
    behavior_notes: str


_BUILTIN = (
    Persona(
        name="Dr. Amara Okafor",
        role="physician",
        department="internal medicine",
        age_band="50s",
        experience="senior",
        tech_comfort="low",
        behavior_notes=(
            "Values simplicity and speed; distrusts tools that hide where an "
            "answer came from; asks short, direct questions."
        ),
    ),
    Persona(
        name="Dr. Miguel Santos",
        role="physician",
        department="emergency",
        age_band="40s",
        experience="mid",
        tech_comfort="medium",
        behavior_notes=(
            "Works under time pressure; wants medication doses and vitals in "
            "seconds; abandons tools that need more than one try."
        ),
    ),
    Persona(
        name="Dr. Lena Fischer",
        role="physician",
        department="psychiatry",
        age_band="40s",
        experience="mid",
        tech_comfort="high",
        behavior_notes=(
            "Reads long narrative notes; probes nuanced history questions and "
            "checks whether highlighted context preserves meaning."
        ),
    ),
    Persona(
        name="Dr. Priya Raghavan",
        role="physician",
        department="intensive care",
        age_band="50s",
        experience="senior",
        tech_comfort="medium",
        behavior_notes=(
            "Cross-checks every extracted value against the note before "
            "trusting it; cares about interpretability over speed."
        ),
    ),
    Persona(
        name="Dr. Tom Whitfield",
        role="physician",
        department="internal medicine",
        age_band="30s",
        experience="junior",
        tech_comfort="high",
        behavior_notes=(
            "Comfortable with AI tools; wants explanations and follow-up "
            "suggestions; tolerant of rough edges if the answers are right."
        ),
    ),
    Persona(
        name="Nurse Gloria Mendez",
        role="nurse",
        department="emergency",
        age_band="50s",
        experience="senior",
        tech_comfort="low",
        behavior_notes=(
            "Triage-focused; asks about allergies, current medications, and "
            "alerts; prefers big obvious highlights over chat text."
        ),
    ),
    Persona(
        name="Nurse Jae-won Park",
        role="nurse",
        department="intensive care",
        age_band="30s",
        experience="junior",
        tech_comfort="high",
        behavior_notes=(
            "Monitors many patients; uses suggested questions heavily; wants "
            "the tool to flag when an answer is not found verbatim."
        ),
    ),
)


def builtin_personas() -> tuple[Persona, ...]:
    """The built-in registry: 7 personas, 5 physicians and 2 nurses."""
    return _BUILTIN


@dataclass(frozen=True, slots=True)
class Scenario:
    id: str
    note_id: str
    task_description: str
    questions: tuple[str, ...]
    expected_information: tuple[str, ...] = ()


def load_scenarios(path: str | Path) -> list[Scenario]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError("scenario file must be a JSON array")
    out = []
    for i, item in enumerate(raw):
        try:
            out.append(
                Scenario(
                    id=str(item["id"]),
                    note_id=str(item["note_id"]),
                    task_description=str(item["task_description"]),
                    questions=tuple(str(q) for q in item["questions"]),
                    expected_information=tuple(
                        str(e) for e in item.get("expected_information", [])
                    ),
                )
            )
        except KeyError as e:
            raise ValueError(f"scenario #{i} is missing field {e}") from e
    return out


@dataclass(frozen=True, slots=True)
class Assessment:
    persona: str
    scenario_id: str
    usability: int
    efficiency: int
    trust: int
    feedback_text: str

    def __post_init__(self) -> None:
        for name in SCORE_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, int) or not 1 <= v <= 5:
                raise ValueError(f"{name} must be an integer in 1..5, got {v!r}")


def _persona_card(p: Persona) -> str:
    return (
        f"Persona: {p.name}\n"
        f"Role: {p.role} ({p.department})\n"
        f"Age band: {p.age_band}; experience: {p.experience}\n"
        f"Tech comfort: {p.tech_comfort}\n"
        f"Behavior: {p.behavior_notes}"
    )


def _transcript_block(transcript: list[QaExchange]) -> str:
    lines = []
    for i, ex in enumerate(transcript, start=1):
        a = ex.answer
        located = "highlighted in the note" if a.span else "not found in the note"
        lines.append(f"{i}. Q: {ex.question}")
        lines.append(f"   A: {a.raw_model_text} [{located}]")
    return "\n".join(lines)


def _judge_user_text(persona: Persona, scenario: Scenario, transcript: list[QaExchange]) -> str:
    expected = "; ".join(scenario.expected_information) or "n/a"
    return (
        f"{_persona_card(persona)}\n\n"
        f"Scenario: {scenario.task_description}\n"
        f"Information the task required: {expected}\n\n"
        f"Transcript of the persona's session with the QA tool:\n"
        f"{_transcript_block(transcript)}\n\n"
        f"As this persona, rate the tool.\n{_JUDGE_FORMAT}"
    )


def _parse_judge_reply(text: str) -> tuple[int, int, int, str] | None:
    text = text.strip()
    start = text.find("{")
    end = text.rfind("}")
    if start < 0 or end <= start:
        return None
    try:
        obj = json.loads(text[start : end + 1])
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    values = []
    for name in SCORE_FIELDS:
        v = obj.get(name)
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= 5:
            return None
        values.append(v)
    feedback = obj.get("feedback", "")
    if not isinstance(feedback, str):
        return None
    return values[0], values[1], values[2], feedback


def run_persona(
    gateway: LlmGateway,
    persona: Persona,
    scenario: Scenario,
    transcript: list[QaExchange],
    screenshot: ImageAttachment | None = None,
    model_id: str | None = None,
    retry_policy: RetryPolicy | None = None,
) -> Assessment:
    """Judge one persona/scenario interaction.

    A malformed or out-of-range reply triggers exactly one re-prompt;
    a second bad reply raises JudgeOutputError. The screenshot is
    attached only when the provider accepts images.
    """
    if not transcript:
        raise ValueError("transcript must be non-empty")
    model = model_id or gateway.chat_model
    attach = screenshot if (screenshot and gateway.provider.supports_images) else None
    user_text = _judge_user_text(persona, scenario, transcript)
    messages = [
        ChatMessage(role="system", text=JUDGE_SYSTEM_PROMPT),
        ChatMessage(role="user", text=user_text, image=attach),
    ]
    last_text = ""
    for attempt in range(2):
        request = ChatRequest(model_id=model, messages=tuple(messages))
        completion = gateway.complete(request, policy=retry_policy)
        last_text = completion.text
        parsed = _parse_judge_reply(last_text)
        if parsed is not None:
            u, e, t, feedback = parsed
            return Assessment(
                persona=persona.name,
                scenario_id=scenario.id,
                usability=u,
                efficiency=e,
                trust=t,
                feedback_text=feedback,
            )
        if attempt == 0:
            messages = messages + [
                ChatMessage(role="assistant", text=last_text or "(empty reply)"),
                ChatMessage(role="user", text=_JUDGE_REPROMPT),
            ]
    raise JudgeOutputError(
        f"judge reply invalid after re-prompt for {persona.name!r}: {last_text[:200]}"
    )


def build_transcript(engine: QaEngine, scenario: Scenario) -> list[QaExchange]:
    """Drive the QA engine through the scenario's scripted questions."""
    from datetime import datetime, timezone

    transcript = []
    for q in scenario.questions:
        answer = engine.answer(QaQuery(note_id=scenario.note_id, question=q))
        transcript.append(
            QaExchange(
                ts=datetime.now(timezone.utc).isoformat(),
                note_id=scenario.note_id,
                question=q,
                answer=answer,
            )
        )
    return transcript


@dataclass(frozen=True, slots=True)
class AggregateReport:
    mean_usability: Decimal
    mean_efficiency: Decimal
    mean_trust: Decimal
    assessments: tuple[Assessment, ...]
    themes: tuple[str, ...]


def _mean_1dp(values: list[int]) -> Decimal:
    mean = Decimal(sum(values)) / Decimal(len(values))
    return mean.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def aggregate(assessments: list[Assessment]) -> AggregateReport:
    """Means rounded half-up to one decimal, plus qualitative themes."""
    if not assessments:
        raise ValueError("no assessments to aggregate")
    themes = tuple(
        f"{a.persona}: {a.feedback_text}" for a in assessments if a.feedback_text
    )
    return AggregateReport(
        mean_usability=_mean_1dp([a.usability for a in assessments]),
        mean_efficiency=_mean_1dp([a.efficiency for a in assessments]),
        mean_trust=_mean_1dp([a.trust for a in assessments]),
        assessments=tuple(assessments),
        themes=themes,
    )


def render_report(
    report: AggregateReport,
    judge_model: str,
    screenshot_attached: bool,
) -> str:
    """Markdown report shaped like an aggregate score table."""
    lines = [
        "# Persona evaluation",
        "",
        "| Metric | Avg. Score |",
        "|---|---|",
        f"| Usability | {report.mean_usability} |",
        f"| Efficiency | {report.mean_efficiency} |",
        f"| Trust / Interpretability | {report.mean_trust} |",
        "",
        "## Per-persona scores",
        "",
        "| Persona | Scenario | Usability | Efficiency | Trust |",
        "|---|---|---|---|---|",
    ]
    for a in report.assessments:
        lines.append(
            f"| {a.persona} | {a.scenario_id} | {a.usability} | {a.efficiency} | {a.trust} |"
        )
    lines += ["", "## Feedback themes", ""]
    if report.themes:
        lines += [f"- {t}" for t in report.themes]
    else:
        lines.append("- (none)")
    lines += [
        "",
        f"Judge model: {judge_model}. "
        f"Interface screenshot {'attached' if screenshot_attached else 'not attached'}.",
    ]
    return "\n".join(lines) + "\n"


def run_persona_suite(
    store: NoteStore,
    engine: QaEngine,
    gateway: LlmGateway,
    scenarios: list[Scenario],
    personas: tuple[Persona, ...] | None = None,
    screenshot: ImageAttachment | None = None,
) -> list[Assessment]:
    """Full pipeline: each persona runs every scenario and gets judged.

    Scenario transcripts are produced once by driving the QA engine, then
    judged once per persona.
    """
    personas = personas or builtin_personas()
    for sc in scenarios:
        if store.get_note(sc.note_id) is None:
            raise ValueError(f"scenario {sc.id!r} references unknown note {sc.note_id!r}")
    assessments = []
    transcripts = {sc.id: build_transcript(engine, sc) for sc in scenarios}
    for persona in personas:
        for sc in scenarios:
            assessments.append(
                run_persona(gateway, persona, sc, transcripts[sc.id], screenshot=screenshot)
            )
    return assessments
