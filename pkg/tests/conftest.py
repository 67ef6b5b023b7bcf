import json

import pytest

from noteqa.gateway import LlmGateway, RetryPolicy
from noteqa.notes import ClinicalNote, NoteStore
from noteqa.stub import StubProvider

DISCHARGE_BODY = (
    "Pt is a 65 y/o male with a history of CHF and hypertension. "
    "Discharged on Lisinopril 10mg daily and Metoprolol 25mg BID. "
    "Follow-up with cardiology in two weeks."
)


@pytest.fixture
def discharge_note():
    return ClinicalNote(
        id="n1",
        title="Discharge summary",
        body=DISCHARGE_BODY,
        meta={"age": "65", "department": "cardiology"},
    )


@pytest.fixture
def store(discharge_note):
    return NoteStore(
        [
            discharge_note,
            ClinicalNote(
                id="n2",
                title="ED triage",
                body=(
                    "54 y/o female presenting with acute chest pain radiating to "
                    "the left arm. Troponin elevated at 0.8. Aspirin 325mg given."
                ),
            ),
            ClinicalNote(
                id="n3",
                title="Psych progress",
                body=(
                    "Patient reports improved mood on Sertraline 50mg. Sleep "
                    "remains fragmented. No suicidal ideation."
                ),
            ),
        ]
    )


def make_gateway(script=None, seed=0, **kwargs):
    """Gateway over a stub provider; sleeps are no-ops by default."""
    provider = StubProvider(seed=seed, script=script)
    kwargs.setdefault("sleep", lambda s: None)
    kwargs.setdefault("retry_policy", RetryPolicy(base_delay=0.0))
    return LlmGateway(provider, **kwargs), provider


def write_notes_file(path, notes):
    payload = [
        {"id": n.id, "title": n.title, "body": n.body, "meta": n.meta} for n in notes
    ]
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path
