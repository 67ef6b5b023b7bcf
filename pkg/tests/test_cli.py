import json

import pytest
from click.testing import CliRunner

from noteqa.cli import main

from .test_evalharness import make_echo_fixture

STUB_ENV = {"LLM_BASE_URL": "stub:11", "LLM_BASE_DELAY": "0"}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset_path(tmp_path):
    p = tmp_path / "synth.json"
    p.write_text(json.dumps(make_echo_fixture(12)), encoding="utf-8")
    return p


def test_run_writes_reports(runner, dataset_path, tmp_path):
    md = tmp_path / "report.md"
    csv = tmp_path / "report.csv"
    result = runner.invoke(
        main,
        [
            "run",
            "--dataset", str(dataset_path),
            "--models", "echo-context",
            "--n", "8",
            "--seed", "123",
            "--out", str(md),
            "--out", str(csv),
        ],
        env=STUB_ENV,
    )
    assert result.exit_code == 0, result.output
    assert "echo-context,100.00,100.00,100.00,100.00,100.00" in csv.read_text()
    assert "| Model | Exact Match |" in md.read_text()


def test_run_deterministic_csv(runner, dataset_path, tmp_path):
    def once(name):
        out = tmp_path / name
        result = runner.invoke(
            main,
            ["run", "--dataset", str(dataset_path), "--models", "echo-context",
             "--n", "6", "--seed", "9", "--out", str(out)],
            env=STUB_ENV,
        )
        assert result.exit_code == 0, result.output
        return out.read_bytes()

    assert once("a.csv") == once("b.csv")


def test_run_exit_2_on_partial_failures(runner, dataset_path, tmp_path):
    # deterministically flaky stub: some samples fail, others score
    out = tmp_path / "r.csv"
    result = runner.invoke(
        main,
        ["run", "--dataset", str(dataset_path), "--models", "flaky-echo",
         "--n", "12", "--seed", "1", "--out", str(out)],
        env=STUB_ENV,
    )
    assert result.exit_code == 2, result.output
    assert out.exists()  # report still written for the scored rows


def test_run_exit_1_when_nothing_scored(runner, dataset_path, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--dataset", str(dataset_path), "--models", "fail-always",
         "--n", "3", "--seed", "1", "--out", str(tmp_path / "r.csv")],
        env=STUB_ENV,
    )
    assert result.exit_code == 1
    assert "no scored samples" in result.output


def test_run_exit_1_on_missing_dataset(runner, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--dataset", str(tmp_path / "nope.json"), "--models", "m",
         "--seed", "1"],
        env=STUB_ENV,
    )
    assert result.exit_code == 1


def test_seed_is_required(runner, dataset_path):
    result = runner.invoke(
        main, ["run", "--dataset", str(dataset_path), "--models", "m"], env=STUB_ENV
    )
    assert result.exit_code != 0
    assert "--seed" in result.output


def test_sample_subcommand(runner, dataset_path, tmp_path):
    out = tmp_path / "subset.jsonl"
    result = runner.invoke(
        main,
        ["sample", "--dataset", str(dataset_path), "--n", "5", "--seed", "2",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 5
    rec = json.loads(lines[0])
    assert {"id", "question", "context", "answers"} <= set(rec)


def test_sampled_file_feeds_run(runner, dataset_path, tmp_path):
    subset = tmp_path / "subset.jsonl"
    runner.invoke(
        main,
        ["sample", "--dataset", str(dataset_path), "--n", "4", "--seed", "2",
         "--out", str(subset)],
    )
    out = tmp_path / "r.csv"
    result = runner.invoke(
        main,
        ["run", "--dataset", str(subset), "--models", "echo-context", "--n", "4",
         "--seed", "2", "--out", str(out)],
        env=STUB_ENV,
    )
    assert result.exit_code == 0, result.output
    assert "100.00" in out.read_text()


def test_rows_dump_and_report_subcommand(runner, dataset_path, tmp_path):
    rows = tmp_path / "rows.jsonl"
    csv1 = tmp_path / "direct.csv"
    result = runner.invoke(
        main,
        ["run", "--dataset", str(dataset_path), "--models", "echo-context",
         "--n", "6", "--seed", "5", "--out", str(csv1), "--rows", str(rows)],
        env=STUB_ENV,
    )
    assert result.exit_code == 0, result.output
    csv2 = tmp_path / "rebuilt.csv"
    result = runner.invoke(
        main, ["report", "--rows", str(rows), "--out", str(csv2)]
    )
    assert result.exit_code == 0, result.output
    assert csv1.read_text() == csv2.read_text()


def test_personas_subcommand(runner, store, tmp_path):
    from .conftest import write_notes_file

    notes = write_notes_file(tmp_path / "notes.json", [store.get_note("n1")])
    scenarios = tmp_path / "scenarios.json"
    scenarios.write_text(
        json.dumps(
            [
                {
                    "id": "s1",
                    "note_id": "n1",
                    "task_description": "find meds",
                    "questions": ["What medications was the patient prescribed at discharge?"],
                    "expected_information": ["Lisinopril"],
                }
            ]
        ),
        encoding="utf-8",
    )
    out = tmp_path / "personas.md"
    result = runner.invoke(
        main,
        ["personas", "--notes", str(notes), "--scenarios", str(scenarios),
         "--out", str(out)],
        env=STUB_ENV,
    )
    assert result.exit_code == 0, result.output
    text = out.read_text()
    assert "| Usability |" in text
    assert "Trust / Interpretability" in text


def test_personas_reproducible(runner, store, tmp_path):
    from .conftest import write_notes_file

    notes = write_notes_file(tmp_path / "notes.json", [store.get_note("n1")])
    scenarios = tmp_path / "scenarios.json"
    scenarios.write_text(
        json.dumps(
            [{"id": "s1", "note_id": "n1", "task_description": "t",
              "questions": ["meds?"], "expected_information": []}]
        ),
        encoding="utf-8",
    )

    def once(name):
        out = tmp_path / name
        result = runner.invoke(
            main,
            ["personas", "--notes", str(notes), "--scenarios", str(scenarios),
             "--out", str(out)],
            env=STUB_ENV,
        )
        assert result.exit_code == 0, result.output
        return out.read_bytes()

    assert once("p1.md") == once("p2.md")


def test_bad_out_extension(runner, dataset_path, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--dataset", str(dataset_path), "--models", "echo-context",
         "--n", "2", "--seed", "1", "--out", str(tmp_path / "r.txt")],
        env=STUB_ENV,
    )
    assert result.exit_code == 1
    assert ".md or .csv" in result.output
