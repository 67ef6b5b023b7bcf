"""evalqa command line: dataset sampling, model evaluation, persona runs.

Exit codes: 0 success, 2 when individual samples failed during an eval
run, 1 on fatal errors.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import evalharness as eh
from .gateway import ImageAttachment, gateway_from_env
from .notes import load_notes
from .personas import (
    aggregate,
    load_scenarios,
    render_report,
    run_persona_suite,
)
from .qa import QaEngine


def _write_report(report: eh.EvalReport, outputs: tuple[str, ...]) -> None:
    if not outputs:
        click.echo(report.to_markdown())
        return
    for out in outputs:
        path = Path(out)
        if path.suffix == ".md":
            path.write_text(report.to_markdown(), encoding="utf-8")
        elif path.suffix == ".csv":
            path.write_text(report.to_csv(), encoding="utf-8")
        else:
            raise click.ClickException(f"--out {out}: use a .md or .csv extension")
        click.echo(f"wrote {path}")


@click.group()
def main():
    """Evaluate extractive QA models and run persona assessments."""


@main.command()
@click.option("--dataset", required=True, type=click.Path())
@click.option("--models", required=True, help="comma-separated model ids")
@click.option("--n", default=4000, show_default=True, help="subset size")
@click.option("--seed", required=True, type=int, help="sampling seed (no default: runs must be reproducible)")
@click.option("--out", "outputs", multiple=True, type=click.Path(), help="report path (.md or .csv; repeatable)")
@click.option("--rows", "rows_path", default=None, type=click.Path(), help="also dump per-sample rows as JSON Lines")
@click.option("--concurrency", default=8, show_default=True)
def run(dataset, models, n, seed, outputs, rows_path, concurrency):
    """Sample the dataset, evaluate each model, and emit the report."""
    try:
        samples = eh.load_dataset(dataset)
        subset = eh.sample_subset(samples, n, seed)
        gateway = gateway_from_env()
        runs = []
        for model_id in [m.strip() for m in models.split(",") if m.strip()]:
            click.echo(f"evaluating {model_id} on {len(subset)} samples...", err=True)
            runs.append(eh.run_eval(gateway, model_id, subset, concurrency=concurrency))
        report = eh.emit_report(runs, seed=seed)
        _write_report(report, outputs)
        if rows_path:
            Path(rows_path).write_text(
                "".join(eh.rows_to_jsonl(r) for r in runs), encoding="utf-8"
            )
            click.echo(f"wrote {rows_path}")
    except (eh.EvalHarnessError, OSError, ValueError) as e:
        raise click.ClickException(str(e)) from e
    failures = sum(len(r.failures) for r in runs)
    if failures:
        click.echo(f"{failures} sample(s) failed; see report", err=True)
        sys.exit(2)


@main.command()
@click.option("--dataset", required=True, type=click.Path())
@click.option("--n", default=4000, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path())
def sample(dataset, n, seed, out):
    """Write a deterministic dataset subset as JSON Lines."""
    try:
        samples = eh.load_dataset(dataset)
        subset = eh.sample_subset(samples, n, seed)
        Path(out).write_text(eh.samples_to_jsonl(subset), encoding="utf-8")
    except (eh.EvalHarnessError, OSError, ValueError) as e:
        raise click.ClickException(str(e)) from e
    click.echo(f"wrote {len(subset)} samples to {out}")


@main.command()
@click.option("--rows", "rows_paths", required=True, multiple=True, type=click.Path())
@click.option("--out", "outputs", multiple=True, type=click.Path())
def report(rows_paths, outputs):
    """Rebuild the comparison report from dumped rows files."""
    try:
        runs = []
        for p in rows_paths:
            runs.extend(eh.runs_from_jsonl(Path(p).read_text(encoding="utf-8")))
        _write_report(eh.emit_report(runs), outputs)
    except (eh.EvalHarnessError, OSError, ValueError, KeyError) as e:
        raise click.ClickException(str(e)) from e


@main.command()
@click.option("--notes", "notes_path", required=True, type=click.Path())
@click.option("--scenarios", "scenarios_path", required=True, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--screenshot", default=None, type=click.Path(), help="UI screenshot (png/jpeg) shown to the judge")
def personas(notes_path, scenarios_path, out_path, screenshot):
    """Run the simulated-clinician evaluation and aggregate scores."""
    try:
        store = load_notes(notes_path)
        scenarios = load_scenarios(scenarios_path)
        gateway = gateway_from_env()
        engine = QaEngine(store, gateway, history=None)
        attach = None
        if screenshot:
            data = Path(screenshot).read_bytes()
            media = "image/png" if screenshot.lower().endswith(".png") else "image/jpeg"
            attach = ImageAttachment(data=data, media_type=media)
        assessments = run_persona_suite(
            store, engine, gateway, scenarios, screenshot=attach
        )
        rendered = render_report(
            aggregate(assessments),
            judge_model=gateway.chat_model,
            screenshot_attached=attach is not None,
        )
    except Exception as e:
        raise click.ClickException(str(e)) from e
    if out_path:
        Path(out_path).write_text(rendered, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(rendered)


if __name__ == "__main__":
    main()
