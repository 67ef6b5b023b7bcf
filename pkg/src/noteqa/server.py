"""HTTP JSON API exposing notes, QA, suggestions, and history.

Every non-2xx body has the shape {"code": ..., "message": ...}. The note
corpus is immutable after startup; history is the only mutable state and
survives restarts through its JSON Lines file.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from datetime import date

import click
from fastapi import Body, FastAPI, Request
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from .gateway import GatewayError, gateway_from_env
from .notes import NoteStore, load_notes
from .qa import HistoryLog, NoteNotFoundError, QaEngine, QaQuery


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(
    store: NoteStore,
    engine: QaEngine,
    history: HistoryLog,
    cors_origins: tuple[str, ...] = ("*",),
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="noteqa", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        if isinstance(exc.detail, dict) and "code" in exc.detail:
            return _error(exc.status_code, exc.detail["code"], exc.detail.get("message", ""))
        code = "not_found" if exc.status_code == 404 else "http_error"
        return _error(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()[:1]))

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        return _error(500, "internal_error", f"{type(exc).__name__}: {exc}")

    def _note_or_404(note_id: str):
        note = store.get_note(note_id)
        if note is None:
            raise HTTPException(
                404, {"code": "note_not_found", "message": f"no note with id {note_id!r}"}
            )
        return note

    @app.get("/api/notes")
    def list_notes():
        return [asdict(s) for s in store.list_notes()]

    @app.get("/api/notes/{note_id}")
    def get_note(note_id: str):
        return asdict(_note_or_404(note_id))

    @app.get("/api/notes/{note_id}/suggestions")
    def suggestions(note_id: str, n: int = 4):
        _note_or_404(note_id)
        if not 1 <= n <= 10:
            raise HTTPException(
                422, {"code": "invalid_request", "message": "n must be in [1, 10]"}
            )
        return engine.suggest_questions(note_id, n)

    @app.post("/api/qa")
    def qa(payload: dict = Body(...)):
        question = payload.get("question")
        note_id = payload.get("note_id")
        if not isinstance(question, str) or not question.strip():
            raise HTTPException(
                422, {"code": "empty_question", "message": "question must be non-empty"}
            )
        if not isinstance(note_id, str) or not note_id:
            raise HTTPException(
                422, {"code": "invalid_request", "message": "note_id must be a non-empty string"}
            )
        _note_or_404(note_id)
        try:
            answer = engine.answer(QaQuery(note_id=note_id, question=question))
        except GatewayError as e:
            raise HTTPException(
                502, {"code": "upstream_llm_failure", "message": str(e)}
            ) from e
        return {
            "raw": answer.raw_model_text,
            "start": answer.span.start if answer.span else None,
            "end": answer.span.end if answer.span else None,
            "verbatim": answer.verbatim,
            "score": answer.alignment_score,
        }

    @app.get("/api/history")
    def get_history():
        return history.read_all()

    @app.get("/api/history/export")
    def export_history():
        payload = json.dumps(history.read_all(), ensure_ascii=False, indent=2)
        filename = f"qa-history-{date.today().isoformat()}.json"
        return Response(
            content=payload,
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


@click.command()
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--notes", "notes_path", required=True, type=click.Path(exists=True))
@click.option("--history", "history_path", default="qa_history.jsonl", show_default=True)
@click.option("--static-dir", default=None, type=click.Path(exists=True, file_okay=False))
@click.option("--cors-origin", "cors_origins", multiple=True, default=("*",), show_default=True)
def main(port, host, notes_path, history_path, static_dir, cors_origins):
    """Serve the QA API (and optionally the built UI) over HTTP."""
    import uvicorn

    store = load_notes(notes_path)
    gateway = gateway_from_env()
    history = HistoryLog(history_path)
    engine = QaEngine(store, gateway, history=history)
    app = create_app(store, engine, history, cors_origins=cors_origins, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
