"""HTTP animator service (versioned under /v1).

JSON envelopes carry state payloads in the kernel's canonical ebv1 text, so
clients never evaluate anything.  Checking is CLI-only by design; the
service covers session animation and the model catalog, and serves the
bundled browser UI under /ui when the frontend has been built.
"""

from __future__ import annotations

from importlib import resources
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response
from pydantic import BaseModel

from . import __version__
from .catalog import list_models
from .errors import (
    BadChoice,
    EbenchError,
    EmptyInit,
    ModelError,
    NotEnabled,
    TooFar,
    UnknownModel,
    UnknownSession,
)
from .sessions import SessionStore, enabled_payload, parse_bindings, session_payload

_ERROR_STATUS = {
    "UnknownSession": 404,
    "UnknownModel": 404,
    "NotEnabled": 409,
    "ChoiceRequired": 409,
    "BadChoice": 400,
    "TooFar": 400,
    "EmptyInit": 422,
    "ParseError": 422,
}


class CreateSession(BaseModel):
    model: Optional[str] = None
    text: Optional[str] = None
    initial_index: int = 0


class Fire(BaseModel):
    event: str
    bindings: Optional[dict] = None
    choice: Optional[int] = None


class Backtrack(BaseModel):
    steps: int


def _error(code: str, message: str, span=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if span is not None:
        body["span"] = {"file": span.file, "line": span.line, "column": span.column, "length": span.length}
    return JSONResponse(status_code=_ERROR_STATUS.get(code, 500), content=body)


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="ebench animator", version=__version__)
    app.state.store = store or SessionStore()

    @app.exception_handler(EbenchError)
    async def _handle(request: Request, exc: EbenchError):
        if isinstance(exc, ModelError):
            return _error("ParseError", exc.message, exc.span)
        code = {
            UnknownSession: "UnknownSession",
            UnknownModel: "UnknownModel",
            NotEnabled: "NotEnabled",
            BadChoice: "BadChoice",
            TooFar: "TooFar",
            EmptyInit: "EmptyInit",
        }.get(type(exc), type(exc).__name__)
        return _error(code, str(exc))

    def _store() -> SessionStore:
        return app.state.store

    @app.get("/v1/models")
    def models():
        return {
            "models": [
                {
                    "name": e.name,
                    "kind": e.kind,
                    "provenance": e.provenance,
                    "source": e.source_file,
                    "description": e.description,
                }
                for e in list_models()
            ]
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSession):
        session = _store().create(model=body.model, text=body.text, initial_index=body.initial_index)
        return session_payload(session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = _store().get(session_id)
        with session.lock:
            return session_payload(session)

    @app.get("/v1/sessions/{session_id}/enabled")
    def get_enabled(session_id: str):
        session = _store().get(session_id)
        with session.lock:
            return {"enabled": enabled_payload(session)}

    @app.post("/v1/sessions/{session_id}/fire")
    def fire(session_id: str, body: Fire):
        session = _store().get(session_id)
        with session.lock:
            bindings = parse_bindings(body.bindings)
            try:
                session.fire(body.event, bindings, body.choice)
            except BadChoice as exc:
                if session.pending is not None and body.choice is None:
                    return JSONResponse(
                        status_code=409,
                        content={
                            "code": "ChoiceRequired",
                            "message": str(exc),
                            "pending_choices": session_payload(session, include_enabled=False)[
                                "pending_choices"
                            ],
                        },
                    )
                raise
            return session_payload(session)

    @app.post("/v1/sessions/{session_id}/backtrack")
    def backtrack(session_id: str, body: Backtrack):
        session = _store().get(session_id)
        with session.lock:
            session.backtrack(body.steps)
            return session_payload(session)

    @app.delete("/v1/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        _store().delete(session_id)
        return Response(status_code=204)

    # --- static browser UI (optional; built from frontend/) ---------------

    def _webui(name: str) -> Optional[str]:
        try:
            path = resources.files("ebench").joinpath("webui", name)
            if path.is_file():
                return path.read_text(encoding="utf-8")
        except (FileNotFoundError, ModuleNotFoundError):
            pass
        return None

    @app.get("/", include_in_schema=False)
    @app.get("/ui", include_in_schema=False)
    @app.get("/ui/", include_in_schema=False)
    def ui_index():
        text = _webui("index.html")
        if text is None:
            return HTMLResponse(
                "<h1>ebench animator</h1><p>API under /v1. The browser UI is not "
                "built; run <code>npm run build</code> in frontend/ (see README).</p>"
            )
        return HTMLResponse(text)

    @app.get("/ui/{file_name}", include_in_schema=False)
    def ui_file(file_name: str):
        text = _webui(file_name)
        if text is None:
            return _error("UnknownModel", f"no such UI asset {file_name!r}")
        media = "application/javascript" if file_name.endswith(".js") else "text/css" if file_name.endswith(".css") else "text/html"
        return Response(text, media_type=media)

    return app


def serve(host: str = "127.0.0.1", port: int = 8990) -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
