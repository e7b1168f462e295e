"""WebSocket/HTTP front end over a Session.

One workbook, one client: a second concurrent WebSocket connection gets a
SingleClient error and is closed — a shared mutable grid with two writers
and no merge story would corrupt silently, so it is simply not offered.

Routes:
  GET  /health   -> {"revision": n}   liveness + cheap change detection
  WS   /session  -> the command protocol (JSON text frames, one command
                    per message, one response per message)
  GET  /ui/...   -> static files (the browser front end), when present
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .session import Session

_PLACEHOLDER = """<!doctype html>
<meta charset="utf-8">
<title>gridbook</title>
<p>No UI bundle found. Build the front end into <code>frontend/dist</code>
and restart, or talk to the engine directly over the
<code>/session</code> WebSocket.</p>
"""


def default_ui_dir() -> Path:
    # src/gridbook/server.py -> src/gridbook -> src -> repository root
    return Path(__file__).resolve().parents[2] / "frontend" / "dist"


def make_app(session: Optional[Session] = None,
             ui_dir: Optional[Path] = None) -> FastAPI:
    session = session if session is not None else Session()
    app = FastAPI(title="gridbook", docs_url=None, redoc_url=None)
    app.state.session = session
    app.state.ws_client_connected = False

    @app.get("/health")
    def health() -> dict:
        return {"revision": session.wb.revision}

    @app.websocket("/session")
    async def session_ws(ws: WebSocket) -> None:
        await ws.accept()
        if app.state.ws_client_connected:
            await ws.send_text(json.dumps({
                "id": None, "ok": False,
                "revision": session.wb.revision, "changes": [],
                "error": {"code": "SingleClient",
                          "message": "another client is already connected "
                                     "to this workbook"}}))
            await ws.close()
            return
        app.state.ws_client_connected = True
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    cmd = json.loads(raw)
                except json.JSONDecodeError as exc:
                    resp = {"id": None, "ok": False,
                            "revision": session.wb.revision, "changes": [],
                            "error": {"code": "BadJson",
                                      "message": f"not valid JSON: {exc}"}}
                else:
                    resp = session.dispatch(cmd)
                await ws.send_text(json.dumps(resp, ensure_ascii=False))
        except WebSocketDisconnect:
            pass
        finally:
            app.state.ws_client_connected = False

    ui = Path(ui_dir) if ui_dir is not None else default_ui_dir()
    if ui.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui), html=True),
                  name="ui")
    else:
        @app.get("/ui")
        def ui_placeholder() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER)

    return app


def serve(session: Optional[Session] = None, *, host: str = "127.0.0.1",
          port: int = 8000, ui_dir: Optional[Path] = None) -> None:
    import uvicorn

    app = make_app(session, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
