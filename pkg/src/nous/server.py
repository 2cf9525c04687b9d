"""HTTP/JSON API over a live engine.

Every GET builds its answer from a single snapshot, so the numbers inside
one response are mutually consistent even while ingestion runs.  POST
/api/ingest routes through the engine's writer lock; a second concurrent
writer gets 409 instead of queueing.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .engine import Engine, to_json
from .errors import NoPathFound, NousError, UnknownEntity
from .store import normalize_label

JSON_CONTENT_TYPE = "application/json; charset=utf-8"

_STATUS = {
    "UnknownEntity": 404,
    "NoPathFound": 404,
    "WriteInProgress": 409,
}


def _json_response(payload, status: int = 200) -> Response:
    return Response(content=to_json(payload), status_code=status,
                    media_type=JSON_CONTENT_TYPE)


def _error_response(err: NousError) -> Response:
    body = {"error": err.name, "detail": err.detail}
    suggestions = getattr(err, "suggestions", None)
    if suggestions:
        body["suggestions"] = suggestions
    return _json_response(body, _STATUS.get(err.name, 400))


def _bad_request(detail: str) -> Response:
    return _json_response({"error": "BadRequest", "detail": detail}, 400)


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="nous", docs_url=None, redoc_url=None)

    @app.get("/api/entity")
    def entity(name: str = "", limit: int | None = None) -> Response:
        if not name.strip():
            return _bad_request("missing query parameter: name")
        try:
            return _json_response(engine.entity_card(name, limit))
        except NousError as e:
            return _error_response(e)

    @app.get("/api/paths")
    def paths(request: Request) -> Response:
        params = request.query_params
        source = params.get("from", "")
        target = params.get("to", "")
        if not source.strip() or not target.strip():
            return _bad_request("missing query parameter: from/to")
        if normalize_label(source) == normalize_label(target):
            return _bad_request("from and to must differ")
        try:
            k = int(params["k"]) if "k" in params else None
            max_hops = int(params["maxHops"]) if "maxHops" in params else None
        except ValueError:
            return _bad_request("k and maxHops must be integers")
        try:
            result = engine.ask(source, target, rel=params.get("rel") or None,
                                k=k, max_hops=max_hops)
            return _json_response(result)
        except (NoPathFound, UnknownEntity) as e:
            return _error_response(e)
        except NousError as e:
            return _error_response(e)
        except ValueError as e:
            return _bad_request(str(e))

    @app.get("/api/trending")
    def trending() -> Response:
        return _json_response(engine.trending)

    @app.get("/api/stats")
    def stats() -> Response:
        return _json_response(engine.stats())

    @app.post("/api/ingest")
    async def ingest(request: Request) -> Response:
        body = (await request.body()).decode("utf-8")
        if not engine.write_lock.acquire(blocking=False):
            return _json_response(
                {"error": "WriteInProgress",
                 "detail": "another ingestion is already running"}, 409)
        try:
            report = engine.ingest_lines(body.splitlines())
            engine.save_state()
            return _json_response(report.to_payload())
        except NousError as e:
            return _error_response(e)
        finally:
            engine.write_lock.release()

    ui_dir = engine.config.service.ui_dir
    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
