"""HTTP API over the shared store: resource CRUD, popups, search, map config,
and optional static asset hosting for the web UI.

The server only ever writes portal.json; info files belong to the monitor.
Every non-2xx response body is {"http_status", "code", "message"}.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import render
from .gatherers import GathererRegistry, default_registry, load_registry
from .model import (
    MapConfig,
    NotFoundError,
    PortalState,
    ValidationError,
    add_resource,
    delete_resource,
    update_resource,
)
from .monitor import DEFAULT_INTERVAL_S
from .search import search
from .store import PortalStore, StoreError


class ApiException(Exception):
    def __init__(self, http_status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.http_status = http_status
        self.code = code
        self.message = message


def _error_response(http_status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=http_status,
        content={"http_status": http_status, "code": code, "message": message},
    )


async def _json_body(request: Request) -> dict:
    try:
        body = json.loads(await request.body() or b"null")
    except json.JSONDecodeError as exc:
        raise ApiException(422, "bad_json", f"request body is not valid JSON: {exc}")
    if not isinstance(body, dict):
        raise ApiException(422, "bad_json", "request body must be a JSON object")
    return body


def create_app(
    state_dir: str | Path,
    static_dir: str | Path | None = None,
    gatherers_path: str | Path | None = None,
    monitor_interval_s: float = DEFAULT_INTERVAL_S,
) -> FastAPI:
    store = PortalStore(state_dir)
    if gatherers_path is None:
        candidate = store.state_dir / "gatherers.json"
        gatherers_path = candidate if candidate.exists() else None
    registry: GathererRegistry = (
        load_registry(gatherers_path) if gatherers_path else default_registry()
    )

    app = FastAPI(title="gridwatch", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(ApiException)
    async def handle_api_exception(request: Request, exc: ApiException):
        return _error_response(exc.http_status, exc.code, exc.message)

    @app.exception_handler(NotFoundError)
    async def handle_not_found(request: Request, exc: NotFoundError):
        return _error_response(404, "not_found", str(exc))

    @app.exception_handler(ValidationError)
    async def handle_validation(request: Request, exc: ValidationError):
        return _error_response(422, "validation", str(exc))

    @app.exception_handler(StoreError)
    async def handle_store_error(request: Request, exc: StoreError):
        return _error_response(500, "store_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_request_validation(request: Request, exc: RequestValidationError):
        return _error_response(422, "validation", str(exc))

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_exception(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return _error_response(exc.status_code, code, str(exc.detail))

    def load() -> PortalState:
        return store.load_or_init()

    @app.get("/api/resources")
    def list_resources():
        state = load()
        infos = store.all_infos()
        entries = []
        for resource in state.resources:
            info = infos.get(resource.id)
            rendered = render.render_resource(resource, info, registry, monitor_interval_s)
            entries.append(
                {
                    "resource": resource.to_dict(),
                    "status": rendered.status.value,
                    "stale": rendered.stale,
                    "list_row_html": rendered.list_row_html,
                }
            )
        return entries

    @app.post("/api/resources", status_code=201)
    async def create_resource(request: Request):
        body = await _json_body(request)
        hostname = body.get("hostname")
        if not isinstance(hostname, str):
            raise ApiException(422, "validation", "body must include a string 'hostname'")
        state = load()
        state, resource = add_resource(state, hostname)
        store.save_state(state)
        return resource.to_dict()

    @app.put("/api/resources/{resource_id}")
    async def patch_resource(resource_id: str, request: Request):
        patch = await _json_body(request)
        state = load()
        state = update_resource(state, resource_id, patch)
        store.save_state(state)
        return state.get(resource_id).to_dict()

    @app.delete("/api/resources/{resource_id}", status_code=204)
    def remove_resource(resource_id: str):
        state = load()
        state = delete_resource(state, resource_id)
        store.save_state(state)
        store.delete_info(resource_id)
        return Response(status_code=204)

    @app.get("/api/resources/{resource_id}/popup", response_class=HTMLResponse)
    def resource_popup(resource_id: str):
        state = load()
        resource = state.get(resource_id)
        try:
            info = store.get_info(resource_id)
        except NotFoundError:
            info = None
        return HTMLResponse(render.render_popup(resource, info, registry))

    @app.get("/api/search")
    def search_resources(q: str = ""):
        state = load()
        return search(q, state, store.all_infos())

    @app.get("/api/map-config")
    def get_map_config():
        return load().map.to_dict()

    @app.put("/api/map-config")
    async def put_map_config(request: Request):
        body = await _json_body(request)
        state = load()
        merged = {**state.map.to_dict(), **body}
        state.map = MapConfig.from_dict(merged)
        store.save_state(state)
        return state.map.to_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
