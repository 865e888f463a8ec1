"""Read-only HTTP API the interactive viewer talks to.

Datasets are loaded once at startup and never mutated; every layout request
is stateless and cacheable, so identical request bodies get byte-identical
responses.
"""

from __future__ import annotations

import json
import threading

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .diary import Diary, Period, diary_stats, schema_to_json
from .layout import LayoutParams, UnknownEgo, layout_tree
from .mapping import (
    MappingError,
    PRESET_NAMES,
    mapping_spec_from_json,
    mapping_spec_to_json,
    preset_mapping,
    validate_mapping,
)
from .render import scene_to_json


def _json_response(payload, status_code: int = 200) -> Response:
    body = (json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n").encode("utf-8")
    return Response(content=body, status_code=status_code, media_type="application/json")


def build_app(datasets: dict[str, Diary], static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="contacttrees", docs_url=None, redoc_url=None)
    cache: dict[bytes, bytes] = {}
    cache_lock = threading.Lock()

    @app.get("/api/health")
    def health():
        return _json_response({"status": "ok"})

    @app.get("/api/datasets")
    def list_datasets():
        return _json_response({"datasets": sorted(datasets)})

    @app.get("/api/datasets/{dataset_id}/egos")
    def list_egos(dataset_id: str):
        diary = datasets.get(dataset_id)
        if diary is None:
            return _json_response({"error": f"unknown dataset {dataset_id!r}"}, 404)
        stats = diary_stats(diary)
        return _json_response({
            "dataset": dataset_id,
            "egos": [
                {"id": s.ego, "ties": s.ties, "contacts": s.contacts}
                for s in stats.per_ego
            ],
        })

    @app.get("/api/mappings")
    def list_mappings():
        return _json_response({
            "presets": [
                {"name": name, "spec": mapping_spec_to_json(preset_mapping(name))}
                for name in PRESET_NAMES
            ],
            "schemas": {d: schema_to_json(diary.schema) for d, diary in sorted(datasets.items())},
        })

    @app.post("/api/layout")
    async def layout(request: Request):
        raw = await request.body()
        with cache_lock:
            hit = cache.get(raw)
        if hit is not None:
            return Response(content=hit, media_type="application/json")

        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _json_response({"error": f"request body is not valid JSON: {exc.msg}"}, 400)
        if not isinstance(body, dict) or "dataset" not in body or "ego" not in body:
            return _json_response({"error": "body must be an object with 'dataset' and 'ego'"}, 400)

        diary = datasets.get(body["dataset"])
        if diary is None:
            return _json_response({"error": f"unknown dataset {body['dataset']!r}"}, 404)

        period = None
        if body.get("period"):
            try:
                period = Period.parse(str(body["period"]))
            except ValueError as exc:
                return _json_response({"error": str(exc)}, 400)

        mapping_arg = body.get("mapping", "diary-default")
        try:
            if isinstance(mapping_arg, str):
                spec = preset_mapping(mapping_arg)
            else:
                spec = mapping_spec_from_json(mapping_arg)
        except MappingError as exc:
            return _json_response({"errors": [{"entity": ["mapping", "name"],
                                               "rule": "unknown-mapping",
                                               "message": str(exc)}],
                                   "warnings": []}, 422)
        report = validate_mapping(spec, diary.schema)
        if not report.ok:
            return _json_response(report.to_json(), 422)

        try:
            params = LayoutParams.from_json(body.get("params") or {})
        except (ValueError, TypeError) as exc:
            return _json_response({"error": f"bad params: {exc}"}, 400)

        try:
            scene = layout_tree(diary, body["ego"], period, spec, params)
        except UnknownEgo as exc:
            return _json_response({"error": str(exc)}, 404)

        payload = scene_to_json(scene)
        with cache_lock:
            if len(cache) > 256:
                cache.clear()
            cache[raw] = payload
        return Response(content=payload, media_type="application/json")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="viewer")

    return app
