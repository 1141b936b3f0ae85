"""Northbound HTTP service: the single entry point through which tenants
submit, inspect, reconfigure and delete slices, read metrics, and replay
experiment datasets.

The service runs fully on the virtual clock; a request drives the engine
forward until its slice reaches a terminal state, so a response never
exposes a state that contradicts the inventory snapshot behind it.
"""

from __future__ import annotations

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .config import EngineConfig
from .digest import digest_obj
from .engine import SliceEngine
from .errors import (
    ConcurrentModification,
    DomainDeployFailure,
    DuplicateInFlight,
    NoMatch,
    NotFound,
    NsaasError,
    OverrideConflict,
    SchemaError,
    UnclassifiableRequest,
    UnknownExperiment,
    ValidationError,
)
from .experiments import ExperimentRunner
from .model import SliceRequest

_STATUS_BY_ERROR = (
    (SchemaError, 400),
    ((NoMatch, ValidationError, OverrideConflict, UnclassifiableRequest), 422),
    ((DuplicateInFlight, ConcurrentModification), 409),
    (NotFound, 404),
    (UnknownExperiment, 404),
    (DomainDeployFailure, 500),
)


def _error_response(exc: NsaasError) -> JSONResponse:
    status = 500
    for types, code in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            status = code
            break
    body = exc.to_dict()
    if status == 500:
        body["trace_id"] = digest_obj(body)[:12]
    return JSONResponse(status_code=status, content=body)


def create_app(engine: SliceEngine | None = None,
               config: EngineConfig | None = None) -> FastAPI:
    app = FastAPI(title="nsaas", version="0.1.0")
    app.state.engine = engine or SliceEngine(config or EngineConfig.load())

    @app.exception_handler(NsaasError)
    async def _handle(_, exc: NsaasError):
        return _error_response(exc)

    def _engine() -> SliceEngine:
        return app.state.engine

    @app.post("/slices")
    def submit_slice(payload: dict = Body(...)):
        engine = _engine()
        request = SliceRequest.from_json(payload)
        existing = engine.find_existing(request)
        if existing is not None:
            return JSONResponse(status_code=200, content={
                "id": existing.id, "state": existing.state.value,
                "snssai": existing.snssai.key(), "duplicate": True})
        nsi = engine.submit(request)
        return JSONResponse(status_code=201, content={
            "id": nsi.id, "state": nsi.state.value,
            "snssai": nsi.snssai.key(),
            "scenario": nsi.scenario.value})

    @app.get("/slices")
    def list_slices():
        return {"slices": _engine().list_nsis()}

    @app.get("/slices/{nsi_id}")
    def get_slice(nsi_id: str):
        return _engine().get_nsi(nsi_id)

    @app.post("/slices/{nsi_id}/reconfigure")
    def reconfigure_slice(nsi_id: str, payload: dict | None = Body(default=None)):
        engine = _engine()
        nsi = engine.reconfigure(nsi_id, payload or {})
        return JSONResponse(status_code=202, content={
            "id": nsi.id, "state": nsi.state.value,
            "availability_trace": f"/slices/{nsi_id}/availability"})

    @app.get("/slices/{nsi_id}/availability")
    def slice_availability(nsi_id: str):
        engine = _engine()
        engine.get_nsi(nsi_id)
        tracker = engine.availability.get(nsi_id)
        if tracker is None:
            return {"nsi": nsi_id, "transitions": []}
        return {"nsi": nsi_id,
                "transitions": [{"t": t, "value": v}
                                for t, v in tracker.transitions]}

    @app.delete("/slices/{nsi_id}", status_code=204)
    def delete_slice(nsi_id: str):
        _engine().delete(nsi_id)
        return Response(status_code=204)

    @app.get("/metrics")
    def metrics():
        return _engine().metrics()

    @app.get("/experiments/{name}")
    def run_experiment(name: str):
        runner = ExperimentRunner(_engine().config)
        datasets = runner.run(name)
        text = next(iter(datasets.values()))
        return PlainTextResponse(content=text, media_type="text/csv")

    return app
