"""HTTP service exposing predict, counterfactual, and curve endpoints.

The service is a thin wrapper: every response value comes straight from the
corresponding library call, requests share one immutable model, and no state
survives a request.  Infeasible searches are a legitimate analytical answer,
so they return 200 with an empty result list and a reason code rather than
an error status.  Each counterfactual search runs under a configurable
deadline; hitting it returns whatever was found plus a reason code.

See docs/api.md for the full wire format.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .cfsearch import (
    Counterfactual,
    CounterfactualQuery,
    DeadlineExceededError,
    NoCounterfactualError,
    find_counterfactuals,
)
from .ice import GridSpec, curve_to_plotdata, ice_batch
from .model import LogisticModel, predict
from .render import render_sentence
from .tabular import DistanceWeights, Instance, SchemaConfig, SchemaError

REASON_INFEASIBLE_INTERVAL = "infeasible_interval"
REASON_NO_FEASIBLE_POINT = "no_feasible_point"
REASON_DEADLINE = "deadline_exceeded"


class PredictBody(BaseModel):
    instance: dict
    schema_hash: str | None = None


class CounterfactualBody(BaseModel):
    instance: dict
    direction: str
    threshold: float
    alternatives: int = 2
    epsilon: float = 1e-6
    min_distance: float = 1e-6
    schema_hash: str | None = None


class GridBody(BaseModel):
    min: float
    max: float
    step: float


class IceBody(BaseModel):
    instance: dict
    features: list[str] = Field(min_length=1)
    grid: dict[str, GridBody] | None = None
    schema_hash: str | None = None


def _validation_response(detail: list[dict]) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": "validation", "detail": detail})


def create_app(
    model: LogisticModel,
    weights: DistanceWeights,
    config: SchemaConfig,
    cors_origin: str = "*",
    deadline_seconds: float = 10.0,
) -> FastAPI:
    schema = config.schema
    app = FastAPI(title="confcf", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        detail = [
            {
                "field": ".".join(str(p) for p in err["loc"] if p != "body"),
                "message": err["msg"],
            }
            for err in exc.errors()
        ]
        return _validation_response(detail)

    def parse_instance(mapping: dict) -> Instance:
        return schema.instance_from_mapping(mapping)

    def check_hash(pinned: str | None):
        if pinned is not None and pinned != schema.schema_hash:
            raise _HashMismatch()

    class _HashMismatch(Exception):
        pass

    @app.exception_handler(_HashMismatch)
    async def on_hash_mismatch(request: Request, exc: _HashMismatch):
        return JSONResponse(
            status_code=409,
            content={
                "error": "schema_mismatch",
                "message": "request pinned a different schema than the loaded model",
                "schema_hash": schema.schema_hash,
            },
        )

    @app.exception_handler(SchemaError)
    async def on_schema_error(request: Request, exc: SchemaError):
        problems = getattr(exc, "problems", None)
        if problems:
            detail = [{"field": name, "message": message} for name, message in problems]
        else:
            detail = [{"field": "", "message": str(exc)}]
        return _validation_response(detail)

    @app.get("/model")
    def model_info():
        features = []
        for spec in schema.features:
            entry: dict = {
                "name": spec.name,
                "kind": spec.kind,
                "mutable": spec.mutable,
            }
            if spec.is_categorical:
                entry["levels"] = list(spec.levels)
            else:
                entry["min"] = spec.lower
                entry["max"] = spec.upper
            if spec.weight is not None:
                entry["weight"] = spec.weight
            features.append(entry)
        return {
            "schema_hash": schema.schema_hash,
            "label_column": config.label_column,
            "class_labels": {
                "negative": model.negative_label,
                "positive": model.positive_label,
            },
            "decision_boundary": model.decision_boundary,
            "features": features,
        }

    @app.post("/predict")
    def predict_endpoint(body: PredictBody):
        check_hash(body.schema_hash)
        instance = parse_instance(body.instance)
        pred = predict(model, instance, schema)
        return {
            "probability": pred.probability,
            "predicted_class": pred.predicted_class,
            "confidence": pred.confidence,
        }

    def cf_payload(cf: Counterfactual, query: CounterfactualQuery) -> dict:
        pred = predict(model, cf.instance, schema)
        return {
            "instance": schema.instance_to_mapping(cf.instance),
            "cost": cf.cost,
            "probability": cf.probability,
            "confidence": cf.confidence,
            "predicted_class": pred.predicted_class,
            "changes": [
                {"feature": c.feature, "old": c.old, "new": c.new}
                for c in cf.changed_features
            ],
            "sentence": render_sentence(query, cf),
        }

    @app.post("/counterfactuals")
    def counterfactuals_endpoint(body: CounterfactualBody):
        check_hash(body.schema_hash)
        instance = parse_instance(body.instance)
        try:
            query = CounterfactualQuery(
                instance=instance,
                direction=body.direction,
                threshold=body.threshold,
                alternatives=body.alternatives,
                epsilon=body.epsilon,
                min_distance=body.min_distance,
            )
        except ValueError as exc:
            return _validation_response([{"field": "query", "message": str(exc)}])
        deadline = time.monotonic() + deadline_seconds
        try:
            results = find_counterfactuals(model, weights, schema, query, deadline)
            reason, complete = None, True
        except NoCounterfactualError as exc:
            return {"results": [], "reason": exc.reason, "complete": True}
        except DeadlineExceededError as exc:
            results, reason, complete = exc.partial, REASON_DEADLINE, False
        return {
            "results": [cf_payload(cf, query) for cf in results],
            "reason": reason,
            "complete": complete,
        }

    @app.post("/ice")
    def ice_endpoint(body: IceBody):
        check_hash(body.schema_hash)
        instance = parse_instance(body.instance)
        grids = {}
        if body.grid:
            for name, g in body.grid.items():
                try:
                    grids[name] = GridSpec(g.min, g.max, g.step)
                except ValueError as exc:
                    return _validation_response(
                        [{"field": f"grid.{name}", "message": str(exc)}]
                    )
        try:
            curves = ice_batch(model, schema, instance, body.features, grids)
        except ValueError as exc:
            return _validation_response([{"field": "features", "message": str(exc)}])
        return {"curves": [curve_to_plotdata(c) for c in curves]}

    return app
