"""FastAPI application exposing the wire protocol."""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from .registry import ModelRegistry


class InferEventsRequest(BaseModel):
    text: str
    relations: list[str]
    beam: int = Field(ge=1)
    sample: bool = False
    request_id: str | None = None


class EventResult(BaseModel):
    relation: str
    text: str
    score: float


class InferEventsResponse(BaseModel):
    results: list[EventResult]
    request_id: str | None = None


class InfillRequest(BaseModel):
    context: str
    template: str
    request_id: str | None = None


class InfillResponse(BaseModel):
    filled: str
    score: float
    request_id: str | None = None


class ScoreRequest(BaseModel):
    context: str
    continuation: str
    request_id: str | None = None


class ScoreResponse(BaseModel):
    token_logprobs: list[float]
    request_id: str | None = None


class SimilarityRequest(BaseModel):
    a: list[str]
    b: list[str]
    request_id: str | None = None


class SimilarityResponse(BaseModel):
    matrix: list[list[float]]
    request_id: str | None = None


class SrlRequest(BaseModel):
    sentence: str
    request_id: str | None = None


class SrlRecordModel(BaseModel):
    frame: str
    args: dict[str, str]


class SrlResponse(BaseModel):
    records: list[SrlRecordModel]
    request_id: str | None = None


def create_app(registry: ModelRegistry) -> FastAPI:
    app = FastAPI(title="storm model service")

    @app.get("/v1/health")
    def health() -> dict:
        return {"roles": registry.readiness()}

    @app.post("/v1/infer_events", response_model=InferEventsResponse)
    def infer_events(request: InferEventsRequest) -> InferEventsResponse:
        results = registry.roles["events"].infer(
            request.text, request.relations, request.beam, request.sample
        )
        return InferEventsResponse(results=results, request_id=request.request_id)

    @app.post("/v1/infill", response_model=InfillResponse)
    def infill(request: InfillRequest) -> InfillResponse:
        filled, score = registry.roles["infill"].infill(request.context, request.template)
        return InfillResponse(filled=filled, score=score, request_id=request.request_id)

    @app.post("/v1/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        logprobs = registry.roles["score"].token_logprobs(request.context, request.continuation)
        return ScoreResponse(token_logprobs=logprobs, request_id=request.request_id)

    @app.post("/v1/similarity", response_model=SimilarityResponse)
    def similarity(request: SimilarityRequest) -> SimilarityResponse:
        matrix = registry.roles["similarity"].similarity(request.a, request.b)
        return SimilarityResponse(matrix=matrix, request_id=request.request_id)

    @app.post("/v1/srl", response_model=SrlResponse)
    def srl(request: SrlRequest) -> SrlResponse:
        records = registry.roles["srl"].records(request.sentence)
        return SrlResponse(records=records, request_id=request.request_id)

    return app
