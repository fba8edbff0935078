"""Inference routes over learner snapshots."""

from fastapi import APIRouter

from ..schemas import (
    ErrorResponse,
    ExplainRequest,
    ExplanationSchema,
    PredictRequest,
    PredictResponse,
)
from ...storage.snapshots import learner_from_snapshot

router = APIRouter(prefix="/models", tags=["Models"], responses={400: {"model": ErrorResponse}})


@router.post(
    "/predict",
    summary="Predict",
    description="Frozen predictions of a snapshot for a batch of inputs.",
    response_model=PredictResponse,
)
async def predict(request: PredictRequest) -> PredictResponse:
    learner = learner_from_snapshot(request.snapshot)
    return PredictResponse(
        predictions=learner.predict_many(request.inputs),
        model_count=learner.model_count,
    )


@router.post(
    "/explain",
    summary="Explain",
    description="The local model that answers x, with its point, weights and distance.",
    response_model=ExplanationSchema,
)
async def explain(request: ExplainRequest) -> ExplanationSchema:
    learner = learner_from_snapshot(request.snapshot)
    return ExplanationSchema(**learner.explain(request.x).to_dict())
