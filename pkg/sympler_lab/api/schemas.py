"""Pydantic schemas for API request/response validation."""

from typing import Optional

from pydantic import BaseModel, Field

from ..storage.snapshots import SnapshotSchema


# ============================================================================
# Request Schemas
# ============================================================================

class PredictRequest(BaseModel):
    """Batch prediction with a frozen snapshot."""
    snapshot: SnapshotSchema = Field(..., description="Learner snapshot as written by the CLI")
    inputs: list[list[float]] = Field(..., min_length=1, description="One feature vector per row")


class ExplainRequest(BaseModel):
    """Which local model answers a query point."""
    snapshot: SnapshotSchema
    x: list[float] = Field(..., min_length=1, description="Query point")


# ============================================================================
# Response Schemas
# ============================================================================

class HealthResponse(BaseModel):
    """Health check response."""
    status: str = "healthy"
    version: str
    service: str
    snapshot_format: int


class BoundRowSchema(BaseModel):
    """Minimum training size for one VC dimension."""
    h: int
    l_star: float = Field(..., description="Root of epsilon(h, l, eta) = 1")
    l_rule: int = Field(..., description="Buffer rule 2(n+1)+10 with n = h-1")


class BoundTableResponse(BaseModel):
    eta: float
    rows: list[BoundRowSchema]


class BufferSizeResponse(BaseModel):
    n: int
    buffer_size: int


class PredictResponse(BaseModel):
    """None where the learner has no local model yet."""
    predictions: list[Optional[float]]
    model_count: int


class ExplanationSchema(BaseModel):
    model_index: int
    point: list[float]
    weights: list[float] = Field(..., description="Slopes followed by the bias")
    distance: float


class ErrorResponse(BaseModel):
    """Error response."""
    error: str
    detail: Optional[str] = None
    code: str = "INTERNAL_ERROR"
