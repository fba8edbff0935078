"""JSON snapshots of learners and evaluation reports."""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..engine.errors import SnapshotError
from ..engine.learner import SymplerLearner
from ..engine.types import (
    CompareMode,
    EvaluationReport,
    LearnerConfig,
    LocalModel,
    Sample,
    Selection,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FORMAT_VERSION = 1


class LocalModelSchema(BaseModel):
    point: list[float]
    weights: list[float]
    created_at: int = 0
    lambda_used: float = 1e-6


class SampleSchema(BaseModel):
    x: list[float]
    y: float
    index: int = 0


class SnapshotSchema(BaseModel):
    """On-disk form of a learner."""

    model_config = ConfigDict(populate_by_name=True)

    format_version: int = FORMAT_VERSION
    n: int = Field(ge=1)
    lam: float = Field(alias="lambda", gt=0)
    selection: Selection = Selection.NEAREST
    sigma: float = 1.0
    compare_mode: CompareMode = CompareMode.ADD_THEN_COMPARE
    models: list[LocalModelSchema] = Field(default_factory=list)
    prev_y: Optional[float] = None
    last_sample: Optional[SampleSchema] = None


def learner_to_snapshot(learner: SymplerLearner) -> SnapshotSchema:
    cfg = learner.config
    last = learner.last_sample
    return SnapshotSchema(
        n=learner.n_features,
        lam=cfg.lam,
        selection=cfg.selection,
        sigma=cfg.sigma,
        compare_mode=cfg.compare_mode,
        models=[
            LocalModelSchema(
                point=[float(v) for v in m.point],
                weights=[float(v) for v in m.weights],
                created_at=m.created_at,
                lambda_used=m.lambda_used,
            )
            for m in learner.models
        ],
        prev_y=learner.prev_y,
        last_sample=(
            None if last is None
            else SampleSchema(x=[float(v) for v in last.x], y=last.y, index=last.index)
        ),
    )


def learner_from_snapshot(snapshot: SnapshotSchema) -> SymplerLearner:
    """
    Rebuild a learner from a validated snapshot.

    Raises:
        SnapshotError: On a version mismatch or inconsistent dimensions
    """
    if snapshot.format_version != FORMAT_VERSION:
        raise SnapshotError(
            f"Snapshot format {snapshot.format_version} is not supported (expected {FORMAT_VERSION})"
        )
    config = LearnerConfig(
        lam=snapshot.lam,
        selection=snapshot.selection,
        sigma=snapshot.sigma,
        compare_mode=snapshot.compare_mode,
    )
    models = [
        LocalModel(
            weights=np.array(m.weights, dtype=np.float64),
            point=np.array(m.point, dtype=np.float64),
            created_at=m.created_at,
            lambda_used=m.lambda_used,
        )
        for m in snapshot.models
    ]
    try:
        learner = SymplerLearner.from_models(snapshot.n, config, models)
    except ValueError as e:
        raise SnapshotError(f"Inconsistent snapshot: {e}") from e

    learner.prev_y = snapshot.prev_y
    if snapshot.last_sample is not None:
        if len(snapshot.last_sample.x) != snapshot.n:
            raise SnapshotError("last_sample does not match the snapshot dimension")
        learner.last_sample = Sample(
            x=np.array(snapshot.last_sample.x, dtype=np.float64),
            y=snapshot.last_sample.y,
            index=snapshot.last_sample.index,
        )
    return learner


def write_json(path: PathLike, payload: Any) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def save_snapshot(learner: SymplerLearner, path: PathLike) -> None:
    payload = learner_to_snapshot(learner).model_dump(mode="json", by_alias=True)
    write_json(path, payload)
    logger.info("snapshot saved path=%s models=%d", path, learner.model_count)


def parse_snapshot(payload: Any) -> SymplerLearner:
    try:
        snapshot = SnapshotSchema.model_validate(payload)
    except ValidationError as e:
        raise SnapshotError(f"Invalid snapshot: {e.error_count()} validation error(s): {e}") from e
    return learner_from_snapshot(snapshot)


def load_snapshot(path: PathLike) -> SymplerLearner:
    """
    Load a learner saved by save_snapshot.

    Raises:
        FileNotFoundError: If the file does not exist
        SnapshotError: If the file is corrupt or from another format version
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise SnapshotError(f"Snapshot {path} is not valid JSON: {e}") from e
    return parse_snapshot(payload)


def report_to_dict(report: EvaluationReport) -> dict[str, Any]:
    return {
        "fitting_rmse": report.fitting_rmse,
        "prediction_rmse": report.prediction_rmse,
        "forgetting_ratio": report.forgetting_ratio,
        "loss_ww": report.loss_ww,
        "loss_wu": report.loss_wu,
        "model_count": report.model_count,
        "sentinel_substitutions": report.sentinel_substitutions,
    }


def save_report(report: EvaluationReport, path: PathLike) -> None:
    write_json(path, report_to_dict(report))


def load_report(path: PathLike) -> EvaluationReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return EvaluationReport(**data)
    except (json.JSONDecodeError, TypeError) as e:
        raise SnapshotError(f"Report {path} is malformed: {e}") from e
