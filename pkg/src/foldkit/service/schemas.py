"""Request/response models for the HTTP service.

Payloads carry their inputs inline (CSV text, rule text, directive text), so
the service is stateless and the CLI can run it in-process without sharing a
filesystem with it.
"""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel

Algo = Literal["fold", "foldr", "kmeans-fold", "kmeans-foldr"]


class HealthResponse(BaseModel):
    status: str
    version: str


class ManifestModel(BaseModel):
    """Provenance block attached to every artifact-producing response."""

    command: str
    settings: dict
    input_digests: dict
    seed: int
    version: str
    created_at: str


class LearnRequest(BaseModel):
    csv_text: str
    target: str
    positive_label: str | None = None
    algo: Algo = "kmeans-fold"
    k: int | None = None  # cluster count; clustering algos only
    f: float | None = None  # demotion weight; clustering algos only
    max_clause_len: int = 5
    bins: int = 10
    ab_depth: int = 2
    seed: int = 0
    background_text: str | None = None


class StatsModel(BaseModel):
    n_pos: int
    n_neg: int
    n_rules: int
    n_literals: int
    n_noise_facts: int


class LearnResponse(BaseModel):
    hypothesis_asp: str
    stats: StatsModel
    manifest: ManifestModel


class MetricsModel(BaseModel):
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    precision: float
    recall: float
    f1: float


class FoldRowModel(BaseModel):
    fold: int
    metrics: MetricsModel
    n_rules: int
    degenerate: bool


class CellModel(BaseModel):
    """Cross-validated means for one (cluster count, repeat) grid cell."""

    k: int
    repeat: int
    mean_accuracy: float
    mean_precision: float
    mean_recall: float
    mean_f1: float
    mean_rules: float


class EvalRequest(BaseModel):
    csv_text: str
    target: str
    positive_label: str | None = None
    algo: Algo = "kmeans-fold"
    # When set, no learning happens: the given theory is scored on the data.
    hypothesis_asp: str | None = None
    folds: int = 5
    k_values: list[int] | None = None  # clustering algos: cluster counts to sweep
    repeats: int = 2
    selection_metric: Literal["f1", "rules_at_best_accuracy"] = "f1"
    f: float | None = None
    max_clause_len: int = 5
    bins: int = 10
    ab_depth: int = 2
    seed: int = 0
    background_text: str | None = None


class EvalResponse(BaseModel):
    mode: Literal["hypothesis", "cv", "sweep"]
    table_csv: str
    table_markdown: str
    metrics: MetricsModel | None = None  # hypothesis mode
    fold_rows: list[FoldRowModel] | None = None  # cv mode
    means: dict[str, float] | None = None  # cv mode
    cells: list[CellModel] | None = None  # sweep mode; one row per grid cell
    best: CellModel | None = None  # sweep mode
    hypothesis_asp: str | None = None  # sweep mode: winning cell refit on all data
    manifest: ManifestModel


class TranslateRequest(BaseModel):
    hypothesis_asp: str
    pred_text: str


class TranslateResponse(BaseModel):
    english: str
    manifest: ManifestModel


class ClassifyRequest(BaseModel):
    hypothesis_asp: str
    csv_text: str
    target: str
    positive_label: str | None = None
    background_text: str | None = None


class PredictionModel(BaseModel):
    id: str
    predicted: bool
    actual: bool


class ClassifyResponse(BaseModel):
    predictions: list[PredictionModel]
    metrics: MetricsModel
    manifest: ManifestModel


class ErrorBody(BaseModel):
    code: Literal["usage", "data", "internal"]
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
