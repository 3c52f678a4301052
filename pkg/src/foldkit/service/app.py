"""HTTP service exposing induction, evaluation, translation, and scoring.

The CLI talks to these endpoints (in-process by default), so everything
reachable from the command line is also reachable over HTTP with the same
error taxonomy: usage and data problems map to 400, invariant violations
and unexpected failures to 500.
"""
from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..dataset import Example, FeatureSchema, apply_background, load_csv_text, parse_background
from ..errors import FoldkitError, UsageError
from ..evalcv import Metrics, confusion_metrics, cross_validate, render_csv, render_markdown_table
from ..fold import BINARY, NUMERIC, InductionConfig, fold
from ..hypothesis import classify as classify_example
from ..hypothesis import parse_asp, render_asp
from ..pipeline import RunManifest, SweepConfig, kmeans_fold, sha256_text, sweep_select
from ..translate import parse_pred_file, translate_hypothesis
from .schemas import (
    CellModel,
    ClassifyRequest,
    ClassifyResponse,
    EvalRequest,
    EvalResponse,
    FoldRowModel,
    HealthResponse,
    LearnRequest,
    LearnResponse,
    ManifestModel,
    MetricsModel,
    PredictionModel,
    StatsModel,
    TranslateRequest,
    TranslateResponse,
)

log = logging.getLogger(__name__)

CLUSTERED_ALGOS = {"kmeans-fold", "kmeans-foldr"}
ALGO_MODE = {
    "fold": BINARY,
    "foldr": NUMERIC,
    "kmeans-fold": BINARY,
    "kmeans-foldr": NUMERIC,
}


def _load(
    csv_text: str,
    target: str,
    positive_label: str | None,
    background_text: str | None,
    require_both_classes: bool = True,
) -> tuple[FeatureSchema, list[Example], list[Example], list[Example]]:
    schema, examples = load_csv_text(
        csv_text, target, positive_label,
        source="csv_text", require_both_classes=require_both_classes,
    )
    if background_text:
        examples = apply_background(schema, examples, parse_background(background_text))
    pos = [e for e in examples if e.positive]
    neg = [e for e in examples if not e.positive]
    return schema, examples, pos, neg


def _induction_config(req: LearnRequest | EvalRequest, mode: str) -> InductionConfig:
    kwargs = dict(
        mode=mode,
        max_clause_length=req.max_clause_len,
        ab_depth=req.ab_depth,
        bins=req.bins,
        seed=req.seed,
    )
    if req.f is not None:
        kwargs["demotion_factor"] = req.f
    return InductionConfig(**kwargs)


def _check_algo_flags(algo: str, k: object, f: float | None) -> None:
    # The clustering knobs are meaningless for the plain algorithms; reject
    # rather than silently ignore.
    if algo not in CLUSTERED_ALGOS:
        if k is not None:
            raise UsageError(f"k requires algo kmeans-fold or kmeans-foldr (got algo={algo})")
        if f is not None:
            raise UsageError(f"f requires algo kmeans-fold or kmeans-foldr (got algo={algo})")


def _digests(csv_text: str, **extra: str | None) -> dict:
    digests = {"dataset": sha256_text(csv_text)}
    for name, text in extra.items():
        if text is not None:
            digests[name] = sha256_text(text)
    return digests


def _manifest(command: str, settings: dict, digests: dict, seed: int) -> ManifestModel:
    manifest = RunManifest.create(command, settings, digests, seed)
    return ManifestModel(**manifest.__dict__)


def _metrics_model(m: Metrics) -> MetricsModel:
    return MetricsModel(**m.as_dict())


def do_learn(req: LearnRequest) -> LearnResponse:
    _check_algo_flags(req.algo, req.k, req.f)
    schema, _, pos, neg = _load(req.csv_text, req.target, req.positive_label, req.background_text)
    cfg = _induction_config(req, ALGO_MODE[req.algo])

    if req.algo in CLUSTERED_ALGOS:
        k = req.k if req.k is not None else 1
        hyp = kmeans_fold(pos, neg, schema, k, config=cfg, pred_name=req.target)
    else:
        k = None
        hyp = fold(pos, neg, schema, cfg, pred_name=req.target)

    settings = {
        "algo": req.algo,
        "k": k,
        "f": cfg.demotion_factor if req.algo in CLUSTERED_ALGOS else None,
        "max_clause_len": cfg.max_clause_length,
        "bins": cfg.bins,
        "ab_depth": cfg.ab_depth,
        "seed": cfg.seed,
        "target": req.target,
        "positive_label": schema.positive_label,
    }
    return LearnResponse(
        hypothesis_asp=render_asp(hyp),
        stats=StatsModel(
            n_pos=len(pos),
            n_neg=len(neg),
            n_rules=hyp.rule_count(),
            n_literals=hyp.literal_count(),
            n_noise_facts=len(hyp.noise_facts),
        ),
        manifest=_manifest(
            "learn", settings,
            _digests(req.csv_text, background=req.background_text), req.seed,
        ),
    )


_CONF_HEADERS = ["tp", "fp", "fn", "tn", "accuracy", "precision", "recall", "f1"]


def do_eval(req: EvalRequest) -> EvalResponse:
    digests = _digests(
        req.csv_text, background=req.background_text, hypothesis=req.hypothesis_asp
    )

    if req.hypothesis_asp is not None:
        # Score a fixed theory; single-class datasets are fine here.
        _, examples, _, _ = _load(
            req.csv_text, req.target, req.positive_label, req.background_text,
            require_both_classes=False,
        )
        hyp = parse_asp(req.hypothesis_asp)
        m = confusion_metrics(hyp, examples)
        row = [m.tp, m.fp, m.fn, m.tn, m.accuracy, m.precision, m.recall, m.f1]
        settings = {"mode": "hypothesis", "target": req.target}
        return EvalResponse(
            mode="hypothesis",
            table_csv=render_csv(_CONF_HEADERS, [row]),
            table_markdown=render_markdown_table(_CONF_HEADERS, [row]),
            metrics=_metrics_model(m),
            manifest=_manifest("eval", settings, digests, req.seed),
        )

    schema, _, pos, neg = _load(req.csv_text, req.target, req.positive_label, req.background_text)
    cfg = _induction_config(req, ALGO_MODE[req.algo])
    settings = {
        "algo": req.algo,
        "folds": req.folds,
        "repeats": req.repeats,
        "selection_metric": req.selection_metric,
        "f": cfg.demotion_factor if req.algo in CLUSTERED_ALGOS else None,
        "max_clause_len": cfg.max_clause_length,
        "bins": cfg.bins,
        "ab_depth": cfg.ab_depth,
        "seed": cfg.seed,
        "target": req.target,
        "positive_label": schema.positive_label,
    }

    if req.algo in CLUSTERED_ALGOS:
        k_values = tuple(req.k_values) if req.k_values else tuple(range(1, 11))
        sweep = SweepConfig(
            k_values=k_values,
            repeats=req.repeats,
            folds=req.folds,
            seed=req.seed,
            selection_metric=req.selection_metric,
        )
        result = sweep_select(pos, neg, schema, config=cfg, sweep=sweep, pred_name=req.target)
        cells = [CellModel(**c.__dict__) for c in result.cells]
        best = next(
            c for c in cells if c.k == result.best_k and c.repeat == result.best_repeat
        )
        headers = ["k", "repeat", "mean_accuracy", "mean_precision",
                   "mean_recall", "mean_f1", "mean_rules"]
        rows = [
            [c.k, c.repeat, c.mean_accuracy, c.mean_precision,
             c.mean_recall, c.mean_f1, c.mean_rules]
            for c in cells
        ]
        settings["k_values"] = list(k_values)
        return EvalResponse(
            mode="sweep",
            table_csv=render_csv(headers, rows),
            table_markdown=render_markdown_table(headers, rows),
            cells=cells,
            best=best,
            hypothesis_asp=render_asp(result.hypothesis),
            manifest=_manifest("eval", settings, digests, req.seed),
        )

    _check_algo_flags(req.algo, req.k_values, req.f)
    report = cross_validate(
        pos, neg,
        lambda p, n: fold(p, n, schema, cfg, pred_name=req.target),
        k_folds=req.folds,
        seed=req.seed,
    )
    fold_rows = [
        FoldRowModel(
            fold=fr.fold,
            metrics=_metrics_model(fr.metrics),
            n_rules=fr.hypothesis.rule_count(),
            degenerate=fr.degenerate,
        )
        for fr in report.folds
    ]
    means = {
        "accuracy": report.mean("accuracy"),
        "precision": report.mean("precision"),
        "recall": report.mean("recall"),
        "f1": report.mean("f1"),
        "rules": report.mean_rule_count,
    }
    headers = ["fold", *_CONF_HEADERS, "rules", "degenerate"]
    rows = [
        [fr.fold, fr.metrics.tp, fr.metrics.fp, fr.metrics.fn, fr.metrics.tn,
         fr.metrics.accuracy, fr.metrics.precision, fr.metrics.recall,
         fr.metrics.f1, fr.n_rules, fr.degenerate]
        for fr in fold_rows
    ]
    rows.append(["mean", "", "", "", "", means["accuracy"], means["precision"],
                 means["recall"], means["f1"], means["rules"], ""])
    return EvalResponse(
        mode="cv",
        table_csv=render_csv(headers, rows),
        table_markdown=render_markdown_table(headers, rows),
        fold_rows=fold_rows,
        means=means,
        manifest=_manifest("eval", settings, digests, req.seed),
    )


def do_translate(req: TranslateRequest) -> TranslateResponse:
    hyp = parse_asp(req.hypothesis_asp)
    directives = parse_pred_file(req.pred_text)
    english = translate_hypothesis(hyp, directives)
    digests = {
        "hypothesis": sha256_text(req.hypothesis_asp),
        "pred": sha256_text(req.pred_text),
    }
    return TranslateResponse(
        english=english,
        manifest=_manifest("translate", {"pred_name": hyp.pred_name}, digests, 0),
    )


def do_classify(req: ClassifyRequest) -> ClassifyResponse:
    _, examples, _, _ = _load(
        req.csv_text, req.target, req.positive_label, req.background_text,
        require_both_classes=False,
    )
    hyp = parse_asp(req.hypothesis_asp)
    predictions = [
        PredictionModel(id=ex.id, predicted=classify_example(hyp, ex), actual=ex.positive)
        for ex in examples
    ]
    m = confusion_metrics(hyp, examples)
    digests = _digests(req.csv_text, background=req.background_text,
                       hypothesis=req.hypothesis_asp)
    return ClassifyResponse(
        predictions=predictions,
        metrics=_metrics_model(m),
        manifest=_manifest("classify", {"target": req.target}, digests, 0),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="foldkit", version=__version__)

    @app.exception_handler(FoldkitError)
    async def _domain_error(request: Request, exc: FoldkitError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "usage", "message": str(exc)}},
        )

    @app.exception_handler(Exception)
    async def _unexpected_error(request: Request, exc: Exception) -> JSONResponse:
        log.exception("unhandled error serving %s", request.url.path)
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": f"{type(exc).__name__}: {exc}"}},
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/learn", response_model=LearnResponse)
    def learn(req: LearnRequest) -> LearnResponse:
        return do_learn(req)

    @app.post("/v1/eval", response_model=EvalResponse)
    def evaluate(req: EvalRequest) -> EvalResponse:
        return do_eval(req)

    @app.post("/v1/translate", response_model=TranslateResponse)
    def translate(req: TranslateRequest) -> TranslateResponse:
        return do_translate(req)

    @app.post("/v1/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest) -> ClassifyResponse:
        return do_classify(req)

    return app
