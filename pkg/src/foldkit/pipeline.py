"""End-to-end induction: cluster the positives, induce one rule set per
cluster with the other clusters' positives demoted, merge, and prune once
globally. Also the cross-validated sweep that picks a cluster count."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Sequence

from .clustering import kmeans_cluster
from .dataset import Example, FeatureSchema, encode_binary, encode_raw, normalize_for_clustering
from .errors import UsageError
from .evalcv import Metrics, cross_validate
from .fold import BINARY, InductionConfig, prune_hypothesis, raw_fold
from .hypothesis import Hypothesis, Literal, NotAbnormal, Rule


def _shift_ab(hyp: Hypothesis, offset: int) -> Hypothesis:
    if offset == 0 or not hyp.abnormal_rules:
        return hyp

    def shift_body(body: tuple[Literal, ...]) -> tuple[Literal, ...]:
        return tuple(
            NotAbnormal(lit.ab_index + offset) if isinstance(lit, NotAbnormal) else lit
            for lit in body
        )

    return Hypothesis(
        pred_name=hyp.pred_name,
        target_rules=tuple(Rule(None, shift_body(r.body)) for r in hyp.target_rules),
        abnormal_rules={
            idx + offset: tuple(
                Rule(idx + offset, shift_body(r.body), r.ground_id) for r in rules
            )
            for idx, rules in hyp.abnormal_rules.items()
        },
        noise_facts=hyp.noise_facts,
    )


def kmeans_fold(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    k: int,
    f: float | None = None,
    config: InductionConfig | None = None,
    pred_name: str = "target",
) -> Hypothesis:
    """Cluster positives into k groups, induce per group with the remaining
    positives as a demoted pool at weight f (default config.demotion_factor),
    merge the rule sets in cluster order, prune once globally.

    k is clamped to the number of positives. With k = 1 this coincides with
    plain demotion-weighted induction; with k = 1 and f = 0, with fold.
    """
    cfg = config or InductionConfig()
    eff_f = cfg.demotion_factor if f is None else f
    if k < 1:
        raise UsageError("k must be >= 1")
    if not pos:
        return prune_hypothesis(Hypothesis(pred_name=pred_name), list(neg))
    k = min(k, len(pos))

    if cfg.mode == BINARY and cfg.ranges is None:
        # Pin the binarized columns from the full training set so every
        # cluster searches the same candidate space.
        cols = encode_binary(schema, list(pos) + list(neg), cfg.bins, cfg.merge_tol)
        cfg = replace(cfg, ranges=cols.column_map)

    matrix = encode_raw(schema, pos)
    X = normalize_for_clustering(matrix).rows
    model = kmeans_cluster(X, k, seed=cfg.seed)

    merged_rules: list[Rule] = []
    merged_ab: dict[int, tuple[Rule, ...]] = {}
    merged_noise: list[str] = []
    offset = 0
    for idx_in_cluster in model.groups():
        members = [pos[i] for i in idx_in_cluster]
        if not members:
            continue
        rest = [pos[i] for i in range(len(pos)) if i not in set(idx_in_cluster)]
        part = raw_fold(
            members, neg, schema, cfg, pred_name,
            f=eff_f, demoted_pos=rest,
        )
        part = _shift_ab(part, offset)
        if part.abnormal_rules:
            offset = max(part.abnormal_rules) + 1
        merged_rules.extend(part.target_rules)
        merged_ab.update(part.abnormal_rules)
        merged_noise.extend(part.noise_facts)

    merged = Hypothesis(
        pred_name=pred_name,
        target_rules=tuple(merged_rules),
        abnormal_rules=merged_ab,
        noise_facts=tuple(dict.fromkeys(merged_noise)),
    )
    merged.validate()
    return prune_hypothesis(merged, list(pos) + list(neg))


# ---------------------------------------------------------------------------
# Cluster-count sweep


F1 = "f1"
RULES_AT_BEST_ACCURACY = "rules_at_best_accuracy"


@dataclass(frozen=True)
class SweepConfig:
    k_values: tuple[int, ...] = tuple(range(1, 11))
    repeats: int = 2
    folds: int = 5
    seed: int = 0
    selection_metric: str = F1

    def __post_init__(self) -> None:
        if not self.k_values or min(self.k_values) < 1:
            raise UsageError("k_values must be positive")
        if self.repeats < 1 or self.folds < 2:
            raise UsageError("need repeats >= 1 and folds >= 2")
        if self.selection_metric not in (F1, RULES_AT_BEST_ACCURACY):
            raise UsageError(f"unknown selection metric {self.selection_metric!r}")


@dataclass(frozen=True)
class SweepRow:
    k: int
    repeat: int
    fold: int
    metrics: Metrics
    n_rules: int


@dataclass(frozen=True)
class SweepCell:
    k: int
    repeat: int
    mean_accuracy: float
    mean_precision: float
    mean_recall: float
    mean_f1: float
    mean_rules: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    cells: list[SweepCell]
    best_k: int
    best_repeat: int
    hypothesis: Hypothesis


def sweep_select(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    config: InductionConfig | None = None,
    sweep: SweepConfig | None = None,
    pred_name: str = "target",
) -> SweepResult:
    """Grid over cluster counts x repeats, scored by stratified CV on the same
    folds; the winning cell (highest mean F1, ties to fewer rules then smaller
    k) is refit on all the data."""
    cfg = config or InductionConfig()
    sw = sweep or SweepConfig()
    rows: list[SweepRow] = []
    cells: list[SweepCell] = []
    for k in sw.k_values:
        for rep in range(sw.repeats):
            cell_cfg = replace(cfg, seed=sw.seed + rep)
            report = cross_validate(
                pos,
                neg,
                lambda p, n: kmeans_fold(p, n, schema, k, config=cell_cfg, pred_name=pred_name),
                k_folds=sw.folds,
                seed=sw.seed,
            )
            for fr in report.folds:
                rows.append(
                    SweepRow(
                        k=k,
                        repeat=rep,
                        fold=fr.fold,
                        metrics=fr.metrics,
                        n_rules=fr.hypothesis.rule_count(),
                    )
                )
            cells.append(
                SweepCell(
                    k=k,
                    repeat=rep,
                    mean_accuracy=report.mean("accuracy"),
                    mean_precision=report.mean("precision"),
                    mean_recall=report.mean("recall"),
                    mean_f1=report.mean("f1"),
                    mean_rules=report.mean_rule_count,
                )
            )
    if sw.selection_metric == RULES_AT_BEST_ACCURACY:
        top_acc = max(c.mean_accuracy for c in cells)
        pool = [c for c in cells if c.mean_accuracy >= top_acc - 1e-9]
        best = min(pool, key=lambda c: (c.mean_rules, c.k, c.repeat))
    else:
        best = min(cells, key=lambda c: (-c.mean_f1, c.mean_rules, c.k, c.repeat))
    final_cfg = replace(cfg, seed=sw.seed + best.repeat)
    hyp = kmeans_fold(pos, neg, schema, best.k, config=final_cfg, pred_name=pred_name)
    return SweepResult(rows=rows, cells=cells, best_k=best.k, best_repeat=best.repeat, hypothesis=hyp)


# ---------------------------------------------------------------------------
# Run manifests


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """What produced an artifact: the command, its resolved settings, the
    digests of every input, and the package version."""

    command: str
    settings: dict = field(default_factory=dict)
    input_digests: dict = field(default_factory=dict)
    seed: int = 0
    version: str = ""
    created_at: str = ""

    @classmethod
    def create(
        cls, command: str, settings: dict, input_digests: dict, seed: int
    ) -> "RunManifest":
        from . import __version__

        return cls(
            command=command,
            settings=settings,
            input_digests=input_digests,
            seed=seed,
            version=__version__,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n"
