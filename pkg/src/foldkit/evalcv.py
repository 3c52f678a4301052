"""Confusion-matrix metrics, stratified cross-validation, and small table
emitters for reports."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .dataset import Example, make_folds
from .hypothesis import Hypothesis, classify

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n if self.n else 0.0

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict[str, float]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def confusion_metrics(hyp: Hypothesis, examples: Sequence[Example]) -> Metrics:
    tp = fp = fn = tn = 0
    for ex in examples:
        predicted = classify(hyp, ex)
        if predicted and ex.positive:
            tp += 1
        elif predicted:
            fp += 1
        elif ex.positive:
            fn += 1
        else:
            tn += 1
    return Metrics(tp, fp, fn, tn)


def mean_of(metrics: Sequence[Metrics], field: str) -> float:
    if not metrics:
        return 0.0
    return sum(getattr(m, field) for m in metrics) / len(metrics)


LearnFn = Callable[[Sequence[Example], Sequence[Example]], Hypothesis]


@dataclass(frozen=True)
class FoldResult:
    fold: int
    metrics: Metrics
    hypothesis: Hypothesis
    degenerate: bool  # training split had no positives; excluded from means


@dataclass
class CVReport:
    folds: list[FoldResult]

    def valid(self) -> list[FoldResult]:
        return [fr for fr in self.folds if not fr.degenerate]

    def mean(self, metric_field: str) -> float:
        return mean_of([fr.metrics for fr in self.valid()], metric_field)

    @property
    def mean_rule_count(self) -> float:
        valid = self.valid()
        if not valid:
            return 0.0
        return sum(fr.hypothesis.rule_count() for fr in valid) / len(valid)


def cross_validate(
    pos: Sequence[Example],
    neg: Sequence[Example],
    learn: LearnFn,
    k_folds: int = 5,
    seed: int = 0,
) -> CVReport:
    """Stratified k-fold: learn on each training split (the learner sees only
    training examples, so any encoding it derives is train-only) and score on
    the held-out split. A fold whose training split has no positives is kept
    in the report but flagged degenerate and left out of the means."""
    combined: list[Example] = list(pos) + list(neg)
    split = make_folds([ex.positive for ex in combined], k_folds, seed)
    results: list[FoldResult] = []
    for fi, (train_idx, test_idx) in enumerate(split.folds):
        train = [combined[i] for i in train_idx]
        test = [combined[i] for i in test_idx]
        pos_train = [ex for ex in train if ex.positive]
        neg_train = [ex for ex in train if not ex.positive]
        degenerate = not pos_train
        if degenerate:
            log.warning("fold %d has no training positives; excluded from means", fi)
        hyp = learn(pos_train, neg_train)
        results.append(FoldResult(fi, confusion_metrics(hyp, test), hyp, degenerate))
    return CVReport(folds=results)


# ---------------------------------------------------------------------------
# Report emitters


def render_csv(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _cell(v: object) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def render_markdown_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
    for row in rows:
        lines.append("| " + " | ".join(_cell(v) for v in row) + " |")
    return "\n".join(lines) + "\n"
