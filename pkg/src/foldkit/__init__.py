"""Induce concise default theories — rules with negation-as-failure
exceptions — from labeled tabular examples.

The pipeline clusters the positive examples, runs a sequential-covering
learner per cluster with out-of-cluster positives demoted to fractional
weight, merges the per-cluster rules, and prunes the result. Theories render
as answer-set-programming text and, given sentence templates, as English.
"""

from .clustering import ClusterModel, kmeans_cluster
from .dataset import Example, FeatureSchema, Kind, load_csv, load_csv_text
from .errors import DataError, FoldkitError, InternalError, UsageError
from .evalcv import Metrics, confusion_metrics, cross_validate
from .fold import BINARY, NUMERIC, InductionConfig, d_fold, fold, learn_rule, prune_hypothesis
from .hypothesis import Hypothesis, Rule, classify, parse_asp, render_asp
from .pipeline import RunManifest, SweepConfig, SweepResult, kmeans_fold, sweep_select
from .scoring import GainCounts, information_gain
from .translate import PredDirective, parse_pred_file, translate_hypothesis

__version__ = "0.1.0"

__all__ = [
    "BINARY",
    "ClusterModel",
    "DataError",
    "Example",
    "FeatureSchema",
    "FoldkitError",
    "GainCounts",
    "Hypothesis",
    "InductionConfig",
    "InternalError",
    "Kind",
    "Metrics",
    "NUMERIC",
    "PredDirective",
    "Rule",
    "RunManifest",
    "SweepConfig",
    "SweepResult",
    "UsageError",
    "__version__",
    "classify",
    "confusion_metrics",
    "cross_validate",
    "d_fold",
    "fold",
    "information_gain",
    "kmeans_cluster",
    "kmeans_fold",
    "learn_rule",
    "load_csv",
    "load_csv_text",
    "parse_asp",
    "parse_pred_file",
    "prune_hypothesis",
    "render_asp",
    "sweep_select",
    "translate_hypothesis",
]
