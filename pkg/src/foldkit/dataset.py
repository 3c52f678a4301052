"""Tabular data ingestion: CSV loading, schema inference, binary encoding,
normalization for clustering, and stratified cross-validation splits.

All values produced here are immutable; induction never mutates a loaded
example (demotion replaces examples with re-weighted copies).
"""
from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, UsageError

MISSING_TOKENS = {"", "?"}

# Tokens accepted as "this boolean attribute holds" (UCI files mix spellings).
TRUE_TOKENS = {"true", "t", "yes", "y", "1"}


class Kind(str, Enum):
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class FeatureSchema:
    """Feature names/kinds plus the target column and its positive label."""

    features: tuple[tuple[str, Kind], ...]
    target: str
    positive_label: str

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.features)

    def kind_of(self, name: str) -> Kind:
        for fname, kind in self.features:
            if fname == name:
                return kind
        raise KeyError(name)

    def __post_init__(self) -> None:
        names = self.names()
        if len(set(names)) != len(names):
            raise DataError("duplicate feature names in schema")
        if self.target in names:
            raise DataError(f"target column {self.target!r} listed among features")


@dataclass(frozen=True)
class Example:
    """One row: feature values (None = missing), label, and demotion weight.

    A freshly loaded example always has weight 1; weights below 1 only ever
    appear on copies made inside induction when a covered positive is demoted.
    """

    id: str
    values: dict[str, str | float | None]
    positive: bool
    weight: float = 1.0

    def value(self, feature: str) -> str | float | None:
        return self.values.get(feature)

    def demoted(self, factor: float) -> "Example":
        return dataclasses.replace(self, weight=factor)


@dataclass(frozen=True)
class ColumnSpec:
    """Provenance of one encoded column.

    kind "onehot_cat": categorical equality on `category`.
    kind "onehot_range": numeric membership in (low, high].
    kind "raw_numeric": the feature value passed through unencoded.
    """

    feature: str
    kind: str
    category: str | None = None
    low: float | None = None
    high: float | None = None


@dataclass(frozen=True)
class EncodedMatrix:
    rows: np.ndarray  # (n_examples, n_columns) float64
    column_map: tuple[ColumnSpec, ...]

    def __post_init__(self) -> None:
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.column_map):
            raise DataError("encoded matrix shape does not match its column map")


@dataclass(frozen=True)
class FoldSplit:
    folds: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (train, test) pairs


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _infer_positive_label(observed: Sequence[str]) -> str:
    """Pick the positive label when the caller did not name one.

    Accepts a unique true-like token among the observed labels; anything
    ambiguous must be resolved explicitly via positive_label.
    """
    hits = [tok for tok in dict.fromkeys(observed) if tok.lower() in TRUE_TOKENS
            or tok.lower() in {"positive", "pos", "+"}]
    if len(hits) == 1:
        return hits[0]
    raise DataError(
        "cannot infer the positive label from "
        f"{sorted(set(observed))}; pass positive_label explicitly"
    )


def load_csv(
    path: str,
    target: str,
    positive_label: str | None = None,
    require_both_classes: bool = True,
) -> tuple[FeatureSchema, list[Example]]:
    """Load an RFC-4180 CSV file with a header row into (schema, examples)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return load_csv_text(
            fh.read(), target, positive_label,
            source=path, require_both_classes=require_both_classes,
        )


def load_csv_text(
    text: str,
    target: str,
    positive_label: str | None = None,
    source: str = "<csv>",
    require_both_classes: bool = True,
) -> tuple[FeatureSchema, list[Example]]:
    """Parse CSV text with a header row into (schema, examples).

    A column is numeric iff every non-missing cell parses as a real number.
    Missing cells are "" or "?". A column literally named "id" (any case)
    supplies example identifiers and is not a feature; otherwise rows are
    identified as r0, r1, ...
    """
    path = source  # used only in error messages
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    rows = [row for row in reader if row]

    header = [h.strip() for h in header]
    if target not in header:
        raise DataError(f"{path}: target column {target!r} not in header {header}")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")

    id_col = next((h for h in header if h.lower() == "id"), None)
    feature_cols = [h for h in header if h != target and h != id_col]
    col_idx = {h: j for j, h in enumerate(header)}

    def cell(row: list[str], name: str) -> str:
        return row[col_idx[name]].strip()

    label_tokens = [cell(r, target) for r in rows]
    if any(tok in MISSING_TOKENS for tok in label_tokens):
        raise DataError(f"{path}: missing value in target column {target!r}")
    if positive_label is None:
        positive_label = _infer_positive_label(label_tokens)

    kinds: dict[str, Kind] = {}
    for name in feature_cols:
        cells = [cell(r, name) for r in rows]
        non_missing = [c for c in cells if c not in MISSING_TOKENS]
        if non_missing and all(_is_number(c) for c in non_missing):
            kinds[name] = Kind.NUMERIC
        else:
            kinds[name] = Kind.CATEGORICAL

    # A column with no observed values carries no information and would break
    # the non-empty category-set invariant; drop it rather than fail.
    usable = [
        name for name in feature_cols
        if any(cell(r, name) not in MISSING_TOKENS for r in rows)
    ]

    schema = FeatureSchema(
        features=tuple((name, kinds[name]) for name in usable),
        target=target,
        positive_label=positive_label,
    )

    examples: list[Example] = []
    for i, row in enumerate(rows):
        values: dict[str, str | float | None] = {}
        for name in usable:
            tok = cell(row, name)
            if tok in MISSING_TOKENS:
                values[name] = None
            elif kinds[name] is Kind.NUMERIC:
                values[name] = float(tok)
            else:
                values[name] = tok
        ex_id = cell(row, id_col) if id_col else f"r{i}"
        examples.append(Example(id=ex_id, values=values,
                                positive=cell(row, target) == positive_label))

    n_pos = sum(e.positive for e in examples)
    if require_both_classes and (n_pos == 0 or n_pos == len(examples)):
        raise DataError(
            f"{path}: degenerate dataset ({n_pos} positive of {len(examples)} examples)"
        )
    return schema, examples


def parse_background(text: str) -> list[tuple[str, str]]:
    """Parse one-level definitional rules of the form ``head(X) :- body(X).``

    Each rule means: rows on which the boolean attribute `body` holds also
    hold attribute `head`. Only this single definitional level is supported.
    """
    rules: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%") or line.startswith("#"):
            continue
        line = line.rstrip(".")
        if ":-" not in line:
            raise DataError(f"background line {lineno}: expected 'head(X) :- body(X).'")
        head, body = (part.strip() for part in line.split(":-", 1))
        try:
            head_name = head[: head.index("(")].strip()
            body_name = body[: body.index("(")].strip()
        except ValueError:
            raise DataError(f"background line {lineno}: malformed atom") from None
        rules.append((head_name, body_name))
    return rules


def apply_background(
    schema: FeatureSchema,
    examples: Sequence[Example],
    rules: Iterable[tuple[str, str]],
) -> list[Example]:
    """Apply one level of definitional expansion: where body holds, set head.

    Evaluated against the original values (no chaining); existing head values
    are never overwritten.
    """
    names = set(schema.names())
    out: list[Example] = []
    for ex in examples:
        new_values = dict(ex.values)
        for head, body in rules:
            if head not in names or body not in names:
                raise DataError(f"background rule {head} :- {body} names an unknown feature")
            val = ex.values.get(body)
            if isinstance(val, str) and val.lower() in TRUE_TOKENS and new_values.get(head) is None:
                new_values[head] = "true"
        out.append(dataclasses.replace(ex, values=new_values))
    return out


def observed_categories(examples: Sequence[Example], feature: str) -> list[str]:
    """Distinct non-missing values of a categorical feature, first-seen order."""
    seen: dict[str, None] = {}
    for ex in examples:
        val = ex.value(feature)
        if val is not None:
            seen[str(val)] = None
    return list(seen)


def equal_frequency_edges(values: Sequence[float], bins: int) -> list[float]:
    """Interior cut points for equal-frequency binning (deduplicated)."""
    if bins < 1:
        raise UsageError(f"bins must be >= 1, got {bins}")
    arr = np.sort(np.asarray(values, dtype=float))
    edges: list[float] = []
    for i in range(1, bins):
        q = float(np.quantile(arr, i / bins))
        if q >= arr[-1]:
            continue  # an edge at the max would create an empty top range
        if not edges or q > edges[-1]:
            edges.append(q)
    return edges


def merged_ranges(
    schema: FeatureSchema,
    examples: Sequence[Example],
    feature: str,
    bins: int,
    merge_tol: float = 0.05,
) -> list[tuple[float, float]]:
    """Equal-frequency ranges for a numeric feature, with adjacent ranges
    merged when their positive-class ratios differ by less than merge_tol.

    Ranges are half-open (low, high], tile the real line (outer ranges are
    unbounded), and never get reordered by merging.
    """
    vals = [float(ex.value(feature)) for ex in examples if ex.value(feature) is not None]
    if not vals:
        return [(-np.inf, np.inf)]
    edges = equal_frequency_edges(vals, bins)
    bounds = [-np.inf, *edges, np.inf]
    ranges = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    counts = []
    for low, high in ranges:
        pos = neg = 0
        for ex in examples:
            v = ex.value(feature)
            if v is None or not (low < float(v) <= high):
                continue
            if ex.positive:
                pos += 1
            else:
                neg += 1
        counts.append((pos, neg))

    def ratio(pos: int, neg: int) -> float | None:
        return pos / (pos + neg) if pos + neg else None

    merged: list[tuple[float, float, int, int]] = []
    for (low, high), (pos, neg) in zip(ranges, counts):
        if merged:
            plow, _, ppos, pneg = merged[-1]
            r_prev, r_cur = ratio(ppos, pneg), ratio(pos, neg)
            if r_prev is None or r_cur is None or abs(r_prev - r_cur) < merge_tol:
                merged[-1] = (plow, high, ppos + pos, pneg + neg)
                continue
        merged.append((low, high, pos, neg))
    return [(low, high) for low, high, _, _ in merged]


def encode_binary(
    schema: FeatureSchema,
    examples: Sequence[Example],
    bins: int = 10,
    merge_tol: float = 0.05,
) -> EncodedMatrix:
    """One-hot encode categoricals and range-merged numeric bins.

    Numeric features get at most `bins` equal-frequency ranges before
    merging. Missing values produce an all-zero group for that feature.
    """
    if bins < 1:
        raise UsageError(f"bins must be >= 1, got {bins}")
    specs: list[ColumnSpec] = []
    for name, kind in schema.features:
        if kind is Kind.CATEGORICAL:
            for cat in observed_categories(examples, name):
                specs.append(ColumnSpec(feature=name, kind="onehot_cat", category=cat))
        else:
            for low, high in merged_ranges(schema, examples, name, bins, merge_tol):
                specs.append(ColumnSpec(feature=name, kind="onehot_range", low=low, high=high))

    rows = np.zeros((len(examples), len(specs)), dtype=np.float64)
    for i, ex in enumerate(examples):
        for j, spec in enumerate(specs):
            v = ex.value(spec.feature)
            if v is None:
                continue
            if spec.kind == "onehot_cat":
                rows[i, j] = 1.0 if str(v) == spec.category else 0.0
            else:
                rows[i, j] = 1.0 if spec.low < float(v) <= spec.high else 0.0
    return EncodedMatrix(rows=rows, column_map=tuple(specs))


def encode_raw(schema: FeatureSchema, examples: Sequence[Example]) -> EncodedMatrix:
    """One-hot categoricals plus raw numeric columns (no binning).

    Missing numeric cells fall back to the column mean so distances stay
    defined; categoricals keep the all-zero-group convention.
    """
    specs: list[ColumnSpec] = []
    for name, kind in schema.features:
        if kind is Kind.CATEGORICAL:
            for cat in observed_categories(examples, name):
                specs.append(ColumnSpec(feature=name, kind="onehot_cat", category=cat))
        else:
            specs.append(ColumnSpec(feature=name, kind="raw_numeric"))

    rows = np.zeros((len(examples), len(specs)), dtype=np.float64)
    for j, spec in enumerate(specs):
        if spec.kind == "onehot_cat":
            for i, ex in enumerate(examples):
                rows[i, j] = 1.0 if str(ex.value(spec.feature)) == spec.category else 0.0
        else:
            vals = np.array(
                [np.nan if ex.value(spec.feature) is None else float(ex.value(spec.feature))
                 for ex in examples]
            )
            fill = np.nanmean(vals) if np.any(~np.isnan(vals)) else 0.0
            rows[:, j] = np.where(np.isnan(vals), fill, vals)
    return EncodedMatrix(rows=rows, column_map=tuple(specs))


def normalize_for_clustering(matrix: EncodedMatrix) -> EncodedMatrix:
    """Min-max scale raw numeric columns to [0, 1]; one-hot columns pass
    through untouched; constant raw columns map to all zeros."""
    if matrix.rows.size == 0:
        raise DataError("cannot normalize an empty matrix")
    rows = matrix.rows.copy()
    for j, spec in enumerate(matrix.column_map):
        if spec.kind != "raw_numeric":
            continue
        col = rows[:, j]
        lo, hi = float(col.min()), float(col.max())
        rows[:, j] = 0.0 if hi == lo else (col - lo) / (hi - lo)
    return EncodedMatrix(rows=rows, column_map=matrix.column_map)


def make_folds(labels: Sequence[bool], k_folds: int, seed: int) -> FoldSplit:
    """Deterministic stratified k-fold split.

    Test sets partition the indices, sizes differ by at most one, and each
    fold's positive count is within one of the proportional share.
    """
    n = len(labels)
    if k_folds < 2:
        raise UsageError(f"k_folds must be >= 2, got {k_folds}")
    if k_folds > n:
        raise UsageError(f"k_folds={k_folds} exceeds the {n} available examples")

    rng = np.random.RandomState(seed)
    pos = [i for i, lab in enumerate(labels) if lab]
    neg = [i for i, lab in enumerate(labels) if not lab]
    rng.shuffle(pos)
    rng.shuffle(neg)

    # Deal one class, then continue the round-robin into the other so total
    # fold sizes stay within one of each other.
    test_sets: list[list[int]] = [[] for _ in range(k_folds)]
    slot = 0
    for idx in pos + neg:
        test_sets[slot % k_folds].append(idx)
        slot += 1

    folds = []
    all_idx = set(range(n))
    for test in test_sets:
        train = sorted(all_idx - set(test))
        folds.append((tuple(train), tuple(sorted(test))))
    return FoldSplit(folds=tuple(folds))
