"""CSV ingestion, encoding, and fold-splitting tests."""
from __future__ import annotations

import math
import random

import numpy as np
import pytest

from foldkit.dataset import (
    Example,
    FeatureSchema,
    Kind,
    apply_background,
    encode_binary,
    encode_raw,
    equal_frequency_edges,
    load_csv_text,
    make_folds,
    merged_ranges,
    normalize_for_clustering,
    observed_categories,
    parse_background,
)
from foldkit.errors import DataError, UsageError

CSV = """id,age,color,label
a1,34,red,yes
a2,?,blue,no
a3,51,red,yes
a4,12,,no
"""


def test_load_infers_kinds_and_ids():
    schema, rows = load_csv_text(CSV, "label", "yes")
    assert schema.features == (("age", Kind.NUMERIC), ("color", Kind.CATEGORICAL))
    assert schema.positive_label == "yes"
    assert [e.id for e in rows] == ["a1", "a2", "a3", "a4"]
    assert rows[0].values == {"age": 34.0, "color": "red"}
    assert rows[1].value("age") is None
    assert rows[3].value("color") is None
    assert [e.positive for e in rows] == [True, False, True, False]


def test_load_generates_row_ids_without_id_column():
    _, rows = load_csv_text("x,label\n1,yes\n2,no\n", "label", "yes")
    assert [e.id for e in rows] == ["r0", "r1"]


def test_load_infers_positive_label_from_boolean_tokens():
    schema, _ = load_csv_text("x,ok\n1,true\n2,false\n", "ok")
    assert schema.positive_label == "true"
    with pytest.raises(DataError):
        load_csv_text("x,grade\n1,low\n2,high\n", "grade")  # nothing true-like


def test_load_rejects_bad_shapes():
    with pytest.raises(DataError):
        load_csv_text("", "label")
    with pytest.raises(DataError):
        load_csv_text("a,label\n1\n", "label", "yes")  # short row
    with pytest.raises(DataError):
        load_csv_text("a,b\n1,2\n", "label", "yes")  # no target column
    with pytest.raises(DataError):
        load_csv_text("a,label\n1,\n", "label", "yes")  # missing label cell


def test_load_degenerate_labels():
    one_class = "x,label\n1,yes\n2,yes\n"
    with pytest.raises(DataError):
        load_csv_text(one_class, "label", "yes")
    # Scoring a fixed theory on a one-class file is legitimate.
    _, rows = load_csv_text(one_class, "label", "yes", require_both_classes=False)
    assert len(rows) == 2


def test_background_one_level_only():
    rules = parse_background("% comment\nbird(X) :- penguin(X).\n")
    assert rules == [("bird", "penguin")]
    schema = FeatureSchema(
        features=(("bird", Kind.CATEGORICAL), ("penguin", Kind.CATEGORICAL),
                  ("animal", Kind.CATEGORICAL)),
        target="y", positive_label="1",
    )
    rows = [Example(id="p", values={"penguin": "true"}, positive=False)]
    out = apply_background(schema, rows, [("bird", "penguin"), ("animal", "bird")])
    assert out[0].value("bird") == "true"
    # bird was set in this same pass, so the animal rule does not chain off it.
    assert out[0].value("animal") is None


def test_background_never_overwrites():
    schema = FeatureSchema(
        features=(("bird", Kind.CATEGORICAL), ("penguin", Kind.CATEGORICAL)),
        target="y", positive_label="1",
    )
    rows = [Example(id="p", values={"bird": "false", "penguin": "true"}, positive=False)]
    out = apply_background(schema, rows, [("bird", "penguin")])
    assert out[0].value("bird") == "false"


def test_background_unknown_feature():
    schema = FeatureSchema(features=(("a", Kind.CATEGORICAL),), target="y", positive_label="1")
    with pytest.raises(DataError):
        apply_background(schema, [Example(id="e", values={"a": "true"}, positive=True)],
                         [("a", "nope")])
    with pytest.raises(DataError):
        parse_background("bird penguin\n")


def test_observed_categories_first_seen_order():
    rows = [Example(id=str(i), values={"c": v}, positive=False)
            for i, v in enumerate(["b", "a", "b", None, "c"])]
    assert observed_categories(rows, "c") == ["b", "a", "c"]


def test_equal_frequency_edges():
    edges = equal_frequency_edges(list(range(1, 11)), 5)
    assert edges == pytest.approx([2.8, 4.6, 6.4, 8.2])
    # Ties collapse duplicate edges instead of stacking them.
    assert equal_frequency_edges([1, 1, 1, 1, 2], 4) == [1.0]
    with pytest.raises(UsageError):
        equal_frequency_edges([1.0], 0)


def test_merged_ranges_by_label_ratio():
    schema = FeatureSchema(features=(("v", Kind.NUMERIC),), target="y", positive_label="1")
    rows = [Example(id=str(v), values={"v": float(v)}, positive=v >= 6)
            for v in range(1, 11)]
    ranges = merged_ranges(schema, rows, "v", bins=5)
    # The two all-negative bottom ranges merge, as do the two all-positive
    # top ranges; the mixed middle range stays.
    assert len(ranges) == 3
    assert ranges[0][0] == -math.inf and ranges[-1][1] == math.inf
    assert ranges[0][1] == pytest.approx(4.6)
    assert ranges[1] == pytest.approx((4.6, 6.4))


def test_encode_binary_hand_worked():
    schema = FeatureSchema(
        features=(("color", Kind.CATEGORICAL), ("v", Kind.NUMERIC)),
        target="y", positive_label="1",
    )
    rows = [
        Example(id="a", values={"color": "red", "v": 1.0}, positive=False),
        Example(id="b", values={"color": "blue", "v": 10.0}, positive=True),
        Example(id="c", values={"color": None, "v": None}, positive=False),
    ]
    enc = encode_binary(schema, rows, bins=2)
    cats = [(c.feature, c.category) for c in enc.column_map if c.kind == "onehot_cat"]
    assert cats == [("color", "red"), ("color", "blue")]
    # Missing values give an all-zero one-hot group.
    assert enc.rows[2].tolist() == [0.0] * enc.rows.shape[1]
    assert enc.rows[0][0] == 1.0 and enc.rows[1][1] == 1.0
    ranges = [c for c in enc.column_map if c.kind == "onehot_range"]
    assert ranges  # at least one numeric range column
    for col in ranges:
        for i, ex in enumerate(rows[:2]):
            expected = 1.0 if col.low < ex.value("v") <= col.high else 0.0
            assert enc.rows[i][enc.column_map.index(col)] == expected


def test_encode_raw_and_normalize():
    schema = FeatureSchema(
        features=(("v", Kind.NUMERIC), ("w", Kind.NUMERIC)),
        target="y", positive_label="1",
    )
    rows = [
        Example(id="a", values={"v": 0.0, "w": 7.0}, positive=True),
        Example(id="b", values={"v": 10.0, "w": 7.0}, positive=True),
        Example(id="c", values={"v": None, "w": 7.0}, positive=True),
    ]
    enc = encode_raw(schema, rows)
    assert enc.rows[2][0] == pytest.approx(5.0)  # column-mean imputation
    norm = normalize_for_clustering(enc)
    assert norm.rows[:, 0].min() == 0.0 and norm.rows[:, 0].max() == 1.0
    assert np.all(norm.rows[:, 1] == 0.0)  # constant column maps to zeros


def test_make_folds_partition_and_stratification():
    rng = random.Random(3)
    labels = [rng.random() < 0.3 for _ in range(53)]
    split = make_folds(labels, 5, seed=11)
    all_test = [i for _, test in split.folds for i in test]
    assert sorted(all_test) == list(range(53))
    sizes = [len(test) for _, test in split.folds]
    assert max(sizes) - min(sizes) <= 1
    share = sum(labels) / 5
    for train, test in split.folds:
        n_pos = sum(labels[i] for i in test)
        assert abs(n_pos - share) <= 1
        assert sorted(set(train) | set(test)) == list(range(53))


def test_make_folds_deterministic_and_validated():
    labels = [i % 3 == 0 for i in range(20)]
    a = make_folds(labels, 4, seed=9)
    b = make_folds(labels, 4, seed=9)
    assert a == b
    c = make_folds(labels, 4, seed=10)
    assert a != c
    with pytest.raises(UsageError):
        make_folds(labels, 1, seed=0)
    with pytest.raises(UsageError):
        make_folds(labels, 21, seed=0)
