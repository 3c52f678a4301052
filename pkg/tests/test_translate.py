"""English rendering: directive parsing, template substitution, the fixed
abnormality/exception wording, and interval fusion."""
from __future__ import annotations

import pytest

from foldkit.errors import DataError
from foldkit.fold import fold
from foldkit.hypothesis import (
    CategoricalEq,
    Hypothesis,
    NotAbnormal,
    NumericGt,
    NumericLe,
    Rule,
)
from foldkit.translate import PredDirective, parse_pred_file, translate_hypothesis

PENGUIN_PREDS = """\
#pred fly(X): bird @X can fly
#pred bird(X): @X is a bird
#pred penguin(X): @X is a penguin
"""


# -- directive files ----------------------------------------------------------


def test_parse_pred_file():
    ds = parse_pred_file(PENGUIN_PREDS)
    assert [d.name for d in ds] == ["fly", "bird", "penguin"]
    assert ds[0].args == ("X",) and ds[0].arity == 1
    assert ds[0].template == "bird @X can fly"


def test_parse_skips_non_directive_lines():
    ds = parse_pred_file("% comment\n\n#pred a(X): has @X\nplain prose\n")
    assert len(ds) == 1 and ds[0].name == "a"


def test_parse_two_argument_directive():
    (d,) = parse_pred_file("#pred size(X, N): the size of @X is @N\n")
    assert d.arity == 2
    assert d.render("X", "big") == "the size of X is big"


def test_render_checks_arity():
    (d,) = parse_pred_file("#pred a(X): has @X\n")
    with pytest.raises(DataError):
        d.render("X", "extra")


@pytest.mark.parametrize(
    "text,msg",
    [
        ("#pred broken\n", "line 1: malformed"),
        ("\n#pred a(X, X): twice @X\n", "line 2: repeated argument"),
        ("#pred a(X): uses @Y\n", "line 1: unknown placeholder @Y"),
        ("#pred a(X): one @X\n#pred a(X): two @X\n", "line 2: duplicate"),
    ],
)
def test_parse_errors_carry_line_numbers(text, msg):
    with pytest.raises(DataError, match=msg):
        parse_pred_file(text)


# -- whole-theory translation -------------------------------------------------


def test_penguin_theory_in_english(penguin):
    schema, pos, neg = penguin
    hyp = fold(pos, neg, schema, pred_name="fly")
    text = translate_hypothesis(hyp, parse_pred_file(PENGUIN_PREDS))
    assert text == (
        "bird X can fly if:\n"
        "    X is a bird\n"
        "    unless abnormal condition 0 applies.\n"
        "abnormal condition 0 applies to bird X if:\n"
        "    X is a penguin.\n"
    )


def test_sentence_case_and_comma_chaining():
    hyp = Hypothesis(
        pred_name="mt",
        target_rules=(
            Rule(None, (NumericGt("clump", 6.0), NumericGt("nuclei", 2.0), NotAbnormal(0))),
        ),
        abnormal_rules={0: (Rule(0, (CategoricalEq("mitoses", "low"),)),)},
    )
    preds = parse_pred_file(
        "#pred mt(X): Tumor @X is malignant\n"
        "#pred clump(X, N): the clump thickness of @X is @N\n"
        "#pred nuclei(X, N): the bare nuclei of @X is @N\n"
        "#pred mitoses(X, V): the mitoses grade of @X is @V\n"
    )
    assert translate_hypothesis(hyp, preds) == (
        "tumor X is malignant if:\n"
        "    the clump thickness of X is larger than 6,\n"
        "    the bare nuclei of X is larger than 2\n"
        "    unless abnormal condition 0 applies.\n"
        "abnormal condition 0 applies to tumor X if:\n"
        "    the mitoses grade of X is low.\n"
    )


def test_interval_pair_fuses_into_one_phrase():
    hyp = Hypothesis(
        pred_name="mt",
        target_rules=(Rule(None, (NumericGt("size", 4.965), NumericLe("size", 8.2))),),
    )
    preds = parse_pred_file(
        "#pred mt(X): widget @X is large\n#pred size(X, N): the size of @X is @N\n"
    )
    assert translate_hypothesis(hyp, preds) == (
        "widget X is large if:\n"
        "    the size of X is larger than 4.965 and less than or equal to 8.2.\n"
    )


def test_multiple_unless_conditions_align():
    hyp = Hypothesis(
        pred_name="fly",
        target_rules=(
            Rule(None, (CategoricalEq("bird", "true"), NotAbnormal(0), NotAbnormal(1))),
        ),
        abnormal_rules={
            0: (Rule(0, (CategoricalEq("penguin", "true"),)),),
            1: (Rule(1, (CategoricalEq("hurt", "true"),)),),
        },
    )
    preds = parse_pred_file(
        PENGUIN_PREDS + "#pred hurt(X): @X is hurt\n"
    )
    text = translate_hypothesis(hyp, preds)
    assert (
        "    unless abnormal condition 0 applies and\n"
        "           abnormal condition 1 applies.\n"
    ) in text


def test_ground_abnormality_and_noise_sentences(penguin):
    schema, pos, neg = penguin
    hyp = Hypothesis(
        pred_name="fly",
        target_rules=(Rule(None, (CategoricalEq("bird", "true"), NotAbnormal(0))),),
        abnormal_rules={0: (Rule(0, (), ground_id="polly"),)},
        noise_facts=("et",),
    )
    text = translate_hypothesis(hyp, parse_pred_file(PENGUIN_PREDS))
    assert "abnormal condition 0 applies to bird polly.\n" in text
    assert text.endswith("bird et can fly (recorded as an exceptional case).\n")


def test_ab_directive_override():
    hyp = Hypothesis(
        pred_name="fly",
        target_rules=(Rule(None, (CategoricalEq("bird", "true"), NotAbnormal(0))),),
        abnormal_rules={0: (Rule(0, (CategoricalEq("penguin", "true"),)),)},
    )
    preds = parse_pred_file(
        PENGUIN_PREDS + "#pred ab0(X): the wings of @X are useless\n"
    )
    text = translate_hypothesis(hyp, preds)
    assert "the wings of X are useless if:\n    X is a penguin.\n" in text


def test_categorical_wording_depends_on_directive_arity():
    base = "#pred t(X): item @X matches\n"
    hyp_true = Hypothesis(
        pred_name="t", target_rules=(Rule(None, (CategoricalEq("flag", "true"),)),)
    )
    # Bare truth against a one-place directive reads as a plain statement.
    text = translate_hypothesis(
        hyp_true, parse_pred_file(base + "#pred flag(X): @X is flagged\n")
    )
    assert "    X is flagged.\n" in text
    # With a two-place directive even "true" is spelled out as a value.
    text = translate_hypothesis(
        hyp_true, parse_pred_file(base + "#pred flag(X, V): the flag of @X is @V\n")
    )
    assert "    the flag of X is true.\n" in text
    hyp_red = Hypothesis(
        pred_name="t", target_rules=(Rule(None, (CategoricalEq("color", "red"),)),)
    )
    text = translate_hypothesis(
        hyp_red, parse_pred_file(base + "#pred color(X, V): the color of @X is @V\n")
    )
    assert "    the color of X is red.\n" in text


def test_missing_directive_names_the_predicate(penguin):
    schema, pos, neg = penguin
    hyp = fold(pos, neg, schema, pred_name="fly")
    preds = parse_pred_file("#pred fly(X): bird @X can fly\n#pred bird(X): @X is a bird\n")
    with pytest.raises(DataError, match=r"missing #pred directive for penguin/1"):
        translate_hypothesis(hyp, preds)


def test_empty_theory_translates_to_nothing():
    assert translate_hypothesis(Hypothesis(pred_name="t"), []) == ""


def test_integral_thresholds_drop_the_decimal_point():
    hyp = Hypothesis(
        pred_name="t", target_rules=(Rule(None, (NumericLe("size", 4.0),)),)
    )
    preds = parse_pred_file(
        "#pred t(X): item @X matches\n#pred size(X, N): the size of @X is @N\n"
    )
    assert "less than or equal to 4.\n" in translate_hypothesis(hyp, preds)
