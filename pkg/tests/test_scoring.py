"""Gain-heuristic tests against an arbitrary-precision oracle.

The oracle evaluates the published two-term formula in its raw form — with
the demotion factor still inside the demoted-term logarithms — under mpmath,
so agreement simultaneously checks the arithmetic and the algebraic
cancellation the implementation relies on.
"""
from __future__ import annotations

import math
import random

import mpmath as mp
import numpy as np
import pytest

from foldkit.dataset import FeatureSchema, Kind
from foldkit.hypothesis import BARE_TRUE, CategoricalEq, Hypothesis, NumericGt, NumericLe, Rule
from foldkit.scoring import (
    FACT_DL,
    NEG_INF,
    GainCounts,
    best_literal,
    candidate_literals,
    dl_enumeration_wins,
    enumeration_wins,
    gain_vector,
    hypothesis_dl,
    information_gain,
    numeric_thresholds,
    theory_dl,
)


def oracle_gain(c: GainCounts, dps: int = 50) -> float:
    """Reference evaluation: raw formula, f kept inside the demoted logs."""
    with mp.workdps(dps):
        total = mp.mpf(0)
        if c.t > 0:
            if c.p1 <= 0 or c.p0 <= 0:
                return NEG_INF
            p0, n0, p1, n1 = (mp.mpf(x) for x in (c.p0, c.n0, c.p1, c.n1))
            total += mp.mpf(c.t) * (mp.log(p1 / (p1 + n1), 2) - mp.log(p0 / (p0 + n0), 2))
        if c.t_prime > 0 and c.f > 0:
            if c.p3 <= 0 or c.p2 <= 0:
                return NEG_INF
            p2, n2, p3, n3, f = (mp.mpf(x) for x in (c.p2, c.n2, c.p3, c.n3, c.f))
            total += mp.mpf(c.t_prime) * f * (
                mp.log(p3 * f / (p3 + n3), 2) - mp.log(p2 * f / (p2 + n2), 2)
            )
        return float(total)


def random_counts(rng: random.Random, with_demoted: bool = True) -> GainCounts:
    """Random tallies satisfying the containment invariants
    (p1 <= p0, n1 <= n0, p3 <= p2, n3 <= n2, t <= min(p0,p1), t' <= min(p2,p3))."""
    def down(hi: float) -> float:
        return round(rng.uniform(0.0, hi), 3)

    p0, n0 = down(40), down(40)
    p1, n1 = down(p0), down(n0)
    if with_demoted:
        p2, n2 = down(40), down(40)
        p3, n3 = down(p2), down(n2)
        t_prime = down(min(p2, p3))
    else:
        p2 = n2 = p3 = n3 = t_prime = 0.0
    return GainCounts(
        p0=p0, n0=n0, p1=p1, n1=n1, t=down(min(p0, p1)),
        p2=p2, n2=n2, p3=p3, n3=n3, t_prime=t_prime,
        f=round(rng.random(), 3),
    )


def foil_gain(p0: float, n0: float, p1: float, n1: float, t: float) -> float:
    """Classic single-term gain over the active examples only."""
    if t <= 0:
        return 0.0
    if p1 <= 0 or p0 <= 0:
        return NEG_INF
    return t * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


# ---------------------------------------------------------------------------
# Worked values


def test_pure_split_gain_is_two():
    # Two positives kept out of a 2/2 mix, no negatives survive.
    for f in (0.0, 0.5, 1.0):
        c = GainCounts(p0=2, n0=2, p1=2, n1=0, t=2, f=f)
        assert information_gain(c) == pytest.approx(2.0, abs=1e-12)
        assert information_gain(c) == pytest.approx(oracle_gain(c), abs=1e-12)


def test_unchanged_ratio_gain_is_zero():
    c = GainCounts(p0=2, n0=2, p1=1, n1=1, t=1)
    assert information_gain(c) == pytest.approx(0.0, abs=1e-12)


def test_demoted_only_gain():
    # Active term has zero multiplier; the demoted side alone contributes
    # 2 * 0.5 * (log2(1) - log2(0.5)) = 1.
    c = GainCounts(p0=0, n0=0, p1=0, n1=0, t=0,
                   p2=4, n2=4, p3=2, n3=0, t_prime=2, f=0.5)
    assert information_gain(c) == pytest.approx(1.0, abs=1e-12)
    assert information_gain(c) == pytest.approx(oracle_gain(c), abs=1e-12)


def test_no_surviving_positive_is_sentinel():
    assert information_gain(GainCounts(p0=3, n0=1, p1=0, n1=2, t=1)) == NEG_INF
    # Demoted term with positive multiplier but no demoted positive mass.
    assert information_gain(
        GainCounts(p0=0, n0=0, p1=0, n1=0, t=0, p2=0, n2=3, p3=0, n3=1, t_prime=1, f=0.5)
    ) == NEG_INF


def test_zero_multiplier_term_is_exactly_zero():
    # t = 0 silences the active term even with p1 = 0; f = 0 silences the
    # demoted term even though the raw formula would divide log(0) there.
    assert information_gain(GainCounts(p0=5, n0=5, p1=0, n1=0, t=0)) == 0.0
    c = GainCounts(p0=2, n0=2, p1=2, n1=0, t=2, p2=4, n2=4, p3=0, n3=0, t_prime=4, f=0.0)
    assert information_gain(c) == pytest.approx(2.0, abs=1e-12)


# ---------------------------------------------------------------------------
# Algebraic properties


def test_oracle_agreement_random():
    rng = random.Random(1001)
    for _ in range(2000):
        c = random_counts(rng)
        got, want = information_gain(c), oracle_gain(c)
        if math.isinf(want):
            assert got == want
        else:
            assert got == pytest.approx(want, abs=1e-12, rel=1e-12)


def test_f_cancellation_both_orders():
    # Evaluating the demoted difference with f inside the logs must match the
    # cancelled form to 1e-12 for f > 0.
    rng = random.Random(77)
    checked = 0
    while checked < 500:
        c = random_counts(rng)
        if c.t_prime <= 0 or c.f <= 0 or c.p3 <= 0 or c.p2 <= 0:
            continue
        raw = math.log2(c.p3 * c.f / (c.p3 + c.n3)) - math.log2(c.p2 * c.f / (c.p2 + c.n2))
        cancelled = math.log2(c.p3 / (c.p3 + c.n3)) - math.log2(c.p2 / (c.p2 + c.n2))
        assert raw == pytest.approx(cancelled, abs=1e-12)
        checked += 1


def test_reduces_to_classic_gain_without_demotion():
    rng = random.Random(42)
    for _ in range(500):
        c = random_counts(rng, with_demoted=False)
        classic = foil_gain(c.p0, c.n0, c.p1, c.n1, c.t)
        assert information_gain(c) == classic or (
            information_gain(c) == pytest.approx(classic, abs=1e-12)
        )
        # f = 0 with populated demoted slots reduces the same way.
        c2 = random_counts(rng)
        c2 = GainCounts(**{**c2.__dict__, "f": 0.0})
        classic2 = foil_gain(c2.p0, c2.n0, c2.p1, c2.n1, c2.t)
        got2 = information_gain(c2)
        if math.isinf(classic2):
            assert got2 == classic2
        else:
            assert got2 == pytest.approx(classic2, abs=1e-12)


def test_gain_upper_bound():
    # Best case keeps every positive and sheds every negative:
    # t*log2((p0+n0)/p0) plus the analogous demoted ceiling.
    rng = random.Random(7)
    for _ in range(500):
        c = random_counts(rng)
        got = information_gain(c)
        if math.isinf(got):
            continue
        bound = 0.0
        if c.t > 0 and c.p0 > 0:
            bound += c.t * math.log2((c.p0 + c.n0) / c.p0)
        if c.t_prime > 0 and c.f > 0 and c.p2 > 0:
            bound += c.t_prime * c.f * math.log2((c.p2 + c.n2) / c.p2)
        assert got <= bound + 1e-9


def test_gain_vector_matches_scalar():
    rng = random.Random(5)
    p0, n0, p2, n2, f = 12.0, 9.0, 6.0, 4.0, 0.5
    p1 = np.array([rng.uniform(0, p0) for _ in range(64)])
    n1 = np.array([rng.uniform(0, n0) for _ in range(64)])
    p3 = np.array([rng.uniform(0, p2) for _ in range(64)])
    n3 = np.array([rng.uniform(0, n2) for _ in range(64)])
    p1[0] = 0.0  # unusable candidate slot
    vec = gain_vector(p1, n1, p0, n0, p3, n3, p2, n2, f)
    for i in range(64):
        c = GainCounts(p0=p0, n0=n0, p1=p1[i], n1=n1[i], t=p1[i],
                       p2=p2, n2=n2, p3=p3[i], n3=n3[i], t_prime=p3[i], f=f)
        want = information_gain(c)
        if p1[i] <= 0:
            assert vec[i] == NEG_INF
        else:
            assert vec[i] == pytest.approx(want, abs=1e-12)


# ---------------------------------------------------------------------------
# Candidate generation and selection


def test_penguin_candidates_and_selection(penguin):
    schema, pos, neg = penguin
    units = candidate_literals(schema, pos + neg)
    lits = {u[0].feature for u in units}
    assert lits == {"bird", "cat", "penguin"}
    assert all(len(u) == 1 and u[0].category == BARE_TRUE for u in units)

    picked = best_literal(units, pos, neg)
    assert picked is not None
    unit, gain = picked
    assert unit[0] == CategoricalEq("bird", BARE_TRUE)
    # 2*(log2(2/3) - log2(1/2)): both positives kept, one negative survives.
    assert gain == pytest.approx(2 * (math.log2(2 / 3) + 1), abs=1e-12)


def test_best_literal_empty_and_no_positive_gain(penguin):
    schema, pos, neg = penguin
    assert best_literal([], pos, neg) is None
    # Candidates covering no positives are unusable even if they exclude
    # negatives.
    cat_only = [(CategoricalEq("cat", BARE_TRUE),), (CategoricalEq("penguin", BARE_TRUE),)]
    assert best_literal(cat_only, pos, neg) is None


def test_best_literal_tie_keeps_first(penguin):
    schema, pos, neg = penguin
    a = (CategoricalEq("bird", BARE_TRUE),)
    b = (NumericGt("bird_score", -1.0),)  # nobody has the feature: covers nothing
    picked = best_literal([a, b, a], pos, neg)
    assert picked is not None and picked[0] is a


def test_numeric_threshold_midpoints():
    assert numeric_thresholds([3.0, 4.0], [False, True]) == [3.5]
    assert numeric_thresholds([3.0, 4.0], [False, False]) == []
    # A value with mixed labels splits against both neighbours.
    assert numeric_thresholds([1.0, 2.0, 3.0], [False, True, False]) == [1.5, 2.5]
    assert numeric_thresholds([2.0, 2.0, 5.0], [True, False, False]) == [3.5]


def test_candidate_literals_numeric_mode():
    schema = FeatureSchema(features=(("v", Kind.NUMERIC),), target="y", positive_label="1")
    from foldkit.dataset import Example
    rows = [Example(id="a", values={"v": 3.0}, positive=False),
            Example(id="b", values={"v": 4.0}, positive=True)]
    units = candidate_literals(schema, rows, numeric_mode=True)
    assert (NumericGt("v", 3.5),) in units
    assert (NumericLe("v", 3.5),) in units
    assert len(units) == 2


def test_candidate_literals_drops_used(penguin):
    schema, pos, neg = penguin
    used = frozenset({CategoricalEq("bird", BARE_TRUE)})
    units = candidate_literals(schema, pos + neg, used=used)
    assert all(CategoricalEq("bird", BARE_TRUE) not in u for u in units)
    assert len(units) == 2


# ---------------------------------------------------------------------------
# Description length and enumeration arbitration


def test_theory_dl_counts_rules_plus_literals():
    r1 = Rule(head_ab=None, body=(CategoricalEq("a", BARE_TRUE), NumericGt("x", 1.0)))
    r2 = Rule(head_ab=0, body=(CategoricalEq("b", BARE_TRUE),))
    fact = Rule(head_ab=0, body=(), ground_id="r9")
    assert theory_dl([r1]) == 3
    assert theory_dl([r1, r2]) == 5
    assert theory_dl([fact]) == FACT_DL
    hyp = Hypothesis(target_rules=(r1,), abnormal_rules={0: (r2, fact)}, noise_facts=("z1",))
    assert hypothesis_dl(hyp) == 3 + 2 + FACT_DL + FACT_DL


def test_enumeration_wins_empty_theory():
    assert enumeration_wins(Hypothesis(), remaining_neg=3) is True


def test_enumeration_loses_for_many_remaining():
    # One rule of one literal (cost 2) against five ground facts: keep it.
    sub = Hypothesis(
        pred_name="ab0",
        target_rules=(Rule(head_ab=None, body=(CategoricalEq("p", BARE_TRUE),)),),
    )
    assert enumeration_wins(sub, remaining_neg=5) is False


def test_enumeration_boundary_keeps_single_literal_exception():
    # Cost 2 vs one ground fact, which also costs 2 (rule + ground term):
    # the tie goes to the exception, which is what keeps the classic
    # birds-with-penguins theory in its two-rule form.
    sub = Hypothesis(
        pred_name="ab0",
        target_rules=(Rule(head_ab=None, body=(CategoricalEq("penguin", BARE_TRUE),)),),
    )
    assert enumeration_wins(sub, remaining_neg=1) is False
    assert dl_enumeration_wins(3, 1) is True
    assert dl_enumeration_wins(4, 2) is False
    assert dl_enumeration_wins(0, 5) is True
