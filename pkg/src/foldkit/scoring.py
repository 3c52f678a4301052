"""Heuristics for greedy clause specialization.

The gain of a candidate literal blends two parts: the classic information gain
over the active examples, and a demotion-weighted copy of the same quantity
over demoted examples. Writing the demoted part as

    t' * f * (log2(p3*f / (p3+n3)) - log2(p2*f / (p2+n2)))

the factor f inside the logs cancels, so we evaluate the cancelled form; f
survives only as the multiplier on the demoted difference. Each of the two
terms is defined as exactly 0 when its leading multiplier (t, or t'*f) is 0,
which also makes the f -> 0 limit exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import ColumnSpec, Example, Kind, FeatureSchema, encode_binary, observed_categories
from .hypothesis import CategoricalEq, Hypothesis, Literal, NumericGt, NumericLe, Rule, literal_holds

NEG_INF = float("-inf")

# Description-length cost of enumerating one example as a ground fact:
# one rule plus one ground term.
FACT_DL = 2

# A candidate unit: one or two literals taken as a single body-length step.
# A one-hot range column becomes the pair (feature > low, feature <= high).
Unit = tuple[Literal, ...]


@dataclass(frozen=True)
class GainCounts:
    """Weighted coverage tallies around one candidate literal.

    p/n are positive/negative mass; indices 0 and 1 are the active examples
    covered by the rule before/after adding the literal, 2 and 3 the demoted
    counterparts. t (t_prime) is the active (demoted) positive mass covered
    both before and after; f is the demotion factor.
    """

    p0: float
    n0: float
    p1: float
    n1: float
    t: float
    p2: float = 0.0
    n2: float = 0.0
    p3: float = 0.0
    n3: float = 0.0
    t_prime: float = 0.0
    f: float = 0.0


def information_gain(counts: GainCounts) -> float:
    """Demotion-weighted gain. Total: degenerate ratios inside an active term
    (a positive multiplier with no surviving positive mass) yield -inf, which
    is exactly the "literal covers no positives, never take it" sentinel."""
    c = counts
    gain = 0.0
    if c.t > 0.0:
        if c.p1 <= 0.0 or c.p0 <= 0.0:
            return NEG_INF
        gain += c.t * (math.log2(c.p1 / (c.p1 + c.n1)) - math.log2(c.p0 / (c.p0 + c.n0)))
    if c.t_prime > 0.0 and c.f > 0.0:
        if c.p3 <= 0.0 or c.p2 <= 0.0:
            return NEG_INF
        gain += (
            c.t_prime
            * c.f
            * (math.log2(c.p3 / (c.p3 + c.n3)) - math.log2(c.p2 / (c.p2 + c.n2)))
        )
    return gain


def gain_vector(
    p1: np.ndarray,
    n1: np.ndarray,
    p0: float,
    n0: float,
    p3: np.ndarray | None = None,
    n3: np.ndarray | None = None,
    p2: float = 0.0,
    n2: float = 0.0,
    f: float = 0.0,
) -> np.ndarray:
    """information_gain over many candidates at once, with t = p1 and
    t' = p3 (true for body extension: coverage after is a subset of before).

    Candidates with p1 = 0 come back as -inf: a clause must keep covering
    active positive mass or the covering loop cannot make progress.
    """
    if p0 <= 0.0:
        return np.full(p1.shape, NEG_INF)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = p1 * (np.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))
        if f > 0.0 and p2 > 0.0 and p3 is not None:
            dem = p3 * f * (np.log2(p3 / (p3 + n3)) - math.log2(p2 / (p2 + n2)))
            gain = gain + np.where(p3 > 0.0, dem, 0.0)
    gain = np.where(p1 > 0.0, gain, NEG_INF)
    return np.nan_to_num(gain, nan=NEG_INF, posinf=NEG_INF, neginf=NEG_INF)


# ---------------------------------------------------------------------------
# Candidate generation


def binary_units(column_map: Sequence[ColumnSpec]) -> list[Unit]:
    """One unit per one-hot column of a binarized encoding."""
    units: list[Unit] = []
    for col in column_map:
        if col.kind == "onehot_cat":
            units.append((CategoricalEq(col.feature, col.category),))
        elif col.kind == "onehot_range":
            lits: list[Literal] = []
            if col.low is not None:
                lits.append(NumericGt(col.feature, float(col.low)))
            if col.high is not None:
                lits.append(NumericLe(col.feature, float(col.high)))
            if lits:
                units.append(tuple(lits))
        else:
            raise ValueError(f"binarized encoding cannot contain {col.kind} columns")
    return units


def numeric_thresholds(values: Sequence[float], labels: Sequence[bool]) -> list[float]:
    """Split points at midpoints between consecutive distinct values whose
    label composition differs (or is mixed on either side)."""
    by_value: dict[float, set[bool]] = {}
    for v, y in zip(values, labels):
        by_value.setdefault(float(v), set()).add(bool(y))
    distinct = sorted(by_value)
    out: list[float] = []
    for a, b in zip(distinct, distinct[1:]):
        la, lb = by_value[a], by_value[b]
        if la != lb or len(la) > 1 or len(lb) > 1:
            out.append((a + b) / 2.0)
    return out


def numeric_units(schema: FeatureSchema, examples: Sequence[Example]) -> list[Unit]:
    """Candidate units straight from raw values: categorical equalities plus
    data-driven numeric thresholds tested in both directions."""
    units: list[Unit] = []
    for name, kind in schema.features:
        if kind == Kind.CATEGORICAL:
            for cat in observed_categories(examples, name):
                units.append((CategoricalEq(name, cat),))
        else:
            vals: list[float] = []
            labels: list[bool] = []
            for ex in examples:
                v = ex.value(name)
                if v is None:
                    continue
                vals.append(float(v))
                labels.append(ex.positive)
            for thr in numeric_thresholds(vals, labels):
                units.append((NumericGt(name, thr),))
                units.append((NumericLe(name, thr),))
    return units


def candidate_literals(
    schema: FeatureSchema,
    examples: Sequence[Example],
    used: frozenset[Literal] | set[Literal] = frozenset(),
    numeric_mode: bool = False,
    ranges: Sequence[ColumnSpec] | None = None,
) -> list[Unit]:
    """The candidate pool for one induction run, derived from the given
    examples. A unit is dropped when any of its literals was already used.

    In the binarized mode, ranges (a column map) may be passed in to pin the
    candidate space; otherwise it is derived from the examples.
    """
    if numeric_mode:
        units = numeric_units(schema, examples)
    else:
        cols = ranges if ranges is not None else encode_binary(schema, examples).column_map
        units = binary_units(cols)
    if not used:
        return units
    used_set = set(used)
    return [u for u in units if not any(lit in used_set for lit in u)]


# ---------------------------------------------------------------------------
# Literal selection (reference implementation; the induction engine computes
# the same quantities vectorized)


def _covered(body: Sequence[Literal], examples: Sequence[Example]) -> list[Example]:
    return [ex for ex in examples if all(literal_holds(lit, ex) for lit in body)]


def _mass(examples: Sequence[Example]) -> float:
    return float(sum(ex.weight for ex in examples))


def best_literal(
    candidates: Sequence[Unit],
    active_pos: Sequence[Example],
    active_neg: Sequence[Example],
    demoted_pos: Sequence[Example] = (),
    demoted_neg: Sequence[Example] = (),
    current_rule: Rule | None = None,
    f: float = 0.0,
) -> tuple[Unit, float] | None:
    """Highest-gain candidate with strictly positive gain, or None. Ties keep
    the earliest candidate. Candidates keeping no active positive mass are
    unusable regardless of their demoted-side gain."""
    body: tuple[Literal, ...] = current_rule.body if current_rule is not None else ()
    cur_pos = _covered(body, active_pos)
    cur_neg = _covered(body, active_neg)
    cur_dpos = _covered(body, demoted_pos)
    cur_dneg = _covered(body, demoted_neg)
    p0, n0 = _mass(cur_pos), _mass(cur_neg)
    p2, n2 = _mass(cur_dpos), _mass(cur_dneg)

    best: tuple[Unit, float] | None = None
    for unit in candidates:
        new_pos = _covered(unit, cur_pos)
        p1 = _mass(new_pos)
        if p1 <= 0.0:
            continue
        counts = GainCounts(
            p0=p0,
            n0=n0,
            p1=p1,
            n1=_mass(_covered(unit, cur_neg)),
            t=p1,
            p2=p2,
            n2=n2,
            p3=_mass(_covered(unit, cur_dpos)),
            n3=_mass(_covered(unit, cur_dneg)),
            t_prime=_mass(_covered(unit, cur_dpos)),
            f=f,
        )
        gain = information_gain(counts)
        if gain > 0.0 and (best is None or gain > best[1]):
            best = (unit, gain)
    return best


# ---------------------------------------------------------------------------
# Exception-vs-enumeration arbitration


def theory_dl(rules: Sequence[Rule]) -> int:
    """Description length: 1 per rule plus 1 per body literal; a ground fact
    costs FACT_DL (its rule plus its ground term)."""
    total = 0
    for rule in rules:
        total += FACT_DL if rule.ground_id is not None else 1 + len(rule.body)
    return total


def hypothesis_dl(hyp: Hypothesis) -> int:
    rules = list(hyp.target_rules)
    for rs in hyp.abnormal_rules.values():
        rules.extend(rs)
    return theory_dl(rules) + FACT_DL * len(hyp.noise_facts)


def dl_enumeration_wins(exception_dl: int, remaining: int) -> bool:
    """Listing `remaining` examples as ground facts beats an exception theory
    of the given description length iff the listing is strictly cheaper."""
    if exception_dl <= 0:
        return True
    return exception_dl > FACT_DL * remaining


def enumeration_wins(
    exception_hyp: Hypothesis, remaining_neg: int, rule_so_far: Rule | None = None
) -> bool:
    """Decide whether the negatives still covered by rule_so_far should be
    enumerated as ground abnormality facts instead of keeping the learned
    exception theory. rule_so_far does not enter the cost (kept for call-site
    symmetry); an empty exception theory always loses to enumeration."""
    del rule_so_far
    return dl_enumeration_wins(hypothesis_dl(exception_hyp), remaining_neg)
