"""Sequential covering with negation-as-failure exceptions.

The learner repeatedly specializes a default clause by the best-gain candidate
unit until no covered negatives remain, the clause hits its length budget, or
no unit helps. Negatives still covered by an accepted clause are handled by an
abnormality predicate learned recursively on the swapped example sets; when the
learned exception theory costs more (in description length) than simply listing
the offending examples as ground facts, the listing wins. Positives that no
clause can cover are enumerated as ground facts of the target predicate.

With a demotion factor f > 0, positives covered by an accepted clause are not
dropped but moved to a demoted pool that keeps influencing the gain of later
clauses at weight f; callers may also seed that pool (e.g. with the positives
belonging to other clusters of the data).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .dataset import ColumnSpec, Example, FeatureSchema
from .errors import DataError, UsageError
from .hypothesis import (
    Hypothesis,
    Literal,
    NotAbnormal,
    Rule,
    classify,
    rule_covers,
)
from .hypothesis import literal_holds as _lit_holds
from .scoring import (
    FACT_DL,
    candidate_literals,
    dl_enumeration_wins,
    gain_vector,
    theory_dl,
)

BINARY = "binary"
NUMERIC = "numeric"


@dataclass(frozen=True)
class InductionConfig:
    """Knobs shared by all induction entry points.

    mode selects the candidate space: "binary" tests one-hot categories and
    binned value ranges; "numeric" tests raw categorical equalities plus
    data-driven thresholds. ranges, when given, pins the binarized columns
    (otherwise they are derived from the training examples on the fly).
    ab_depth caps exception nesting (exceptions to exceptions by default).
    """

    mode: str = BINARY
    max_clause_length: int = 5
    ab_depth: int = 2
    demotion_factor: float = 0.5
    bins: int = 10
    merge_tol: float = 0.05
    seed: int = 0
    ranges: tuple[ColumnSpec, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in (BINARY, NUMERIC):
            raise UsageError(f"unknown induction mode {self.mode!r}")
        if self.max_clause_length < 1:
            raise UsageError("max_clause_length must be >= 1")
        if not 0.0 <= self.demotion_factor <= 1.0:
            raise UsageError("demotion factor must lie in [0, 1]")
        if self.ab_depth < 1:
            raise UsageError("ab_depth must be >= 1")
        if self.bins < 1:
            raise UsageError("bins must be >= 1")

    @property
    def numeric_mode(self) -> bool:
        return self.mode == NUMERIC


class _Learner:
    """Holds the indexed example universe, candidate units, and their coverage
    masks; example pools are boolean masks over that universe."""

    def __init__(
        self,
        schema: FeatureSchema,
        actives_pos: Sequence[Example],
        actives_neg: Sequence[Example],
        demoted_pos: Sequence[Example],
        demoted_neg: Sequence[Example],
        config: InductionConfig,
    ) -> None:
        self.cfg = config
        self.examples: list[Example] = (
            list(actives_pos) + list(actives_neg) + list(demoted_pos) + list(demoted_neg)
        )
        seen: set[str] = set()
        for ex in self.examples:
            if ex.id in seen:
                raise DataError(f"duplicate example id {ex.id!r}")
            seen.add(ex.id)
        self.n = len(self.examples)
        self.weights = np.array([ex.weight for ex in self.examples], dtype=np.float64)

        # Candidate units come from the active examples only, so seeding the
        # demoted pools never changes the search space.
        base = list(actives_pos) + list(actives_neg)
        self.units = candidate_literals(
            schema,
            base,
            numeric_mode=config.numeric_mode,
            ranges=config.ranges,
        )
        self.masks = np.array(
            [
                [all(_lit_holds(lit, ex) for lit in unit) for ex in self.examples]
                for unit in self.units
            ],
            dtype=bool,
        ).reshape(len(self.units), self.n)
        self.masksf = self.masks.astype(np.float64)

        def pool(lo: int, hi: int) -> np.ndarray:
            m = np.zeros(self.n, dtype=bool)
            m[lo:hi] = True
            return m

        a, b = len(actives_pos), len(actives_pos) + len(actives_neg)
        c = b + len(demoted_pos)
        self.init_act_pos = pool(0, a)
        self.init_act_neg = pool(a, b)
        self.init_dem_pos = pool(b, c)
        self.init_dem_neg = pool(c, self.n)

        self.ab_rules: dict[int, tuple[Rule, ...]] = {}
        self.next_ab = 0

    def used_indices(self, used: Iterable[Literal]) -> frozenset[int]:
        used_set = set(used)
        if not used_set:
            return frozenset()
        return frozenset(
            i for i, unit in enumerate(self.units) if any(lit in used_set for lit in unit)
        )

    # -- clause search ------------------------------------------------------

    def learn_rule(
        self,
        act_pos: np.ndarray,
        act_neg: np.ndarray,
        dem_pos: np.ndarray,
        dem_neg: np.ndarray,
        used: frozenset[int],
        f: float,
    ) -> tuple[list[int], np.ndarray]:
        """Greedy specialization; returns chosen unit indices and the mask of
        examples the clause body covers."""
        rule_mask = np.ones(self.n, dtype=bool)
        body: list[int] = []
        excluded = set(used)
        while len(self.units) > 0:
            cov_neg = rule_mask & act_neg
            if not cov_neg.any() or len(body) >= self.cfg.max_clause_length:
                break
            wpos = self.weights * (rule_mask & act_pos)
            wneg = self.weights * cov_neg
            p0, n0 = float(wpos.sum()), float(wneg.sum())
            p1 = self.masksf @ wpos
            n1 = self.masksf @ wneg
            if f > 0.0:
                wdp = self.weights * (rule_mask & dem_pos)
                wdn = self.weights * (rule_mask & dem_neg)
                gains = gain_vector(
                    p1, n1, p0, n0,
                    p3=self.masksf @ wdp, n3=self.masksf @ wdn,
                    p2=float(wdp.sum()), n2=float(wdn.sum()), f=f,
                )
            else:
                gains = gain_vector(p1, n1, p0, n0)
            if excluded:
                gains[list(excluded)] = float("-inf")
            best = int(np.argmax(gains))  # ties resolve to the first candidate
            if not gains[best] > 0.0:
                break
            body.append(best)
            excluded.add(best)
            rule_mask = rule_mask & self.masks[best]
        return body, rule_mask

    # -- sequential covering ------------------------------------------------

    def cover(
        self,
        act_pos: np.ndarray,
        act_neg: np.ndarray,
        dem_pos: np.ndarray,
        dem_neg: np.ndarray,
        used: frozenset[int],
        level: int,
        f: float,
    ) -> tuple[list[Rule], list[str]]:
        """Learn clauses until the active positive pool is exhausted; leftovers
        that no clause can reach are returned as ids to enumerate."""
        rules: list[Rule] = []
        noise: list[str] = []
        act_pos = act_pos.copy()
        dem_pos = dem_pos.copy()
        while act_pos.any():
            body_idx, rule_mask = self.learn_rule(act_pos, act_neg, dem_pos, dem_neg, used, f)
            cov_neg = rule_mask & act_neg
            if not body_idx and cov_neg.any():
                noise.extend(self.examples[i].id for i in np.flatnonzero(act_pos))
                break
            lits: list[Literal] = [lit for i in body_idx for lit in self.units[i]]
            if cov_neg.any():
                ab_idx = self.learn_exceptions(
                    cov_neg, rule_mask & act_pos, used | frozenset(body_idx), level + 1
                )
                lits.append(NotAbnormal(ab_idx))
            rules.append(Rule(head_ab=None, body=tuple(lits)))
            covered_act = rule_mask & act_pos
            act_pos &= ~rule_mask
            dem_pos = dem_pos | covered_act
        return rules, noise

    def learn_exceptions(
        self,
        cov_neg: np.ndarray,
        cov_pos: np.ndarray,
        used: frozenset[int],
        level: int,
    ) -> int:
        """Define a fresh abnormality predicate over the covered negatives:
        either an induced theory (example roles swapped) or, when that is not
        cheaper than listing them, plain ground facts."""
        n_remaining = int(cov_neg.sum())
        snapshot = (dict(self.ab_rules), self.next_ab)
        sub_rules: list[Rule] = []
        sub_noise: list[str] = []
        if level <= self.cfg.ab_depth:
            zeros = np.zeros(self.n, dtype=bool)
            sub_rules, sub_noise = self.cover(
                cov_neg, cov_pos, zeros, zeros, used, level, f=0.0
            )
        new_defs = [
            r
            for idx, rs in self.ab_rules.items()
            if idx not in snapshot[0]
            for r in rs
        ]
        dl = theory_dl(sub_rules) + theory_dl(new_defs) + FACT_DL * len(sub_noise)
        if not sub_rules or dl_enumeration_wins(dl, n_remaining):
            self.ab_rules, self.next_ab = snapshot
            idx = self.next_ab
            self.next_ab += 1
            self.ab_rules[idx] = tuple(
                Rule(head_ab=idx, body=(), ground_id=self.examples[i].id)
                for i in np.flatnonzero(cov_neg)
            )
            return idx
        idx = self.next_ab
        self.next_ab += 1
        self.ab_rules[idx] = tuple(
            Rule(head_ab=idx, body=r.body) for r in sub_rules
        ) + tuple(Rule(head_ab=idx, body=(), ground_id=ex_id) for ex_id in sub_noise)
        return idx


def raw_fold(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    config: InductionConfig | None = None,
    pred_name: str = "target",
    f: float = 0.0,
    demoted_pos: Sequence[Example] = (),
    demoted_neg: Sequence[Example] = (),
    used: frozenset[Literal] = frozenset(),
) -> Hypothesis:
    """Induce without pruning. Building block for the public entry points and
    for per-cluster runs that defer pruning to a single global pass."""
    cfg = config or InductionConfig()
    if not pos:
        return Hypothesis(pred_name=pred_name)
    learner = _Learner(schema, pos, neg, demoted_pos, demoted_neg, cfg)
    target, noise = learner.cover(
        learner.init_act_pos,
        learner.init_act_neg,
        learner.init_dem_pos,
        learner.init_dem_neg,
        learner.used_indices(used),
        level=0,
        f=f,
    )
    hyp = Hypothesis(
        pred_name=pred_name,
        target_rules=tuple(target),
        abnormal_rules=dict(learner.ab_rules),
        noise_facts=tuple(noise),
    )
    hyp.validate()
    return hyp


def fold(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    config: InductionConfig | None = None,
    pred_name: str = "target",
    used: frozenset[Literal] = frozenset(),
) -> Hypothesis:
    """Plain induction (no demotion), pruned against the training examples."""
    hyp = raw_fold(pos, neg, schema, config, pred_name, f=0.0, used=used)
    return prune_hypothesis(hyp, list(pos) + list(neg))


def d_fold(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    f: float | None = None,
    demoted_pos: Sequence[Example] = (),
    demoted_neg: Sequence[Example] = (),
    config: InductionConfig | None = None,
    pred_name: str = "target",
) -> Hypothesis:
    """Demotion-weighted induction: the seeded demoted pools and the positives
    covered along the way influence later clauses at weight f (defaults to
    config.demotion_factor). With f = 0 and no demoted pools this is fold."""
    cfg = config or InductionConfig()
    eff_f = cfg.demotion_factor if f is None else f
    hyp = raw_fold(
        pos, neg, schema, cfg, pred_name,
        f=eff_f, demoted_pos=demoted_pos, demoted_neg=demoted_neg,
    )
    return prune_hypothesis(hyp, list(pos) + list(neg))


def learn_rule(
    pos: Sequence[Example],
    neg: Sequence[Example],
    schema: FeatureSchema,
    config: InductionConfig | None = None,
    used: frozenset[Literal] = frozenset(),
) -> tuple[Rule, dict[int, tuple[Rule, ...]]]:
    """One clause of the covering loop, exposed for inspection: the learned
    rule plus whatever abnormality definitions it needed."""
    cfg = config or InductionConfig()
    if not pos:
        raise UsageError("learn_rule needs at least one positive example")
    learner = _Learner(schema, pos, neg, (), (), cfg)
    body_idx, rule_mask = learner.learn_rule(
        learner.init_act_pos,
        learner.init_act_neg,
        learner.init_dem_pos,
        learner.init_dem_neg,
        learner.used_indices(used),
        f=0.0,
    )
    lits: list[Literal] = [lit for i in body_idx for lit in learner.units[i]]
    cov_neg = rule_mask & learner.init_act_neg
    if body_idx and cov_neg.any():
        ab_idx = learner.learn_exceptions(
            cov_neg,
            rule_mask & learner.init_act_pos,
            learner.used_indices(used) | frozenset(body_idx),
            level=1,
        )
        lits.append(NotAbnormal(ab_idx))
    return Rule(head_ab=None, body=tuple(lits)), dict(learner.ab_rules)


# ---------------------------------------------------------------------------
# Pruning


def _confusion(hyp: Hypothesis, examples: Sequence[Example]) -> tuple[int, int]:
    tp = fp = 0
    for ex in examples:
        if classify(hyp, ex):
            if ex.positive:
                tp += 1
            else:
                fp += 1
    return tp, fp


def _drop_literals_target(hyp: Hypothesis, negatives: Sequence[Example]) -> Hypothesis:
    # A clause-local check: a literal goes if the clause alone still covers no
    # extra negative without it.
    rules = list(hyp.target_rules)
    for ri, rule in enumerate(rules):
        body = list(rule.body)
        base = len(rule_covers(Rule(None, tuple(body)), negatives, hyp))
        changed = True
        while changed:
            changed = False
            for li in range(len(body)):
                trial = body[:li] + body[li + 1 :]
                if len(rule_covers(Rule(None, tuple(trial)), negatives, hyp)) <= base:
                    body = trial
                    changed = True
                    break
        rules[ri] = Rule(None, tuple(body))
    return replace(hyp, target_rules=tuple(rules))


def _drop_literals_ab(hyp: Hypothesis, examples: Sequence[Example]) -> Hypothesis:
    # Abnormality bodies interact through negation, so the check is global:
    # keep a drop only if whole-theory true positives cannot fall and false
    # positives cannot rise.
    tp, fp = _confusion(hyp, examples)
    for idx in sorted(hyp.abnormal_rules):
        rules = list(hyp.abnormal_rules[idx])
        for ri, rule in enumerate(rules):
            if rule.ground_id is not None:
                continue
            body = list(rule.body)
            changed = True
            while changed:
                changed = False
                for li in range(len(body)):
                    trial = body[:li] + body[li + 1 :]
                    rules[ri] = Rule(idx, tuple(trial))
                    candidate = replace(
                        hyp, abnormal_rules={**hyp.abnormal_rules, idx: tuple(rules)}
                    )
                    ctp, cfp = _confusion(candidate, examples)
                    if ctp >= tp and cfp <= fp:
                        body = trial
                        hyp = candidate
                        tp, fp = ctp, cfp
                        changed = True
                        break
                    rules[ri] = Rule(idx, tuple(body))
    return hyp


def _drop_clauses(hyp: Hypothesis, examples: Sequence[Example]) -> Hypothesis:
    # Try removing whole clauses (and noise facts), least-covering first; a
    # removal sticks when whole-theory quality does not degrade. Survivors
    # keep their original order.
    tp, fp = _confusion(hyp, examples)
    positives = [ex for ex in examples if ex.positive]
    items: list[tuple[int, int, tuple[str, object]]] = []
    for ri, rule in enumerate(hyp.target_rules):
        items.append((len(rule_covers(rule, positives, hyp)), ri, ("rule", ri)))
    pos_ids = {ex.id for ex in positives}
    for ni, ex_id in enumerate(hyp.noise_facts):
        cov = 1 if ex_id in pos_ids else 0
        items.append((cov, len(hyp.target_rules) + ni, ("noise", ex_id)))
    items.sort(key=lambda it: (it[0], it[1]))

    removed_rules: set[int] = set()
    removed_noise: set[str] = set()

    def build() -> Hypothesis:
        return replace(
            hyp,
            target_rules=tuple(
                r for i, r in enumerate(hyp.target_rules) if i not in removed_rules
            ),
            noise_facts=tuple(n for n in hyp.noise_facts if n not in removed_noise),
        )

    for _, _, (kind, key) in items:
        (removed_rules if kind == "rule" else removed_noise).add(key)
        ctp, cfp = _confusion(build(), examples)
        if ctp >= tp and cfp <= fp:
            tp, fp = ctp, cfp
        else:
            (removed_rules if kind == "rule" else removed_noise).discard(key)
    return build()


def _gc_and_renumber(hyp: Hypothesis) -> Hypothesis:
    """Drop abnormality definitions nothing references and renumber the rest
    densely in first-reference order."""
    order: list[int] = []
    seen: set[int] = set()

    def scan(rules: Iterable[Rule]) -> None:
        queue: list[int] = []
        for rule in rules:
            for lit in rule.body:
                if isinstance(lit, NotAbnormal) and lit.ab_index not in seen:
                    seen.add(lit.ab_index)
                    queue.append(lit.ab_index)
        for idx in queue:
            order.append(idx)
            scan(hyp.abnormal_rules.get(idx, ()))

    scan(hyp.target_rules)
    mapping = {old: new for new, old in enumerate(order)}

    def remap_body(body: tuple[Literal, ...]) -> tuple[Literal, ...]:
        return tuple(
            NotAbnormal(mapping[lit.ab_index]) if isinstance(lit, NotAbnormal) else lit
            for lit in body
        )

    new_ab: dict[int, tuple[Rule, ...]] = {}
    for old, new in mapping.items():
        new_ab[new] = tuple(
            Rule(head_ab=new, body=remap_body(r.body), ground_id=r.ground_id)
            for r in hyp.abnormal_rules[old]
        )
    return replace(
        hyp,
        target_rules=tuple(Rule(None, remap_body(r.body)) for r in hyp.target_rules),
        abnormal_rules=new_ab,
    )


def prune_hypothesis(hyp: Hypothesis, examples: Sequence[Example]) -> Hypothesis:
    """Simplify against a labelled example set without hurting it: drop body
    literals that admit no new negatives, drop clauses whose removal keeps
    true positives up and false positives down, then garbage-collect and
    renumber abnormality predicates. Idempotent."""
    negatives = [ex for ex in examples if not ex.positive]
    hyp = _drop_literals_target(hyp, negatives)
    hyp = _drop_literals_ab(hyp, examples)
    hyp = _drop_clauses(hyp, examples)
    hyp = _gc_and_renumber(hyp)
    hyp.validate()
    return hyp
