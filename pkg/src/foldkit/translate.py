"""Render learned theories as English.

Feature and target predicates get their wording from `#pred` directive files:

    #pred mt(X): Tumor @X is malignant
    #pred bare_nuclei(X, N): bare nuclei reading of @X is @N

Abnormality predicates follow a fixed scheme ("abnormal condition I applies
to <entity> X"), where the entity noun is lifted from the target directive's
wording; an explicit `#pred abI(X)` directive overrides it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .hypothesis import (
    BARE_TRUE,
    CategoricalEq,
    Hypothesis,
    Literal,
    NotAbnormal,
    NumericGt,
    NumericLe,
    Rule,
)

_DIRECTIVE_RE = re.compile(
    r"#pred\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([A-Za-z_][A-Za-z0-9_]*"
    r"(?:\s*,\s*[A-Za-z_][A-Za-z0-9_]*)*)\s*\)\s*:\s*(.+?)\s*$"
)
_PLACEHOLDER_RE = re.compile(r"@([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class PredDirective:
    name: str
    args: tuple[str, ...]
    template: str

    @property
    def arity(self) -> int:
        return len(self.args)

    def render(self, *values: str) -> str:
        if len(values) != self.arity:
            raise DataError(
                f"directive {self.name}/{self.arity} applied to {len(values)} arguments"
            )
        by_arg = dict(zip(self.args, values))
        return _PLACEHOLDER_RE.sub(lambda m: by_arg[m.group(1)], self.template)


def parse_pred_file(text: str) -> list[PredDirective]:
    """Parse directive lines; blank and non-#pred lines are ignored."""
    out: list[PredDirective] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or not line.startswith("#pred"):
            continue
        m = _DIRECTIVE_RE.match(line)
        if not m:
            raise DataError(f"line {lineno}: malformed #pred directive")
        name, argtext, template = m.groups()
        args = tuple(a.strip() for a in argtext.split(","))
        if len(set(args)) != len(args):
            raise DataError(f"line {lineno}: repeated argument name")
        for ph in _PLACEHOLDER_RE.findall(template):
            if ph not in args:
                raise DataError(f"line {lineno}: unknown placeholder @{ph}")
        if name in seen:
            raise DataError(f"line {lineno}: duplicate directive for {name}")
        seen.add(name)
        out.append(PredDirective(name=name, args=args, template=template))
    return out


def _index(directives: Iterable[PredDirective] | Mapping[str, PredDirective]) -> dict[str, PredDirective]:
    if isinstance(directives, Mapping):
        return dict(directives)
    out: dict[str, PredDirective] = {}
    for d in directives:
        if d.name in out:
            raise DataError(f"duplicate directive for {d.name}")
        out[d.name] = d
    return out


def _need(table: Mapping[str, PredDirective], name: str, arity: int) -> PredDirective:
    d = table.get(name)
    if d is None or d.arity != arity:
        raise DataError(f"missing #pred directive for {name}/{arity}")
    return d


def _sentence_case(text: str) -> str:
    # The paper's sample output lowercases the head of each sentence block.
    for i, ch in enumerate(text):
        if ch.isalpha():
            return text[:i] + ch.lower() + text[i + 1 :]
        if ch != " ":
            break
    return text


def _entity_noun(target: PredDirective) -> str | None:
    """The noun immediately preceding the subject placeholder, e.g. "tumor"
    from "Tumor @X is malignant"."""
    subject = "@" + target.args[0]
    tokens = target.template.split()
    for i, tok in enumerate(tokens):
        if tok.strip(".,;:!?") == subject:
            if i == 0:
                return None
            return tokens[i - 1].strip(".,;:!?").lower()
    return None


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _comparison_phrase(gts: Sequence[float], les: Sequence[float]) -> str:
    parts = [f"larger than {_fmt_number(v)}" for v in gts]
    parts += [f"less than or equal to {_fmt_number(v)}" for v in les]
    return " and ".join(parts)


def _ab_head(
    idx: int, table: Mapping[str, PredDirective], entity: str | None, subject: str
) -> str:
    override = table.get(f"ab{idx}")
    if override is not None and override.arity == 1:
        return override.render(subject)
    noun = f"{entity} " if entity else ""
    return f"abnormal condition {idx} applies to {noun}{subject}"


def _body_lines(
    body: Sequence[Literal], table: Mapping[str, PredDirective]
) -> tuple[list[str], list[int]]:
    """English condition per feature test (interval pairs fused into one
    phrase), plus the abnormality indices negated in this body."""
    conditions: list[str] = []
    ab_refs: list[int] = []
    numeric_done: set[str] = set()
    for lit in body:
        if isinstance(lit, NotAbnormal):
            ab_refs.append(lit.ab_index)
        elif isinstance(lit, CategoricalEq):
            d = table.get(lit.feature)
            if lit.category == BARE_TRUE and (d is None or d.arity == 1):
                conditions.append(_need(table, lit.feature, 1).render("X"))
            else:
                conditions.append(_need(table, lit.feature, 2).render("X", lit.category))
        else:
            feat = lit.feature
            if feat in numeric_done:
                continue
            numeric_done.add(feat)
            gts = [l.threshold for l in body if isinstance(l, NumericGt) and l.feature == feat]
            les = [l.threshold for l in body if isinstance(l, NumericLe) and l.feature == feat]
            conditions.append(
                _need(table, feat, 2).render("X", _comparison_phrase(gts, les))
            )
    return conditions, ab_refs


def _rule_block(
    head: str, rule: Rule, table: Mapping[str, PredDirective]
) -> str:
    if not rule.body:
        return head + "."
    conditions, ab_refs = _body_lines(rule.body, table)
    lines = [head + " if:"]
    for i, cond in enumerate(conditions):
        last_condition = i == len(conditions) - 1
        if ab_refs or not last_condition:
            lines.append(f"    {cond}" + ("" if last_condition else ","))
        else:
            lines.append(f"    {cond}.")
    if ab_refs:
        first, *others = ab_refs
        clause = f"    unless abnormal condition {first} applies"
        for j in others:
            clause += " and\n" + f"           abnormal condition {j} applies"
        lines.append(clause + ".")
    return "\n".join(lines)


def translate_hypothesis(
    hyp: Hypothesis,
    directives: Iterable[PredDirective] | Mapping[str, PredDirective],
) -> str:
    """English text for the whole theory: one block per rule (head line plus
    indented conditions), then abnormality definitions, then enumerated
    exceptional cases. Deterministic."""
    if not hyp.target_rules and not hyp.abnormal_rules and not hyp.noise_facts:
        return ""
    table = _index(directives)
    target = _need(table, hyp.pred_name, 1)
    entity = _entity_noun(target)

    blocks: list[str] = []
    for rule in hyp.target_rules:
        head = _sentence_case(target.render("X"))
        blocks.append(_rule_block(head, rule, table))
    for idx in sorted(hyp.abnormal_rules):
        for rule in hyp.abnormal_rules[idx]:
            if rule.ground_id is not None:
                blocks.append(
                    _sentence_case(_ab_head(idx, table, entity, rule.ground_id)) + "."
                )
            else:
                head = _sentence_case(_ab_head(idx, table, entity, "X"))
                blocks.append(_rule_block(head, rule, table))
    for ex_id in hyp.noise_facts:
        blocks.append(
            _sentence_case(target.render(ex_id)) + " (recorded as an exceptional case)."
        )
    return "\n".join(blocks) + "\n"
