"""Default theories: literals, rules, stratified evaluation, and the ASP text
format used as the interchange between learning, translation, and evaluation.

A hypothesis is an ordered set of target rules plus abnormality definitions
(`ab0`, `ab1`, ...) referenced through negation-as-failure, plus enumerated
ground facts for examples the learner wrote off as noise. The abnormality
dependency graph is acyclic, so evaluation always terminates.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dataset import Example
from .errors import DataError, InternalError

# ---------------------------------------------------------------------------
# Literals


@dataclass(frozen=True)
class CategoricalEq:
    feature: str
    category: str


@dataclass(frozen=True)
class NumericGt:
    feature: str
    threshold: float


@dataclass(frozen=True)
class NumericLe:
    feature: str
    threshold: float


@dataclass(frozen=True)
class NotAbnormal:
    ab_index: int


Literal = CategoricalEq | NumericGt | NumericLe | NotAbnormal

# Rendering convention: a categorical test against this token is printed as a
# bare atom, e.g. bird(X) rather than bird(X,true).
BARE_TRUE = "true"


@dataclass(frozen=True)
class Rule:
    """One clause. head_ab is None for target-headed rules, else the ab index.

    A rule with ground_id set is an enumerated ground fact: it covers exactly
    the example carrying that id and must have an empty body.
    """

    head_ab: int | None
    body: tuple[Literal, ...]
    ground_id: str | None = None

    def __post_init__(self) -> None:
        if self.ground_id is not None and self.body:
            raise InternalError("ground facts cannot carry a body")


@dataclass
class Hypothesis:
    pred_name: str = "target"
    target_rules: tuple[Rule, ...] = ()
    abnormal_rules: dict[int, tuple[Rule, ...]] = field(default_factory=dict)
    noise_facts: tuple[str, ...] = ()  # ids of positives enumerated as ground facts

    def rule_count(self) -> int:
        return len(self.target_rules) + sum(len(rs) for rs in self.abnormal_rules.values())

    def literal_count(self) -> int:
        rules = list(self.target_rules)
        for rs in self.abnormal_rules.values():
            rules.extend(rs)
        return sum(len(r.body) for r in rules)

    def validate(self) -> None:
        """Check referential integrity and acyclicity of abnormality indices."""
        for rule in self.target_rules:
            if rule.head_ab is not None:
                raise InternalError("target_rules must be target-headed")
        for idx, rules in self.abnormal_rules.items():
            for rule in rules:
                if rule.head_ab != idx:
                    raise InternalError(f"rule filed under ab{idx} has head ab{rule.head_ab}")

        def refs(rules: Iterable[Rule]) -> set[int]:
            return {
                lit.ab_index
                for rule in rules
                for lit in rule.body
                if isinstance(lit, NotAbnormal)
            }

        for i in refs(self.target_rules) | refs(
            r for rs in self.abnormal_rules.values() for r in rs
        ):
            if i not in self.abnormal_rules:
                raise InternalError(f"dangling abnormality reference ab{i}")

        # DFS over ab -> ab edges; any cycle breaks stratification.
        color: dict[int, int] = {}

        def visit(i: int) -> None:
            color[i] = 1
            for j in refs(self.abnormal_rules[i]):
                if color.get(j) == 1:
                    raise InternalError(f"abnormality cycle through ab{j}")
                if color.get(j, 0) == 0:
                    visit(j)
            color[i] = 2

        for i in self.abnormal_rules:
            if color.get(i, 0) == 0:
                visit(i)


# ---------------------------------------------------------------------------
# Evaluation


def literal_holds(lit: Literal, ex: Example, hyp: Hypothesis | None = None) -> bool:
    """Evaluate one body literal against an example.

    Any test on a missing value fails. NotAbnormal(i) holds iff no rule
    defining ab_i covers the example (stratified negation-as-failure).
    """
    if isinstance(lit, NotAbnormal):
        if hyp is None or lit.ab_index not in hyp.abnormal_rules:
            raise InternalError(f"dangling abnormality reference ab{lit.ab_index}")
        return not any(
            _rule_covers_one(rule, ex, hyp) for rule in hyp.abnormal_rules[lit.ab_index]
        )
    v = ex.value(lit.feature)
    if v is None:
        return False
    if isinstance(lit, CategoricalEq):
        return str(v) == lit.category
    if isinstance(lit, NumericGt):
        return float(v) > lit.threshold
    return float(v) <= lit.threshold


def _rule_covers_one(rule: Rule, ex: Example, hyp: Hypothesis | None) -> bool:
    if rule.ground_id is not None:
        return ex.id == rule.ground_id
    return all(literal_holds(lit, ex, hyp) for lit in rule.body)


def rule_covers(
    rule: Rule, examples: Sequence[Example], hyp: Hypothesis | None = None
) -> list[Example]:
    """Examples for which every body literal holds (empty body covers all)."""
    return [ex for ex in examples if _rule_covers_one(rule, ex, hyp)]


def classify(hyp: Hypothesis, ex: Example) -> bool:
    """True (positive) iff the example is an enumerated noise fact or some
    target rule covers it."""
    if ex.id in hyp.noise_facts:
        return True
    return any(_rule_covers_one(rule, ex, hyp) for rule in hyp.target_rules)


# ---------------------------------------------------------------------------
# ASP text format

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_NVAR_RE = re.compile(r"N\d+\Z")
_AB_RE = re.compile(r"ab(\d+)\Z")


def _term(token: str) -> str:
    if _ATOM_RE.match(token) and not _AB_RE.match(token):
        return token
    return "'" + token.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _unterm(token: str) -> str:
    if token.startswith("'") and token.endswith("'") and len(token) >= 2:
        return token[1:-1].replace("\\'", "'").replace("\\\\", "\\")
    return token


def _format_number(x: float) -> str:
    return repr(float(x))


class _VarNames:
    """Assigns N1, N2, ... per numeric feature in first-use order, shared
    across the whole rendered program (matching induced-program style)."""

    def __init__(self) -> None:
        self.by_feature: dict[str, str] = {}

    def var(self, feature: str) -> str:
        if feature not in self.by_feature:
            self.by_feature[feature] = f"N{len(self.by_feature) + 1}"
        return self.by_feature[feature]


def _head_text(rule: Rule, pred_name: str) -> str:
    name = pred_name if rule.head_ab is None else f"ab{rule.head_ab}"
    arg = "X" if rule.ground_id is None else _term(rule.ground_id)
    return f"{name}({arg})"


def _render_rule(rule: Rule, pred_name: str, names: _VarNames) -> str:
    head = _head_text(rule, pred_name)
    if rule.ground_id is not None:
        return f"{head}."
    if not rule.body:
        return f"{head}."
    parts: list[str] = []
    bound: set[str] = set()
    for lit in rule.body:
        if isinstance(lit, CategoricalEq):
            if lit.category == BARE_TRUE:
                parts.append(f"{lit.feature}(X)")
            else:
                parts.append(f"{lit.feature}(X,{_term(lit.category)})")
        elif isinstance(lit, NotAbnormal):
            parts.append(f"not ab{lit.ab_index}(X)")
        else:
            var = names.var(lit.feature)
            if lit.feature not in bound:
                parts.append(f"{lit.feature}(X,{var})")
                bound.add(lit.feature)
            op = ">" if isinstance(lit, NumericGt) else "=<"
            parts.append(f"{var} {op} {_format_number(lit.threshold)}")
    return f"{head} :- " + ", ".join(parts) + "."


def render_asp(hyp: Hypothesis) -> str:
    """Render as one clause per line: target rules, then abnormality rules in
    index order, then enumerated noise facts. Parses back to an equal value."""
    names = _VarNames()
    lines: list[str] = []
    for rule in hyp.target_rules:
        lines.append(_render_rule(rule, hyp.pred_name, names))
    for idx in sorted(hyp.abnormal_rules):
        for rule in hyp.abnormal_rules[idx]:
            lines.append(_render_rule(rule, hyp.pred_name, names))
    for ex_id in hyp.noise_facts:
        lines.append(f"{hyp.pred_name}({_term(ex_id)}).")
    return "\n".join(lines) + ("\n" if lines else "")


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on separators outside quotes and parentheses."""
    parts: list[str] = []
    depth = 0
    quoted = False
    cur: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if quoted:
            cur.append(ch)
            if ch == "\\" and i + 1 < len(text):
                cur.append(text[i + 1])
                i += 1
            elif ch == "'":
                quoted = False
        elif ch == "'":
            quoted = True
            cur.append(ch)
        elif ch == "(":
            depth += 1
            cur.append(ch)
        elif ch == ")":
            depth -= 1
            cur.append(ch)
        elif ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
        i += 1
    if cur:
        parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _parse_atom(text: str) -> tuple[str, list[str]]:
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\Z", text.strip())
    if not m:
        raise DataError(f"malformed atom: {text!r}")
    name, argtext = m.group(1), m.group(2)
    return name, [a.strip() for a in _split_top(argtext)]


def parse_asp(text: str, pred_name: str | None = None) -> Hypothesis:
    """Parse the ASP text format produced by render_asp.

    The target predicate name is inferred from the first non-abnormality head
    unless given. Raises DataError on anything malformed.
    """
    target_rules: list[Rule] = []
    abnormal: dict[int, list[Rule]] = {}
    noise: list[str] = []
    var_feature: dict[str, str] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not line.endswith("."):
            raise DataError(f"line {lineno}: clause must end with '.'")
        line = line[:-1]
        head_text, _, body_text = (p.strip() for p in line.partition(":-"))
        head_name, head_args = _parse_atom(head_text)
        if len(head_args) != 1:
            raise DataError(f"line {lineno}: head must be unary")
        ab_match = _AB_RE.match(head_name)
        is_ab = ab_match is not None
        if not is_ab:
            if pred_name is None:
                pred_name = head_name
            elif head_name != pred_name:
                raise DataError(
                    f"line {lineno}: head {head_name!r} conflicts with target {pred_name!r}"
                )

        head_arg = head_args[0]
        if head_arg != "X":  # ground fact
            if body_text:
                raise DataError(f"line {lineno}: ground facts cannot have a body")
            ex_id = _unterm(head_arg)
            if is_ab:
                idx = int(ab_match.group(1))
                abnormal.setdefault(idx, []).append(
                    Rule(head_ab=idx, body=(), ground_id=ex_id)
                )
            else:
                noise.append(ex_id)
            continue

        body: list[Literal] = []
        for item in _split_top(body_text):
            neg = item.startswith("not ")
            if neg:
                name, args = _parse_atom(item[4:])
                m = _AB_RE.match(name)
                if not m or args != ["X"]:
                    raise DataError(f"line {lineno}: only abnormality atoms may be negated")
                body.append(NotAbnormal(int(m.group(1))))
                continue
            cmp_m = re.match(
                r"(N\d+)\s*(>|=<)\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\Z", item
            )
            if cmp_m:
                var, op, num = cmp_m.groups()
                if var not in var_feature:
                    raise DataError(f"line {lineno}: comparison on unbound variable {var}")
                feat = var_feature[var]
                body.append(
                    NumericGt(feat, float(num)) if op == ">" else NumericLe(feat, float(num))
                )
                continue
            name, args = _parse_atom(item)
            if len(args) == 1 and args[0] == "X":
                body.append(CategoricalEq(name, BARE_TRUE))
            elif len(args) == 2 and args[0] == "X":
                if _NVAR_RE.match(args[1]):
                    if args[1] in var_feature and var_feature[args[1]] != name:
                        raise DataError(
                            f"line {lineno}: variable {args[1]} rebound to a new feature"
                        )
                    var_feature[args[1]] = name
                else:
                    body.append(CategoricalEq(name, _unterm(args[1])))
            else:
                raise DataError(f"line {lineno}: unsupported atom {item!r}")

        rule = Rule(head_ab=int(ab_match.group(1)) if is_ab else None, body=tuple(body))
        if is_ab:
            abnormal.setdefault(rule.head_ab, []).append(rule)
        else:
            target_rules.append(rule)

    hyp = Hypothesis(
        pred_name=pred_name or "target",
        target_rules=tuple(target_rules),
        abnormal_rules={i: tuple(rs) for i, rs in abnormal.items()},
        noise_facts=tuple(noise),
    )
    try:
        hyp.validate()
    except InternalError as e:  # bad input, not a bug
        raise DataError(str(e)) from None
    return hyp
