"""Integrity constraints: a small line-oriented rule language and its clause form.

Rule file syntax, one rule per line (``#`` starts a comment)::

    FD: CT -> ST
    FD: A, B -> C, D
    CFD: HN="ELIZA", CT="BOAZ" -> PN="2567688400"
    DC: !(PN(t)=PN(t') & ST(t)!=ST(t'))

Every rule is split into a reason part (antecedent) and a result part
(consequent). For denial constraints the last predicate is the result part.
Only the two-tuple, same-attribute DC shape is supported: every reason
predicate is an equality and the final predicate is an inequality, which
makes the DC behave like an FD from the reason attributes to the result one.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


class RuleError(ValueError):
    pass


class RuleKind(str, enum.Enum):
    FD = "FD"
    CFD = "CFD"
    DC = "DC"


@dataclass(frozen=True)
class Predicate:
    attribute: str
    constant: str | None = None
    # DC inequality predicate (``A(t)!=A(t')``); always False for FD/CFD.
    negated: bool = False

    def __post_init__(self) -> None:
        if self.constant is not None and self.constant == "":
            raise RuleError(f"empty constant on attribute {self.attribute}")


@dataclass(frozen=True)
class Rule:
    rule_id: int
    kind: RuleKind
    reason: tuple[Predicate, ...]
    result: tuple[Predicate, ...]
    raw_text: str = ""

    def __post_init__(self) -> None:
        if not self.reason or not self.result:
            raise RuleError(f"rule {self.rule_id}: reason and result parts must be non-empty")
        attrs = [p.attribute for p in self.reason + self.result]
        if len(set(attrs)) != len(attrs):
            raise RuleError(f"rule {self.rule_id}: an attribute may appear only once ({self.raw_text!r})")

    @property
    def reason_attributes(self) -> tuple[str, ...]:
        return tuple(p.attribute for p in self.reason)

    @property
    def result_attributes(self) -> tuple[str, ...]:
        return tuple(p.attribute for p in self.result)

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.reason_attributes + self.result_attributes

    @property
    def reason_constants(self) -> tuple[tuple[int, str], ...]:
        """(position within the reason part, constant) for each constant reason predicate."""
        return tuple((i, p.constant) for i, p in enumerate(self.reason) if p.constant is not None)

    def same_shape(self, other: Rule) -> bool:
        return (self.kind, self.reason, self.result) == (other.kind, other.reason, other.result)


_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_ITEM_RE = re.compile(rf'^\s*({_NAME})\s*(?:=\s*"((?:[^"\\]|\\.)*)")?\s*$')
_DC_BODY_RE = re.compile(r"^\s*!\s*\((.*)\)\s*$")
_DC_PRED_RE = re.compile(rf"^\s*({_NAME})\s*\(\s*t\s*\)\s*(=|!=)\s*({_NAME})\s*\(\s*t'\s*\)\s*$")


def _unescape(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _split_items(text: str) -> list[str]:
    """Split on commas that are not inside a quoted constant."""
    items, buf, quoted, escaped = [], [], False, False
    for ch in text:
        if escaped:
            buf.append(ch)
            escaped = False
        elif ch == "\\" and quoted:
            buf.append(ch)
            escaped = True
        elif ch == '"':
            buf.append(ch)
            quoted = not quoted
        elif ch == "," and not quoted:
            items.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if quoted:
        raise RuleError("unterminated string constant")
    items.append("".join(buf))
    return items


def _parse_side(text: str, allow_constants: bool) -> tuple[Predicate, ...]:
    preds = []
    for item in _split_items(text):
        m = _ITEM_RE.match(item)
        if not m:
            raise RuleError(f"cannot parse predicate {item.strip()!r}")
        name, const = m.group(1), m.group(2)
        if const is not None and not allow_constants:
            raise RuleError(f"constants are only allowed in CFD rules (got {item.strip()!r})")
        preds.append(Predicate(name, _unescape(const) if const is not None else None))
    return tuple(preds)


def _split_arrow(body: str) -> tuple[str, str]:
    # the arrow cannot be inside a constant unless quoted; find the first unquoted "->"
    quoted = escaped = False
    for i, ch in enumerate(body):
        if escaped:
            escaped = False
        elif ch == "\\" and quoted:
            escaped = True
        elif ch == '"':
            quoted = not quoted
        elif not quoted and body.startswith("->", i):
            return body[:i], body[i + 2 :]
    raise RuleError("missing '->' between reason and result")


def _parse_dc(body: str) -> tuple[tuple[Predicate, ...], tuple[Predicate, ...]]:
    m = _DC_BODY_RE.match(body)
    if not m:
        raise RuleError("unsupported DC form: expected !(P1 & ... & Pn)")
    preds = []
    for part in m.group(1).split("&"):
        pm = _DC_PRED_RE.match(part)
        if not pm:
            raise RuleError(f"unsupported DC form: predicate {part.strip()!r}")
        left, op, right = pm.groups()
        if left != right:
            raise RuleError(f"unsupported DC form: {part.strip()!r} compares different attributes")
        preds.append(Predicate(left, negated=(op == "!=")))
    if len(preds) < 2:
        raise RuleError("unsupported DC form: need at least one equality and one inequality")
    *reason, result = preds
    if any(p.negated for p in reason) or not result.negated:
        raise RuleError("unsupported DC form: reason predicates must be equalities and the last an inequality")
    return tuple(reason), (result,)


def parse_rule_line(line: str, rule_id: int, schema: Iterable[str] | None = None) -> Rule:
    """Parse one rule line. ``schema``, when given, restricts the attribute names."""
    text = line.strip()
    head, sep, body = text.partition(":")
    if not sep:
        raise RuleError(f"missing rule kind prefix in {text!r}")
    try:
        kind = RuleKind(head.strip().upper())
    except ValueError:
        raise RuleError(f"unknown rule kind {head.strip()!r}") from None

    if kind is RuleKind.DC:
        reason, result = _parse_dc(body)
    else:
        left, right = _split_arrow(body)
        allow = kind is RuleKind.CFD
        reason, result = _parse_side(left, allow), _parse_side(right, allow)

    rule = Rule(rule_id, kind, reason, result, text)
    if schema is not None:
        known = set(schema)
        for name in rule.attributes:
            if name not in known:
                raise RuleError(f"unknown attribute {name!r}")
    return rule


def parse_rules(path: str | Path, schema: Sequence[str] | None = None) -> list[Rule]:
    """Read a rule file. Rule ids count rules (not physical lines) from 1."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RuleError(f"cannot read rules file {path}: {exc.strerror}") from exc
    return parse_rule_lines(lines, schema, source=str(path))


def parse_rule_lines(lines: Iterable[str], schema: Sequence[str] | None = None, source: str = "<rules>") -> list[Rule]:
    rules: list[Rule] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rules.append(parse_rule_line(stripped, len(rules) + 1, schema))
        except RuleError as exc:
            raise RuleError(f"{source}:{lineno}: {exc} in {stripped!r}") from None
    return rules


def _side_text(preds: Sequence[Predicate]) -> str:
    return ", ".join(p.attribute if p.constant is None else f'{p.attribute}="{_escape(p.constant)}"' for p in preds)


def rule_to_text(rule: Rule) -> str:
    """Render a rule back into the rule-file syntax."""
    if rule.kind is RuleKind.DC:
        preds = [f"{p.attribute}(t){'!=' if p.negated else '='}{p.attribute}(t')" for p in rule.reason + rule.result]
        return f"DC: !({' & '.join(preds)})"
    return f"{rule.kind.value}: {_side_text(rule.reason)} -> {_side_text(rule.result)}"


def _literal(p: Predicate, value: str | None, negate: bool) -> str:
    body = p.attribute if value is None else f'{p.attribute}("{value}")'
    return f"¬{body}" if negate else body


def to_mln_clause(rule: Rule) -> str:
    """Disjunctive clause form: reason literals negated, result literals positive.

    A DC is a negated conjunction, so every one of its literals is negated.
    """
    if rule.kind is RuleKind.DC:
        lits = [f"¬({p.attribute}(t){'≠' if p.negated else '='}{p.attribute}(t'))" for p in rule.reason + rule.result]
        return " ∨ ".join(lits)
    lits = [_literal(p, p.constant, True) for p in rule.reason]
    lits += [_literal(p, p.constant, False) for p in rule.result]
    return " ∨ ".join(lits)


def ground_clause(rule: Rule, reason_values: Sequence[str], result_values: Sequence[str]) -> str:
    """Clause with every attribute bound to a value of one piece of data."""
    lits = [_literal(p, v, True) for p, v in zip(rule.reason, reason_values)]
    lits += [_literal(p, v, False) for p, v in zip(rule.result, result_values)]
    return " ∨ ".join(lits)
