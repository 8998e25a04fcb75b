"""Attribute-level classification rules.

Bit-level rules from extraction are rewritten into predicates over the
original attributes: thermometer bits merge into half-open intervals,
one-hot bits become equality or exclusion conditions.  A rule set applies
its rules first-match with a default class, reports per-rule coverage and
accuracy, and round-trips through a plain text file format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .datagen import Tuple
from .encoder import (
    EncodingScheme,
    OneHotCoding,
    ThermometerCoding,
    decode_bit_condition,
)
from .errors import RuleError
from .extractor import DiscreteRule


def _fmt(x: float) -> str:
    xf = float(x)
    return str(int(xf)) if xf == int(xf) else repr(xf)


@dataclass(frozen=True)
class Interval:
    """lo <= attr < hi, either side open when None."""

    attr: str
    lo: float | None = None
    hi: float | None = None

    def holds(self, t: Tuple) -> bool:
        v = getattr(t, self.attr)
        if self.lo is not None and v < self.lo:
            return False
        if self.hi is not None and v >= self.hi:
            return False
        return True

    def implies(self, other: "Condition") -> bool:
        if not isinstance(other, Interval) or other.attr != self.attr:
            return False
        if other.lo is not None and (self.lo is None or self.lo < other.lo):
            return False
        if other.hi is not None and (self.hi is None or self.hi > other.hi):
            return False
        return True

    def text(self) -> str:
        if self.lo is not None and self.hi is not None:
            return f"{_fmt(self.lo)} <= {self.attr} < {_fmt(self.hi)}"
        if self.lo is not None:
            return f"{self.attr} >= {_fmt(self.lo)}"
        return f"{self.attr} < {_fmt(self.hi)}"


@dataclass(frozen=True)
class CategoryIs:
    attr: str
    value: int

    def holds(self, t: Tuple) -> bool:
        return getattr(t, self.attr) == self.value

    def implies(self, other: "Condition") -> bool:
        if not isinstance(other, (CategoryIs, CategoryIsNot)):
            return False
        if other.attr != self.attr:
            return False
        if isinstance(other, CategoryIs):
            return other.value == self.value
        return self.value not in other.values

    def text(self) -> str:
        return f"{self.attr} = {self.value}"


@dataclass(frozen=True)
class CategoryIsNot:
    attr: str
    values: tuple[int, ...]  # sorted, excluded categories

    def holds(self, t: Tuple) -> bool:
        return getattr(t, self.attr) not in self.values

    def implies(self, other: "Condition") -> bool:
        return (isinstance(other, CategoryIsNot) and other.attr == self.attr
                and set(other.values) <= set(self.values))

    def text(self) -> str:
        return " AND ".join(f"{self.attr} != {v}" for v in self.values)


Condition = Interval | CategoryIs | CategoryIsNot


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]
    klass: str

    def matches(self, t: Tuple) -> bool:
        return all(c.holds(t) for c in self.conditions)

    def implied_by(self, other: "Rule") -> bool:
        """True when every record matching `self` also matches `other`."""
        return all(
            any(mine.implies(theirs) for mine in self.conditions)
            for theirs in other.conditions
        )

    def text(self) -> str:
        body = " AND ".join(c.text() for c in self.conditions) or "TRUE"
        return f"IF {body} THEN {self.klass}"


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    default_class: str

    def classify(self, t: Tuple) -> str:
        for rule in self.rules:
            if rule.matches(t):
                return rule.klass
        return self.default_class

    def classify_many(self, tuples: Iterable[Tuple]) -> list[str]:
        return [self.classify(t) for t in tuples]


# ---------------------------------------------------------------------------
# Rewriting bit rules to attribute rules
# ---------------------------------------------------------------------------

def rewrite_to_attributes(bit_rule: DiscreteRule, scheme: EncodingScheme,
                          class_names: Sequence[str]) -> Rule:
    """Merge a bit-level conjunction into attribute predicates.

    Thresholds on one attribute collapse to a single interval; bounds that
    only restate the attribute domain are dropped.
    """
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    eq: dict[str, int] = {}
    ne: dict[str, set[int]] = {}
    for bit, val in bit_rule.antecedent:
        attr, op, const = decode_bit_condition(bit + 1, val, scheme)
        if op == ">=":
            lo[attr] = max(lo.get(attr, -float("inf")), const)
        elif op == "<":
            hi[attr] = min(hi.get(attr, float("inf")), const)
        elif op == "==":
            if eq.setdefault(attr, const) != const:
                raise RuleError(f"{attr}: two equality values in one rule")
        else:
            ne.setdefault(attr, set()).add(const)

    conditions: list[Condition] = []
    for coding in scheme.codings:
        attr = coding.attr
        if isinstance(coding, ThermometerCoding):
            if attr not in lo and attr not in hi:
                continue
            a = lo.get(attr)
            b = hi.get(attr)
            if a is not None and b is not None and a >= b:
                raise RuleError(f"{attr}: empty interval [{a}, {b})")
            dlo, dhi = coding.domain
            if a is not None and a <= dlo:
                a = None
            if b is not None and b > dhi:
                b = None
            if a is None and b is None:
                continue
            conditions.append(Interval(attr, a, b))
        else:
            if attr in eq:
                if eq[attr] in ne.get(attr, set()):
                    raise RuleError(f"{attr}: = and != on the same category")
                conditions.append(CategoryIs(attr, eq[attr]))
            elif attr in ne:
                conditions.append(CategoryIsNot(attr, tuple(sorted(ne[attr]))))
    return Rule(tuple(conditions), class_names[bit_rule.consequent])


def from_extraction(bit_rules: Sequence[DiscreteRule], default_class: int,
                    scheme: EncodingScheme,
                    class_names: Sequence[str]) -> RuleSet:
    rules = tuple(rewrite_to_attributes(r, scheme, class_names)
                  for r in bit_rules)
    return RuleSet(rules, class_names[default_class])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass
class RuleStats:
    index: int  # 1-based position in the rule set
    text: str
    total: int
    correct: int

    @property
    def correct_pct(self) -> float | None:
        if self.total == 0:
            return None
        return 100.0 * self.correct / self.total


@dataclass
class EvalReport:
    accuracy: float
    per_rule: list[RuleStats]
    default_stats: RuleStats


def evaluate(rs: RuleSet, tuples: Sequence[Tuple]) -> EvalReport:
    """Accuracy of the rule set plus first-match per-rule coverage."""
    if not tuples:
        raise RuleError("cannot evaluate on an empty dataset")
    per_rule = [RuleStats(i + 1, r.text(), 0, 0) for i, r in enumerate(rs.rules)]
    default_stats = RuleStats(0, f"DEFAULT {rs.default_class}", 0, 0)
    correct = 0
    for t in tuples:
        hit = None
        for i, rule in enumerate(rs.rules):
            if rule.matches(t):
                hit = i
                break
        if hit is None:
            stats, klass = default_stats, rs.default_class
        else:
            stats, klass = per_rule[hit], rs.rules[hit].klass
        stats.total += 1
        if klass == t.label:
            stats.correct += 1
            correct += 1
    return EvalReport(accuracy=correct / len(tuples), per_rule=per_rule,
                      default_stats=default_stats)


def stats_csv(report: EvalReport) -> str:
    lines = ["rule,text,total,correct_pct"]
    for st in report.per_rule + [report.default_stats]:
        name = f"R{st.index}" if st.index else "DEFAULT"
        pct = "" if st.correct_pct is None else f"{st.correct_pct:.1f}"
        lines.append(f'{name},"{st.text}",{st.total},{pct}')
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------

def simplify(rs: RuleSet, tuples: Sequence[Tuple]) -> RuleSet:
    """Drop duplicate, subsumed and never-firing rules.

    Classifications of the given records are preserved exactly; only rules
    that cannot change them are removed.
    """
    before = rs.classify_many(tuples)
    kept: list[Rule] = []
    for rule in rs.rules:
        if any(rule == k or (rule.klass == k.klass and rule.implied_by(k))
               for k in kept):
            continue
        kept.append(rule)

    fired = [0] * len(kept)
    for t in tuples:
        for i, rule in enumerate(kept):
            if rule.matches(t):
                fired[i] += 1
                break
    kept = [r for r, n in zip(kept, fired) if n > 0]
    out = RuleSet(tuple(kept), rs.default_class)
    if out.classify_many(tuples) != before:
        raise RuleError("simplification changed training classifications")
    return out


# ---------------------------------------------------------------------------
# Rule file format
# ---------------------------------------------------------------------------

_INTERVAL_RE = re.compile(r"^(\S+) <= (\w+) < (\S+)$")
_GE_RE = re.compile(r"^(\w+) >= (\S+)$")
_LT_RE = re.compile(r"^(\w+) < (\S+)$")
_EQ_RE = re.compile(r"^(\w+) = (\S+)$")
_NE_RE = re.compile(r"^(\w+) != (\S+)$")
_RULE_RE = re.compile(r"^IF (.+) THEN (\S+)$")


def format_rules(rs: RuleSet) -> str:
    lines = [rule.text() for rule in rs.rules]
    lines.append(f"DEFAULT {rs.default_class}")
    return "\n".join(lines) + "\n"


def parse_rules(text: str) -> RuleSet:
    rules: list[Rule] = []
    default = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("DEFAULT "):
            default = line.split(None, 1)[1]
            continue
        m = _RULE_RE.match(line)
        if not m:
            raise RuleError(f"unparseable rule line: {line!r}")
        body, klass = m.groups()
        conds: list[Condition] = []
        ne_acc: dict[str, set[int]] = {}

        def flush_ne():
            for attr, vals in ne_acc.items():
                conds.append(CategoryIsNot(attr, tuple(sorted(vals))))
            ne_acc.clear()

        if body != "TRUE":
            for part in body.split(" AND "):
                if m2 := _INTERVAL_RE.match(part):
                    lo, attr, hi = m2.groups()
                    flush_ne()
                    conds.append(Interval(attr, float(lo), float(hi)))
                elif m2 := _GE_RE.match(part):
                    attr, lo = m2.groups()
                    flush_ne()
                    conds.append(Interval(attr, float(lo), None))
                elif m2 := _LT_RE.match(part):
                    attr, hi = m2.groups()
                    flush_ne()
                    conds.append(Interval(attr, None, float(hi)))
                elif m2 := _NE_RE.match(part):
                    attr, v = m2.groups()
                    ne_acc.setdefault(attr, set()).add(int(v))
                elif m2 := _EQ_RE.match(part):
                    attr, v = m2.groups()
                    flush_ne()
                    conds.append(CategoryIs(attr, int(v)))
                else:
                    raise RuleError(f"unparseable condition: {part!r}")
            flush_ne()
        rules.append(Rule(tuple(conds), klass))
    if default is None:
        raise RuleError("rule file has no DEFAULT line")
    return RuleSet(tuple(rules), default)
