"""Production-rule language and forward-chaining inference engine.

Rules live in a small text DSL, one block per rule:

    rule high_fruit:
      if age > 65
      then set fruit_servings = 4

Inference makes repeated passes over the rules in file order.  A rule fires
when all its conditions hold, it has not fired yet, and no earlier rule has
already written its target fact; derived facts are write-once, so later
rules for the same target behave as else-branches.  A full pass with no
firing ends the run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

Value = int | float | bool | str  # str values are bare enum tokens

_IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")
_CMP_OPS = ("<=", ">=", "==", "!=", "<", ">")
_NUMERIC_ONLY = {"<", "<=", ">", ">="}


class RuleParseError(Exception):
    """Malformed rules document; carries the offending position."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ConditionTypeError(Exception):
    """A condition compared a fact against a literal of another type."""

    def __init__(self, rule_name: str, detail: str):
        super().__init__(f"rule '{rule_name}': {detail}")
        self.rule_name = rule_name


@dataclass(frozen=True)
class Condition:
    lhs: str
    cmp: str
    rhs: Value


@dataclass(frozen=True)
class Rule:
    name: str
    conditions: tuple[Condition, ...]
    action: tuple[str, Value]  # (target fact, literal)
    source_order: int


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def __len__(self) -> int:
        return len(self.rules)


@dataclass
class WorkingMemory:
    """Fact store for one inference run.

    `derived` holds names written by rule actions (write-once); `trace`
    records (rule name, pass number) in firing order.  `writers` maps each
    derived fact to the rule that wrote it, for explanations.
    """

    facts: dict[str, Value] = field(default_factory=dict)
    derived: set[str] = field(default_factory=set)
    trace: list[tuple[str, int]] = field(default_factory=list)
    writers: dict[str, Rule] = field(default_factory=dict)

    @classmethod
    def from_facts(cls, facts: dict[str, Value]) -> "WorkingMemory":
        return cls(facts=dict(facts))

    def fired_rules(self) -> list[str]:
        return [name for name, _ in self.trace]


# --- parsing ---------------------------------------------------------------

def _parse_literal(token: str, line: int, col: int) -> Value:
    if token == "true":
        return True
    if token == "false":
        return False
    if re.fullmatch(r"-?\d+", token):
        return int(token)
    if re.fullmatch(r"-?\d+\.\d+([eE][-+]?\d+)?|-?\d+[eE][-+]?\d+", token):
        return float(token)
    if _IDENT.fullmatch(token):
        return token  # enum token
    raise RuleParseError(f"invalid literal {token!r}", line, col)


def _is_number(v: Value) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _parse_condition(text: str, line: int, col: int) -> Condition:
    for op in _CMP_OPS:
        if op in text:
            lhs, rhs = text.split(op, 1)
            lhs = lhs.strip()
            rhs_txt = rhs.strip()
            if not _IDENT.fullmatch(lhs):
                raise RuleParseError(f"invalid fact name {lhs!r}", line, col)
            rhs_col = col + text.index(op) + len(op)
            value = _parse_literal(rhs_txt, line, rhs_col)
            if op in _NUMERIC_ONLY and not _is_number(value):
                raise RuleParseError(
                    f"operator {op!r} needs a numeric literal, got {rhs_txt!r}",
                    line, rhs_col)
            return Condition(lhs, op, value)
    raise RuleParseError(f"no comparison operator in condition {text!r}", line, col)


_RULE_HEADER = re.compile(r"\s*rule\s+(?P<name>\S+)\s*:\s*\Z")
_IF_LINE = re.compile(r"(?P<indent>\s*)if\s+(?P<body>.*)\Z")
_THEN_LINE = re.compile(
    r"\s*then\s+set\s+(?P<target>\S+)\s*=\s*(?P<value>\S+)\s*\Z")


def parse_rules(text: str) -> RuleSet:
    """Parse a rules document; raises RuleParseError with position."""
    lines = text.splitlines()
    rules: list[Rule] = []
    names: dict[str, int] = {}
    i = 0

    def next_content(j: int) -> int:
        while j < len(lines):
            s = lines[j].strip()
            if s and not s.startswith("#"):
                return j
            j += 1
        return j

    while True:
        i = next_content(i)
        if i >= len(lines):
            break
        header = lines[i]
        m = _RULE_HEADER.fullmatch(header)
        if m is None:
            raise RuleParseError(
                "expected 'rule <name>:'", i + 1, len(header) - len(header.lstrip()) + 1)
        name = m.group("name")
        if not _IDENT.fullmatch(name):
            raise RuleParseError(f"invalid rule name {name!r}", i + 1,
                                 header.index(name) + 1)
        if name in names:
            raise RuleParseError(
                f"duplicate rule name '{name}' (first defined on line {names[name]})",
                i + 1, header.index(name) + 1)

        j = next_content(i + 1)
        if j >= len(lines):
            raise RuleParseError(f"rule '{name}' is missing its 'if' line", i + 1)
        m_if = _IF_LINE.fullmatch(lines[j])
        if m_if is None:
            raise RuleParseError("expected 'if <condition> [and <condition>]*'",
                                 j + 1, len(lines[j]) - len(lines[j].lstrip()) + 1)
        conditions = []
        body = m_if.group("body")
        base_col = len(m_if.group("indent")) + len("if ") + 1
        offset = 0
        for part in body.split(" and "):
            conditions.append(_parse_condition(part.strip(), j + 1,
                                               base_col + offset))
            offset += len(part) + len(" and ")

        k = next_content(j + 1)
        if k >= len(lines):
            raise RuleParseError(f"rule '{name}' is missing its 'then' line", j + 1)
        m_then = _THEN_LINE.fullmatch(lines[k])
        if m_then is None:
            raise RuleParseError("expected 'then set <fact> = <literal>'",
                                 k + 1, len(lines[k]) - len(lines[k].lstrip()) + 1)
        target = m_then.group("target")
        if not _IDENT.fullmatch(target):
            raise RuleParseError(f"invalid fact name {target!r}", k + 1,
                                 lines[k].index(target) + 1)
        value = _parse_literal(m_then.group("value"), k + 1,
                               lines[k].rindex(m_then.group("value")) + 1)

        rules.append(Rule(name, tuple(conditions), (target, value), len(rules)))
        names[name] = i + 1
        i = k + 1

    return RuleSet(tuple(rules))


def _format_literal(v: Value) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    return repr(v) if isinstance(v, float) else str(v)


def serialize_rules(ruleset: RuleSet) -> str:
    """Canonical DSL text; parse(serialize(rs)) == rs."""
    blocks = []
    for rule in ruleset.rules:
        conds = " and ".join(
            f"{c.lhs} {c.cmp} {_format_literal(c.rhs)}" for c in rule.conditions)
        target, value = rule.action
        blocks.append(f"rule {rule.name}:\n"
                      f"  if {conds}\n"
                      f"  then set {target} = {_format_literal(value)}")
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# --- inference -------------------------------------------------------------

def _kind(v: Value) -> str:
    if isinstance(v, bool):
        return "boolean"
    if _is_number(v):
        return "number"
    return "token"


def _holds(cond: Condition, facts: dict[str, Value], rule_name: str) -> bool:
    if cond.lhs not in facts:
        return False  # absent evidence is not an error
    actual = facts[cond.lhs]
    if _kind(actual) != _kind(cond.rhs):
        raise ConditionTypeError(
            rule_name,
            f"fact '{cond.lhs}' is {_kind(actual)} but literal "
            f"{_format_literal(cond.rhs)} is {_kind(cond.rhs)}")
    if cond.cmp in _NUMERIC_ONLY and not _is_number(actual):
        raise ConditionTypeError(
            rule_name, f"operator {cond.cmp!r} applied to non-numeric fact '{cond.lhs}'")
    if cond.cmp == "<":
        return actual < cond.rhs
    if cond.cmp == "<=":
        return actual <= cond.rhs
    if cond.cmp == ">":
        return actual > cond.rhs
    if cond.cmp == ">=":
        return actual >= cond.rhs
    if cond.cmp == "==":
        return actual == cond.rhs
    return actual != cond.rhs


def infer(ruleset: RuleSet, initial: WorkingMemory) -> WorkingMemory:
    """Run forward chaining to quiescence; the input memory is not modified."""
    targets = {rule.action[0] for rule in ruleset.rules}
    collisions = targets & set(initial.facts)
    if collisions:
        raise ValueError(
            "initial facts collide with rule action targets: "
            + ", ".join(sorted(collisions)))

    memory = WorkingMemory(
        facts=dict(initial.facts),
        derived=set(initial.derived),
        trace=list(initial.trace),
        writers=dict(initial.writers),
    )
    fired: set[str] = set()
    pass_no = 0
    while True:
        pass_no += 1
        # Conditions see the facts as of the start of the pass; chained
        # conclusions become visible one pass later.  The write-once check
        # is live, so within a pass the first rule claims the target.
        snapshot = dict(memory.facts)
        fired_this_pass = 0
        for rule in ruleset.rules:
            if rule.name in fired:
                continue
            target, value = rule.action
            if target in memory.derived:
                continue
            if all(_holds(c, snapshot, rule.name) for c in rule.conditions):
                memory.facts[target] = value
                memory.derived.add(target)
                memory.writers[target] = rule
                memory.trace.append((rule.name, pass_no))
                fired.add(rule.name)
                fired_this_pass += 1
        if fired_this_pass == 0:
            break
    return memory


def explain(memory: WorkingMemory, fact_name: str) -> list[str]:
    """Rules that led to a derived fact, in firing order; [] for input facts."""
    if fact_name not in memory.writers:
        return []
    collected: set[str] = set()

    def visit(name: str):
        rule = memory.writers.get(name)
        if rule is None or rule.name in collected:
            return
        collected.add(rule.name)
        for cond in rule.conditions:
            visit(cond.lhs)

    visit(fact_name)
    order = {name: idx for idx, (name, _) in enumerate(memory.trace)}
    return sorted(collected, key=lambda n: order[n])


def load_rules_file(path: str) -> RuleSet:
    with open(path, encoding="utf-8") as f:
        return parse_rules(f.read())
