"""Food knowledge base: groups, items, and their text file format.

The knowledge base is a flat UTF-8 text file, one record per line:

    # comment
    group <id> kcal=<int> min=<int> max=<int>
    item id=<int> group=<id> name_en="<str>" name_ar="<str>" serving="<str>" [kcal=<int>]

Groups must be declared before their items; keys appear in the order shown
and unknown keys are a parse error.  A valid knowledge base contains exactly
the seven pyramid groups, each with at least one item.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace

GROUP_IDS = ("starch", "vegetable", "fruit", "protein", "milk", "sugar", "fat")


class KbParseError(Exception):
    """Raised for any malformed knowledge base document. Carries position."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class UnknownGroupError(KeyError):
    def __init__(self, group_id: str):
        super().__init__(group_id)
        self.group_id = group_id

    def __str__(self) -> str:
        return f"unknown food group '{self.group_id}'"


@dataclass(frozen=True)
class FoodGroup:
    id: str
    kcal_per_serving: int
    min_servings: int
    max_servings: int


@dataclass(frozen=True)
class FoodItem:
    id: int
    group: str
    name_en: str
    name_ar: str
    serving_desc: str
    kcal_override: int | None = None


@dataclass(frozen=True)
class Violation:
    """A broken knowledge base invariant; `entity` names the offender."""

    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.message}"


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable once built; dict order is the canonical file order."""

    groups: dict[str, FoodGroup]
    items: dict[int, FoodItem]
    version: str = "unversioned"

    def effective_kcal(self, item: FoodItem) -> int:
        if item.kcal_override is not None:
            return item.kcal_override
        return self.groups[item.group].kcal_per_serving


def items_in_group(kb: KnowledgeBase, group_id: str) -> list[FoodItem]:
    """All items of one group, ascending item id."""
    if group_id not in kb.groups:
        raise UnknownGroupError(group_id)
    return sorted((i for i in kb.items.values() if i.group == group_id),
                  key=lambda i: i.id)


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<key>[A-Za-z_][A-Za-z0-9_]*=)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>-?[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
""",
    re.VERBOSE,
)

_ESCAPES = {'\\"': '"', "\\\\": "\\"}


def _unescape(raw: str) -> str:
    return re.sub(r"\\.", lambda m: _ESCAPES.get(m.group(0), m.group(0)[1]), raw[1:-1])


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise KbParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(0), pos + 1))
        pos = m.end()
    return tokens


class _LineReader:
    """Consumes one tokenized line, reporting positions on mismatch."""

    def __init__(self, tokens: list[tuple[str, str, int]], lineno: int, width: int):
        self.tokens = tokens
        self.lineno = lineno
        self.width = width
        self.i = 0

    def _fail(self, expected: str):
        if self.i < len(self.tokens):
            kind, text, col = self.tokens[self.i]
            raise KbParseError(f"expected {expected}, found {text!r}", self.lineno, col)
        raise KbParseError(f"expected {expected}, found end of line",
                           self.lineno, self.width + 1)

    def take(self, kind: str, expected: str) -> tuple[str, int]:
        if self.i < len(self.tokens) and self.tokens[self.i][0] == kind:
            _, text, col = self.tokens[self.i]
            self.i += 1
            return text, col
        self._fail(expected)

    def take_key(self, name: str):
        text, col = self.take("key", f"key '{name}='")
        if text != name + "=":
            raise KbParseError(f"expected key '{name}=', found {text!r}", self.lineno, col)

    def peek_key(self) -> str | None:
        if self.i < len(self.tokens) and self.tokens[self.i][0] == "key":
            return self.tokens[self.i][1][:-1]
        return None

    def int_value(self, name: str) -> tuple[int, int]:
        self.take_key(name)
        text, col = self.take("int", f"integer value for '{name}'")
        return int(text), col

    def str_value(self, name: str) -> str:
        self.take_key(name)
        text, _ = self.take("string", f"quoted string for '{name}'")
        return _unescape(text)

    def end(self):
        if self.i < len(self.tokens):
            kind, text, col = self.tokens[self.i]
            raise KbParseError(f"unexpected trailing {text!r}", self.lineno, col)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a knowledge base document; raises KbParseError with position."""
    groups: dict[str, FoodGroup] = {}
    items: dict[int, FoodItem] = {}
    item_lines: dict[int, int] = {}

    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = _tokenize(line, lineno)
        r = _LineReader(tokens, lineno, len(line))
        kind, col0 = r.take("word", "'group' or 'item'")

        if kind == "group":
            gid, gcol = r.take("word", "group id")
            if gid not in GROUP_IDS:
                raise KbParseError(f"unknown group id '{gid}'", lineno, gcol)
            if gid in groups:
                raise KbParseError(f"duplicate group '{gid}'", lineno, gcol)
            kcal, kcol = r.int_value("kcal")
            lo, locol = r.int_value("min")
            hi, hicol = r.int_value("max")
            r.end()
            if kcal <= 0:
                raise KbParseError(f"kcal must be >= 1, got {kcal}", lineno, kcol)
            if lo < 0:
                raise KbParseError(f"min must be >= 0, got {lo}", lineno, locol)
            if hi < lo:
                raise KbParseError(f"max ({hi}) below min ({lo})", lineno, hicol)
            groups[gid] = FoodGroup(gid, kcal, lo, hi)

        elif kind == "item":
            iid, icol = r.int_value("id")
            r.take_key("group")
            gid, gcol = r.take("word", "group id")
            name_en = r.str_value("name_en")
            name_ar = r.str_value("name_ar")
            serving = r.str_value("serving")
            override = None
            if r.peek_key() == "kcal":
                override, kcol = r.int_value("kcal")
                if override <= 0:
                    raise KbParseError(f"kcal must be >= 1, got {override}", lineno, kcol)
            r.end()
            if iid <= 0:
                raise KbParseError(f"item id must be >= 1, got {iid}", lineno, icol)
            if iid in items:
                raise KbParseError(
                    f"duplicate item id {iid} (first declared on line {item_lines[iid]})",
                    lineno, icol)
            if gid not in groups:
                raise KbParseError(
                    f"unknown group id '{gid}' (groups must be declared first)",
                    lineno, gcol)
            if not name_en:
                raise KbParseError("name_en must not be empty", lineno)
            items[iid] = FoodItem(iid, gid, name_en, name_ar, serving, override)
            item_lines[iid] = lineno

        else:
            raise KbParseError(f"expected 'group' or 'item', found {kind!r}", lineno, col0)

    missing = [g for g in GROUP_IDS if g not in groups]
    if missing:
        raise KbParseError(f"missing group section(s): {', '.join(missing)}",
                           max(lineno, 1))
    empty = [g for g in GROUP_IDS if not any(i.group == g for i in items.values())]
    if empty:
        raise KbParseError(f"group(s) with no items: {', '.join(empty)}",
                           max(lineno, 1))

    kb = KnowledgeBase(groups=groups, items=items)
    return replace(kb, version=_fingerprint(kb))


def _fingerprint(kb: KnowledgeBase) -> str:
    digest = hashlib.sha256(serialize_kb(kb).encode("utf-8")).hexdigest()
    return digest[:12]


def serialize_kb(kb: KnowledgeBase) -> str:
    """Canonical text form; byte-deterministic, re-parses to an equal KB."""
    lines = []
    for g in kb.groups.values():
        lines.append(f"group {g.id} kcal={g.kcal_per_serving} "
                     f"min={g.min_servings} max={g.max_servings}")
    for item in kb.items.values():
        line = (f'item id={item.id} group={item.group} '
                f'name_en="{_escape(item.name_en)}" '
                f'name_ar="{_escape(item.name_ar)}" '
                f'serving="{_escape(item.serving_desc)}"')
        if item.kcal_override is not None:
            line += f" kcal={item.kcal_override}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def validate_kb(kb: KnowledgeBase) -> list[Violation]:
    """Check every invariant; returns one Violation per breach, empty if valid."""
    out: list[Violation] = []
    for gid in GROUP_IDS:
        if gid not in kb.groups:
            out.append(Violation(f"group {gid}", "required group is missing"))
    for gid, g in kb.groups.items():
        if gid not in GROUP_IDS:
            out.append(Violation(f"group {gid}", "not one of the seven pyramid groups"))
        if g.id != gid:
            out.append(Violation(f"group {gid}", f"keyed as {gid} but id is {g.id}"))
        if g.kcal_per_serving < 1:
            out.append(Violation(f"group {gid}",
                                 f"kcal_per_serving must be >= 1, got {g.kcal_per_serving}"))
        if g.min_servings < 0:
            out.append(Violation(f"group {gid}",
                                 f"min_servings must be >= 0, got {g.min_servings}"))
        if g.min_servings > g.max_servings:
            out.append(Violation(
                f"group {gid}",
                f"min_servings {g.min_servings} exceeds max_servings {g.max_servings}"))
        if gid in GROUP_IDS and not any(i.group == gid for i in kb.items.values()):
            out.append(Violation(f"group {gid}", "group has no items"))
    for iid, item in kb.items.items():
        if item.id != iid:
            out.append(Violation(f"item {iid}", f"keyed as {iid} but id is {item.id}"))
        if item.id <= 0:
            out.append(Violation(f"item {iid}", "item id must be >= 1"))
        if item.group not in kb.groups:
            out.append(Violation(f"item {iid}",
                                 f"references unknown group '{item.group}'"))
        if not item.name_en:
            out.append(Violation(f"item {iid}", "name_en is empty"))
        if item.kcal_override is not None and item.kcal_override <= 0:
            out.append(Violation(f"item {iid}",
                                 f"kcal override must be >= 1, got {item.kcal_override}"))
    return out


def load_default_kb() -> KnowledgeBase:
    """The knowledge base shipped with the package (45 Sudanese food items)."""
    from importlib.resources import files

    text = files("dietks.data").joinpath("food_kb.txt").read_text("utf-8")
    return parse_kb(text)
