"""Textual authoring format for declarations and events (.evspec files).

Grammar, one statement per line::

    decl  := ("owner" | "mut_ref" | "imm_ref" | "fn") name [ "{" attr ("," attr)* "}" ]
    attr  := "mut" ":" ("true" | "false") | "lifetime" ":" ("none" | "move" | "copy")
    event := INT ":" verb name [ "->" name ]

Verbs are the event kinds: move, copy, imm_borrow, mut_borrow, imm_return,
mut_return, read_fn, write_fn (two names each), acquire and scope_end (one
name). Declarations come first; hashes are assigned 1..N in declaration
order. "#" starts a comment; blank lines are ignored; LF or CRLF input is
accepted and LF is emitted.

Parsing is all-or-nothing: any error leaves no partial log behind.
"""

from __future__ import annotations

import re

from .errors import OwnvizError
from .events import (
    EventKind,
    EventLog,
    EventLogBuilder,
    ExternalEvent,
    LifetimeTrait,
    RapKind,
    ResourceAccessPoint,
)


class SpecSyntaxError(OwnvizError):
    def __init__(self, line: int, column: int, expected: str):
        super().__init__(f"line {line}, column {column}: expected {expected}")
        self.line = line
        self.column = column
        self.expected = expected


class UnknownName(OwnvizError):
    def __init__(self, name: str, line: int):
        super().__init__(f"line {line}: unknown name {name!r}")
        self.name = name
        self.line = line


class DuplicateDeclaration(OwnvizError):
    def __init__(self, name: str, line: int):
        super().__init__(f"line {line}: {name!r} is already declared")
        self.name = name
        self.line = line


_DECL_KEYWORDS = {
    "owner": RapKind.OWNER,
    "mut_ref": RapKind.MUTABLE_REFERENCE,
    "imm_ref": RapKind.IMMUTABLE_REFERENCE,
    "fn": RapKind.FUNCTION,
}

_VERBS = {kind.value: kind for kind in EventKind}
_SINGLE_NAME_VERBS = {EventKind.ACQUIRE, EventKind.GO_OUT_OF_SCOPE}

_NAME_RE = re.compile(r"[^\s{}#,]+")
_LIFETIMES = {t.value: t for t in LifetimeTrait}
_BOOLEANS = {"true": True, "false": False}


class _Cursor:
    """Single-statement scanner with 1-based column error reporting."""

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def fail(self, expected: str) -> None:
        raise SpecSyntaxError(self.lineno, self.pos + 1, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect_end(self) -> None:
        if not self.at_end():
            self.fail("end of statement")

    def try_literal(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect_literal(self, literal: str) -> None:
        if not self.try_literal(literal):
            self.fail(f'"{literal}"')

    def take_name(self, what: str = "name") -> str:
        self.skip_ws()
        match = _NAME_RE.match(self.text, self.pos)
        if not match:
            self.fail(what)
        name = match.group()
        if "->" in name:
            self.fail(f'{what} without "->"')
        self.pos = match.end()
        return name

    def take_word(self, what: str) -> str:
        """A bare identifier; unlike names, stops before punctuation."""
        self.skip_ws()
        match = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(self.text, self.pos)
        if not match:
            self.fail(what)
        self.pos = match.end()
        return match.group()

    def take_int(self, what: str) -> int:
        self.skip_ws()
        match = re.compile(r"\d+").match(self.text, self.pos)
        if not match:
            self.fail(what)
        self.pos = match.end()
        return int(match.group())


def _parse_declaration(cursor: _Cursor) -> tuple[RapKind, str, bool, LifetimeTrait]:
    keyword = cursor.take_name("declaration keyword or line number")
    kind = _DECL_KEYWORDS.get(keyword)
    if kind is None:
        cursor.pos -= len(keyword)
        cursor.fail("one of owner, mut_ref, imm_ref, fn, or a line number")
    name = cursor.take_name()
    is_mut = False
    lifetime = LifetimeTrait.NONE
    if cursor.try_literal("{"):
        while True:
            attr = cursor.take_word("attribute (mut or lifetime)")
            if attr not in ("mut", "lifetime"):
                cursor.pos -= len(attr)
                cursor.fail("attribute (mut or lifetime)")
            cursor.expect_literal(":")
            if attr == "mut":
                value = cursor.take_word("true or false")
                if value not in _BOOLEANS:
                    cursor.fail("true or false")
                is_mut = _BOOLEANS[value]
            else:
                value = cursor.take_word("none, move or copy")
                if value not in _LIFETIMES:
                    cursor.fail("none, move or copy")
                lifetime = _LIFETIMES[value]
            if cursor.try_literal("}"):
                break
            cursor.expect_literal(",")
    cursor.expect_end()
    return kind, name, is_mut, lifetime


def _parse_event(cursor: _Cursor) -> tuple[int, EventKind, str, str | None]:
    cursor.skip_ws()
    number_start = cursor.pos
    line = cursor.take_int("source line number")
    if line < 1:
        cursor.pos = number_start
        cursor.fail("positive line number")
    cursor.expect_literal(":")
    verb = cursor.take_name("event verb")
    kind = _VERBS.get(verb)
    if kind is None:
        cursor.pos -= len(verb)
        cursor.fail("event verb (move, copy, imm_borrow, ...)")
    first = cursor.take_name()
    second: str | None = None
    if kind in _SINGLE_NAME_VERBS:
        cursor.expect_end()
    else:
        cursor.expect_literal("->")
        second = cursor.take_name()
        cursor.expect_end()
    return line, kind, first, second


def parse_spec(text: str) -> tuple[dict[int, ResourceAccessPoint], EventLog]:
    """Parse an .evspec document into declarations and a finalized log."""
    builder = EventLogBuilder()
    hashes_by_name: dict[str, int] = {}
    events_started = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        statement = raw.split("#", 1)[0]
        if not statement.strip():
            continue
        cursor = _Cursor(statement, lineno)
        cursor.skip_ws()
        if statement[cursor.pos].isdigit():
            events_started = True
            src_line, kind, first, second = _parse_event(cursor)
            names = (first,) if second is None else (first, second)
            for name in names:
                if name not in hashes_by_name:
                    raise UnknownName(name, lineno)
            if kind is EventKind.ACQUIRE:
                from_hash, to_hash = None, hashes_by_name[first]
            elif kind is EventKind.GO_OUT_OF_SCOPE:
                from_hash, to_hash = hashes_by_name[first], None
            else:
                from_hash, to_hash = hashes_by_name[first], hashes_by_name[second]
            builder.append_external_event(ExternalEvent(kind, from_hash, to_hash, src_line))
        else:
            if events_started:
                cursor.fail("event statement (declarations must precede events)")
            kind, name, is_mut, lifetime = _parse_declaration(cursor)
            if name in hashes_by_name:
                raise DuplicateDeclaration(name, lineno)
            hash_ = len(hashes_by_name) + 1
            builder.declare_rap(kind, hash_, name, is_mut, lifetime)
            hashes_by_name[name] = hash_

    log = builder.finalize()
    return dict(log.declarations), log


_KIND_KEYWORDS = {kind: keyword for keyword, kind in _DECL_KEYWORDS.items()}


def print_spec(declarations: dict[int, ResourceAccessPoint], log: EventLog) -> str:
    """Emit the canonical document for a log; inverse of parse_spec.

    Declarations come out in hash order with only non-default attributes,
    events in log order, LF line endings throughout.
    """
    lines: list[str] = []
    for hash_ in sorted(declarations):
        rap = declarations[hash_]
        attrs = []
        if rap.is_mut:
            attrs.append("mut: true")
        if rap.lifetime_trait is not LifetimeTrait.NONE:
            attrs.append(f"lifetime: {rap.lifetime_trait.value}")
        suffix = f" {{ {', '.join(attrs)} }}" if attrs else ""
        lines.append(f"{_KIND_KEYWORDS[rap.kind]} {rap.name}{suffix}")
    for event in log:
        if event.kind is EventKind.ACQUIRE:
            body = log.name_of(event.to_hash)
        elif event.kind is EventKind.GO_OUT_OF_SCOPE:
            body = log.name_of(event.from_hash)
        else:
            body = f"{log.name_of(event.from_hash)} -> {log.name_of(event.to_hash)}"
        lines.append(f"{event.line}: {event.kind.value} {body}")
    return "".join(line + "\n" for line in lines)
