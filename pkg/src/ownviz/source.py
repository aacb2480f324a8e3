"""Parser for hash-annotated source listings.

The annotation syntax wraps each visualized token in a tspan tag::

    let <tspan data-hash="1">s</tspan> =
    <tspan class="fn" data-hash="0" hash="2">String::from</tspan>("hello");

Variable tokens carry data-hash >= 1; function tokens carry the reserved
data-hash 0 plus their real identity in the hash attribute. Any "<" that
does not open a tspan tag is treated as literal program text, so comparison
operators and generics survive unannotated. Tabs are expanded to 4 spaces
up front to keep column geometry deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import OwnvizError
from .events import FUNCTION_DATA_HASH

TAB_WIDTH = 4

_OPEN_TAG_RE = re.compile(r"<tspan(\s[^<>]*)?>")
_ATTR_RE = re.compile(r'([A-Za-z][\w-]*)\s*=\s*"([^"]*)"')
_CLOSE_TAG = "</tspan>"


class MalformedTag(OwnvizError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class NestedAnnotation(OwnvizError):
    def __init__(self, line: int):
        super().__init__(f"line {line}: annotations may not nest")
        self.line = line


class NonNumericHash(OwnvizError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: hash value {value!r} is not a non-negative integer")
        self.line = line


@dataclass(frozen=True)
class Span:
    """One run of source text, optionally annotated with a participant hash."""

    text: str
    data_hash: int | None = None
    fn_hash: int | None = None

    @property
    def is_fn(self) -> bool:
        return self.fn_hash is not None

    @property
    def is_annotated(self) -> bool:
        return self.data_hash is not None

    @property
    def participant_hash(self) -> int | None:
        """The declared hash this span refers to, if any."""
        if self.fn_hash is not None:
            return self.fn_hash
        if self.data_hash is not None and self.data_hash != FUNCTION_DATA_HASH:
            return self.data_hash
        return None


@dataclass(frozen=True)
class AnnotatedListing:
    lines: tuple[tuple[Span, ...], ...]
    trailing_newline: bool = True

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def referenced_hashes(self) -> list[tuple[int, int]]:
        """(hash, line) pairs for every annotated span, sentinel excluded."""
        out = []
        for lineno, spans in enumerate(self.lines, start=1):
            for span in spans:
                if span.participant_hash is not None:
                    out.append((span.participant_hash, lineno))
        return out


def _parse_hash(value: str, lineno: int) -> int:
    if not value.isdigit():
        raise NonNumericHash(lineno, value)
    return int(value)


def _parse_tag_attrs(attr_text: str, lineno: int) -> Span:
    attrs: dict[str, str] = {}
    rest = attr_text
    for match in _ATTR_RE.finditer(attr_text):
        if match.group(1) in attrs:
            raise MalformedTag(lineno, f"duplicate attribute {match.group(1)!r}")
        attrs[match.group(1)] = match.group(2)
        rest = rest.replace(match.group(0), "", 1)
    if rest.strip():
        raise MalformedTag(lineno, f"unparseable tag content {rest.strip()!r}")
    unknown = set(attrs) - {"class", "data-hash", "hash"}
    if unknown:
        raise MalformedTag(lineno, f"unsupported attribute {sorted(unknown)[0]!r}")
    if "data-hash" not in attrs:
        raise MalformedTag(lineno, "annotation is missing data-hash")

    data_hash = _parse_hash(attrs["data-hash"], lineno)
    if attrs.get("class") == "fn":
        if "hash" not in attrs:
            raise MalformedTag(lineno, "function annotation is missing its hash attribute")
        if data_hash != FUNCTION_DATA_HASH:
            raise MalformedTag(lineno, f"function annotations use data-hash {FUNCTION_DATA_HASH}")
        fn_hash = _parse_hash(attrs["hash"], lineno)
        if fn_hash < 1:
            raise MalformedTag(lineno, "function hash must be >= 1")
        return Span(text="", data_hash=data_hash, fn_hash=fn_hash)
    if "class" in attrs:
        raise MalformedTag(lineno, f"unsupported class {attrs['class']!r}")
    if "hash" in attrs:
        raise MalformedTag(lineno, "hash attribute is only valid on function annotations")
    if data_hash < 1:
        raise MalformedTag(lineno, "variable annotations need data-hash >= 1")
    return Span(text="", data_hash=data_hash)


def _parse_line(raw: str, lineno: int) -> tuple[Span, ...]:
    spans: list[Span] = []
    text = raw.expandtabs(TAB_WIDTH)
    pos = 0

    def emit_plain(until: int) -> None:
        if until > pos:
            spans.append(Span(text=text[pos:until]))

    while True:
        start = text.find("<tspan", pos)
        if start == -1:
            close = text.find(_CLOSE_TAG, pos)
            if close != -1:
                raise MalformedTag(lineno, "closing tag without an opening annotation")
            emit_plain(len(text))
            break
        open_match = _OPEN_TAG_RE.match(text, start)
        if not open_match:
            raise MalformedTag(lineno, "unterminated or malformed annotation tag")
        stray_close = text.find(_CLOSE_TAG, pos, start)
        if stray_close != -1:
            raise MalformedTag(lineno, "closing tag without an opening annotation")
        emit_plain(start)
        body_start = open_match.end()
        body_end = text.find(_CLOSE_TAG, body_start)
        if body_end == -1:
            raise MalformedTag(lineno, "annotation tag is never closed")
        body = text[body_start:body_end]
        if "<tspan" in body:
            raise NestedAnnotation(lineno)
        template = _parse_tag_attrs(open_match.group(1) or "", lineno)
        spans.append(Span(text=body, data_hash=template.data_hash, fn_hash=template.fn_hash))
        pos = body_end + len(_CLOSE_TAG)
    return tuple(spans)


def parse_annotated_source(text: str) -> AnnotatedListing:
    """Parse an annotated listing; line numbering starts at 1."""
    return AnnotatedListing(
        lines=tuple(_parse_line(raw, lineno) for lineno, raw in enumerate(text.splitlines(), 1)),
        trailing_newline=text.endswith(("\n", "\r")),
    )


def strip_annotations(listing: AnnotatedListing) -> str:
    """Plain source text with every annotation tag removed.

    Byte-equal to the original program text up to tab expansion and CRLF
    normalization.
    """
    if not listing.lines:
        return ""
    body = "\n".join("".join(span.text for span in spans) for spans in listing.lines)
    return body + ("\n" if listing.trailing_newline else "")
