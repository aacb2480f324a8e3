"""Compiles a validated event log into per-variable timeline columns.

Each variable gets a column of geometry-free visual elements: a dot for
every event touching it, line segments between consecutive events styled by
the privileges held over that stretch, horizontal arrows connecting event
endpoints, access curves beside reference columns spanning borrow to
return, and an italic-f mark where a function reads through a reference.
Every element carries its finished hover message.

Segment styling encodes privilege: solid while the binding is reassignable
and the resource fully held, hollow while the binding cannot be reassigned
or the resource is immutably borrowed, and no segment at all after the
resource moves out or while a mutable borrow is live.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from .errors import OwnvizError
from .events import EventKind, EventLog, ExternalEvent, RapKind, ResourceAccessPoint
from .validator import ValidationReport, participant_flags_after_line, replay, validate


class CompileOnInvalidLog(OwnvizError):
    def __init__(self, report: ValidationReport):
        super().__init__("cannot compile timelines for a rule-violating log")
        self.report = report


class UnknownContext(OwnvizError):
    pass


class ElementKind(Enum):
    DOT = "dot"
    SEGMENT = "segment"
    ARROW = "arrow"
    ACCESS_CURVE = "access_curve"
    FUNCTION_READ_MARK = "function_read_mark"


class Style(Enum):
    SOLID = "solid"
    HOLLOW = "hollow"
    NONE = "none"


# Hover templates, keyed by context kind. Values are format strings over the
# names supplied in the context; segment/scope/post-return wording is picked
# by the boolean fields of the context.
_TEMPLATES: dict[str, str] = {
    "acquire_dot": "{subject} acquires ownership of a resource",
    "move_source_dot": "{subject}'s resource is moved",
    "move_arrow": "Move from {source} to {target}",
    "copy_source_dot": "{subject}'s resource is copied",
    "copy_arrow": "Copy from {source} to {target}",
    "copy_target_dot": "{subject} is initialized by copy from {source}",
    "imm_borrow_source_dot": "{subject}'s resource is immutably borrowed",
    "imm_borrow_arrow": "Immutable borrow from {source} to {target}",
    "imm_borrower_dot": "{subject} immutably borrows a resource",
    "imm_access_curve": "Cannot mutate *{subject}",
    "mut_borrow_source_dot": "{subject}'s resource is mutably borrowed",
    "mut_borrow_arrow": "mutable borrow from {source} to {target}",
    "mut_borrower_dot": "{subject} mutably borrows a resource",
    "mut_access_curve": "Can mutate the resource *{subject}",
    "function_read": "{function} reads from {subject}",
    "function_write": "{function} writes through {subject}",
    "imm_return_arrow": "Return immutably borrowed resource from {source} to {target}",
    "mut_return_arrow": "Return mutably borrowed resource from {source} to {target}",
    "function_label": "{subject}",
}


def hover_message(kind: str, **names: Any) -> str:
    """Instantiate the hover template for an element context.

    Context kinds beyond the plain templates: ``owner_segment`` (requires
    ``can_reassign``), ``post_return_dot`` (requires ``mutable``) and
    ``scope_end_dot`` (requires ``dropped``).
    """
    if kind == "owner_segment":
        tail = "can" if names["can_reassign"] else "cannot"
        return f"{names['subject']} is the owner of the resource. The binding {tail} be reassigned."
    if kind == "post_return_dot":
        how = "mutably" if names["mutable"] else "immutably"
        return f"{names['subject']}'s resource is no longer {how} borrowed"
    if kind == "scope_end_dot":
        tail = "Its resource is dropped." if names["dropped"] else "No resource is dropped."
        return f"{names['subject']} goes out of scope. {tail}"
    template = _TEMPLATES.get(kind)
    if template is None:
        raise UnknownContext(f"no hover template for context {kind!r}")
    try:
        return template.format(**names)
    except KeyError as missing:
        raise UnknownContext(f"context {kind!r} is missing name {missing}") from None


@dataclass(frozen=True)
class TimelineElement:
    kind: ElementKind
    column: int
    line_start: int
    line_end: int
    style: Style
    hover: str
    counterpart: int | None = None
    incoming: bool = False  # arrows only: points into this column
    seq: int = -1  # authored event order, for stable stacking

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "kind": self.kind.value,
            "column": self.column,
            "line_start": self.line_start,
            "line_end": self.line_end,
            "style": self.style.value,
            "hover": self.hover,
        }
        if self.counterpart is not None:
            d["counterpart"] = self.counterpart
            d["incoming"] = self.incoming
        if self.seq >= 0:
            d["seq"] = self.seq
        return d


@dataclass(frozen=True)
class TimelinePanel:
    """Compiled columns in declaration order plus the covered line range."""

    columns: tuple[tuple[ResourceAccessPoint, tuple[TimelineElement, ...]], ...]
    line_range: tuple[int, int]

    @property
    def last_line(self) -> int:
        return self.line_range[1]

    def column(self, hash_: int) -> tuple[TimelineElement, ...]:
        for rap, elements in self.columns:
            if rap.hash == hash_:
                return elements
        raise KeyError(hash_)

    def elements(self, kind: ElementKind | None = None) -> list[TimelineElement]:
        out = [e for _, elements in self.columns for e in elements]
        if kind is not None:
            out = [e for e in out if e.kind is kind]
        return out

    def arrows(self) -> list[TimelineElement]:
        """All arrows in authored event order."""
        return sorted(self.elements(ElementKind.ARROW), key=lambda e: e.seq)

    def to_dict(self) -> dict[str, Any]:
        return {
            "line_range": list(self.line_range),
            "columns": [
                {
                    "hash": rap.hash,
                    "name": rap.name,
                    "kind": rap.kind.value,
                    "is_mut": rap.is_mut,
                    "elements": [e.to_dict() for e in elements],
                }
                for rap, elements in self.columns
            ],
        }


def infer_drops(log: EventLog) -> frozenset[tuple[int, int]]:
    """Scope exits at which a resource is deallocated.

    A drop happens where an owner goes out of scope while still holding its
    resource; owners whose resource moved away and plain references drop
    nothing.
    """
    drops: set[tuple[int, int]] = set()
    for event, states, _ in replay(log):
        if event.kind is not EventKind.GO_OUT_OF_SCOPE:
            continue
        rap = log.rap(event.from_hash)
        if rap.kind is RapKind.OWNER and not states[rap.hash].moved_out:
            drops.add((rap.hash, event.line))
    return frozenset(drops)


_ARROW_KINDS = {
    EventKind.MOVE: "move_arrow",
    EventKind.COPY: "copy_arrow",
    EventKind.IMMUTABLE_BORROW: "imm_borrow_arrow",
    EventKind.MUTABLE_BORROW: "mut_borrow_arrow",
    EventKind.IMMUTABLE_RETURN: "imm_return_arrow",
    EventKind.MUTABLE_RETURN: "mut_return_arrow",
}


def _dot_messages(
    log: EventLog,
    event: ExternalEvent,
    column: int,
    drops: frozenset[tuple[int, int]],
) -> str:
    """Hover text this event contributes to a dot on the given column."""
    kind = event.kind
    name = log.name_of(column)
    src = log.name_of(event.from_hash) if event.from_hash is not None else None
    tgt = log.name_of(event.to_hash) if event.to_hash is not None else None
    on_source = event.from_hash == column

    if kind is EventKind.MOVE:
        if on_source:
            return hover_message("move_source_dot", subject=name)
        return hover_message("acquire_dot", subject=name)
    if kind is EventKind.COPY:
        if on_source:
            return hover_message("copy_source_dot", subject=name)
        return hover_message("copy_target_dot", subject=name, source=src)
    if kind is EventKind.IMMUTABLE_BORROW:
        if on_source:
            return hover_message("imm_borrow_source_dot", subject=name)
        return hover_message("imm_borrower_dot", subject=name)
    if kind is EventKind.MUTABLE_BORROW:
        if on_source:
            return hover_message("mut_borrow_source_dot", subject=name)
        return hover_message("mut_borrower_dot", subject=name)
    if kind is EventKind.IMMUTABLE_RETURN:
        if on_source:
            return hover_message("imm_return_arrow", source=src, target=tgt)
        return hover_message("post_return_dot", subject=name, mutable=False)
    if kind is EventKind.MUTABLE_RETURN:
        if on_source:
            return hover_message("mut_return_arrow", source=src, target=tgt)
        return hover_message("post_return_dot", subject=name, mutable=True)
    if kind in (EventKind.READ_BY_FUNCTION, EventKind.MUTATE_BY_FUNCTION):
        return hover_message("function_read", function=tgt, subject=name)
    if kind is EventKind.ACQUIRE:
        return hover_message("acquire_dot", subject=name)
    if kind is EventKind.GO_OUT_OF_SCOPE:
        dropped = (column, event.line) in drops
        return hover_message("scope_end_dot", subject=name, dropped=dropped)
    raise UnknownContext(f"no dot message for event kind {kind.value}")  # pragma: no cover


def _segment_style(rap: ResourceAccessPoint, st) -> Style | None:
    if st.out_of_scope or st.moved_out:
        return None
    if rap.kind is RapKind.OWNER:
        if st.mut_borrower is not None:
            return None
        if st.imm_borrowers:
            return Style.HOLLOW
    return Style.SOLID if rap.is_mut else Style.HOLLOW


def compile_timelines(
    log: EventLog,
    *,
    lenient: bool = False,
    distinguish_writes: bool = False,
) -> TimelinePanel:
    """Turn an event log into a timeline panel.

    The log must pass validation unless ``lenient`` is set, in which case a
    best-effort panel is compiled for the violating log.
    ``distinguish_writes`` switches the mark for mutating function access
    from the reads-from wording to "writes through".
    """
    if not lenient:
        report = validate(log)
        if not report.ok:
            raise CompileOnInvalidLog(report)

    drops = infer_drops(log)
    after_line = participant_flags_after_line(log)
    events = list(log)
    variables = log.variables()

    # Events touching each variable, and arrows, in one authored-order pass.
    touching: dict[int, list[tuple[int, ExternalEvent]]] = {rap.hash: [] for rap in variables}
    arrows: dict[int, list[TimelineElement]] = {rap.hash: [] for rap in variables}
    for seq, event in enumerate(events):
        for h in event.referenced_hashes():
            if h in touching:
                touching[h].append((seq, event))
        arrow_kind = _ARROW_KINDS.get(event.kind)
        if arrow_kind is not None:
            src, tgt = event.from_hash, event.to_hash
            column = src if log.rap(src).kind.is_variable else tgt
            counterpart = tgt if column == src else src
            arrows[column].append(
                TimelineElement(
                    kind=ElementKind.ARROW,
                    column=column,
                    line_start=event.line,
                    line_end=event.line,
                    style=Style.SOLID,
                    hover=hover_message(
                        arrow_kind, source=log.name_of(src), target=log.name_of(tgt)
                    ),
                    counterpart=counterpart,
                    incoming=column == tgt,
                    seq=seq,
                )
            )

    columns: list[tuple[ResourceAccessPoint, tuple[TimelineElement, ...]]] = []
    for rap in variables:
        elements: list[TimelineElement] = []
        touched = touching[rap.hash]

        # Dots: one per touched line, hover lines joined in authored order.
        lines: list[int] = []
        messages: dict[int, list[str]] = {}
        for seq, event in touched:
            if event.line not in messages:
                lines.append(event.line)
                messages[event.line] = []
            text = _dot_messages(log, event, rap.hash, drops)
            if event.kind is EventKind.MUTATE_BY_FUNCTION and distinguish_writes:
                text = hover_message(
                    "function_write", function=log.name_of(event.to_hash), subject=rap.name
                )
            if text not in messages[event.line]:
                messages[event.line].append(text)
        for line in lines:
            elements.append(
                TimelineElement(
                    kind=ElementKind.DOT,
                    column=rap.hash,
                    line_start=line,
                    line_end=line,
                    style=Style.SOLID,
                    hover="\n".join(messages[line]),
                )
            )

        # Segments between consecutive touched lines, styled by the state
        # that holds over the open interval.
        for a, b in zip(lines, lines[1:]):
            style = _segment_style(rap, after_line[a][rap.hash])
            if style is None:
                continue
            elements.append(
                TimelineElement(
                    kind=ElementKind.SEGMENT,
                    column=rap.hash,
                    line_start=a,
                    line_end=b,
                    style=style,
                    hover=hover_message("owner_segment", subject=rap.name, can_reassign=rap.is_mut),
                )
            )

        if rap.kind.is_reference:
            elements.extend(_reference_extras(log, events, rap, distinguish_writes))

        elements.extend(arrows[rap.hash])
        columns.append((rap, tuple(elements)))

    return TimelinePanel(columns=tuple(columns), line_range=(1, log.last_line))


def _reference_extras(
    log: EventLog,
    events: list[ExternalEvent],
    rap: ResourceAccessPoint,
    distinguish_writes: bool,
) -> list[TimelineElement]:
    """Access curves (borrow through return) and function-access marks."""
    out: list[TimelineElement] = []
    mutable = rap.kind is RapKind.MUTABLE_REFERENCE
    borrow_kind = EventKind.MUTABLE_BORROW if mutable else EventKind.IMMUTABLE_BORROW
    return_kind = EventKind.MUTABLE_RETURN if mutable else EventKind.IMMUTABLE_RETURN
    curve_hover = hover_message(
        "mut_access_curve" if mutable else "imm_access_curve", subject=rap.name
    )

    used_returns: set[int] = set()
    for seq, event in enumerate(events):
        if event.kind is borrow_kind and event.to_hash == rap.hash:
            end_line = log.last_line
            for later in range(seq + 1, len(events)):
                follow = events[later]
                if later not in used_returns and (
                    follow.kind is return_kind
                    and follow.from_hash == rap.hash
                    and follow.to_hash == event.from_hash
                ):
                    used_returns.add(later)
                    end_line = follow.line
                    break
                if follow.kind is EventKind.GO_OUT_OF_SCOPE and follow.from_hash == rap.hash:
                    end_line = follow.line
                    break
            out.append(
                TimelineElement(
                    kind=ElementKind.ACCESS_CURVE,
                    column=rap.hash,
                    line_start=event.line,
                    line_end=end_line,
                    style=Style.SOLID if mutable else Style.HOLLOW,
                    hover=curve_hover,
                    counterpart=event.from_hash,
                    seq=seq,
                )
            )
        elif (
            event.kind in (EventKind.READ_BY_FUNCTION, EventKind.MUTATE_BY_FUNCTION)
            and event.from_hash == rap.hash
        ):
            context = (
                "function_write"
                if event.kind is EventKind.MUTATE_BY_FUNCTION and distinguish_writes
                else "function_read"
            )
            out.append(
                TimelineElement(
                    kind=ElementKind.FUNCTION_READ_MARK,
                    column=rap.hash,
                    line_start=event.line,
                    line_end=event.line,
                    style=Style.SOLID,
                    hover=hover_message(
                        context, function=log.name_of(event.to_hash), subject=rap.name
                    ),
                    counterpart=event.to_hash,
                    seq=seq,
                )
            )
    return out
