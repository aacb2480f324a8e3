"""Participants and memory events.

A visualization is described by a set of participants (owner variables,
reference variables, functions) and a line-anchored sequence of memory
events between them (moves, copies, borrows, returns, function reads,
acquisitions, scope exits). Events are accumulated through
:class:`EventLogBuilder` and frozen into an immutable :class:`EventLog`,
which is the single input to validation and timeline compilation.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum

from .errors import OwnvizError

FUNCTION_DATA_HASH = 0  # reserved in-source data hash for function tokens


class RapKind(Enum):
    """What role a participant plays in memory events."""

    OWNER = "owner"
    MUTABLE_REFERENCE = "mut_ref"
    IMMUTABLE_REFERENCE = "imm_ref"
    FUNCTION = "fn"

    @property
    def is_reference(self) -> bool:
        return self in (RapKind.MUTABLE_REFERENCE, RapKind.IMMUTABLE_REFERENCE)

    @property
    def is_variable(self) -> bool:
        return self is not RapKind.FUNCTION


class LifetimeTrait(Enum):
    """Whether moves or copies away from a participant may be depicted."""

    NONE = "none"
    MOVE = "move"
    COPY = "copy"


class EventKind(Enum):
    # Enum values double as the DSL verbs.
    MOVE = "move"
    COPY = "copy"
    IMMUTABLE_BORROW = "imm_borrow"
    MUTABLE_BORROW = "mut_borrow"
    IMMUTABLE_RETURN = "imm_return"
    MUTABLE_RETURN = "mut_return"
    READ_BY_FUNCTION = "read_fn"
    MUTATE_BY_FUNCTION = "write_fn"
    ACQUIRE = "acquire"
    GO_OUT_OF_SCOPE = "scope_end"


#: kind -> (requires from, requires to)
_ENDPOINT_ARITY: dict[EventKind, tuple[bool, bool]] = {
    EventKind.MOVE: (True, True),
    EventKind.COPY: (True, True),
    EventKind.IMMUTABLE_BORROW: (True, True),
    EventKind.MUTABLE_BORROW: (True, True),
    EventKind.IMMUTABLE_RETURN: (True, True),
    EventKind.MUTABLE_RETURN: (True, True),
    EventKind.READ_BY_FUNCTION: (True, True),
    EventKind.MUTATE_BY_FUNCTION: (True, True),
    EventKind.ACQUIRE: (False, True),
    EventKind.GO_OUT_OF_SCOPE: (True, False),
}


class DuplicateHash(OwnvizError):
    def __init__(self, hash_: int):
        super().__init__(f"hash {hash_} is already declared")
        self.hash = hash_


class InvalidFieldForKind(OwnvizError):
    pass


class MalformedEvent(OwnvizError):
    pass


class UndeclaredParticipant(OwnvizError):
    def __init__(self, hash_: int):
        super().__init__(f"event references undeclared hash {hash_}")
        self.hash = hash_


class EmptyDeclarations(OwnvizError):
    pass


@dataclass(frozen=True)
class ResourceAccessPoint:
    """A named, hashed participant in memory events.

    ``is_mut`` records binding reassignability and ``lifetime_trait``
    licenses depicted moves/copies away from the participant; both are
    meaningless for functions and must stay at their defaults there.
    """

    kind: RapKind
    hash: int
    name: str
    is_mut: bool = False
    lifetime_trait: LifetimeTrait = LifetimeTrait.NONE

    def __post_init__(self) -> None:
        if self.hash < 1:
            raise InvalidFieldForKind(f"participant hash must be >= 1, got {self.hash}")
        if not self.name:
            raise InvalidFieldForKind("participant name must be non-empty")
        if self.kind is RapKind.FUNCTION:
            if self.is_mut:
                raise InvalidFieldForKind(f"function {self.name!r} cannot carry binding mutability")
            if self.lifetime_trait is not LifetimeTrait.NONE:
                raise InvalidFieldForKind(f"function {self.name!r} cannot carry a lifetime trait")


@dataclass(frozen=True)
class ExternalEvent:
    """One teacher-specified memory event anchored to a source line.

    ``from_hash``/``to_hash`` hold participant hashes; which endpoints are
    required depends on the kind. A scope exit names its participant in
    ``from_hash`` and has no counterpart.
    """

    kind: EventKind
    from_hash: int | None
    to_hash: int | None
    line: int

    def __post_init__(self) -> None:
        if self.line < 1:
            raise MalformedEvent(f"event line must be >= 1, got {self.line}")
        needs_from, needs_to = _ENDPOINT_ARITY[self.kind]
        if needs_from != (self.from_hash is not None) or needs_to != (self.to_hash is not None):
            raise MalformedEvent(f"{self.kind.value} requires from={needs_from}, to={needs_to}")
        if self.from_hash is not None and self.from_hash == self.to_hash:
            raise MalformedEvent(f"{self.kind.value} endpoints must differ")

    def referenced_hashes(self) -> tuple[int, ...]:
        return tuple(h for h in (self.from_hash, self.to_hash) if h is not None)


def _check_endpoint_kinds(event: ExternalEvent, declarations: dict[int, ResourceAccessPoint]) -> None:
    """Reject events whose endpoints have the wrong participant kinds."""
    src = declarations[event.from_hash] if event.from_hash is not None else None
    tgt = declarations[event.to_hash] if event.to_hash is not None else None
    kind = event.kind

    def fail(reason: str) -> None:
        raise MalformedEvent(f"{kind.value}: {reason}")

    if kind in (EventKind.MOVE, EventKind.COPY):
        if src.kind is RapKind.FUNCTION and tgt.kind is RapKind.FUNCTION:
            fail("at least one endpoint must be a variable")
    elif kind is EventKind.IMMUTABLE_BORROW:
        if src.kind is not RapKind.OWNER:
            fail(f"source {src.name!r} must be an owner")
        if tgt.kind is not RapKind.IMMUTABLE_REFERENCE:
            fail(f"target {tgt.name!r} must be an immutable reference")
    elif kind is EventKind.MUTABLE_BORROW:
        if src.kind is not RapKind.OWNER:
            fail(f"source {src.name!r} must be an owner")
        if tgt.kind is not RapKind.MUTABLE_REFERENCE:
            fail(f"target {tgt.name!r} must be a mutable reference")
    elif kind is EventKind.IMMUTABLE_RETURN:
        if src.kind is not RapKind.IMMUTABLE_REFERENCE:
            fail(f"source {src.name!r} must be an immutable reference")
        if tgt.kind is not RapKind.OWNER:
            fail(f"target {tgt.name!r} must be an owner")
    elif kind is EventKind.MUTABLE_RETURN:
        if src.kind is not RapKind.MUTABLE_REFERENCE:
            fail(f"source {src.name!r} must be a mutable reference")
        if tgt.kind is not RapKind.OWNER:
            fail(f"target {tgt.name!r} must be an owner")
    elif kind in (EventKind.READ_BY_FUNCTION, EventKind.MUTATE_BY_FUNCTION):
        if not src.kind.is_reference:
            fail(f"source {src.name!r} must be a reference")
        if tgt.kind is not RapKind.FUNCTION:
            fail(f"target {tgt.name!r} must be a function")
    elif kind is EventKind.ACQUIRE:
        if tgt.kind is not RapKind.OWNER:
            fail(f"target {tgt.name!r} must be an owner")
    elif kind is EventKind.GO_OUT_OF_SCOPE:
        if src.kind is RapKind.FUNCTION:
            fail(f"{src.name!r} is a function and has no scope to exit")


@dataclass(frozen=True)
class EventLog:
    """Finalized, line-ordered event sequence plus declarations.

    Immutable after construction; safe to share across threads.
    """

    declarations: dict[int, ResourceAccessPoint]
    events: tuple[ExternalEvent, ...]
    last_line: int

    def __post_init__(self) -> None:
        if self.events and not self.declarations:
            raise EmptyDeclarations("events present but no participants declared")
        for event in self.events:
            for h in event.referenced_hashes():
                if h not in self.declarations:
                    raise UndeclaredParticipant(h)
            _check_endpoint_kinds(event, self.declarations)
        lines = [e.line for e in self.events]
        if lines != sorted(lines):
            raise MalformedEvent("events are not ordered by line")
        expected_last = max(lines, default=0)
        if self.last_line != expected_last:
            object.__setattr__(self, "last_line", expected_last)

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def rap(self, hash_: int) -> ResourceAccessPoint:
        return self.declarations[hash_]

    def name_of(self, hash_: int) -> str:
        return self.declarations[hash_].name

    def variables(self) -> tuple[ResourceAccessPoint, ...]:
        """Non-function participants in declaration order."""
        return tuple(r for r in self.declarations.values() if r.kind.is_variable)

    def functions(self) -> tuple[ResourceAccessPoint, ...]:
        return tuple(r for r in self.declarations.values() if r.kind is RapKind.FUNCTION)


@dataclass
class EventLogBuilder:
    """Accumulates declarations and events, then freezes them with finalize().

    Events are kept sorted by line at insertion time; events appended for an
    already-occupied line land after the existing ones, so authored order is
    preserved within a line.
    """

    _declarations: dict[int, ResourceAccessPoint] = field(default_factory=dict)
    _events: list[ExternalEvent] = field(default_factory=list)

    def declare_rap(
        self,
        kind: RapKind,
        hash_: int,
        name: str,
        is_mut: bool = False,
        lifetime_trait: LifetimeTrait = LifetimeTrait.NONE,
    ) -> ResourceAccessPoint:
        if hash_ in self._declarations:
            raise DuplicateHash(hash_)
        rap = ResourceAccessPoint(kind, hash_, name, is_mut, lifetime_trait)
        self._declarations[hash_] = rap
        return rap

    def append_external_event(self, event: ExternalEvent) -> EventLogBuilder:
        for h in event.referenced_hashes():
            if h not in self._declarations:
                raise UndeclaredParticipant(h)
        _check_endpoint_kinds(event, self._declarations)
        index = bisect.bisect_right(self._events, event.line, key=lambda e: e.line)
        self._events.insert(index, event)
        return self

    def append(
        self,
        kind: EventKind,
        from_hash: int | None = None,
        to_hash: int | None = None,
        *,
        line: int,
    ) -> EventLogBuilder:
        """Shorthand for building and appending an event in one call."""
        return self.append_external_event(ExternalEvent(kind, from_hash, to_hash, line))

    def finalize(self) -> EventLog:
        return EventLog(
            declarations=dict(self._declarations),
            events=tuple(self._events),
            last_line=max((e.line for e in self._events), default=0),
        )


def finalize(log: EventLogBuilder | EventLog) -> EventLog:
    """Freeze a builder into an EventLog; idempotent on already-final logs."""
    if isinstance(log, EventLog):
        return log
    return log.finalize()
