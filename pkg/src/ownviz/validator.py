"""Ownership and borrowing rule checks over a finalized event log.

The validator replays events in line order against per-participant states
and reports every rule violation it finds. Borrow liveness is non-lexical:
a borrow is live from the borrow event until its explicit return event (or
until the reference itself leaves scope or is moved away, which ends the
borrow silently).

Rules:

* R1  use of a participant whose resource was moved out
* R2  mutable borrow while another borrow (mutable or immutable) is live
* R3  immutable borrow while a mutable borrow is live
* R4  owner moved, reassigned, or out of scope while a borrow is live;
      also copy from an owner during a live mutable borrow
* R5  return event with no matching live borrow
* R6  scope exit for a participant already out of scope
* R7  event referencing a participant after its scope exit
* R8  depicted move/copy not licensed by the source's lifetime trait
      (functions are exempt: they may produce or consume any resource)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import OwnvizError
from .events import EventKind, EventLog, ExternalEvent, LifetimeTrait, RapKind

RULE_SUMMARIES = {
    "R1": "use after move",
    "R2": "conflicting mutable borrow",
    "R3": "immutable borrow during mutable borrow",
    "R4": "owner access while borrowed",
    "R5": "return without live borrow",
    "R6": "duplicate scope exit",
    "R7": "use after scope exit",
    "R8": "lifetime trait mismatch",
}


class InvalidOnViolatingLog(OwnvizError):
    pass


@dataclass(frozen=True)
class Violation:
    rule: str
    line: int
    participants: tuple[int, ...]
    names: tuple[str, ...]
    message: str

    def diagnostic(self) -> str:
        """Line-oriented CLI form: RULE:LINE:NAMES:MESSAGE."""
        return f"{self.rule}:{self.line}:{','.join(self.names)}:{self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def diagnostics(self) -> list[str]:
        return [v.diagnostic() for v in self.violations]


@dataclass(frozen=True)
class ResourceState:
    """Snapshot of one owner's resource at a point in the replay."""

    owner: int | None
    live_immutable_borrows: frozenset[int]
    live_mutable_borrow: int | None
    moved_out: bool


@dataclass
class _PState:
    out_of_scope: bool = False
    moved_out: bool = False
    # Owner-only borrow bookkeeping; stays empty for references/functions.
    imm_borrowers: set[int] = field(default_factory=set)
    mut_borrower: int | None = None

    @property
    def borrowed(self) -> bool:
        return bool(self.imm_borrowers) or self.mut_borrower is not None


def _initial_states(log: EventLog) -> dict[int, _PState]:
    return {h: _PState() for h in log.declarations}


def _end_borrows_held_by(states: dict[int, _PState], ref: int) -> None:
    """Drop every live borrow held by a reference (scope exit / move-away)."""
    for st in states.values():
        st.imm_borrowers.discard(ref)
        if st.mut_borrower == ref:
            st.mut_borrower = None


def _step(log: EventLog, states: dict[int, _PState], event: ExternalEvent) -> list[Violation]:
    """Apply one event, returning violations. Effects land even on violation
    so replay can continue best-effort."""
    out: list[Violation] = []

    def report(rule: str, *hashes: int, message: str) -> None:
        out.append(
            Violation(
                rule=rule,
                line=event.line,
                participants=hashes,
                names=tuple(log.name_of(h) for h in hashes),
                message=message,
            )
        )

    kind = event.kind
    if kind is EventKind.GO_OUT_OF_SCOPE:
        p = event.from_hash
        st = states[p]
        rap = log.rap(p)
        if st.out_of_scope:
            report("R6", p, message="participant already went out of scope")
        if rap.kind is RapKind.OWNER and st.borrowed:
            holders = sorted(st.imm_borrowers) + ([st.mut_borrower] if st.mut_borrower is not None else [])
            report("R4", p, *holders, message="owner leaves scope while a borrow is live")
        if rap.kind.is_reference:
            _end_borrows_held_by(states, p)
        st.out_of_scope = True
        return out

    for h in event.referenced_hashes():
        if states[h].out_of_scope:
            report("R7", h, message="participant used after going out of scope")

    src = log.rap(event.from_hash) if event.from_hash is not None else None
    tgt = log.rap(event.to_hash) if event.to_hash is not None else None

    if kind in (EventKind.MOVE, EventKind.COPY):
        if src.kind is not RapKind.FUNCTION:
            st = states[src.hash]
            if st.moved_out:
                report("R1", src.hash, message="source's resource was already moved out")
            needed = LifetimeTrait.MOVE if kind is EventKind.MOVE else LifetimeTrait.COPY
            if src.lifetime_trait is not needed:
                report("R8", src.hash, message=f"source lacks the {needed.value} trait")
            if src.kind is RapKind.OWNER:
                if kind is EventKind.MOVE and st.borrowed:
                    report("R4", src.hash, message="owner moved while a borrow is live")
                elif kind is EventKind.COPY and st.mut_borrower is not None:
                    report("R4", src.hash, message="owner copied during a live mutable borrow")
            if kind is EventKind.MOVE:
                st.moved_out = True
                if src.kind.is_reference:
                    _end_borrows_held_by(states, src.hash)
        if tgt.kind is not RapKind.FUNCTION:
            states[tgt.hash].moved_out = False

    elif kind is EventKind.IMMUTABLE_BORROW:
        st = states[src.hash]
        if st.moved_out:
            report("R1", src.hash, message="borrow from an owner whose resource moved out")
        if st.mut_borrower is not None:
            report("R3", src.hash, tgt.hash, message="immutable borrow while a mutable borrow is live")
        st.imm_borrowers.add(tgt.hash)
        states[tgt.hash].moved_out = False

    elif kind is EventKind.MUTABLE_BORROW:
        st = states[src.hash]
        if st.moved_out:
            report("R1", src.hash, message="borrow from an owner whose resource moved out")
        if st.mut_borrower is not None or st.imm_borrowers:
            report("R2", src.hash, tgt.hash, message="mutable borrow while another borrow is live")
        st.mut_borrower = tgt.hash
        states[tgt.hash].moved_out = False

    elif kind is EventKind.IMMUTABLE_RETURN:
        st = states[tgt.hash]
        if src.hash in st.imm_borrowers:
            st.imm_borrowers.discard(src.hash)
        else:
            report("R5", src.hash, tgt.hash, message="no matching live immutable borrow to return")

    elif kind is EventKind.MUTABLE_RETURN:
        st = states[tgt.hash]
        if st.mut_borrower == src.hash:
            st.mut_borrower = None
        else:
            report("R5", src.hash, tgt.hash, message="no matching live mutable borrow to return")

    elif kind in (EventKind.READ_BY_FUNCTION, EventKind.MUTATE_BY_FUNCTION):
        if states[src.hash].moved_out:
            report("R1", src.hash, message="reference used after being moved away")

    elif kind is EventKind.ACQUIRE:
        st = states[tgt.hash]
        if st.borrowed:
            report("R4", tgt.hash, message="owner reassigned while a borrow is live")
        st.moved_out = False

    return out


def replay(log: EventLog) -> Iterator[tuple[ExternalEvent, dict[int, _PState], list[Violation]]]:
    """Step through the log, yielding each event with the post-event states.

    The states dict is shared and mutated between yields; callers that need
    snapshots must copy what they keep.
    """
    states = _initial_states(log)
    for event in log:
        violations = _step(log, states, event)
        yield event, states, violations


def validate(log: EventLog) -> ValidationReport:
    """Check every rule over the whole log; violations are data, not errors."""
    collected: list[Violation] = []
    for _, _, violations in replay(log):
        collected.extend(violations)
    return ValidationReport(violations=tuple(collected))


def _owner_snapshot(hash_: int, st: _PState) -> ResourceState:
    return ResourceState(
        owner=hash_,
        live_immutable_borrows=frozenset(st.imm_borrowers),
        live_mutable_borrow=st.mut_borrower,
        moved_out=st.moved_out,
    )


def resource_state_at(log: EventLog, line: int) -> dict[int, ResourceState]:
    """Owner states after applying all events with event.line <= line.

    Only valid on rule-conforming logs; raises InvalidOnViolatingLog
    otherwise.
    """
    if not validate(log).ok:
        raise InvalidOnViolatingLog("resource states are only defined for rule-conforming logs")
    states = _initial_states(log)
    for event in log:
        if event.line > line:
            break
        _step(log, states, event)
    return {
        h: _owner_snapshot(h, states[h])
        for h, rap in log.declarations.items()
        if rap.kind is RapKind.OWNER
    }


def participant_flags_after_line(log: EventLog) -> dict[int, dict[int, _PState]]:
    """Per-line snapshots of every participant's replay state.

    Maps each event line to deep-copied states after all of that line's
    events. Used by the timeline compiler; tolerant of violating logs
    (best-effort states).
    """
    snapshots: dict[int, dict[int, _PState]] = {}
    states = _initial_states(log)
    events = list(log)
    for i, event in enumerate(events):
        _step(log, states, event)
        last_of_line = i + 1 == len(events) or events[i + 1].line != event.line
        if last_of_line:
            snapshots[event.line] = {
                h: _PState(st.out_of_scope, st.moved_out, set(st.imm_borrowers), st.mut_borrower)
                for h, st in states.items()
            }
    return snapshots
