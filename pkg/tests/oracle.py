"""Independent brute-force replay of the ownership and borrowing rules.

This simulator is the reference the production validator is checked
against. It is kept deliberately naive: one flat set of live borrow
records, plain membership tests, no incremental bookkeeping. Rules are
transcribed directly:

* using a participant whose resource moved out is illegal (move, copy,
  borrow or function access from it)
* a mutable borrow requires no other live borrow of that owner
* an immutable borrow requires no live mutable borrow of that owner
* an owner cannot be moved, reassigned, or leave scope while borrowed
  (copying is allowed under immutable borrows but not under a mutable one)
* returns must match a live borrow of the same kind, reference and owner
* a participant can leave scope once, and never acts afterwards
* depicted moves/copies need the matching lifetime trait on the (variable)
  source; functions may produce or consume anything
* a reference leaving scope or being moved away silently ends the borrows
  it holds (lexical end of the borrow)
"""

from __future__ import annotations

from ownviz.events import EventKind, EventLog, ExternalEvent, RapKind


class OracleSim:
    """Steppable rule transcription over one fixed set of participants."""

    def __init__(self, declarations):
        self.kind = {h: rap.kind for h, rap in declarations.items()}
        self.trait = {h: rap.lifetime_trait.value for h, rap in declarations.items()}
        self.gone: set[int] = set()
        self.moved: set[int] = set()
        self.borrows: set[tuple[int, int, bool]] = set()  # (owner, ref, mutable)

    def _borrows_of(self, owner: int) -> set[tuple[int, int, bool]]:
        return {b for b in self.borrows if b[0] == owner}

    def _drop_held_by(self, ref: int) -> None:
        self.borrows = {b for b in self.borrows if b[1] != ref}

    def step(self, event: ExternalEvent) -> bool:
        """Apply one event; True means the event broke a rule."""
        bad = False
        kind = event.kind
        a, b = event.from_hash, event.to_hash

        if kind is EventKind.GO_OUT_OF_SCOPE:
            if a in self.gone:
                bad = True
            if self.kind[a] is RapKind.OWNER and self._borrows_of(a):
                bad = True
            if self.kind[a].is_reference:
                self._drop_held_by(a)
            self.gone.add(a)
            return bad

        for h in event.referenced_hashes():
            if h in self.gone:
                bad = True

        if kind in (EventKind.MOVE, EventKind.COPY):
            moving = kind is EventKind.MOVE
            if self.kind[a] is not RapKind.FUNCTION:
                if a in self.moved:
                    bad = True
                if self.trait[a] != ("move" if moving else "copy"):
                    bad = True
                if self.kind[a] is RapKind.OWNER:
                    if moving and self._borrows_of(a):
                        bad = True
                    if not moving and any(m for (_, _, m) in self._borrows_of(a)):
                        bad = True
                if moving:
                    self.moved.add(a)
                    if self.kind[a].is_reference:
                        self._drop_held_by(a)
            if self.kind[b] is not RapKind.FUNCTION:
                self.moved.discard(b)

        elif kind is EventKind.IMMUTABLE_BORROW:
            if a in self.moved:
                bad = True
            if any(m for (_, _, m) in self._borrows_of(a)):
                bad = True
            self.borrows.add((a, b, False))
            self.moved.discard(b)

        elif kind is EventKind.MUTABLE_BORROW:
            if a in self.moved:
                bad = True
            if self._borrows_of(a):
                bad = True
            self.borrows.add((a, b, True))
            self.moved.discard(b)

        elif kind is EventKind.IMMUTABLE_RETURN:
            if (b, a, False) in self.borrows:
                self.borrows.discard((b, a, False))
            else:
                bad = True

        elif kind is EventKind.MUTABLE_RETURN:
            if (b, a, True) in self.borrows:
                self.borrows.discard((b, a, True))
            else:
                bad = True

        elif kind in (EventKind.READ_BY_FUNCTION, EventKind.MUTATE_BY_FUNCTION):
            if a in self.moved:
                bad = True

        elif kind is EventKind.ACQUIRE:
            if self._borrows_of(b):
                bad = True
            self.moved.discard(b)

        return bad

    def key(self) -> tuple:
        """Canonical hashable snapshot of the whole state."""
        return (
            tuple(sorted(self.gone)),
            tuple(sorted(self.moved)),
            tuple(sorted(self.borrows)),
        )


def oracle_accepts(log: EventLog) -> bool:
    """Replay a whole log; True iff no event breaks any rule."""
    sim = OracleSim(log.declarations)
    return not any(sim.step(event) for event in log)
