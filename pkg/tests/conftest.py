"""Shared fixtures: the two figure logs and the one-variable walkthrough.

The logs are built through the event API directly (not the DSL) so parser
bugs cannot mask compiler bugs; docgen tests cross-check that the bundled
.evspec files parse to these exact logs.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from ownviz.events import EventKind as E
from ownviz.events import EventLog, EventLogBuilder, LifetimeTrait as T, RapKind as K

REPO_ROOT = Path(__file__).resolve().parent.parent
GALLERY = REPO_ROOT / "gallery"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


def build_walkthrough_log() -> EventLog:
    b = EventLogBuilder()
    b.declare_rap(K.OWNER, 1, "s")
    b.declare_rap(K.FUNCTION, 2, "String::from()")
    b.append(E.MOVE, 2, 1, line=2)
    b.append(E.GO_OUT_OF_SCOPE, 1, line=3)
    return b.finalize()


def build_fig1_log() -> EventLog:
    """Moves, copies and drops over s, x, y and two functions."""
    b = EventLogBuilder()
    b.declare_rap(K.OWNER, 1, "s", False, T.MOVE)
    b.declare_rap(K.FUNCTION, 2, "String::from()")
    b.declare_rap(K.FUNCTION, 3, "takes_ownership()")
    b.declare_rap(K.OWNER, 4, "x", True, T.COPY)
    b.declare_rap(K.OWNER, 5, "y", False, T.NONE)
    b.append(E.MOVE, 2, 1, line=2)
    b.append(E.MOVE, 1, 3, line=3)
    b.append(E.ACQUIRE, None, 4, line=4)
    b.append(E.COPY, 4, 5, line=5)
    b.append(E.ACQUIRE, None, 4, line=6)
    for h in (1, 4, 5):
        b.append(E.GO_OUT_OF_SCOPE, h, line=7)
    return b.finalize()


def build_fig2_log() -> EventLog:
    """Immutable then mutable borrows of s with non-lexical lifetimes."""
    b = EventLogBuilder()
    b.declare_rap(K.OWNER, 1, "s", True, T.NONE)
    b.declare_rap(K.FUNCTION, 2, "String::from()")
    b.declare_rap(K.IMMUTABLE_REFERENCE, 3, "r1")
    b.declare_rap(K.IMMUTABLE_REFERENCE, 4, "r2")
    b.declare_rap(K.FUNCTION, 5, "compare_strings()")
    b.declare_rap(K.MUTABLE_REFERENCE, 6, "r3")
    b.declare_rap(K.FUNCTION, 7, "clear_string()")
    b.append(E.MOVE, 2, 1, line=2)
    b.append(E.IMMUTABLE_BORROW, 1, 3, line=4)
    b.append(E.IMMUTABLE_BORROW, 1, 4, line=5)
    b.append(E.READ_BY_FUNCTION, 3, 5, line=6)
    b.append(E.READ_BY_FUNCTION, 4, 5, line=6)
    b.append(E.IMMUTABLE_RETURN, 3, 1, line=6)
    b.append(E.IMMUTABLE_RETURN, 4, 1, line=6)
    b.append(E.MUTABLE_BORROW, 1, 6, line=8)
    b.append(E.MUTATE_BY_FUNCTION, 6, 7, line=9)
    b.append(E.MUTABLE_RETURN, 6, 1, line=9)
    for h in (1, 3, 4, 6):
        b.append(E.GO_OUT_OF_SCOPE, h, line=10)
    return b.finalize()


@pytest.fixture
def walkthrough_log() -> EventLog:
    return build_walkthrough_log()


@pytest.fixture
def fig1_log() -> EventLog:
    return build_fig1_log()


@pytest.fixture
def fig2_log() -> EventLog:
    return build_fig2_log()
