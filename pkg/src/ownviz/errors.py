"""Shared exception base for the ownviz toolchain.

Concrete error types live next to the code that raises them; everything
inherits from OwnvizError so callers (notably the CLI) can catch the whole
family at once.
"""

from __future__ import annotations


class OwnvizError(Exception):
    """Base class for all errors raised by ownviz."""
