#!/usr/bin/env python3
"""
Logger factory for the Morse spectrum tools.

Every module asks for its logger through get_logger(__name__). Output goes
to stderr so CSV/JSON written to stdout stays clean. Set MORSE_LOG_LEVEL=DEBUG
for grid-doubling and bracketing traces.
"""

import logging
import os
import sys

LOG_LEVEL_ENV = "MORSE_LOG_LEVEL"
DEFAULT_LEVEL = "WARNING"
LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_configured = False


def _configure_root() -> None:
    global _configured
    if _configured:
        return

    level_name = os.environ.get(LOG_LEVEL_ENV, DEFAULT_LEVEL).upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger("morse")
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
    _configured = True


def get_logger(name: str) -> logging.Logger:
    """Return a logger under the shared 'morse' hierarchy."""
    _configure_root()
    return logging.getLogger(f"morse.{name}")
