"""Process-level runtime knobs."""

import os

from .errors import InvalidParameterError


def worker_count() -> int:
    """Parallelism cap from ``ORLICZ_THREADS`` (default 1)."""
    raw = os.environ.get("ORLICZ_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"ORLICZ_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InvalidParameterError("ORLICZ_THREADS must be >= 1")
    return n
