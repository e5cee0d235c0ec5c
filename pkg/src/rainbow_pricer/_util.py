"""Shared plumbing: worker-count resolution for parallel sections."""

from __future__ import annotations

import os

_ENV_VAR = "RAINBOW_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Worker count for bootstrap/pricing shards.

    `requested` wins over the RAINBOW_THREADS environment variable; in
    both places 0 means "auto" (one worker per CPU) and unset means
    serial execution.
    """
    value = requested
    if value is None:
        raw = os.environ.get(_ENV_VAR, "").strip()
        if not raw:
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError("thread count must be >= 0")
    if value == 0:
        return os.cpu_count() or 1
    return value
