"""Tiny phase-timer used to fill per-phase wall times in reports."""

from __future__ import annotations

import time
from contextlib import contextmanager


@contextmanager
def phase_timer(timings: dict | None, phase: str):
    if timings is None:
        yield
        return
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[phase] = timings.get(phase, 0.0) + time.perf_counter() - start
