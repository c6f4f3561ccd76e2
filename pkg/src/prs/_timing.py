"""Phase accounting for the decoder benchmarks."""

from __future__ import annotations

import time
from contextlib import contextmanager, nullcontext


class PhaseTimer:
    """Accumulates wall time per named phase via monotonic clock."""

    def __init__(self):
        self.totals: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.totals[name] = self.totals.get(name, 0.0) + (time.perf_counter() - t0)

    def get(self, name: str) -> float:
        return self.totals.get(name, 0.0)


def phase(timer: PhaseTimer | None, name: str):
    """Context manager that is a no-op when no timer is attached."""
    return timer.phase(name) if timer is not None else nullcontext()
