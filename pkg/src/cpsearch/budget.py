"""Search budgets: wall-clock deadlines and deterministic iteration counters.

A budget is owned by one worker and polled between neighbour evaluations
(one evaluation is the atomic unit of work, so a worker may overshoot a
wall-clock deadline by at most one evaluation).  Iteration budgets make
runs reproducible: their ``elapsed`` is the number of evaluations spent,
and that count is what appears in snapshots.
"""

from __future__ import annotations

import threading
import time

__all__ = ["Budget", "TimeBudget", "IterationBudget"]


class Budget:
    """Interface shared by all budget kinds."""

    def spend(self, amount: int = 1) -> None:
        raise NotImplementedError

    def exhausted(self) -> bool:
        raise NotImplementedError

    def elapsed(self) -> float:
        """Seconds for wall-clock budgets, evaluation count for iteration ones."""
        raise NotImplementedError


class TimeBudget(Budget):
    """Wall-clock budget with an absolute monotonic deadline.

    Workers that should share one deadline are given the same ``anchor``
    (the coordinator's start instant).  An optional ``cancel`` event turns
    the deadline into "now" when set, which is how interrupts shut a run
    down gracefully.
    """

    def __init__(
        self,
        seconds: float,
        anchor: float | None = None,
        cancel: threading.Event | None = None,
    ) -> None:
        if seconds <= 0:
            raise ValueError("time budget must be positive")
        self.seconds = float(seconds)
        self.anchor = time.monotonic() if anchor is None else float(anchor)
        self.deadline = self.anchor + self.seconds
        self.cancel = cancel

    def spend(self, amount: int = 1) -> None:
        pass

    def exhausted(self) -> bool:
        if self.cancel is not None and self.cancel.is_set():
            return True
        return time.monotonic() >= self.deadline

    def elapsed(self) -> float:
        return time.monotonic() - self.anchor


class IterationBudget(Budget):
    """Deterministic budget of a fixed number of evaluations."""

    def __init__(self, limit: int) -> None:
        if limit < 0:
            raise ValueError("iteration budget must be non-negative")
        self.limit = int(limit)
        self.count = 0

    def spend(self, amount: int = 1) -> None:
        self.count += amount

    def exhausted(self) -> bool:
        return self.count >= self.limit

    def elapsed(self) -> float:
        return float(self.count)
