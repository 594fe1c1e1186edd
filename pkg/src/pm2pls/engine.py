"""Deterministic discrete-event core.

Simulation time is an exact rational number of milliseconds
(:class:`fractions.Fraction`), so repeated runs produce bit-identical event
orderings and trace files with no floating-point drift.  Events firing at the
same instant dispatch in insertion order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Callable

Time = Fraction


class SchedulingError(ValueError):
    """Attempt to schedule an event before the current simulation time."""


def as_time(value: float | int | str | Fraction) -> Fraction:
    """Exact conversion to rational milliseconds.

    Floats go through their shortest decimal representation, so 0.1 means
    exactly 1/10 rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(str(value)))
    return Fraction(Decimal(value))


@dataclass(order=True)
class Event:
    fire_at: Fraction
    sequence: int
    action: Callable[[], None] = field(compare=False)
    canceled: bool = field(default=False, compare=False)

    def cancel(self) -> None:
        self.canceled = True


class Simulator:
    """Priority-queue event loop keyed on (fire_at, insertion sequence)."""

    def __init__(self) -> None:
        self._heap: list[Event] = []
        self._sequence = 0
        self.now: Fraction = Fraction(0)

    def schedule_at(self, fire_at: float | Fraction, action: Callable[[], None]) -> Event:
        at = as_time(fire_at)
        if at < self.now:
            raise SchedulingError(
                f"cannot schedule at {at} before current time {self.now}"
            )
        event = Event(fire_at=at, sequence=self._sequence, action=action)
        self._sequence += 1
        heapq.heappush(self._heap, event)
        return event

    def schedule_in(self, delay: float | Fraction, action: Callable[[], None]) -> Event:
        delay = as_time(delay)
        if delay < 0:
            raise SchedulingError(f"negative delay {delay}")
        return self.schedule_at(self.now + delay, action)

    @property
    def pending(self) -> int:
        return sum(1 for e in self._heap if not e.canceled)

    def run_until_idle(self) -> Fraction:
        """Dispatch until the queue drains; returns the final sim time."""
        while self._heap:
            event = heapq.heappop(self._heap)
            if event.canceled:
                continue
            self.now = event.fire_at
            event.action()
        return self.now


class TraceLog:
    """Line-oriented simulation trace.

    One record per line: ``time_ms<TAB>module<TAB>node<TAB>event<TAB>details``
    with time fixed to 6 decimals.  Identical runs yield identical bytes.
    """

    def __init__(self) -> None:
        self._lines: list[str] = []

    def record(
        self,
        time: Fraction | float,
        module: str,
        node: str,
        event: str,
        details: str = "",
    ) -> None:
        self._lines.append(
            f"{float(time):.6f}\t{module}\t{node}\t{event}\t{details}"
        )

    def lines(self) -> list[str]:
        return list(self._lines)

    def text(self) -> str:
        if not self._lines:
            return ""
        return "\n".join(self._lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.text())

    def __len__(self) -> int:
        return len(self._lines)
