"""Virtual clock with an ordered pending-event queue.

Time never decreases; simultaneous events fire in insertion order so a
run is reproducible from its inputs alone.
"""

from __future__ import annotations

import heapq
from typing import Callable


class VirtualClock:
    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self._sequence = 0
        self._queue: list[tuple[float, int, Callable[[], None]]] = []

    @property
    def now(self) -> float:
        return self._now

    def schedule(self, delay: float, action: Callable[[], None]) -> None:
        if delay < 0:
            raise ValueError("cannot schedule into the past")
        self.schedule_at(self._now + delay, action)

    def schedule_at(self, when: float, action: Callable[[], None]) -> None:
        if when < self._now:
            raise ValueError(f"cannot schedule at {when} before now={self._now}")
        self._sequence += 1
        heapq.heappush(self._queue, (when, self._sequence, action))

    def advance(self, until: float) -> int:
        """Process every event with time <= until (boundary inclusive).

        Returns the number of events processed and leaves the clock at
        ``until`` even if the queue drains earlier.
        """
        if until < self._now:
            raise ValueError(f"cannot advance backwards to {until}")
        processed = 0
        while self._queue and self._queue[0][0] <= until:
            when, _, action = heapq.heappop(self._queue)
            self._now = when
            action()
            processed += 1
        self._now = max(self._now, until)
        return processed

    def run_until_idle(self) -> int:
        processed = 0
        while self._queue:
            when, _, action = heapq.heappop(self._queue)
            self._now = when
            action()
            processed += 1
        return processed

    def step(self) -> bool:
        """Process exactly one pending event; False if the queue is empty."""
        if not self._queue:
            return False
        when, _, action = heapq.heappop(self._queue)
        self._now = when
        action()
        return True

    def pending(self) -> int:
        return len(self._queue)
