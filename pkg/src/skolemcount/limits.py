"""Cooperative resource caps shared by the SAT engine and the oracles."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


class ResourceLimitExceeded(Exception):
    """A configured cap (SAT calls, wall clock, enumeration size) was hit.

    Distinct from any mathematical outcome: callers must not read a count
    out of a run that raised this.
    """

    def __init__(self, reason: str, sat_calls: int = 0):
        super().__init__(f"resource limit exceeded: {reason} (after {sat_calls} SAT calls)")
        self.reason = reason
        self.sat_calls = sat_calls
        self.stats = None


@dataclass
class Budget:
    max_sat_calls: int | None = None
    timeout_s: float | None = None
    sat_calls: int = 0
    _deadline: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.timeout_s is not None:
            self._deadline = time.monotonic() + self.timeout_s

    def charge(self, calls: int = 1) -> None:
        self.sat_calls += calls
        if self.max_sat_calls is not None and self.sat_calls > self.max_sat_calls:
            raise ResourceLimitExceeded("SAT-call budget", self.sat_calls)
        self.check()

    def check(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimitExceeded("timeout", self.sat_calls)

