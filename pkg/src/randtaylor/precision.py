"""Precision escalation for cancellation-prone evaluations."""

from __future__ import annotations

from typing import Callable, TypeVar

T = TypeVar("T")

DEFAULT_CAP = 4096


class CancellationError(RuntimeError):
    """Raised when a computation still cancels at the precision cap; ``last`` holds the final attempt."""

    def __init__(self, message: str, last=None, precision_bits: int | None = None):
        super().__init__(message)
        self.last = last
        self.precision_bits = precision_bits


def precision_retry(task: Callable[[int], T], start: int = 64, cap: int = DEFAULT_CAP,
                    max_error: float | None = None) -> T:
    """Call ``task(p)`` with p = start, 2 start, ... until the result is not cancelled.

    ``task`` returns an object with ``cancelled`` and ``error_bound`` attributes
    (a :class:`~randtaylor.entire_fn.LogAbsResult`).  With ``max_error`` the
    result must also have ``error_bound <= max_error``.
    """
    if start < 1 or cap < start:
        raise ValueError("need 1 <= start <= cap")
    p = int(start)
    while True:
        res = task(p)
        ok = not res.cancelled and (max_error is None or res.error_bound <= max_error)
        if ok:
            return res
        if 2 * p > cap:
            raise CancellationError(f"cancellation persists at {p} bits (cap {cap})", last=res, precision_bits=p)
        p *= 2
