"""Entire functions with pseudo-random Taylor multipliers: evaluation, zeros and exponential sums."""

__version__ = "0.1.0"
