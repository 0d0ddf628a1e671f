"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """Bad user input: unknown key, malformed value, out-of-range parameter."""


class PhysicsError(ValueError):
    """A covariance matrix or parameter set violates a physical constraint."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its tolerance.

    The best available estimate is kept on ``estimate`` so callers can
    decide whether it is usable.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
