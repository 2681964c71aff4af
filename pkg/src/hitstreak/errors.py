"""Exception types shared across the package."""

from __future__ import annotations


class HitStreakError(Exception):
    """Base class for all operational errors raised by hitstreak."""


class GamelogParseError(HitStreakError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyCorpusError(HitStreakError):
    pass


class UndefinedAverageError(HitStreakError):
    pass


class MissingFieldError(HitStreakError):
    """An operation needs an optional column (started, opponent, ...) that is absent."""


class ConfigError(HitStreakError, ValueError):
    pass


class DegenerateNullError(HitStreakError, ValueError):
    pass


class CoverageError(HitStreakError):
    pass
