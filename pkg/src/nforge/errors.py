"""Typed errors. Every error carries a machine-readable payload for the CLI."""

from __future__ import annotations


class NforgeError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def payload(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "details": {k: repr(v) for k, v in self.details.items()},
        }


class ConfigError(NforgeError):
    """Invalid schedule, flag, or precondition supplied by the caller."""

    exit_code = 2


class BudgetExceededError(NforgeError):
    """The requested computation does not fit in the configured budgets."""

    exit_code = 3


class CriterionViolatedError(NforgeError):
    """A bound was requested outside the regime where it is valid."""

    exit_code = 2


class ResolutionTooCoarseError(NforgeError):
    """A grid cell is too coarse for the count function to be constant on it."""

    exit_code = 2


class OverlapCapError(ConfigError):
    """A candidate interval overlaps more grid cells than the schedule allows."""


class NoGoodIntervalError(NforgeError):
    """Every candidate subinterval of a refinement step was bad.

    Cannot happen under the reference schedule's measure budget; aggressive
    toy schedules can trigger it, and it is reported rather than patched.
    """


class InsufficientDigitsError(NforgeError):
    """A digit prefix is too short for the requested orbit length."""

    exit_code = 2
