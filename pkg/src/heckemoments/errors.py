"""Exception types raised across the package."""

from __future__ import annotations


class HeckeMomentsError(Exception):
    """Base class for all package errors."""


class ZeroInput(HeckeMomentsError, ValueError):
    pass


class EvenInput(HeckeMomentsError, ValueError):
    pass


class EvenModulus(EvenInput):
    pass


class NonPrimaryModulus(HeckeMomentsError, ValueError):
    pass


class NotSquarefree(HeckeMomentsError, ValueError):
    pass


class PoleAt(HeckeMomentsError, ValueError):
    pass


class ZeroDenominator(HeckeMomentsError, ZeroDivisionError):
    pass


class QuadratureNonConvergent(HeckeMomentsError, RuntimeError):
    pass


class TruncationFailure(HeckeMomentsError, RuntimeError):
    pass


class SlowConvergence(HeckeMomentsError, RuntimeError):
    pass


class TableTooSmall(HeckeMomentsError, ValueError):
    pass


class TailNotConverged(HeckeMomentsError, RuntimeError):
    pass


class CacheCorrupt(HeckeMomentsError, RuntimeError):
    pass


class VersionMismatch(CacheCorrupt):
    pass


class IoFailure(HeckeMomentsError, OSError):
    pass


class DegenerateSecondMoment(HeckeMomentsError, ArithmeticError):
    pass
