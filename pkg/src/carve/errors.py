"""Exception types raised by the rewriting engine.

Every error carries a stable ``code`` (the class name) and a ``details``
dict so the CLI can emit a machine-readable error document.
"""

from __future__ import annotations

from typing import Any


class CarveError(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str = "", **details: Any) -> None:
        super().__init__(message or self.__class__.__name__)
        self.details = details

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_dict(self) -> dict[str, Any]:
        return {"error": self.code, "message": str(self), "details": self.details}


class InvalidPresentation(CarveError):
    pass


class UnknownObject(CarveError):
    pass


class SchemaVersion(CarveError):
    pass


# morse-chords
class DimensionMismatch(CarveError):
    pass


class NotDegenerate(CarveError):
    pass


class EmptyResolution(CarveError):
    pass


class AmbiguousTie(CarveError):
    pass


class NonPositiveLength(CarveError):
    pass


# moves
class AlreadyMaximum(CarveError):
    pass


class DegenerateChord(CarveError):
    pass


class NotMaximum(CarveError):
    pass


class WrongCoefficient(CarveError):
    pass


class NotShortest(CarveError):
    pass


class NotParallel(CarveError):
    pass


class NotSubcritical(CarveError):
    pass


class NotCancellable(CarveError):
    pass


class InsufficientPasses(CarveError):
    pass


class NoPasses(CarveError):
    pass


class NotFlexible(CarveError):
    pass


class SelfSlide(CarveError):
    pass


class UnknownMove(CarveError):
    pass


# pipelines / invariants
class DegenerateChordPresent(CarveError):
    pass


class ReplayMismatch(CarveError):
    pass
