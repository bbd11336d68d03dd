"""Symbolic rewriting engine for Weinstein handle presentations."""

from .diagram import (
    Presentation,
    deserialize,
    digest,
    relabel,
    serialize,
    structural_equal,
    validate,
)
from .errors import CarveError
from .invariants import census, check_grading, detect_loose
from .moves import MOVES, apply_move
from .pipelines import CarveInput, CarveReport, carve, construct_ploose, parallelize
from .trace import MoveTrace, Session, replay

__all__ = [
    "MOVES",
    "CarveError",
    "CarveInput",
    "CarveReport",
    "MoveTrace",
    "Presentation",
    "Session",
    "apply_move",
    "carve",
    "census",
    "check_grading",
    "construct_ploose",
    "deserialize",
    "detect_loose",
    "digest",
    "parallelize",
    "relabel",
    "replay",
    "serialize",
    "structural_equal",
    "validate",
]
