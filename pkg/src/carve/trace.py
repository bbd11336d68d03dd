"""Move traces: a snapshot plus the list of moves applied to it.

Each step stores the canonical digests before and after the move, so a
trace read back from disk can be replayed and checked bit for bit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping

from .diagram import SCHEMA_VERSION, Presentation, check_schema, digest, dumps, fraction_to_doc
from .errors import ReplayMismatch
from .moves import apply_move

log = logging.getLogger(__name__)


def _plain(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return fraction_to_doc(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot store {type(obj).__name__} in a trace")


def normalize_params(params: Mapping[str, Any]) -> dict[str, Any]:
    """Parameters as they will look after a JSON round trip."""
    return json.loads(json.dumps(dict(params), sort_keys=True, default=_plain))


@dataclass(frozen=True)
class Step:
    move: str
    params: dict[str, Any]
    pre_hash: str
    post_hash: str

    def to_dict(self) -> dict[str, Any]:
        return {"move": self.move, "params": self.params, "pre_hash": self.pre_hash,
                "post_hash": self.post_hash}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> Step:
        return cls(str(doc["move"]), dict(doc.get("params", {})), str(doc["pre_hash"]), str(doc["post_hash"]))


@dataclass
class MoveTrace:
    initial: Presentation
    steps: list[Step] = field(default_factory=list)

    @property
    def final_hash(self) -> str:
        return self.steps[-1].post_hash if self.steps else digest(self.initial)

    def count(self, move: str) -> int:
        return sum(1 for s in self.steps if s.move == move)

    def to_dict(self) -> dict[str, Any]:
        return {"carve_schema": SCHEMA_VERSION, "initial": self.initial.to_dict(),
                "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> MoveTrace:
        check_schema(doc)
        return cls(Presentation.from_dict(doc["initial"]), [Step.from_dict(s) for s in doc.get("steps", [])])

    def dumps(self) -> str:
        return dumps(self.to_dict())


class Session:
    """Applies moves one at a time, recording a trace with undo."""

    def __init__(self, initial: Presentation) -> None:
        self.initial = initial
        self._states = [initial]
        self._steps: list[Step] = []

    @property
    def current(self) -> Presentation:
        return self._states[-1]

    @property
    def steps(self) -> list[Step]:
        return list(self._steps)

    def apply(self, move: str, **params: Any) -> Presentation:
        params = normalize_params(params)
        pre = self.current
        post = apply_move(pre, move, params)
        self._steps.append(Step(move, params, digest(pre), digest(post)))
        log.info("%s %s -> %s", move, dumps(params), self._steps[-1].post_hash)
        self._states.append(post)
        return post

    def undo(self) -> Step | None:
        if not self._steps:
            return None
        self._states.pop()
        return self._steps.pop()

    def trace(self) -> MoveTrace:
        return MoveTrace(self.initial, list(self._steps))


def replay_states(trace: MoveTrace) -> Iterator[Presentation]:
    """Yield the initial snapshot and the state after every step, checking
    both stored digests along the way."""
    p = trace.initial
    yield p
    for i, step in enumerate(trace.steps):
        got = digest(p)
        if got != step.pre_hash:
            raise ReplayMismatch(f"step {i} ({step.move}): pre-state hash {got} != {step.pre_hash}",
                                 step=i, expected=step.pre_hash, actual=got, phase="pre")
        p = apply_move(p, step.move, step.params)
        got = digest(p)
        if got != step.post_hash:
            raise ReplayMismatch(f"step {i} ({step.move}): post-state hash {got} != {step.post_hash}",
                                 step=i, expected=step.post_hash, actual=got, phase="post")
        yield p


def replay(trace: MoveTrace) -> Presentation:
    p = trace.initial
    for p in replay_states(trace):
        pass
    return p
