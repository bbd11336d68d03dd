"""Line-oriented REPL for applying moves one at a time.

Input lines look like ``boat_move chord=4`` or
``reroute_over_handle who=[3,6] handle=5``; values are parsed as JSON when
possible and kept as strings otherwise.
"""

from __future__ import annotations

import json
import shlex
from typing import IO, Any

from .diagram import Presentation
from .errors import CarveError
from .invariants import census, detect_loose
from .moves import MOVES
from .trace import Session

HELP = """\
commands:
  <move> key=value ...   apply a move (see `moves`)
  census                 handle counts by index
  chords                 chord table
  legs                   Legendrians with passes and looseness
  hash                   digest of the current state
  undo                   drop the last move
  moves                  list move names
  quit                   write the trace and leave"""


class Style:
    def __init__(self, color: bool) -> None:
        self.color = color

    def _wrap(self, code: str, text: str) -> str:
        return f"\x1b[{code}m{text}\x1b[0m" if self.color else text

    def ok(self, text: str) -> str:
        return self._wrap("32", text)

    def bad(self, text: str) -> str:
        return self._wrap("31", text)

    def dim(self, text: str) -> str:
        return self._wrap("2", text)


def parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_line(line: str) -> tuple[str, dict[str, Any]]:
    words = shlex.split(line, comments=True)
    if not words:
        return "", {}
    params = {}
    for w in words[1:]:
        key, sep, value = w.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {w!r}")
        params[key] = parse_value(value)
    return words[0], params


def census_line(p: Presentation) -> str:
    c = census(p)
    counts = " ".join(f"h{i}={k}" for i, k in c.counts.items()) or "(no handles)"
    return f"census: {counts} euler={c.euler}"


def chord_table(p: Presentation) -> list[str]:
    if not p.chords:
        return ["chords: none"]
    rows = ["  id  from  to  index  length  grading  site"]
    for c in sorted(p.chords.values(), key=lambda c: c.order_key):
        idx = "deg" if c.degenerate else str(c.local_index)
        rows.append(f"{c.id:4d}  {c.source:4d}  {c.target:2d}  {idx:>5}  {str(c.length):>6}  "
                    f"{c.grading:7d}  {c.site}")
    return rows


def leg_table(p: Presentation) -> list[str]:
    rows = []
    for leg in sorted(p.legendrians.values(), key=lambda l: l.id):
        passes = ",".join(f"{h}x{k}" for h, k in leg.handle_passes) or "-"
        rows.append(f"{leg.id:4d}  {leg.label:<14} {leg.coefficient.value:<6} passes={passes} "
                    f"{detect_loose(p, leg.id)}")
    return rows


def run(session: Session, lines: IO[str], out: IO[str], style: Style, prompt: bool = False) -> None:
    def say(text: str) -> None:
        print(text, file=out)

    while True:
        if prompt:
            out.write("carve> ")
            out.flush()
        line = lines.readline()
        if not line:
            break
        try:
            cmd, params = parse_line(line)
        except ValueError as e:
            say(style.bad(f"error: {e}"))
            continue
        if not cmd:
            continue
        p = session.current
        if cmd in ("quit", "exit"):
            break
        if cmd == "help":
            say(HELP)
        elif cmd == "census":
            say(census_line(p))
        elif cmd == "chords":
            for row in chord_table(p):
                say(row)
        elif cmd == "legs":
            for row in leg_table(p):
                say(row)
        elif cmd == "hash":
            say(p.digest())
        elif cmd == "moves":
            say(" ".join(sorted(MOVES)))
        elif cmd == "undo":
            step = session.undo()
            say(style.dim(f"undid {step.move}") if step else style.bad("error: nothing to undo"))
        else:
            try:
                q = session.apply(cmd, **params)
            except CarveError as e:
                say(style.bad(f"error: {e.code}: {e}"))
                continue
            except TypeError as e:
                say(style.bad(f"error: bad parameters for {cmd}: {e}"))
                continue
            say(style.ok(f"ok {cmd} -> {q.digest()}"))
            say(census_line(q))
            for row in chord_table(q):
                say(row)
