from __future__ import annotations

import json

import pytest

from carve import fixtures
from carve.diagram import digest
from carve.errors import ReplayMismatch, UnknownMove
from carve.trace import MoveTrace, Session, Step, replay, replay_states


def session_ex1() -> Session:
    s = Session(fixtures.ex1())
    s.apply("add_cancelling_pair", parallel_to=fixtures.LAMBDA_PLUS)
    return s


def test_session_records_hashes():
    s = session_ex1()
    (step,) = s.steps
    assert step.move == "add_cancelling_pair"
    assert step.pre_hash == digest(fixtures.ex1())
    assert step.post_hash == digest(s.current)


def test_undo():
    s = session_ex1()
    assert s.undo().move == "add_cancelling_pair"
    assert s.current is s.initial
    assert s.undo() is None


def test_failed_move_leaves_session_alone():
    s = session_ex1()
    with pytest.raises(UnknownMove):
        s.apply("no_such_move")
    assert len(s.steps) == 1


def test_replay_round_trip_through_json():
    s = session_ex1()
    s.apply("reroute_over_handle", who=[3, 6], handle=5)
    doc = json.loads(s.trace().dumps())
    assert set(doc) == {"carve_schema", "initial", "steps"}
    assert set(doc["steps"][0]) == {"move", "params", "pre_hash", "post_hash"}
    t = MoveTrace.from_dict(doc)
    assert digest(replay(t)) == s.trace().final_hash


def test_replay_states_yields_every_state():
    s = session_ex1()
    assert len(list(replay_states(s.trace()))) == 2


def test_replay_detects_bad_pre_hash():
    t = session_ex1().trace()
    st = t.steps[0]
    t.steps[0] = Step(st.move, st.params, "f" * 16, st.post_hash)
    with pytest.raises(ReplayMismatch) as err:
        replay(t)
    assert err.value.details["phase"] == "pre"


def test_empty_trace_final_hash():
    t = MoveTrace(fixtures.ex2())
    assert t.final_hash == digest(fixtures.ex2())
    assert digest(replay(t)) == t.final_hash


def test_params_are_stored_as_json():
    from fractions import Fraction

    p = fixtures.ex1()
    from carve.diagram import ReebChord

    p = p.with_chords(ReebChord(4, 2, 3, None, Fraction(1), degenerate=True))
    s = Session(p)
    s.apply("perturb_chord", chord=4, resolution=[{"index": 0, "value": Fraction(1, 2)}, {"index": 1}])
    assert s.steps[0].params["resolution"][0]["value"] == {"num": 1, "den": 2}
    assert digest(replay(s.trace())) == s.trace().final_hash
