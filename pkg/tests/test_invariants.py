from __future__ import annotations

from dataclasses import replace

import pytest

from carve import fixtures
from carve.diagram import Handle, HandleKind, Legendrian, Presentation, Role
from carve.errors import ReplayMismatch
from carve.invariants import HandleCensus, census, check_grading, detect_loose, grading_violations
from carve.pipelines import CarveInput, carve, construct_ploose
from carve.trace import MoveTrace, Step


def test_census_of_a_zero_handle():
    p = Presentation(6, {0: Handle(0, 0, HandleKind.SUBCRITICAL)}, next_id=1)
    c = census(p)
    assert c.counts == {0: 1} and c.euler == 1


def test_euler_recomputes_from_counts():
    c = HandleCensus({0: 1, 2: 3, 3: 2})
    assert c.euler == 1 + 3 - 2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_carve_changes_census_at_n_minus_1(n):
    p = fixtures.ex3(n)
    r = carve(CarveInput(p))
    assert census(p).delta(census(r.result)) == {n - 1: 1}
    assert census(r.result).euler - census(p).euler == (-1) ** (n - 1)


def test_flexible_leg_is_l1():
    r = construct_ploose(2, 5)
    flex_step = next(i for i, s in enumerate(r.trace.steps) if s.move == "attach_flexible")
    from carve.trace import replay_states

    state = list(replay_states(r.trace))[flex_step + 1]
    flex = next(l.id for l in state.legendrians.values() if l.name == "lambda_flex")
    assert str(detect_loose(state, flex)) == "Loose(L1)"


def test_ex2_output_is_l2():
    r = carve(CarveInput(fixtures.ex2()))
    assert str(detect_loose(r.result, fixtures.LAMBDA)) == "Loose(L2)"


def test_ex1_output_is_unknown():
    r = carve(CarveInput(fixtures.ex1()))
    v = detect_loose(r.result, fixtures.LAMBDA)
    assert not v.loose and str(v) == "Unknown"


def test_l2_needs_disk_last():
    # Same two components, but the disk chord is now the shortest one.
    from carve.morse import disk, region

    spec = region(2, ("annulus", [(0, -2), (1, -1)]), disk(2, -3))
    r = carve(CarveInput(fixtures.with_region(spec)))
    assert not detect_loose(r.result, fixtures.LAMBDA).loose


def test_l3_needs_private_handle():
    p = Presentation(6, {0: Handle(0, 2, HandleKind.SUBCRITICAL)},
                     {1: Legendrian(1, 2, Role.AUXILIARY, handle_passes=((0, 1),)),
                      2: Legendrian(2, 2, Role.AUXILIARY, handle_passes=((0, 1),))}, next_id=3)
    assert not detect_loose(p, 1).loose
    q = p.evolve(legendrians={1: p.leg(1)})
    assert str(detect_loose(q, 1)) == "Loose(L3)"


@pytest.mark.parametrize("build", [fixtures.ex1, fixtures.ex2, fixtures.ex3])
def test_pipeline_traces_keep_gradings(build):
    assert check_grading(carve(CarveInput(build())).trace) == []


def test_empty_trace_has_no_violations():
    assert check_grading(MoveTrace(fixtures.ex1())) == []


def test_corrupted_grading_is_reported():
    p = fixtures.ex3()
    q = p.with_chords(replace(p.chord(4), grading=p.chord(4).grading + 1))
    violations = grading_violations(p, q)
    assert [v.code for v in violations] == ["GradingChanged"]


def test_check_grading_detects_tampered_trace():
    r = carve(CarveInput(fixtures.ex3()))
    s = r.trace.steps[2]
    r.trace.steps[2] = Step(s.move, s.params, s.pre_hash, "0" * 16)
    with pytest.raises(ReplayMismatch):
        check_grading(r.trace)
