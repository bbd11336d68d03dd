from __future__ import annotations

import warnings
from dataclasses import replace
from fractions import Fraction

import pytest

from carve import fixtures
from carve.diagram import ReebChord, structural_equal, validate
from carve.errors import DegenerateChordPresent, InvalidPresentation
from carve.invariants import detect_loose
from carve.moves import add_cancelling_pair, cusp_pass_over_handle, reroute_over_handle
from carve.pipelines import CarveInput, carve, construct_ploose, loose_witness, parallelize
from carve.trace import replay

L, LP = fixtures.LAMBDA, fixtures.LAMBDA_PLUS


def prepared(p):
    p = add_cancelling_pair(p, parallel_to=LP)
    hid, minus = max(p.handles), max(p.legendrians)
    return reroute_over_handle(p, who=[LP, minus, L], handle=hid), minus


@pytest.mark.parametrize("build,boats,slides", [(fixtures.ex1, 0, 1), (fixtures.ex3, 1, 2)])
def test_parallelize_counts(build, boats, slides):
    p, minus = prepared(build())
    q, trace = parallelize(p, LP, minus)
    assert trace.count("boat_move") == boats
    assert trace.count("handleslide_minus") == slides
    assert trace.steps[-1].move == "cancel_plus_minus"
    assert minus not in q.legendrians and LP not in q.legendrians


def test_parallelize_moore_space():
    p, minus = prepared(fixtures.cor13())
    _, trace = parallelize(p, LP, minus)
    assert (trace.count("boat_move"), trace.count("handleslide_minus")) == (2, 3)


def test_parallelize_rejects_degenerate():
    p, minus = prepared(fixtures.ex1())
    p = p.with_chords(ReebChord(99, L, minus, None, Fraction(5), degenerate=True)).evolve(next_id=100)
    with pytest.raises(DegenerateChordPresent):
        parallelize(p, LP, minus)


def test_ex1_carve():
    r = carve(CarveInput(fixtures.ex1()))
    assert (r.boat_count, r.slide_count) == (0, 1)
    assert r.result.leg(L).topo.unknot_components is not None
    assert structural_equal(r.result, fixtures.ex1_result())
    (hid,) = set(r.result.handles) - set(fixtures.ex1().handles)
    q = cusp_pass_over_handle(r.result, leg=L, handle=hid)
    assert structural_equal(q, fixtures.ex1_complement())


def test_ex2_carve_is_loose():
    r = carve(CarveInput(fixtures.ex2()))
    assert (r.boat_count, r.slide_count) == (1, 3)
    assert str(detect_loose(r.result, L)) == "Loose(L2)"


def test_ex3_carve_pass_counts():
    r = carve(CarveInput(fixtures.ex3()))
    (hid,) = set(r.result.handles) - set(fixtures.ex3().handles)
    assert (r.boat_count, r.slide_count) == (1, 2)
    assert r.result.leg(L).passes(hid) == 3
    w, _ = loose_witness()
    assert w.leg(L).passes(hid) == 1
    assert str(detect_loose(w, L)) == "Loose(L3)"


def test_report_invariants():
    r = carve(CarveInput(fixtures.ex3()))
    assert r.handle_delta == {2: 1}
    assert r.attaching_correspondence == {L: L}
    assert validate(r.result) == []
    assert r.boat_sites == ["U/sphere/0", "U/sphere/1"]
    assert replay(r.trace).digest() == r.trace.final_hash
    doc = r.to_dict()
    assert set(doc) == {"result", "trace", "stats"}
    assert doc["stats"]["loose"][str(L)] == "Unknown"


def test_carve_input_validation():
    p = fixtures.ex1()
    with pytest.raises(InvalidPresentation):
        CarveInput(p.evolve(ambient_dim=5))
    with pytest.raises(InvalidPresentation):
        CarveInput(p, plus=L)
    bad = p.with_chords(replace(p.chord(4), local_index=None, degenerate=True))
    with pytest.raises(DegenerateChordPresent):
        CarveInput(bad)


def test_carve_with_no_chords():
    p = fixtures.skeleton()
    r = carve(CarveInput(p))
    assert (r.boat_count, r.slide_count) == (0, 0)
    assert r.handle_delta == {2: 1}


@pytest.mark.parametrize("p", [0, 1, 2, 5])
def test_ploose_shape(p):
    r = construct_ploose(p, 5)
    (leg,) = r.result.legendrians.values()
    assert leg.topo.unknot_components == 4
    assert len(r.boat_sites) == 3
    assert r.boat_count == 2
    assert r.extra["slide_off_count"] == 4
    assert detect_loose(r.result, leg.id).loose == (p == 0)
    assert any(n.text == f"p = {p}" for n in r.result.linking_notes)
    assert validate(r.result) == []


def test_ploose_warns_for_small_n():
    with pytest.warns(UserWarning):
        construct_ploose(3, 3)


def test_ploose_rejects_n_below_3():
    with pytest.raises(InvalidPresentation):
        construct_ploose(1, 2)


def test_ploose_several_entries():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        r = construct_ploose([2, 3], 5)
    (leg,) = r.result.legendrians.values()
    assert leg.topo.unknot_components == 8
    assert {n.text for n in r.result.linking_notes} == {"p = 2", "p = 3"}
    assert r.trace.count("connect_sum") == 1
    assert validate(r.result) == []


@pytest.mark.filterwarnings("ignore::carve.morse.CarveWarning")
def test_ploose_is_deterministic():
    a = construct_ploose(0, 3)
    b = construct_ploose(0, 3)
    assert a.trace.dumps() == b.trace.dumps()
