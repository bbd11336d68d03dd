from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import pytest

from carve import fixtures
from carve.diagram import (
    Boat,
    Coefficient,
    Handle,
    HandleKind,
    Legendrian,
    LooseChart,
    Presentation,
    ReebChord,
    Role,
    canonical_doc,
    deserialize,
    digest,
    dumps,
    relabel,
    serialize,
    structural_equal,
    validate,
)
from carve.errors import SchemaVersion, UnknownObject


def codes(p: Presentation) -> list[str]:
    return [v.code for v in validate(p)]


def test_empty_presentation_is_valid():
    assert validate(Presentation()) == []


def test_dangling_chord_endpoint():
    leg = Legendrian(0, 2, Role.AUXILIARY)
    p = Presentation(6, {}, {0: leg}, {1: ReebChord(1, 0, 7, 0, Fraction(1))}, next_id=2)
    assert codes(p) == ["DanglingChordEndpoint"]


@pytest.mark.parametrize("name", sorted(fixtures.BUILDERS))
def test_fixtures_validate(name):
    assert validate(fixtures.BUILDERS[name]()) == []


def test_critical_handle_needs_one_attaching_sphere():
    p = fixtures.skeleton()
    q = p.evolve(legendrians={k: v for k, v in p.legendrians.items() if k != fixtures.LAMBDA})
    assert "CriticalHandleAttachment" in codes(q)


def test_invariant_violations_are_reported():
    p = Presentation(
        6,
        {0: Handle(0, 3, HandleKind.SUBCRITICAL), 1: Handle(1, 1, HandleKind.SUBCRITICAL, flexible=True)},
        {2: Legendrian(2, 2, Role.AUXILIARY, Coefficient.PLUS1, decorations=(Boat(2, 3), LooseChart(0)),
                       handle_passes=((9, 1),))},
        {3: ReebChord(3, 2, 2, 5, Fraction(-1))},
        next_id=1,
    )
    assert set(codes(p)) >= {
        "HandleKindMismatch", "FlexibleSubcritical", "PlusCoefficientRole", "BoatRange", "LooseChartCount",
        "UnknownPassHandle", "ChordIndexRange", "NonPositiveLength", "StaleIdCounter",
    }


def test_validate_does_not_mutate():
    p = fixtures.ex3()
    before = serialize(p)
    validate(p)
    validate(p)
    assert serialize(p) == before


def test_lookup_errors():
    p = fixtures.ex1()
    with pytest.raises(UnknownObject):
        p.leg(99)
    with pytest.raises(UnknownObject):
        p.chord(99)
    with pytest.raises(UnknownObject):
        p.handle(99)


def test_fresh_ids_never_reuse():
    p = fixtures.ex1()
    ids, nxt = p.fresh_ids(2)
    assert ids == [p.next_id, p.next_id + 1] and nxt == p.next_id + 2
    # deleting the highest object does not free its id
    q = p.evolve(chords={})
    assert q.fresh_ids(1)[0] == ids[:1]


def test_serialization_round_trip_and_canonical_text():
    p = fixtures.ex2()
    text = serialize(p)
    assert json.loads(text)["carve_schema"] == 1
    assert " " not in text.replace("lambda ", "")  # compact separators
    q = deserialize(text)
    assert serialize(q) == text
    assert structural_equal(p, q)


def test_rationals_are_stored_exactly():
    doc = json.loads(serialize(fixtures.ex2()))
    lengths = [c["length"] for c in doc["chords"]]
    assert all(set(x) == {"num", "den"} for x in lengths)
    assert "." not in serialize(fixtures.ex2())


def test_schema_version_is_checked():
    doc = fixtures.ex1().to_dict()
    doc["carve_schema"] = 2
    with pytest.raises(SchemaVersion):
        Presentation.from_dict(doc)


def test_relabel_invariance():
    p = fixtures.ex3()
    q = relabel(p, handles={0: 50, 1: 51}, legendrians={2: 61, 3: 60}, chords={4: 71, 5: 70})
    assert q.leg(61).handle == 51
    assert structural_equal(p, q)
    assert digest(p) == digest(q)


def test_extra_handle_breaks_equality():
    p = fixtures.ex1()
    hid = p.next_id
    q = p.evolve(handles={**p.handles, hid: Handle(hid, 2, HandleKind.SUBCRITICAL)}, next_id=hid + 1)
    assert not structural_equal(p, q)


def test_decoration_changes_digest():
    p = fixtures.ex1()
    q = p.with_legs(p.leg(2).decorated(LooseChart()))
    assert digest(p) != digest(q)


def test_digest_ignores_id_counter():
    p = fixtures.ex1()
    assert digest(p) == digest(p.evolve(next_id=p.next_id + 10))


def test_digest_is_64_bit_hex():
    h = digest(fixtures.cor13())
    assert len(h) == 16 and int(h, 16) >= 0


def test_canonical_form_distinguishes_swapped_roles():
    # Same multiset of objects, but the chord runs the other way.
    p = fixtures.ex1()
    c = p.chord(4)
    q = p.with_chords(replace(c, source=c.target, target=c.source))
    assert not structural_equal(p, q)


def test_symmetric_legendrians_canonicalize_consistently():
    legs = {i: Legendrian(i, 2, Role.AUXILIARY, Coefficient.MINUS1) for i in range(4)}
    chords = {10: ReebChord(10, 0, 1, 0, Fraction(1)), 11: ReebChord(11, 2, 3, 0, Fraction(1))}
    p = Presentation(6, {}, legs, chords, next_id=12)
    q = relabel(p, legendrians={0: 3, 3: 0, 1: 2, 2: 1})
    assert canonical_doc(p) == canonical_doc(q)


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
