"""Random presentation generators shared by the unit, property and
acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from carve.diagram import (
    Boat,
    Coefficient,
    CuspConnectSum,
    CuspPassedOverHandle,
    CuspStyle,
    DISK,
    SPHERE,
    Handle,
    HandleKind,
    Legendrian,
    LinkingNote,
    LooseChart,
    Presentation,
    ReebChord,
    Role,
    connect_sum_of_unknots,
)


def distinct_lengths(rng: random.Random, k: int) -> list[Fraction]:
    pool = rng.sample(range(1, 40 * (k + 1)), k)
    return [Fraction(v, rng.choice((1, 2, 3, 7))) for v in pool]


def random_carve_input(rng: random.Random, n: int | None = None) -> Presentation:
    """A 0-handle, 1-4 critical handles with attaching spheres, and a Plus1
    unknot; each attaching sphere has 0-6 bounded chords into the unknot."""
    n = n or rng.choice((3, 4, 5))
    m = n - 1
    k = rng.randint(1, 4)
    handles = {0: Handle(0, 0, HandleKind.SUBCRITICAL)}
    legs: dict[int, Legendrian] = {}
    nid = 1
    lams = []
    for _ in range(k):
        hid, lid = nid, nid + 1
        nid += 2
        handles[hid] = Handle(hid, n, HandleKind.CRITICAL)
        legs[lid] = Legendrian(lid, m, Role.ATTACHING, Coefficient.MINUS1, handle=hid, name=f"lambda{lid}")
        lams.append(lid)
    plus = nid
    nid += 1
    legs[plus] = Legendrian(plus, m, Role.CARVE_PLUS, Coefficient.PLUS1, name="lambda_empty")
    counts = [rng.randint(0, 6) for _ in lams]
    lengths = distinct_lengths(rng, sum(counts))
    chords = {}
    for lid, cnt in zip(lams, counts):
        for _ in range(cnt):
            cid = nid
            nid += 1
            chords[cid] = ReebChord(cid, lid, plus, rng.randint(0, m), lengths.pop(),
                                    grading=rng.randint(-3, 5), site=f"C/{lid}/{cid}")
    return Presentation(2 * n, handles, legs, chords, next_id=nid)


def random_slide_state(rng: random.Random) -> Presentation:
    """Legendrians with chords into Minus1 targets, for exercising the
    chord-level moves directly."""
    n = rng.choice((3, 4, 5))
    m = n - 1
    legs = {}
    for lid in range(1, rng.randint(2, 5) + 1):
        coef = rng.choice((Coefficient.MINUS1, Coefficient.MINUS1, Coefficient.NONE))
        legs[lid] = Legendrian(lid, m, Role.AUXILIARY, coef)
    ids = sorted(legs)
    k = rng.randint(1, 10)
    lengths = distinct_lengths(rng, k)
    chords = {}
    nid = max(ids) + 1
    for _ in range(k):
        a, b = rng.sample(ids, 2)
        chords[nid] = ReebChord(nid, a, b, rng.randint(0, m), lengths.pop(), grading=rng.randint(0, 4))
        nid += 1
    return Presentation(2 * n, {}, legs, chords, next_id=nid)


# hypothesis ---------------------------------------------------------------

_topos = st.sampled_from([SPHERE, DISK, connect_sum_of_unknots(2)])
_lengths = st.fractions(min_value=Fraction(1, 12), max_value=50, max_denominator=12)


@st.composite
def presentations(draw: st.DrawFn) -> Presentation:
    """Valid presentations with every kind of object and decoration."""
    n = draw(st.integers(3, 5))
    m = n - 1
    nid = 0

    def fresh() -> int:
        nonlocal nid
        nid += 1
        return nid - 1

    handles = {}
    for _ in range(draw(st.integers(0, 3))):
        hid = fresh()
        handles[hid] = Handle(hid, draw(st.integers(0, n - 1)), HandleKind.SUBCRITICAL)
    sub = sorted(handles)
    groups = st.sampled_from([None, "a", "b"])

    def passes() -> tuple[tuple[int, int], ...]:
        if not sub:
            return ()
        chosen = draw(st.lists(st.sampled_from(sub), max_size=3, unique=True))
        return tuple((h, draw(st.integers(1, 3))) for h in chosen)

    def decorations() -> tuple:
        decs = st.one_of(
            st.builds(Boat, st.just(m), st.integers(0, m), st.sampled_from(["", "U/x/0"])),
            st.builds(CuspConnectSum, st.sampled_from(["lambda_minus", "flex"]), st.sampled_from(list(CuspStyle)),
                      st.sampled_from(["", "U/d/1"])),
            st.builds(LooseChart, st.integers(1, 2), st.sampled_from(["", "L3"])),
            st.builds(CuspPassedOverHandle, st.sampled_from(sub or [99])),
        )
        return tuple(draw(st.lists(decs, max_size=3)))

    legs = {}
    for _ in range(draw(st.integers(0, 2))):
        hid, lid = fresh(), fresh()
        handles[hid] = Handle(hid, n, HandleKind.CRITICAL, draw(st.booleans()))
        legs[lid] = Legendrian(lid, m, Role.ATTACHING, Coefficient.MINUS1,
                               connect_sum_of_unknots(draw(st.integers(1, 3))), decorations(), passes(),
                               draw(groups), hid, draw(st.sampled_from(["", "lambda"])))
    for _ in range(draw(st.integers(0, 3))):
        lid = fresh()
        role = draw(st.sampled_from([Role.CARVE_PLUS, Role.CANCEL_MINUS, Role.AUXILIARY]))
        coef = Coefficient.PLUS1 if role is Role.CARVE_PLUS else draw(
            st.sampled_from([Coefficient.MINUS1, Coefficient.NONE]))
        legs[lid] = Legendrian(lid, draw(st.integers(1, m)), role, coef, draw(_topos),
                               decorations(), passes(), draw(groups))
    chords = {}
    lids = sorted(legs)
    if lids:
        for _ in range(draw(st.integers(0, 5))):
            cid = fresh()
            a, b = draw(st.sampled_from(lids)), draw(st.sampled_from(lids))
            degenerate = draw(st.booleans()) and draw(st.booleans())
            idx = None if degenerate else draw(st.integers(0, legs[a].dim))
            chords[cid] = ReebChord(cid, a, b, idx, draw(_lengths), draw(st.booleans()), degenerate,
                                    draw(st.integers(-2, 4)), draw(st.sampled_from(["", "s"])))
    notes = ()
    if lids and draw(st.booleans()):
        notes = (LinkingNote((draw(st.sampled_from(lids)),), draw(st.sampled_from(["p = 2", "linked"]))),)
    # Fix dimensions so boats and passes through critical handles stay valid.
    for lid, leg in list(legs.items()):
        decs = tuple(d for d in leg.decorations if not isinstance(d, Boat) or d.m == leg.dim)
        legs[lid] = Legendrian(leg.id, leg.dim, leg.role, leg.coefficient, leg.topo, decs, leg.handle_passes,
                               leg.parallel_group, leg.handle, leg.name)
    return Presentation(2 * n, handles, legs, chords, notes, next_id=nid)


@st.composite
def permutations_of(draw: st.DrawFn, p: Presentation) -> dict[str, dict[int, int]]:
    ids = [*p.handles, *p.legendrians, *p.chords]
    top = max(ids, default=0) + 1
    targets = draw(st.permutations(range(top, top + len(ids))))
    it = iter(targets)
    return {
        "handles": {k: next(it) for k in p.handles},
        "legendrians": {k: next(it) for k in p.legendrians},
        "chords": {k: next(it) for k in p.chords},
    }
