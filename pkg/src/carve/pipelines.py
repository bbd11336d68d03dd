"""End-to-end algorithms built from moves: carving a Lagrangian disk out of
a presentation, and the P-loose unknot construction."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterable

from . import fixtures
from .diagram import (
    Coefficient,
    CuspConnectSum,
    CuspStyle,
    HandleKind,
    Presentation,
    Role,
    relabel,
    validate,
)
from .errors import DegenerateChordPresent, InvalidPresentation
from .invariants import census, detect_loose
from .morse import MooreSpaceSpec
from .moves import parallel_obstructions
from .trace import MoveTrace, Session


def _obstructing_chords(p: Presentation, plus: int, minus: int) -> list[int]:
    return [o["id"] for o in parallel_obstructions(p, plus, minus) if o["kind"] == "chord"]


def _parallelize(s: Session, plus: int, minus: int) -> tuple[int, int]:
    """Slide away every chord into ``minus`` shortest first, then cancel the
    pair.  Returns (boats, slides)."""
    boats = slides = 0
    pending = _obstructing_chords(s.current, plus, minus)
    for cid in pending:
        if s.current.chord(cid).degenerate:
            raise DegenerateChordPresent(f"chord {cid} is degenerate; perturb it first", chord=cid)
    while pending:
        c = s.current.chord(pending[0])
        if c.local_index:
            s.apply("boat_move", chord=c.id)
            boats += 1
        s.apply("handleslide_minus", chord=c.id)
        slides += 1
        left = _obstructing_chords(s.current, plus, minus)
        assert len(left) < len(pending), "obstructing chord count did not decrease"
        pending = left
    s.apply("cancel_plus_minus", plus=plus, minus=minus)
    return boats, slides


def parallelize(p: Presentation, plus: int, minus: int) -> tuple[Presentation, MoveTrace]:
    s = Session(p)
    _parallelize(s, plus, minus)
    return s.current, s.trace()


@dataclass(frozen=True)
class CarveInput:
    """A presentation with one CarvePlus unknot whose bounded chords form the
    sets to be carved.  ``plus`` defaults to the unique CarvePlus Legendrian."""

    presentation: Presentation
    plus: int | None = None

    def __post_init__(self) -> None:
        p = self.presentation
        bad = validate(p)
        if bad:
            raise InvalidPresentation(f"invalid presentation: {bad[0]}", violations=[str(v) for v in bad])
        if self.plus is None:
            cands = [l.id for l in p.legendrians.values() if l.role is Role.CARVE_PLUS]
            if len(cands) != 1:
                raise InvalidPresentation(f"expected one CarvePlus Legendrian, found {len(cands)}",
                                          candidates=cands)
            object.__setattr__(self, "plus", cands[0])
        leg = p.leg(self.plus)
        if leg.coefficient is not Coefficient.PLUS1:
            raise InvalidPresentation(f"Legendrian {leg.id} is not a Plus1 unknot", legendrian=leg.id)
        for c in p.chords.values():
            if c.bounded and c.target == self.plus and c.degenerate:
                raise DegenerateChordPresent(f"chord {c.id} is degenerate; perturb it first", chord=c.id)


@dataclass
class CarveReport:
    result: Presentation
    trace: MoveTrace
    boat_count: int
    slide_count: int
    boat_sites: list[str]
    handle_delta: dict[int, int]
    attaching_correspondence: dict[int, int]
    extra: dict[str, Any] = field(default_factory=dict)

    def stats(self) -> dict[str, Any]:
        verdicts = {str(lid): str(detect_loose(self.result, lid)) for lid in sorted(self.result.legendrians)}
        return {
            "boat_count": self.boat_count,
            "slide_count": self.slide_count,
            "boat_sites": list(self.boat_sites),
            "handle_delta": {str(k): v for k, v in self.handle_delta.items()},
            "attaching_correspondence": {str(k): v for k, v in self.attaching_correspondence.items()},
            "final_hash": self.trace.final_hash,
            "loose": verdicts,
            **self.extra,
        }

    def to_dict(self) -> dict[str, Any]:
        return {"result": self.result.to_dict(), "trace": self.trace.to_dict(), "stats": self.stats()}


def boat_sites(p: Presentation, lid: int) -> list[str]:
    """Sites of the cusp connect sums that consumed a chord."""
    return [d.site for d in p.leg(lid).decorations
            if isinstance(d, CuspConnectSum) and d.style is CuspStyle.CUSP_RING and d.site]


def _attaching(p: Presentation) -> dict[int, int]:
    return {l.id: l.handle for l in p.legendrians.values()
            if l.handle is not None and l.role is Role.ATTACHING and l.coefficient is Coefficient.MINUS1
            and p.handles[l.handle].kind is HandleKind.CRITICAL}


def _correspondence(before: Presentation, after: Presentation) -> dict[int, int]:
    old, new = _attaching(before), _attaching(after)
    return {lid: lid for lid, hid in old.items() if new.get(lid) == hid}


def _carve_into(s: Session, plus: int) -> tuple[int, int, int]:
    """Add the cancelling pair, reroute, parallelize.  Returns
    (new handle, boats, slides)."""
    before = s.current
    s.apply("add_cancelling_pair", parallel_to=plus)
    after = s.current
    (hid,) = set(after.handles) - set(before.handles)
    (minus,) = set(after.legendrians) - set(before.legendrians)
    group = after.leg(plus).parallel_group
    who = [plus, minus] + sorted(l.id for l in before.legendrians.values()
                                 if l.id != plus and l.parallel_group is not None and l.parallel_group == group)
    s.apply("reroute_over_handle", who=who, handle=hid)
    boats, slides = _parallelize(s, plus, minus)
    return hid, boats, slides


def carve(inp: CarveInput) -> CarveReport:
    p = inp.presentation
    s = Session(p)
    assert inp.plus is not None
    sources = sorted({c.source for c in p.chords.values() if c.bounded and c.target == inp.plus})
    _, boats, slides = _carve_into(s, inp.plus)
    result = s.current
    return CarveReport(
        result=result,
        trace=s.trace(),
        boat_count=boats,
        slide_count=slides,
        boat_sites=[site for lid in sources if lid in result.legendrians for site in boat_sites(result, lid)],
        handle_delta=census(p).delta(census(result)),
        attaching_correspondence=_correspondence(p, result),
    )


def loose_witness(n: int = 3) -> tuple[Presentation, MoveTrace]:
    """Carve the sphere-neighbourhood example and push its cusp ring across
    the new handle, leaving ``lambda`` in cancelling position."""
    s = Session(fixtures.ex3(n))
    hid, _, _ = _carve_into(s, fixtures.LAMBDA_PLUS)
    s.apply("cusp_pass_over_handle", leg=fixtures.LAMBDA, handle=hid)
    return s.current, s.trace()


def _entries(P: MooreSpaceSpec | Iterable[int] | int) -> tuple[int, ...]:
    if isinstance(P, MooreSpaceSpec):
        return P.P
    if isinstance(P, int):
        return MooreSpaceSpec((P,)).P
    return MooreSpaceSpec(tuple(P)).P


def _shift(p: Presentation, offset: int) -> Presentation:
    return relabel(
        p,
        handles={k: k + offset for k in p.handles},
        legendrians={k: k + offset for k in p.legendrians},
        chords={k: k + offset for k in p.chords},
    ).evolve(next_id=p.next_id + offset)


def _blocks(entries: tuple[int, ...], n: int) -> Presentation:
    # One Moore-space block per entry, all sharing the first block's 0-handle.
    if len(entries) == 1:
        return fixtures.diagram_e(entries[0], n)
    merged: Presentation | None = None
    for i, p in enumerate(entries):
        block = fixtures.diagram_e(p, n, name=f"U{i}")
        block = block.evolve(legendrians={k: replace(l, parallel_group=f"E{i}")
                                          for k, l in block.legendrians.items()})
        if merged is None:
            merged = block
            continue
        block = _shift(block, merged.next_id)
        zero = next(h for h in block.handles.values() if h.index == 0)
        merged = merged.evolve(
            handles={**merged.handles, **{k: v for k, v in block.handles.items() if k != zero.id}},
            legendrians={**merged.legendrians, **block.legendrians},
            chords={**merged.chords, **block.chords},
            linking_notes=merged.linking_notes + block.linking_notes,
            regions={**merged.regions, **block.regions},
            next_id=block.next_id,
        )
    assert merged is not None
    return merged


def construct_ploose(P: MooreSpaceSpec | Iterable[int] | int, n: int) -> CarveReport:
    """Build the P-loose unknot from Moore-space chords, one block per entry
    of P, joined by connected sum."""
    entries = _entries(P)
    if n < 3:
        raise InvalidPresentation(f"the Moore-space chords need Legendrians of dim >= 2, got n = {n}", n=n)
    initial = _blocks(entries, n)
    s = Session(initial)
    lams: list[int] = []
    boats = slides = offs = 0
    for plus in sorted(l.id for l in initial.legendrians.values() if l.role is Role.CARVE_PLUS):
        group = initial.leg(plus).parallel_group
        (lam,) = [l.id for l in initial.legendrians.values() if l.id != plus and l.parallel_group == group]
        hid, b, sl = _carve_into(s, plus)
        boats += b
        slides += sl
        s.apply("attach_flexible", through=hid)
        (flex,) = [l.id for l in s.current.legendrians.values() if l.handle is not None
                   and s.current.handles[l.handle].flexible and l.passes(hid)]
        while s.current.leg(lam).passes(hid):
            s.apply("slide_off_handle", leg=lam, over_flex=flex)
            offs += 1
        s.apply("cancel_handle_legendrian", handle=hid, leg=flex)
        lams.append(lam)

    extra: dict[str, Any] = {"slide_off_count": offs, "entries": list(entries)}
    if 0 in entries:
        witness, wtrace = loose_witness(n)
        verdict = detect_loose(witness, fixtures.LAMBDA)
        if verdict.reason != "L3":
            raise AssertionError(f"loose witness produced {verdict}")
        extra["witness_hash"] = wtrace.final_hash
        s.apply("mark_loose", leg=lams[entries.index(0)], origin="L3", certificate=wtrace.final_hash)
    for other in lams[1:]:
        s.apply("connect_sum", a=lams[0], b=other)

    result = s.current
    return CarveReport(
        result=result,
        trace=s.trace(),
        boat_count=boats,
        slide_count=slides,
        boat_sites=boat_sites(result, lams[0]),
        handle_delta=census(initial).delta(census(result)),
        attaching_correspondence=_correspondence(initial, result),
        extra=extra,
    )
