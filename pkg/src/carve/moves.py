"""Rewriting moves on presentations.

Every move is a pure function ``move(p, **params) -> Presentation`` that
checks its own preconditions and raises a :class:`~carve.errors.CarveError`
subclass when they fail.  Moves are registered by name in :data:`MOVES` so
traces can store and replay them.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import replace
from typing import Any, Callable, Iterable, Mapping

from . import morse
from .diagram import (
    SPHERE,
    Boat,
    Coefficient,
    CuspConnectSum,
    CuspPassedOverHandle,
    CuspStyle,
    Handle,
    HandleKind,
    Legendrian,
    LinkingNote,
    LooseChart,
    Presentation,
    Role,
    TopoType,
    connect_sum_of_unknots,
)
from .errors import (
    AlreadyMaximum,
    DegenerateChord,
    InsufficientPasses,
    NoPasses,
    NotCancellable,
    NotFlexible,
    NotMaximum,
    NotParallel,
    NotShortest,
    NotSubcritical,
    SelfSlide,
    UnknownMove,
    WrongCoefficient,
)
from .invariants import detect_loose

log = logging.getLogger(__name__)

Move = Callable[..., Presentation]
MOVES: dict[str, Move] = {}


def _keep_loose(before: Presentation, after: Presentation) -> Presentation:
    # Looseness is an isotopy invariant; a certificate that a move destroys is
    # kept as an explicit chart naming the rule it came from.
    for lid in sorted(set(before.legendrians) & set(after.legendrians)):
        was = detect_loose(before, lid)
        if was.loose and not detect_loose(after, lid).loose:
            after = after.with_legs(after.leg(lid).decorated(LooseChart(1, was.reason or "")))
    return after


def register(name: str, fn: Move) -> Move:
    @functools.wraps(fn)
    def wrapper(p: Presentation, **params: Any) -> Presentation:
        return _keep_loose(p, fn(p, **params))

    wrapper.move_name = name  # type: ignore[attr-defined]
    MOVES[name] = wrapper
    return wrapper


def move(name: str) -> Callable[[Move], Move]:
    return lambda fn: register(name, fn)


def apply_move(p: Presentation, name: str, params: Mapping[str, Any]) -> Presentation:
    try:
        fn = MOVES[name]
    except KeyError:
        raise UnknownMove(f"unknown move {name!r}", move=name, known=sorted(MOVES)) from None
    return fn(p, **dict(params))


def _subcritical_top(p: Presentation, hid: int) -> Handle:
    h = p.handle(hid)
    if h.kind is not HandleKind.SUBCRITICAL or h.index != p.n - 1:
        raise NotSubcritical(f"handle {hid} is not a subcritical ({p.n - 1})-handle", handle=hid,
                             index=h.index)
    return h


def _summed_topo(a: TopoType, b: TopoType) -> TopoType:
    ka, kb = a.unknot_components, b.unknot_components
    if ka is None or kb is None:
        return a
    return connect_sum_of_unknots(ka + kb)


def _drop(p: Presentation, *, handles: Iterable[int] = (), legs: Iterable[int] = ()) -> Presentation:
    hs, ls = set(handles), set(legs)
    return p.evolve(
        handles={k: v for k, v in p.handles.items() if k not in hs},
        legendrians={k: v for k, v in p.legendrians.items() if k not in ls},
        chords={k: c for k, c in p.chords.items() if c.source not in ls and c.target not in ls},
    )


# ---------------------------------------------------------------------------


@move("boat_move")
def boat_move(p: Presentation, chord: int) -> Presentation:
    """Turn the endpoint of ``chord`` into a front maximum by an (m, m-j)-boat."""
    c = p.chord(chord)
    if c.degenerate or c.local_index is None:
        raise DegenerateChord(f"chord {chord} is degenerate", chord=chord)
    j = c.local_index
    if j == 0:
        raise AlreadyMaximum(f"chord {chord} already ends at a maximum", chord=chord)
    leg = p.leg(c.source)
    m = leg.dim
    return p.with_chords(replace(c, local_index=0)).with_legs(leg.decorated(Boat(m, m - j, c.site_label)))


@move("handleslide_minus")
def handleslide_minus(p: Presentation, chord: int) -> Presentation:
    """Slide the chord's source over its (-1) target along the chord.

    Only allowed at a maximum and along the shortest chord between the two;
    the slide deletes the chord and creates none.
    """
    c = p.chord(chord)
    if c.degenerate or c.local_index is None:
        raise DegenerateChord(f"chord {chord} is degenerate", chord=chord)
    slider, over = p.leg(c.source), p.leg(c.target)
    if slider.id == over.id:
        raise SelfSlide(f"chord {chord} starts and ends on Legendrian {slider.id}", chord=chord)
    if over.coefficient is not Coefficient.MINUS1:
        raise WrongCoefficient(f"Legendrian {over.id} has coefficient {over.coefficient.value}, need Minus1",
                               legendrian=over.id)
    if c.local_index != 0:
        raise NotMaximum(f"chord {chord} has local index {c.local_index}; apply a boat move first",
                         chord=chord, local_index=c.local_index)
    first = p.chords_from(slider.id, over.id)[0]
    if first.id != c.id:
        raise NotShortest(f"chord {first.id} is shorter than chord {chord}", chord=chord, shortest=first.id)
    remaining = len(p.chords_from(slider.id, over.id)) - 1
    if remaining:
        log.info("slide along chord %s leaves %s chords whose stored indices are assumed stable",
                 chord, remaining)
    new_slider = replace(
        slider,
        decorations=slider.decorations + (CuspConnectSum(over.label, CuspStyle.CUSP_RING, c.site_label),),
        handle_passes=slider.handle_passes + over.handle_passes,
        topo=_summed_topo(slider.topo, over.topo),
    )
    chords = {k: v for k, v in p.chords.items() if k != c.id}
    return p.evolve(chords=chords).with_legs(new_slider)


@move("handleslide_plus")
def handleslide_plus(p: Presentation, slider: int, over: int) -> Presentation:
    s, o = p.leg(slider), p.leg(over)
    if s.id == o.id:
        raise SelfSlide(f"cannot slide Legendrian {slider} over itself")
    if o.coefficient is not Coefficient.PLUS1:
        raise WrongCoefficient(f"Legendrian {over} has coefficient {o.coefficient.value}, need Plus1",
                               legendrian=over)
    return p.with_legs(s.decorated(CuspConnectSum(o.label, CuspStyle.CONE)))


@move("add_cancelling_pair")
def add_cancelling_pair(p: Presentation, parallel_to: int) -> Presentation:
    """Add an (n-1)-handle and a (-1) Legendrian pushed off ``parallel_to``.

    The new Legendrian shadows the bottom of ``parallel_to``, so bounded
    chords that ended on ``parallel_to`` now end on it instead.
    """
    plus = p.leg(parallel_to)
    (hid, lid), next_id = p.fresh_ids(2)
    group = plus.parallel_group or f"pair{hid}"
    minus = Legendrian(
        id=lid,
        dim=plus.dim,
        role=Role.CANCEL_MINUS,
        coefficient=Coefficient.MINUS1,
        topo=SPHERE,
        parallel_group=group,
        name="lambda_minus",
    )
    handles = dict(p.handles)
    handles[hid] = Handle(hid, p.n - 1, HandleKind.SUBCRITICAL)
    chords = {
        k: replace(c, target=lid) if c.bounded and c.target == plus.id else c
        for k, c in p.chords.items()
    }
    q = p.evolve(handles=handles, chords=chords, next_id=next_id)
    return q.with_legs(replace(plus, parallel_group=group), minus)


@move("reroute_over_handle")
def reroute_over_handle(p: Presentation, who: Iterable[int], handle: int) -> Presentation:
    _subcritical_top(p, handle)
    legs = [p.leg(lid) for lid in who]
    q = p
    for leg in legs:
        q = q.with_legs(q.leg(leg.id).with_passes(handle, 1))
    return q


def parallel_obstructions(p: Presentation, plus: int, minus: int) -> list[dict[str, Any]]:
    """Everything that stops ``plus`` and ``minus`` from being parallel."""
    a, b = p.leg(plus), p.leg(minus)
    out: list[dict[str, Any]] = []
    if a.parallel_group is None or a.parallel_group != b.parallel_group:
        out.append({"kind": "parallel_group", "plus": a.parallel_group, "minus": b.parallel_group})
    if a.handle_passes != b.handle_passes:
        out.append({"kind": "handle_passes", "plus": [list(x) for x in a.handle_passes],
                    "minus": [list(x) for x in b.handle_passes]})
    pair = {plus, minus}
    for c in sorted(p.chords.values(), key=lambda c: c.order_key):
        if {c.source, c.target} == pair or (c.target in pair and c.source not in pair and c.bounded):
            out.append({"kind": "chord", "id": c.id, "from": c.source, "to": c.target,
                        "local_index": c.local_index, "length": str(c.length)})
    return out


def is_parallel(p: Presentation, plus: int, minus: int) -> bool:
    return not parallel_obstructions(p, plus, minus)


@move("cancel_plus_minus")
def cancel_plus_minus(p: Presentation, plus: int, minus: int) -> Presentation:
    a, b = p.leg(plus), p.leg(minus)
    if a.coefficient is not Coefficient.PLUS1 or b.coefficient is not Coefficient.MINUS1:
        raise WrongCoefficient(f"need a Plus1/Minus1 pair, got {a.coefficient.value}/{b.coefficient.value}")
    obstructions = parallel_obstructions(p, plus, minus)
    if obstructions:
        raise NotParallel(f"Legendrians {plus} and {minus} are not parallel", obstructions=obstructions)
    handles = [b.handle] if b.handle is not None else []
    return _drop(p, handles=handles, legs=[plus, minus])


@move("cancel_handle_legendrian")
def cancel_handle_legendrian(p: Presentation, handle: int, leg: int) -> Presentation:
    """Cancel a subcritical handle against a Legendrian passing it exactly once."""
    h = p.handle(handle)
    if h.kind is not HandleKind.SUBCRITICAL:
        raise NotSubcritical(f"handle {handle} is critical", handle=handle)
    l = p.leg(leg)
    others = [x for x in p.legs_through(handle) if x != leg]
    if l.passes(handle) != 1 or others:
        raise NotCancellable(
            f"Legendrian {leg} passes handle {handle} {l.passes(handle)} times; others passing: {others}",
            others=others, passes=l.passes(handle))
    drop_handles = [handle] + ([l.handle] if l.handle is not None else [])
    q = _drop(p, handles=drop_handles, legs=[leg])
    legs = {k: replace(v, handle_passes=tuple(x for x in v.handle_passes if x[0] != handle))
            for k, v in q.legendrians.items()}
    return q.evolve(legendrians=legs)


@move("cusp_pass_over_handle")
def cusp_pass_over_handle(p: Presentation, leg: int, handle: int) -> Presentation:
    l = p.leg(leg)
    p.handle(handle)
    if l.passes(handle) < 2:
        raise InsufficientPasses(f"Legendrian {leg} passes handle {handle} {l.passes(handle)} times",
                                 passes=l.passes(handle))
    return p.with_legs(l.with_passes(handle, -2).decorated(CuspPassedOverHandle(handle)))


@move("attach_flexible")
def attach_flexible(p: Presentation, through: int) -> Presentation:
    """Attach a flexible critical handle along a loose sphere that passes
    ``through`` once."""
    _subcritical_top(p, through)
    (hid, lid), next_id = p.fresh_ids(2)
    handles = dict(p.handles)
    handles[hid] = Handle(hid, p.n, HandleKind.CRITICAL, flexible=True)
    flex = Legendrian(
        id=lid,
        dim=p.n - 1,
        role=Role.ATTACHING,
        coefficient=Coefficient.MINUS1,
        decorations=(LooseChart(1),),
        handle_passes=((through, 1),),
        handle=hid,
        name="lambda_flex",
    )
    return p.evolve(handles=handles, next_id=next_id).with_legs(flex)


@move("slide_off_handle")
def slide_off_handle(p: Presentation, leg: int, over_flex: int) -> Presentation:
    """One slide of ``leg`` over the flexible sphere, removing one pass."""
    f = p.leg(over_flex)
    fh = p.handles.get(f.handle) if f.handle is not None else None
    if fh is None or not fh.flexible:
        raise NotFlexible(f"Legendrian {over_flex} does not attach a flexible handle", legendrian=over_flex)
    if len(f.handle_passes) != 1 or f.handle_passes[0][1] != 1:
        raise NotFlexible(f"flexible Legendrian {over_flex} must pass exactly one handle once",
                          legendrian=over_flex)
    if leg == over_flex:
        raise SelfSlide(f"cannot slide Legendrian {leg} over itself")
    h = f.handle_passes[0][0]
    l = p.leg(leg)
    if l.passes(h) < 1:
        raise NoPasses(f"Legendrian {leg} does not pass handle {h}", handle=h)
    return p.with_legs(l.with_passes(h, -1).decorated(CuspConnectSum(f.label, CuspStyle.CUSP_RING)))


@move("connect_sum")
def connect_sum(p: Presentation, a: int, b: int) -> Presentation:
    """Connected sum of two Legendrians in separate Darboux charts; ``b`` is
    merged into ``a`` together with its chords and notes."""
    la, lb = p.leg(a), p.leg(b)
    if a == b:
        raise SelfSlide(f"cannot connect-sum Legendrian {a} with itself")
    merged = replace(
        la,
        topo=_summed_topo(la.topo, lb.topo),
        decorations=la.decorations + lb.decorations,
        handle_passes=la.handle_passes + lb.handle_passes,
    )
    chords = {k: replace(c, source=a if c.source == b else c.source, target=a if c.target == b else c.target)
              for k, c in p.chords.items()}
    notes = tuple(LinkingNote(tuple(a if x == b else x for x in n.legendrians), n.text) for n in p.linking_notes)
    q = p.evolve(chords=chords, linking_notes=notes).with_legs(merged)
    return _drop(q, handles=[lb.handle] if lb.handle is not None else [], legs=[b])


@move("mark_loose")
def mark_loose(p: Presentation, leg: int, origin: str, certificate: str = "") -> Presentation:
    """Record an externally established looseness certificate as a chart."""
    return p.with_legs(p.leg(leg).decorated(LooseChart(1, origin)))


register("perturb_chord", morse.perturb_chord)
