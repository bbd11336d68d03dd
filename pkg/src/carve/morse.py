"""Reeb chords from combinatorial Morse data.

A pushed-through region is described only by the critical points of the
height function on it.  Each critical point becomes one chord between the
pushoff and the original Legendrian, with the point's index as the chord's
local index and the critical value (plus an offset) as its length.  Chord
lengths only matter through their order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .diagram import (
    Presentation,
    ReebChord,
    Violation,
    fraction_from_doc,
    fraction_to_doc,
)
from .errors import (
    AmbiguousTie,
    DimensionMismatch,
    EmptyResolution,
    InvalidPresentation,
    NonPositiveLength,
    NotDegenerate,
)


class CarveWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CriticalPoint:
    index: int
    value: Fraction
    label: str = ""
    grading: int | None = None  # stored chord grading; defaults to the index

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "value": fraction_to_doc(self.value), "label": self.label,
                "grading": self.grading}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> CriticalPoint:
        g = doc.get("grading")
        return cls(int(doc["index"]), fraction_from_doc(doc.get("value", 0)), str(doc.get("label", "")),
                   None if g is None else int(g))


@dataclass(frozen=True)
class RegionComponent:
    name: str
    critical_points: tuple[CriticalPoint, ...]
    euler: int | None = None

    @property
    def is_disk(self) -> bool:
        return len(self.critical_points) == 1 and self.critical_points[0].index == 0

    @property
    def signed_count(self) -> int:
        return sum((-1) ** cp.index for cp in self.critical_points)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "critical_points": [cp.to_dict() for cp in self.critical_points],
                "euler": self.euler}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> RegionComponent:
        e = doc.get("euler")
        return cls(str(doc["name"]), tuple(CriticalPoint.from_dict(c) for c in doc["critical_points"]),
                   None if e is None else int(e))


@dataclass(frozen=True)
class MorseRegionSpec:
    """Critical points of a region U pushed through a Legendrian of dimension
    ``dim``.  ``offset`` is the pushoff height added to every critical value;
    when omitted it is chosen so the shortest chord has length 1."""

    dim: int
    components: tuple[RegionComponent, ...]
    offset: Fraction | None = None

    def points(self) -> list[tuple[int, int, RegionComponent, CriticalPoint]]:
        out = []
        for ci, comp in enumerate(self.components):
            for pi, cp in enumerate(comp.critical_points):
                out.append((ci, pi, comp, cp))
        return out

    def pushoff_offset(self) -> Fraction:
        if self.offset is not None:
            return self.offset
        values = [cp.value for _, _, _, cp in self.points()]
        return 1 - min(values) if values else Fraction(1)

    def violations(self) -> list[Violation]:
        out = []
        if self.dim < 1:
            out.append(Violation("RegionDimension", f"dim {self.dim} < 1"))
        if not self.components:
            out.append(Violation("EmptyRegion", "region has no components"))
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            out.append(Violation("DuplicateComponent", f"component names {names} are not distinct"))
        for comp in self.components:
            if not comp.critical_points:
                out.append(Violation("EmptyComponent", f"component {comp.name} has no critical points"))
            for cp in comp.critical_points:
                if not 0 <= cp.index <= self.dim:
                    out.append(Violation("CriticalIndexRange",
                                         f"component {comp.name}: index {cp.index} outside [0, {self.dim}]"))
            if comp.euler is not None and comp.signed_count != comp.euler:
                out.append(Violation("EulerMismatch",
                                     f"component {comp.name}: signed count {comp.signed_count} "
                                     f"!= declared euler {comp.euler}"))
        offset = self.pushoff_offset()
        for comp in self.components:
            for cp in comp.critical_points:
                if cp.value + offset <= 0:
                    out.append(Violation("NonPositiveLength",
                                         f"component {comp.name}: value {cp.value} + offset {offset} <= 0"))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "components": [c.to_dict() for c in self.components],
            "offset": None if self.offset is None else fraction_to_doc(self.offset),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> MorseRegionSpec:
        off = doc.get("offset")
        return cls(int(doc["dim"]), tuple(RegionComponent.from_dict(c) for c in doc["components"]),
                   None if off is None else fraction_from_doc(off))


def region(dim: int, *components: tuple[str, Sequence[tuple[int, Any]]] | RegionComponent,
           offset: Any = None) -> MorseRegionSpec:
    """Shorthand: ``region(2, ("U", [(0, -2), (1, -1)]))``."""
    comps = []
    for c in components:
        if isinstance(c, RegionComponent):
            comps.append(c)
        else:
            name, pts = c
            comps.append(RegionComponent(name, tuple(CriticalPoint(i, Fraction(v)) for i, v in pts)))
    return MorseRegionSpec(dim, tuple(comps), None if offset is None else Fraction(offset))


def disk(dim: int, value: Any = -1, name: str = "disk") -> RegionComponent:
    return RegionComponent(name, (CriticalPoint(0, Fraction(value), "max"),), euler=1)


def sphere_neighborhood(dim: int, k: int = 1, values: tuple[Any, Any] = (-2, -1),
                        name: str = "sphere") -> RegionComponent:
    """Neighbourhood of an embedded k-sphere: a maximum and an index-k saddle."""
    if not 0 < k <= dim:
        raise ValueError(f"sphere dimension {k} must lie in (0, {dim}]")
    return RegionComponent(
        name,
        (CriticalPoint(0, Fraction(values[0]), "max"), CriticalPoint(k, Fraction(values[1]), "saddle")),
        euler=1 + (-1) ** k,
    )


@dataclass(frozen=True)
class MooreSpaceSpec:
    """Moore spaces S^1 with a 2-cell attached by a degree-p map, one per entry."""

    P: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "P", tuple(int(p) for p in self.P))
        if not self.P:
            raise ValueError("MooreSpaceSpec needs at least one entry")
        if any(p < 0 for p in self.P):
            raise ValueError(f"entries of P must be non-negative, got {self.P}")

    def component(self, p: int) -> RegionComponent:
        # Cells e0, e1 of the circle and e2 of the disk, with values rising
        # with the cell dimension.
        return RegionComponent(
            f"moore{p}",
            (
                CriticalPoint(0, Fraction(-3), "e0"),
                CriticalPoint(1, Fraction(-2), "e1"),
                CriticalPoint(2, Fraction(-1), "e2"),
            ),
            euler=1,
        )

    def region(self, p: int, dim: int) -> MorseRegionSpec:
        if dim < 2:
            raise ValueError(f"a Moore space region needs dimension >= 2, got {dim}")
        if dim + 1 < 5:
            warnings.warn(
                f"Moore space with p={p} embeds in S^{dim} only for dim >= 4; "
                "the diagram is combinatorial only",
                CarveWarning,
                stacklevel=2,
            )
        return MorseRegionSpec(dim, (self.component(p),))

    def to_dict(self) -> dict[str, Any]:
        return {"P": list(self.P)}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> MooreSpaceSpec:
        return cls(tuple(doc["P"]))


def disconnect_check(spec: MorseRegionSpec) -> bool:
    """True iff the region has several components and one of them is a disk."""
    return len(spec.components) >= 2 and any(c.is_disk for c in spec.components)


def chords_from_region(p: Presentation, spec: MorseRegionSpec, source: int, target: int,
                       *, name: str = "U") -> list[ReebChord]:
    """One bounded, nondegenerate chord per critical point, ids allocated from
    ``p`` in order of increasing critical value."""
    bad = spec.violations()
    if bad:
        raise InvalidPresentation(f"invalid region {name}: {bad[0]}", violations=[str(v) for v in bad])
    src = p.leg(source)
    p.leg(target)
    if src.dim != spec.dim:
        raise DimensionMismatch(f"region dim {spec.dim} != dim {src.dim} of Legendrian {source}",
                                region_dim=spec.dim, legendrian_dim=src.dim)
    offset = spec.pushoff_offset()
    pts = sorted(spec.points(), key=lambda t: (t[3].value, t[0], t[1]))
    ids, _ = p.fresh_ids(len(pts))
    out = []
    for cid, (_, pi, comp, cp) in zip(ids, pts):
        out.append(ReebChord(
            id=cid,
            source=source,
            target=target,
            local_index=cp.index,
            length=cp.value + offset,
            bounded=True,
            degenerate=False,
            grading=cp.index if cp.grading is None else cp.grading,
            site=f"{name}/{comp.name}/{pi}",
        ))
    return out


def with_region_chords(p: Presentation, spec: MorseRegionSpec, source: int, target: int,
                       *, name: str = "U") -> Presentation:
    """``p`` plus the chords generated by ``spec``, recording the region."""
    chords = chords_from_region(p, spec, source, target, name=name)
    regions = dict(p.regions)
    regions[name] = spec
    q = p.with_chords(*chords).evolve(regions=regions)
    return q.evolve(next_id=q.fresh_ids(0)[1])


def _resolution_points(resolution: Iterable[Any]) -> list[CriticalPoint]:
    out = []
    for r in resolution:
        if isinstance(r, CriticalPoint):
            out.append(r)
        elif isinstance(r, Mapping):
            out.append(CriticalPoint.from_dict({"value": 0, **r}))
        else:
            out.append(CriticalPoint(int(r), Fraction(0)))
    return out


def perturb_chord(p: Presentation, chord: int, resolution: Iterable[Any]) -> Presentation:
    """Replace a degenerate chord by the nondegenerate chords of a resolution.

    The new lengths sit in a window around the old length that contains no
    other chord's length, ordered by the resolution's critical values, so
    the order relative to every other chord is kept.
    """
    c = p.chord(chord)
    if not c.degenerate:
        raise NotDegenerate(f"chord {chord} is not degenerate", chord=chord)
    pts = _resolution_points(resolution)
    if not pts:
        raise EmptyResolution(f"empty resolution for chord {chord}", chord=chord)
    m = p.leg(c.source).dim
    for cp in pts:
        if not 0 <= cp.index <= m:
            raise InvalidPresentation(f"resolution index {cp.index} outside [0, {m}]", chord=chord)
    others = [o for o in p.chords.values() if o.id != c.id]
    below = [o.length for o in others if o.length < c.length]
    above = [o.length for o in others if o.length > c.length]
    tied_before = any(o.length == c.length and o.id < c.id for o in others)
    tied_after = any(o.length == c.length and o.id > c.id for o in others)
    if tied_before and tied_after:
        raise AmbiguousTie(f"chord {chord} is tied in length on both sides; cannot keep its order",
                           chord=chord)
    half = min(
        c.length / 2,
        (c.length - max(below)) / 2 if below else c.length,
        (min(above) - c.length) / 2 if above else c.length,
        Fraction(1, 1000),
    )
    if half <= 0:
        raise NonPositiveLength(f"no room to perturb chord {chord}")
    lo, hi = c.length - half, c.length + half
    # tied neighbours fix which side of the old length the new chords go
    if tied_after:
        hi = c.length
    elif tied_before:
        lo = c.length
    k = len(pts)
    order = sorted(range(k), key=lambda i: (pts[i].value, i))
    ids, next_id = p.fresh_ids(k)
    new = []
    for rank, i in enumerate(order):
        cp = pts[i]
        new.append(ReebChord(
            id=ids[rank],
            source=c.source,
            target=c.target,
            local_index=cp.index,
            length=lo + (hi - lo) * Fraction(rank + 1, k + 1),
            bounded=c.bounded,
            degenerate=False,
            grading=cp.index if cp.grading is None else cp.grading,
            site=f"{c.site}~{rank}" if c.site else "",
        ))
    chords = {k2: v for k2, v in p.chords.items() if k2 != c.id}
    for nc in new:
        chords[nc.id] = nc
    return p.evolve(chords=chords, next_id=next_id)
