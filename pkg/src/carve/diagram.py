"""Combinatorial data model for Weinstein handle presentations.

A :class:`Presentation` is an immutable value: handles, Legendrian
components, Reeb chord records, opaque linking notes and the Morse region
specs that generated chords.  Moves never mutate a presentation; they build
a new one with :meth:`Presentation.evolve`.

Identity is structural.  :func:`canonical_doc` renumbers every id in an
order that depends only on the structure (colour refinement followed by
individualization), so :func:`digest` is invariant under relabeling and
:func:`structural_equal` is a plain comparison of canonical documents.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping

from .errors import CarveError, UnknownObject

SCHEMA_VERSION = 1


class HandleKind(str, Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"


class Role(str, Enum):
    ATTACHING = "Attaching"
    CARVE_PLUS = "CarvePlus"
    CANCEL_MINUS = "CancelMinus"
    AUXILIARY = "Auxiliary"


class Coefficient(str, Enum):
    MINUS1 = "Minus1"
    PLUS1 = "Plus1"
    NONE = "None"


class CuspStyle(str, Enum):
    CUSP_RING = "CuspRing"
    CONE = "Cone"


def fraction_to_doc(x: Fraction) -> dict[str, int]:
    return {"num": x.numerator, "den": x.denominator}


def fraction_from_doc(doc: Any) -> Fraction:
    if isinstance(doc, bool):
        raise CarveError("boolean where a rational was expected")
    if isinstance(doc, int):
        return Fraction(doc)
    if isinstance(doc, dict) and set(doc) == {"num", "den"}:
        num, den = doc["num"], doc["den"]
        if isinstance(num, int) and isinstance(den, int) and den != 0:
            return Fraction(num, den)
    raise CarveError(f"not a rational document: {doc!r}")


# ---------------------------------------------------------------------------
# Decorations


@dataclass(frozen=True)
class Boat:
    """An (m, k)-boat left behind where a chord of local index m - k was turned
    into a front maximum."""

    m: int
    k: int
    site: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"type": "Boat", "m": self.m, "k": self.k, "site": self.site}


@dataclass(frozen=True)
class CuspConnectSum:
    with_label: str
    style: CuspStyle
    site: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "CuspConnectSum",
            "with": self.with_label,
            "style": self.style.value,
            "site": self.site,
        }


@dataclass(frozen=True)
class LooseChart:
    # origin names the certificate a chart was materialized from; "" for a
    # chart that was present from the start.
    count: int = 1
    origin: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"type": "LooseChart", "count": self.count, "origin": self.origin}


@dataclass(frozen=True)
class CuspPassedOverHandle:
    handle: int

    def to_dict(self) -> dict[str, Any]:
        return {"type": "CuspPassedOverHandle", "handle": self.handle}


Decoration = Boat | CuspConnectSum | LooseChart | CuspPassedOverHandle


def decoration_from_dict(doc: Mapping[str, Any]) -> Decoration:
    kind = doc.get("type")
    if kind == "Boat":
        return Boat(int(doc["m"]), int(doc["k"]), str(doc.get("site", "")))
    if kind == "CuspConnectSum":
        return CuspConnectSum(str(doc["with"]), CuspStyle(doc["style"]), str(doc.get("site", "")))
    if kind == "LooseChart":
        return LooseChart(int(doc.get("count", 1)), str(doc.get("origin", "")))
    if kind == "CuspPassedOverHandle":
        return CuspPassedOverHandle(int(doc["handle"]))
    raise CarveError(f"unknown decoration type {kind!r}")


# ---------------------------------------------------------------------------
# Objects


@dataclass(frozen=True)
class Handle:
    id: int
    index: int
    kind: HandleKind
    flexible: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "index": self.index, "kind": self.kind.value, "flexible": self.flexible}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> Handle:
        return cls(int(doc["id"]), int(doc["index"]), HandleKind(doc["kind"]), bool(doc.get("flexible", False)))


@dataclass(frozen=True)
class TopoType:
    kind: str = "Sphere"  # Sphere | Disk | ConnectSumOfUnknots
    components: int = 1

    @property
    def unknot_components(self) -> int | None:
        if self.kind == "Sphere":
            return 1
        if self.kind == "ConnectSumOfUnknots":
            return self.components
        return None

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "components": self.components}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> TopoType:
        return cls(str(doc["kind"]), int(doc.get("components", 1)))


SPHERE = TopoType()
DISK = TopoType("Disk")


def connect_sum_of_unknots(k: int) -> TopoType:
    return SPHERE if k == 1 else TopoType("ConnectSumOfUnknots", k)


Passes = tuple[tuple[int, int], ...]


def _norm_passes(items: Iterable[tuple[int, int]]) -> Passes:
    acc: dict[int, int] = {}
    for h, c in items:
        acc[h] = acc.get(h, 0) + c
    return tuple(sorted((h, c) for h, c in acc.items() if c != 0))


@dataclass(frozen=True)
class Legendrian:
    id: int
    dim: int
    role: Role
    coefficient: Coefficient = Coefficient.NONE
    topo: TopoType = SPHERE
    decorations: tuple[Decoration, ...] = ()
    handle_passes: Passes = ()
    parallel_group: str | None = None
    handle: int | None = None  # critical handle this sphere attaches, if any
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "handle_passes", _norm_passes(self.handle_passes))

    @property
    def label(self) -> str:
        return self.name or self.role.value

    def passes(self, handle: int) -> int:
        return dict(self.handle_passes).get(handle, 0)

    @cached_property
    def shape(self) -> str:
        # Id-free part of the canonical signature; handle references in
        # decorations are resolved per presentation.
        decs = ["CuspPassedOverHandle" if isinstance(d, CuspPassedOverHandle) else repr(d) for d in self.decorations]
        return repr((self.dim, self.role.value, self.coefficient.value, self.topo.kind, self.topo.components,
                     self.name, decs, self.parallel_group is not None))

    def with_passes(self, handle: int, delta: int) -> Legendrian:
        return replace(self, handle_passes=_norm_passes(self.handle_passes + ((handle, delta),)))

    def decorated(self, *decs: Decoration) -> Legendrian:
        return replace(self, decorations=self.decorations + decs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "dim": self.dim,
            "role": self.role.value,
            "coefficient": self.coefficient.value,
            "topo": self.topo.to_dict(),
            "decorations": [d.to_dict() for d in self.decorations],
            "handle_passes": [[h, c] for h, c in self.handle_passes],
            "parallel_group": self.parallel_group,
            "handle": self.handle,
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> Legendrian:
        return cls(
            id=int(doc["id"]),
            dim=int(doc["dim"]),
            role=Role(doc["role"]),
            coefficient=Coefficient(doc.get("coefficient", "None")),
            topo=TopoType.from_dict(doc.get("topo", {"kind": "Sphere"})),
            decorations=tuple(decoration_from_dict(d) for d in doc.get("decorations", [])),
            handle_passes=tuple((int(h), int(c)) for h, c in doc.get("handle_passes", [])),
            parallel_group=doc.get("parallel_group"),
            handle=doc.get("handle"),
            name=str(doc.get("name", "")),
        )


@dataclass(frozen=True)
class ReebChord:
    """A chord from ``source`` to ``target``.

    ``local_index`` uses the slideable convention: 0 is a front maximum at
    which a handleslide is allowed; the index seen from the other endpoint is
    ``m - local_index``.  Degenerate chords carry ``local_index=None``.
    """

    id: int
    source: int
    target: int
    local_index: int | None
    length: Fraction
    bounded: bool = True
    degenerate: bool = False
    grading: int = 0
    site: str = ""

    @property
    def order_key(self) -> tuple[Fraction, int]:
        return (self.length, self.id)

    def dual_index(self, m: int) -> int | None:
        return None if self.local_index is None else m - self.local_index

    @property
    def site_label(self) -> str:
        return self.site or f"len={self.length}"

    @cached_property
    def body(self) -> dict[str, Any]:
        # to_dict() minus id and endpoints; shared, so never mutate it.
        d = self.to_dict()
        for k in ("id", "from", "to"):
            del d[k]
        return d

    @cached_property
    def shape(self) -> str:
        # Everything but the id and endpoints; used for canonical ordering.
        return repr((self.local_index, self.length.numerator, self.length.denominator, self.bounded,
                     self.degenerate, self.grading, self.site))

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "from": self.source,
            "to": self.target,
            "local_index": self.local_index,
            "length": fraction_to_doc(self.length),
            "bounded": self.bounded,
            "degenerate": self.degenerate,
            "grading": self.grading,
            "site": self.site,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> ReebChord:
        idx = doc.get("local_index")
        return cls(
            id=int(doc["id"]),
            source=int(doc["from"]),
            target=int(doc["to"]),
            local_index=None if idx is None else int(idx),
            length=fraction_from_doc(doc["length"]),
            bounded=bool(doc.get("bounded", True)),
            degenerate=bool(doc.get("degenerate", False)),
            grading=int(doc.get("grading", 0)),
            site=str(doc.get("site", "")),
        )


@dataclass(frozen=True)
class LinkingNote:
    """Opaque fact about how some Legendrians link; carried verbatim."""

    legendrians: tuple[int, ...]
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {"legendrians": list(self.legendrians), "text": self.text}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> LinkingNote:
        return cls(tuple(int(i) for i in doc["legendrians"]), str(doc["text"]))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


# ---------------------------------------------------------------------------
# Presentation


@dataclass(frozen=True, eq=True)
class Presentation:
    """A Weinstein handle diagram.

    The maps are treated as read-only; build modified copies with
    :meth:`evolve`.  ``next_id`` is a single counter shared by all id kinds so
    ids are never reused within a trace; it is excluded from the canonical
    form.
    """

    ambient_dim: int = 6
    handles: Mapping[int, Handle] = field(default_factory=dict)
    legendrians: Mapping[int, Legendrian] = field(default_factory=dict)
    chords: Mapping[int, ReebChord] = field(default_factory=dict)
    linking_notes: tuple[LinkingNote, ...] = ()
    regions: Mapping[str, Any] = field(default_factory=dict)
    next_id: int = 0

    __hash__ = None  # type: ignore[assignment]

    @property
    def n(self) -> int:
        return self.ambient_dim // 2

    def evolve(self, **changes: Any) -> Presentation:
        return replace(self, **changes)

    def fresh_ids(self, k: int = 1) -> tuple[list[int], int]:
        start = max([self.next_id - 1, *self.handles, *self.legendrians, *self.chords]) + 1
        return list(range(start, start + k)), start + k

    def handle(self, hid: int) -> Handle:
        try:
            return self.handles[hid]
        except KeyError:
            raise UnknownObject(f"no handle {hid}", kind="handle", id=hid) from None

    def leg(self, lid: int) -> Legendrian:
        try:
            return self.legendrians[lid]
        except KeyError:
            raise UnknownObject(f"no Legendrian {lid}", kind="legendrian", id=lid) from None

    def chord(self, cid: int) -> ReebChord:
        try:
            return self.chords[cid]
        except KeyError:
            raise UnknownObject(f"no chord {cid}", kind="chord", id=cid) from None

    def with_legs(self, *legs: Legendrian) -> Presentation:
        new = dict(self.legendrians)
        for leg in legs:
            new[leg.id] = leg
        return self.evolve(legendrians=new)

    def with_chords(self, *chords: ReebChord) -> Presentation:
        new = dict(self.chords)
        for c in chords:
            new[c.id] = c
        return self.evolve(chords=new)

    def chords_from(self, source: int, target: int | None = None) -> list[ReebChord]:
        out = [c for c in self.chords.values() if c.source == source and (target is None or c.target == target)]
        return sorted(out, key=lambda c: c.order_key)

    def legs_through(self, hid: int) -> list[int]:
        return sorted(l.id for l in self.legendrians.values() if l.passes(hid) > 0)

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "carve_schema": SCHEMA_VERSION,
            "ambient_dim": self.ambient_dim,
            "handles": [self.handles[k].to_dict() for k in sorted(self.handles)],
            "legendrians": [self.legendrians[k].to_dict() for k in sorted(self.legendrians)],
            "chords": [self.chords[k].to_dict() for k in sorted(self.chords)],
            "linking_notes": [n.to_dict() for n in self.linking_notes],
            "regions": {k: self.regions[k].to_dict() for k in sorted(self.regions)},
            "next_id": self.next_id,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> Presentation:
        from .morse import MorseRegionSpec

        check_schema(doc)
        handles = {h.id: h for h in map(Handle.from_dict, doc.get("handles", []))}
        legs = {l.id: l for l in map(Legendrian.from_dict, doc.get("legendrians", []))}
        chords = {c.id: c for c in map(ReebChord.from_dict, doc.get("chords", []))}
        if len(handles) != len(doc.get("handles", [])) or len(legs) != len(doc.get("legendrians", [])) \
                or len(chords) != len(doc.get("chords", [])):
            raise CarveError("duplicate id in presentation document")
        p = cls(
            ambient_dim=int(doc["ambient_dim"]),
            handles=handles,
            legendrians=legs,
            chords=chords,
            linking_notes=tuple(LinkingNote.from_dict(n) for n in doc.get("linking_notes", [])),
            regions={k: MorseRegionSpec.from_dict(v) for k, v in doc.get("regions", {}).items()},
        )
        next_id = doc.get("next_id")
        return p.evolve(next_id=int(next_id) if next_id is not None else p.fresh_ids(0)[1])

    # identity ------------------------------------------------------------

    @cached_property
    def _canonical(self) -> str:
        return _canonical_json(self)

    def digest(self) -> str:
        return digest(self)


def check_schema(doc: Mapping[str, Any]) -> None:
    from .errors import SchemaVersion

    version = doc.get("carve_schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaVersion(f"unsupported carve_schema {version!r}", supported=[SCHEMA_VERSION])


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def serialize(p: Presentation) -> str:
    return dumps(p.to_dict())


def deserialize(text: str) -> Presentation:
    return Presentation.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Validation


def validate(p: Presentation) -> list[Violation]:
    """Every invariant violation in ``p``; an empty list means valid."""
    out: list[Violation] = []

    def bad(code: str, msg: str) -> None:
        out.append(Violation(code, msg))

    n = p.n
    if p.ambient_dim % 2 or p.ambient_dim < 6:
        bad("AmbientDimension", f"ambient_dim {p.ambient_dim} is not an even integer >= 6")

    for hid, h in p.handles.items():
        if hid != h.id:
            bad("IdMismatch", f"handle key {hid} holds id {h.id}")
        if not 0 <= h.index <= n:
            bad("HandleIndexRange", f"handle {h.id} has index {h.index} outside [0, {n}]")
        if (h.kind is HandleKind.CRITICAL) != (h.index == n):
            bad("HandleKindMismatch", f"handle {h.id} of index {h.index} is marked {h.kind.value}")
        if h.flexible and h.kind is not HandleKind.CRITICAL:
            bad("FlexibleSubcritical", f"handle {h.id} is flexible but not critical")

    attached: dict[int, list[int]] = {}
    for lid, leg in p.legendrians.items():
        if lid != leg.id:
            bad("IdMismatch", f"Legendrian key {lid} holds id {leg.id}")
        if leg.dim < 1:
            bad("LegendrianDimension", f"Legendrian {leg.id} has dim {leg.dim}")
        if leg.coefficient is Coefficient.PLUS1 and leg.role is not Role.CARVE_PLUS:
            bad("PlusCoefficientRole", f"Legendrian {leg.id} has coefficient Plus1 but role {leg.role.value}")
        if leg.topo.kind not in ("Sphere", "Disk", "ConnectSumOfUnknots") or leg.topo.components < 1:
            bad("TopoType", f"Legendrian {leg.id} has topo type {leg.topo}")
        for hid, count in leg.handle_passes:
            h = p.handles.get(hid)
            if h is None:
                bad("UnknownPassHandle", f"Legendrian {leg.id} passes missing handle {hid}")
            elif h.kind is not HandleKind.SUBCRITICAL:
                bad("PassThroughCritical", f"Legendrian {leg.id} passes critical handle {hid}")
            if count < 1:
                bad("NonPositivePassCount", f"Legendrian {leg.id} passes handle {hid} {count} times")
        if leg.handle is not None:
            h = p.handles.get(leg.handle)
            if h is None:
                bad("UnknownBoundHandle", f"Legendrian {leg.id} attaches missing handle {leg.handle}")
            elif h.kind is not HandleKind.CRITICAL:
                bad("BoundToSubcritical", f"Legendrian {leg.id} attaches subcritical handle {h.id}")
            else:
                if leg.dim != n - 1:
                    bad("AttachingDimension", f"attaching sphere {leg.id} has dim {leg.dim}, expected {n - 1}")
                if leg.role is Role.ATTACHING and leg.coefficient is Coefficient.MINUS1:
                    attached.setdefault(h.id, []).append(leg.id)
        for dec in leg.decorations:
            if isinstance(dec, Boat):
                if not 0 <= dec.k <= dec.m:
                    bad("BoatRange", f"Legendrian {leg.id} carries Boat({dec.m},{dec.k})")
                if dec.m != leg.dim:
                    bad("BoatDimension", f"Legendrian {leg.id} of dim {leg.dim} carries Boat({dec.m},{dec.k})")
            elif isinstance(dec, LooseChart) and dec.count < 1:
                bad("LooseChartCount", f"Legendrian {leg.id} carries LooseChart({dec.count})")

    for h in p.handles.values():
        if h.kind is HandleKind.CRITICAL and len(attached.get(h.id, [])) != 1:
            bad("CriticalHandleAttachment",
                f"critical handle {h.id} has {len(attached.get(h.id, []))} attaching Minus1 Legendrians")

    for cid, c in p.chords.items():
        if cid != c.id:
            bad("IdMismatch", f"chord key {cid} holds id {c.id}")
        src = p.legendrians.get(c.source)
        if src is None or c.target not in p.legendrians:
            bad("DanglingChordEndpoint", f"chord {c.id} references a missing Legendrian")
        if c.length <= 0:
            bad("NonPositiveLength", f"chord {c.id} has length {c.length}")
        if c.degenerate:
            if c.local_index is not None:
                bad("DegenerateIndex", f"degenerate chord {c.id} carries a local index")
        elif c.local_index is None:
            bad("MissingIndex", f"nondegenerate chord {c.id} has no local index")
        elif src is not None and not 0 <= c.local_index <= src.dim:
            bad("ChordIndexRange", f"chord {c.id} has local index {c.local_index} outside [0, {src.dim}]")

    for name, spec in p.regions.items():
        for v in spec.violations():
            bad(v.code, f"region {name}: {v.message}")

    ids = [*p.handles, *p.legendrians, *p.chords]
    if ids and p.next_id <= max(ids):
        bad("StaleIdCounter", f"next_id {p.next_id} does not exceed every live id")
    return out


# ---------------------------------------------------------------------------
# Canonical form


class _Graph:
    """Labelled graph over handles and Legendrians used for canonical ordering."""

    def __init__(self, p: Presentation) -> None:
        self.p = p
        self.nodes: list[tuple[str, int]] = [("h", k) for k in sorted(p.handles)] + [
            ("l", k) for k in sorted(p.legendrians)
        ]
        self.pos = {v: i for i, v in enumerate(self.nodes)}
        self.adj: list[list[tuple[Any, int]]] = [[] for _ in self.nodes]
        base: list[str] = []
        notes_by_leg: dict[int, list[Any]] = {}
        for note in p.linking_notes:
            dead = [i for i, l in enumerate(note.legendrians) if l not in p.legendrians]
            for i, l in enumerate(note.legendrians):
                if l in p.legendrians:
                    notes_by_leg.setdefault(l, []).append([note.text, i, len(note.legendrians), dead])
                    for j, other in enumerate(note.legendrians):
                        if j != i and other in p.legendrians:
                            self._edge(("l", l), f"note:{j}:{note.text}", ("l", other))
        dangling_by_leg: dict[int, list[str]] = {}
        for c in p.chords.values():
            src, dst = c.source in p.legendrians, c.target in p.legendrians
            if src and not dst:
                dangling_by_leg.setdefault(c.source, []).append(c.shape + ":out")
            if dst and not src:
                dangling_by_leg.setdefault(c.target, []).append(c.shape + ":in")
        for kind, k in self.nodes:
            if kind == "h":
                h = p.handles[k]
                base.append(repr(("h", h.index, h.kind.value, h.flexible)))
                continue
            leg = p.legendrians[k]
            dangling = sorted(dangling_by_leg.get(k, []))
            base.append(repr((
                "l", leg.shape,
                [d.handle in p.handles for d in leg.decorations if isinstance(d, CuspPassedOverHandle)],
                leg.handle is not None and leg.handle not in p.handles,
                sorted(notes_by_leg.get(k, []), key=repr),
                dangling,
            )))
            if leg.handle in p.handles:
                self._edge(("l", k), "bound", ("h", leg.handle), "bound_by")
            for hid, count in leg.handle_passes:
                if hid in p.handles:
                    self._edge(("l", k), f"pass:{count}", ("h", hid), f"passed_by:{count}")
            for i, dec in enumerate(leg.decorations):
                if isinstance(dec, CuspPassedOverHandle) and dec.handle in p.handles:
                    self._edge(("l", k), f"dec:{i}", ("h", dec.handle), f"dec_by:{i}")
        groups: dict[str, list[int]] = {}
        for leg in p.legendrians.values():
            if leg.parallel_group is not None:
                groups.setdefault(leg.parallel_group, []).append(leg.id)
        for members in groups.values():
            for a in members:
                for b in members:
                    if a != b:
                        self._edge(("l", a), "grp", ("l", b))
        for c in p.chords.values():
            if c.source in p.legendrians and c.target in p.legendrians:
                shape = c.shape
                self._edge(("l", c.source), "out:" + shape, ("l", c.target), "in:" + shape)
        self.base = base
        # Labels only matter up to their sorted order; comparing small ints
        # keeps refinement cheap.
        labels = {lab: i for i, lab in enumerate(sorted({lab for row in self.adj for lab, _ in row}))}
        self.adj = [[(labels[lab], u) for lab, u in row] for row in self.adj]

    def _edge(self, a: tuple[str, int], label: str, b: tuple[str, int], back: str | None = None) -> None:
        self.adj[self.pos[a]].append((label, self.pos[b]))
        if back is not None:
            self.adj[self.pos[b]].append((back, self.pos[a]))

    def refine(self, colors: list[int]) -> list[int]:
        while True:
            sigs = [
                (colors[v], tuple(sorted((lab, colors[u]) for lab, u in self.adj[v])))
                for v in range(len(self.nodes))
            ]
            ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
            new = [ranks[s] for s in sigs]
            if len(ranks) == len(set(colors)):
                return new
            colors = new

    def initial_colors(self) -> list[int]:
        ranks = {s: i for i, s in enumerate(sorted(set(self.base)))}
        return [ranks[s] for s in self.base]


def _render(p: Presentation, hmap: dict[int, int], lmap: dict[int, int]) -> str:
    handles = [
        {**p.handles[old].to_dict(), "id": new}
        for old, new in sorted(hmap.items(), key=lambda kv: kv[1])
    ]
    groups: dict[str, str] = {}
    legs = []
    for old, new in sorted(lmap.items(), key=lambda kv: kv[1]):
        leg = p.legendrians[old]
        legs.append({
            "id": new,
            "dim": leg.dim,
            "role": leg.role.value,
            "coefficient": leg.coefficient.value,
            "topo": leg.topo.to_dict(),
            "decorations": [
                {"type": "CuspPassedOverHandle", "handle": hmap.get(dec.handle)}
                if isinstance(dec, CuspPassedOverHandle) else dec.to_dict()
                for dec in leg.decorations
            ],
            "handle_passes": sorted([hmap[h], c] for h, c in leg.handle_passes if h in hmap),
            "parallel_group": None if leg.parallel_group is None
            else groups.setdefault(leg.parallel_group, f"g{len(groups)}"),
            "handle": hmap.get(leg.handle) if leg.handle is not None else None,
            "name": leg.name,
        })
    def chord_key(c: ReebChord) -> tuple[int, int, str]:
        src, dst = lmap.get(c.source), lmap.get(c.target)
        return (-1 if src is None else src, -1 if dst is None else dst, c.shape)

    chord_docs = []
    for i, c in enumerate(sorted(p.chords.values(), key=chord_key)):
        chord_docs.append({**c.body, "id": i, "from": lmap.get(c.source), "to": lmap.get(c.target)})
    notes = sorted(
        ({"legendrians": [lmap.get(l) for l in n.legendrians], "text": n.text} for n in p.linking_notes),
        key=dumps,
    )
    return dumps({
        "carve_schema": SCHEMA_VERSION,
        "ambient_dim": p.ambient_dim,
        "handles": handles,
        "legendrians": legs,
        "chords": chord_docs,
        "linking_notes": notes,
        "regions": {k: p.regions[k].to_dict() for k in sorted(p.regions)},
    })


def _canonical_json(p: Presentation) -> str:
    g = _Graph(p)

    def search(colors: list[int]) -> str:
        colors = g.refine(colors)
        classes: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            classes.setdefault(c, []).append(v)
        ties = [c for c, members in classes.items() if len(members) > 1]
        if not ties:
            hmap, lmap = {}, {}
            for v in sorted(range(len(colors)), key=colors.__getitem__):
                kind, k = g.nodes[v]
                target = hmap if kind == "h" else lmap
                target[k] = len(target)
            return _render(p, hmap, lmap)
        cell = min(ties)
        best: str | None = None
        for v in classes[cell]:
            trial = [2 * c + 1 for c in colors]
            trial[v] -= 1
            out = search(trial)
            if best is None or out < best:
                best = out
        assert best is not None
        return best

    return search(g.initial_colors())


def canonical_json(p: Presentation) -> str:
    """Canonical JSON text of ``p`` with ids renumbered structurally."""
    return p._canonical


def canonical_doc(p: Presentation) -> dict[str, Any]:
    return json.loads(canonical_json(p))


def digest(p: Presentation) -> str:
    """64-bit content digest (16 hex chars) of the canonical form."""
    return hashlib.blake2b(canonical_json(p).encode("utf-8"), digest_size=8).hexdigest()


def structural_equal(a: Presentation, b: Presentation) -> bool:
    return canonical_json(a) == canonical_json(b)


def relabel(
    p: Presentation,
    handles: Mapping[int, int] | None = None,
    legendrians: Mapping[int, int] | None = None,
    chords: Mapping[int, int] | None = None,
) -> Presentation:
    """Rename ids; unmapped ids are left as they are."""
    hm = dict(handles or {})
    lm = dict(legendrians or {})
    cm = dict(chords or {})

    def H(i: int) -> int:
        return hm.get(i, i)

    def L(i: int) -> int:
        return lm.get(i, i)

    new_handles = {H(k): replace(h, id=H(k)) for k, h in p.handles.items()}
    new_legs = {}
    for k, leg in p.legendrians.items():
        decs = tuple(
            CuspPassedOverHandle(H(d.handle)) if isinstance(d, CuspPassedOverHandle) else d
            for d in leg.decorations
        )
        new_legs[L(k)] = replace(
            leg,
            id=L(k),
            handle=None if leg.handle is None else H(leg.handle),
            handle_passes=tuple((H(h), c) for h, c in leg.handle_passes),
            decorations=decs,
        )
    new_chords = {
        cm.get(k, k): replace(c, id=cm.get(k, k), source=L(c.source), target=L(c.target))
        for k, c in p.chords.items()
    }
    notes = tuple(LinkingNote(tuple(L(i) for i in n.legendrians), n.text) for n in p.linking_notes)
    top = max([*new_handles, *new_legs, *new_chords, p.next_id - 1]) + 1
    return p.evolve(handles=new_handles, legendrians=new_legs, chords=new_chords,
                    linking_notes=notes, next_id=top)
