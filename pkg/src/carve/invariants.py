"""Cross-cutting checkers: handle census, looseness certificates, gradings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .diagram import (
    CuspConnectSum,
    CuspStyle,
    HandleKind,
    LooseChart,
    Presentation,
    Violation,
)
from .morse import disconnect_check

if TYPE_CHECKING:
    from .trace import MoveTrace


@dataclass(frozen=True)
class HandleCensus:
    counts: dict[int, int]

    @property
    def euler(self) -> int:
        return sum((-1) ** i * c for i, c in self.counts.items())

    def delta(self, other: HandleCensus) -> dict[int, int]:
        """``other - self`` per index, zero entries dropped."""
        keys = set(self.counts) | set(other.counts)
        out = {i: other.counts.get(i, 0) - self.counts.get(i, 0) for i in sorted(keys)}
        return {i: d for i, d in out.items() if d}


def census(p: Presentation) -> HandleCensus:
    counts: dict[int, int] = {}
    for h in p.handles.values():
        counts[h.index] = counts.get(h.index, 0) + 1
    return HandleCensus(dict(sorted(counts.items())))


@dataclass(frozen=True)
class Verdict:
    """``Loose(reason)`` or ``Unknown``; there is deliberately no "not loose"."""

    reason: str | None = None

    @property
    def loose(self) -> bool:
        return self.reason is not None

    def __str__(self) -> str:
        return f"Loose({self.reason})" if self.reason else "Unknown"


UNKNOWN = Verdict()


def _site_parts(site: str) -> tuple[str, str] | None:
    parts = site.split("/")
    if len(parts) < 3:
        return None
    return parts[0], parts[1]


def _split_disk_last(p: Presentation, lid: int) -> bool:
    leg = p.leg(lid)
    sums = [d for d in leg.decorations
            if isinstance(d, CuspConnectSum) and d.style is CuspStyle.CUSP_RING and _site_parts(d.site)]
    if not sums:
        return False
    region_name, comp_name = _site_parts(sums[-1].site)  # type: ignore[misc]
    spec = p.regions.get(region_name)
    if spec is None or not disconnect_check(spec):
        return False
    comp = next((c for c in spec.components if c.name == comp_name), None)
    if comp is None or not comp.is_disk:
        return False
    prefix = region_name + "/"
    return not any(c.source == lid and c.site.startswith(prefix) for c in p.chords.values())


def _cancelling_handle(p: Presentation, lid: int) -> int | None:
    leg = p.leg(lid)
    for hid, count in leg.handle_passes:
        h = p.handles.get(hid)
        if (count == 1 and h is not None and h.kind is HandleKind.SUBCRITICAL
                and h.index == p.n - 1 and p.legs_through(hid) == [lid]):
            return hid
    return None


def detect_loose(p: Presentation, lid: int) -> Verdict:
    """Syntactic looseness certificates.

    L1: a loose chart decoration (a chart materialized from another rule
    reports that rule).  L2: the last chord consumed came from the disk
    component of a disconnected region, after every other chord of that
    region.  L3: a single pass through an (n-1)-handle no other Legendrian
    uses, i.e. cancelling position.
    """
    leg = p.leg(lid)
    for dec in leg.decorations:
        if isinstance(dec, LooseChart):
            return Verdict(dec.origin or "L1")
    if _split_disk_last(p, lid):
        return Verdict("L2")
    if _cancelling_handle(p, lid) is not None:
        return Verdict("L3")
    return UNKNOWN


@dataclass
class GradingLedger:
    gradings: dict[int, int]
    # Reserved: no formula for the cusp correction is known, so this stays empty.
    correction_terms: list[tuple[object, int]] = field(default_factory=list)

    @classmethod
    def of(cls, p: Presentation) -> GradingLedger:
        return cls({cid: c.grading for cid, c in p.chords.items()})


def grading_violations(pre: Presentation, post: Presentation, step: int | None = None) -> list[Violation]:
    where = "" if step is None else f"step {step}: "
    out = []
    before = GradingLedger.of(pre).gradings
    for cid, g in GradingLedger.of(post).gradings.items():
        if cid in before and before[cid] != g:
            out.append(Violation("GradingChanged", f"{where}chord {cid} grading {before[cid]} -> {g}"))
    for c in post.chords.values():
        if c.local_index is None or c.source not in post.legendrians:
            continue
        m = post.legendrians[c.source].dim
        dual = c.dual_index(m)
        if dual is None or not 0 <= dual <= m or c.local_index + dual != m:
            out.append(Violation("IndexDuality", f"{where}chord {c.id} index {c.local_index} on dim {m}"))
    return out


def check_grading(trace: MoveTrace) -> list[Violation]:
    """Replay ``trace`` and report every surviving chord whose stored grading
    changed across a step.  Raises ReplayMismatch if the replay diverges."""
    from .trace import replay_states

    out: list[Violation] = []
    states = replay_states(trace)
    prev = next(states)
    for i, state in enumerate(states):
        out.extend(grading_violations(prev, state, i))
        prev = state
    return out
