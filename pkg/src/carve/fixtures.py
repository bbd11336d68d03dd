"""Built-in example presentations and hand-encoded expected results.

Every input fixture has the same skeleton: a 0-handle, one critical handle
attached along ``lambda``, and the unknot ``lambda_plus`` whose carved
disk meets ``lambda`` in a region U.  The two Legendrians form the
parallel group ``E``.  The fixtures differ only in U.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Callable

from .diagram import (
    Coefficient,
    CuspConnectSum,
    CuspPassedOverHandle,
    CuspStyle,
    Handle,
    HandleKind,
    Legendrian,
    LinkingNote,
    Presentation,
    Role,
    connect_sum_of_unknots,
)
from .morse import MooreSpaceSpec, MorseRegionSpec, disk, region, sphere_neighborhood, with_region_chords

GROUP = "E"
ZERO, H, LAMBDA, LAMBDA_PLUS = 0, 1, 2, 3


def skeleton(n: int = 3) -> Presentation:
    lam = Legendrian(LAMBDA, n - 1, Role.ATTACHING, Coefficient.MINUS1, parallel_group=GROUP,
                     handle=H, name="lambda")
    plus = Legendrian(LAMBDA_PLUS, n - 1, Role.CARVE_PLUS, Coefficient.PLUS1, parallel_group=GROUP,
                      name="lambda_plus")
    return Presentation(
        ambient_dim=2 * n,
        handles={ZERO: Handle(ZERO, 0, HandleKind.SUBCRITICAL), H: Handle(H, n, HandleKind.CRITICAL)},
        legendrians={LAMBDA: lam, LAMBDA_PLUS: plus},
        next_id=4,
    )


def with_region(spec: MorseRegionSpec, n: int = 3, name: str = "U") -> Presentation:
    return with_region_chords(skeleton(n), spec, LAMBDA, LAMBDA_PLUS, name=name)


def ex1(n: int = 3) -> Presentation:
    """U is a disk: a single chord of index 0."""
    return with_region(region(n - 1, disk(n - 1)), n)


def ex2(n: int = 3) -> Presentation:
    """U is an annulus plus a separate disk; the disk's chord is the longest."""
    annulus = ("annulus", [(0, -3), (1, -2)])
    return with_region(region(n - 1, annulus, disk(n - 1, -1)), n)


def ex3(n: int = 3, k: int = 1) -> Presentation:
    """U is a neighbourhood of a k-sphere: chords of index 0 and k."""
    return with_region(region(n - 1, sphere_neighborhood(n - 1, k)), n)


def diagram_e(p: int, n: int = 5, name: str = "U") -> Presentation:
    """U is a Moore space for one entry p: chords of index 0, 1, 2."""
    spec = MooreSpaceSpec((p,)).region(p, n - 1)
    q = with_region(spec, n, name)
    return q.evolve(linking_notes=(LinkingNote((LAMBDA,), f"p = {p}"),))


def cor13(n: int = 5, p: int = 2) -> Presentation:
    return diagram_e(p, n)


# Hand-encoded expected results for the disk example.  Ids follow the
# allocation order of the pipeline (new handle 5, minus 6) but only the
# structure matters for comparisons.

_NEW_HANDLE = 5


def _ex1_lambda_after_slide(n: int) -> Legendrian:
    return Legendrian(
        LAMBDA, n - 1, Role.ATTACHING, Coefficient.MINUS1,
        topo=connect_sum_of_unknots(2),
        decorations=(CuspConnectSum("lambda_minus", CuspStyle.CUSP_RING, "U/disk/0"),),
        handle_passes=((_NEW_HANDLE, 2),),
        parallel_group=GROUP,
        handle=H,
        name="lambda",
    )


def ex1_result(n: int = 3) -> Presentation:
    """Disk example after carving: one extra (n-1)-handle, which ``lambda``
    crosses twice; no chords left."""
    return Presentation(
        ambient_dim=2 * n,
        handles={
            ZERO: Handle(ZERO, 0, HandleKind.SUBCRITICAL),
            H: Handle(H, n, HandleKind.CRITICAL),
            _NEW_HANDLE: Handle(_NEW_HANDLE, n - 1, HandleKind.SUBCRITICAL),
        },
        legendrians={LAMBDA: _ex1_lambda_after_slide(n)},
        regions={"U": region(n - 1, disk(n - 1))},
        next_id=7,
    )


def ex1_complement(n: int = 3) -> Presentation:
    """``ex1_result`` after the cusp ring is pushed across the new handle:
    the unknot sits in the complement of the (n-1)-handle."""
    base = ex1_result(n)
    lam = base.leg(LAMBDA)
    lam = lam.with_passes(_NEW_HANDLE, -2).decorated(CuspPassedOverHandle(_NEW_HANDLE))
    return base.with_legs(lam)


BUILDERS: dict[str, Callable[[], Presentation]] = {
    "ex1": ex1,
    "ex2": ex2,
    "ex3": ex3,
    "cor13": cor13,
    "ex1_result": ex1_result,
    "ex1_complement": ex1_complement,
}
INPUTS = ("ex1", "ex2", "ex3", "cor13")


def shipped(name: str) -> Presentation:
    """The JSON copy of a fixture that ships with the package."""
    if name not in BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(BUILDERS)}")
    text = resources.files("carve").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    return Presentation.from_dict(json.loads(text))


def notes() -> str:
    return resources.files("carve").joinpath("data", "fixtures.md").read_text(encoding="utf-8")
