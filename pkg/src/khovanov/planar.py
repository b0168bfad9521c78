"""Planar arc diagrams and the wiring shared by tangles, smoothings and cobordisms."""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass


class DisjointSet:
    """Union-find with path halving."""

    __slots__ = ("parent",)

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {x: x for x in items}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        parent = self.parent
        if x not in parent:
            parent[x] = x
            return x
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if type(ra) is type(rb) and rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra
        return ra

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class PlanarArcDiagram:
    """A disk with holes; integer labels name the arcs joining boundary points.

    ``holes[i]`` lists the labels met going counterclockwise around hole ``i``
    from its base point, ``boundary`` does the same for the output circle.
    Every label occurs exactly twice in total.
    """

    holes: tuple[tuple[int, ...], ...]
    boundary: tuple[int, ...] = ()
    loops: int = 0

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(tuple(h) for h in self.holes))
        object.__setattr__(self, "boundary", tuple(self.boundary))
        counts = Counter(self.boundary)
        for h in self.holes:
            counts.update(h)
        bad = sorted(k for k, v in counts.items() if v != 2)
        if bad:
            raise ValueError(f"arc labels must occur exactly twice; offending labels {bad}")
        if self.loops < 0:
            raise ValueError("loop count must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.holes)

    @classmethod
    def radial(cls, n: int) -> PlanarArcDiagram:
        """The identity diagram: one hole wired straight to the output circle."""
        labels = tuple(range(1, n + 1))
        return cls(holes=(labels,), boundary=labels)

    def slots(self) -> dict[int, list[tuple[int, int]]]:
        """label -> its two slots; a slot is ``(hole, position)`` and hole -1 is the output."""
        out: dict[int, list[tuple[int, int]]] = {}
        for i, h in enumerate(self.holes):
            for p, lab in enumerate(h):
                out.setdefault(lab, []).append((i, p))
        for p, lab in enumerate(self.boundary):
            out.setdefault(lab, []).append((-1, p))
        return out


@dataclass
class Wiring:
    """Result of gluing crossingless pieces into the holes of a diagram."""

    arcs: tuple[tuple[int, int], ...]
    circle_classes: list[frozenset[int]]
    label_root: dict[int, int]
    output_root: list[int]


def wire(D: PlanarArcDiagram, pairings: Sequence[Iterable[tuple[int, int]]]) -> Wiring:
    """Glue a perfect matching into each hole and trace the resulting curves.

    Returns the arcs of the composite on the output points, the label sets of
    the closed curves passing through D's arcs, and a root for every label.
    """
    if len(pairings) != len(D.holes):
        raise ValueError(f"diagram has {len(D.holes)} holes but {len(pairings)} inputs were given")
    ds = DisjointSet()
    for h in D.holes:
        for lab in h:
            ds.add(lab)
    for lab in D.boundary:
        ds.add(lab)
    for i, (h, pairs) in enumerate(zip(D.holes, pairings)):
        for a, b in pairs:
            ds.union(h[a], h[b])
    by_root: dict[int, list[int]] = {}
    for p, lab in enumerate(D.boundary):
        by_root.setdefault(ds.find(lab), []).append(p)
    arcs = []
    for pts in by_root.values():
        if len(pts) != 2:
            raise ValueError("wiring produced a non-matching on the output circle")
        arcs.append((min(pts), max(pts)))
    arcs.sort()
    groups = ds.groups()
    circles = [frozenset(g) for r, g in groups.items() if r not in by_root]
    circles.sort(key=min)
    label_root = {lab: ds.find(lab) for lab in ds.parent}
    output_root = [ds.find(lab) for lab in D.boundary]
    return Wiring(tuple(arcs), circles, label_root, output_root)


def mixed_curves(top_arcs: Sequence[tuple[int, int]], bottom_arcs: Sequence[tuple[int, int]]) -> dict[int, int]:
    """Map each boundary point to the least point on its top-arc/bottom-arc cycle."""
    ds = DisjointSet(range(2 * len(top_arcs)))
    for a, b in top_arcs:
        ds.union(a, b)
    for a, b in bottom_arcs:
        ds.union(a, b)
    return {p: ds.find(p) for p in range(2 * len(top_arcs))}


def is_noncrossing(arcs: Iterable[tuple[int, int]]) -> bool:
    arcs = [tuple(sorted(a)) for a in arcs]
    for a, b in arcs:
        for c, d in arcs:
            if a < c < b < d:
                return False
    return True


def noncrossing_matchings(n: int) -> list[tuple[tuple[int, int], ...]]:
    """All noncrossing perfect matchings of points ``0..n-1`` (n even)."""
    if n % 2:
        return []

    def rec(pts: tuple[int, ...]) -> list[list[tuple[int, int]]]:
        if not pts:
            return [[]]
        out = []
        first = pts[0]
        for k in range(1, len(pts), 2):
            inner, outer = pts[1:k], pts[k + 1 :]
            for a in rec(inner):
                for b in rec(outer):
                    out.append([(first, pts[k])] + a + b)
        return out

    return [tuple(sorted(m)) for m in rec(tuple(range(n)))]
