"""Constructing diagrams: braid closures and Conway's rational/Montesinos notation.

Tangles are built unoriented first.  An unoriented crossing is a
counterclockwise 4-tuple of edge labels whose positions 0 and 2 carry the
under-strand; orientation is chosen at the end by walking each component.
Four-ended tangles list their ends counterclockwise as (NW, SW, SE, NE).
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .diagram import DiagramError, TangleDiagram
from .linalg import smith_diagonal
from .planar import DisjointSet


def orient(crossings: Sequence[Sequence[int]], boundary: Sequence[int] = (), loops: int = 0) -> TangleDiagram:
    """Choose an orientation for unoriented crossing data and return the diagram."""
    crossings = [tuple(c) for c in crossings]
    slots_of: dict[int, list] = {}
    for c, X in enumerate(crossings):
        for p, lab in enumerate(X):
            slots_of.setdefault(lab, []).append((c, p))
    for p, lab in enumerate(boundary):
        slots_of.setdefault(lab, []).append((-1, p))
    mate = {}
    for lab, sl in slots_of.items():
        if len(sl) != 2:
            raise DiagramError(f"edge {lab} has {len(sl)} ends")
        mate[sl[0]], mate[sl[1]] = sl[1], sl[0]
    head: dict = {}

    def walk(s):
        # s is a slot the strand leaves from
        while s not in head:
            head[s] = False
            m = mate[s]
            head[m] = True
            if m[0] < 0:
                return
            s = (m[0], (m[1] + 2) % 4)

    # open strands start at boundary points, preferring the base point
    for p in range(len(boundary)):
        if (-1, p) not in head:
            walk((-1, p))
    for c in range(len(crossings)):
        for p in (0, 1):
            if (c, p) not in head:
                walk((c, p))
    xs, signs = [], []
    for c, X in enumerate(crossings):
        r = 0 if head[(c, 0)] else 2
        Y = X[r:] + X[:r]
        xs.append(Y)
        signs.append(1 if head[(c, (3 + r) % 4)] else -1)
    return TangleDiagram(tuple(xs), tuple(signs), tuple(boundary), loops).relabeled()


def braid_closure(word: Sequence[int], strands: int | None = None) -> TangleDiagram:
    """Closure of a braid word; ``i`` is a positive crossing of strands i, i+1."""
    if strands is None:
        strands = max((abs(g) for g in word), default=0) + 1
    counter = itertools.count(1)
    init = [next(counter) for _ in range(strands)]
    cur = list(init)
    xs = []
    signs = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        a, b = cur[i], cur[i + 1]
        c, d = next(counter), next(counter)
        # strands run east, position i above position i+1: ccw order c, a, b, d
        if g > 0:
            xs.append((b, d, c, a))
            signs.append(1)
        else:
            xs.append((a, b, d, c))
            signs.append(-1)
        cur[i], cur[i + 1] = c, d
    ren = {}
    loops = 0
    for s, e in zip(init, cur):
        if s == e:
            loops += 1
        ren[e] = s
    xs = [tuple(ren.get(x, x) for x in X) for X in xs]
    return TangleDiagram(tuple(xs), tuple(signs), (), loops).relabeled()


def braid_tangle(word: Sequence[int], strands: int | None = None) -> TangleDiagram:
    """A braid as an open tangle: left ends top to bottom, then right ends bottom to top."""
    if strands is None:
        strands = max((abs(g) for g in word), default=0) + 1
    counter = itertools.count(1)
    init = [next(counter) for _ in range(strands)]
    cur = list(init)
    xs, signs = [], []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        a, b = cur[i], cur[i + 1]
        c, d = next(counter), next(counter)
        if g > 0:
            xs.append((b, d, c, a))
            signs.append(1)
        else:
            xs.append((a, b, d, c))
            signs.append(-1)
        cur[i], cur[i + 1] = c, d
    boundary = tuple(init) + tuple(reversed(cur))
    return TangleDiagram(tuple(xs), tuple(signs), boundary, 0).relabeled()


@dataclass(frozen=True)
class Tangle4:
    """An unoriented four-ended tangle."""

    crossings: tuple[tuple[int, int, int, int], ...]
    ends: tuple[int, int, int, int]  # NW, SW, SE, NE

    def _shift(self, k: int) -> Tangle4:
        f = lambda x: x + k
        return Tangle4(tuple(tuple(map(f, X)) for X in self.crossings), tuple(map(f, self.ends)))

    def _max(self) -> int:
        return max([*self.ends, *(x for X in self.crossings for x in X)])

    def reflect(self) -> Tangle4:
        """Planar reflection in the NW-SE diagonal (over/under kept)."""
        xs = tuple((a, d, c, b) for a, b, c, d in self.crossings)
        nw, sw, se, ne = self.ends
        return Tangle4(xs, (nw, ne, se, sw))

    def mirror(self) -> Tangle4:
        """Exchange over and under at every crossing."""
        return Tangle4(tuple((b, c, d, a) for a, b, c, d in self.crossings), self.ends)

    def __add__(self, other: Tangle4) -> Tangle4:
        o = other._shift(self._max())
        nw, sw, se, ne = self.ends
        onw, osw, ose, one = o.ends
        ren = {onw: ne, osw: se}
        xs = self.crossings + tuple(tuple(ren.get(x, x) for x in X) for X in o.crossings)
        return Tangle4(xs, (nw, sw, ose, one))

    def numerator(self) -> TangleDiagram:
        nw, sw, se, ne = self.ends
        ren = {ne: nw, se: sw}
        xs = [tuple(ren.get(x, x) for x in X) for X in self.crossings]
        used = {x for X in xs for x in X}
        loops = sum(1 for lab in {nw, sw} if lab not in used)
        return orient(xs, (), loops)

    def denominator(self) -> TangleDiagram:
        return self.reflect().numerator()

    def as_tangle(self) -> TangleDiagram:
        return orient(self.crossings, self.ends)


def twist(n: int) -> Tangle4:
    """The horizontal twist tangle [n]."""
    if n == 0:
        raise ValueError("use reflect() of a twist for the zero tangle")
    one = Tangle4(((1, 2, 3, 4),), (1, 2, 3, 4))
    t = one
    for _ in range(abs(n) - 1):
        t = t + one
    return t if n > 0 else t.mirror()


def rational(seq: Sequence[int]) -> Tangle4:
    """Conway's rational tangle ``a1 a2 ... an`` = ((a1 a2) a3) ... with T a = reflect(T) + [a]."""
    t = twist(seq[0])
    for a in seq[1:]:
        t = t.reflect() + twist(a)
    return t


def continued_fraction(seq: Sequence[int]) -> Fraction:
    f = Fraction(seq[0])
    for a in seq[1:]:
        f = a + 1 / f
    return f


def parse_conway(text: str) -> TangleDiagram:
    """Numerator closure of a Conway word such as ``2 2``, ``3,21,2`` or ``3,3,2-``.

    Comma separated parts are rational tangles (digits are the entries) turned
    vertical and added; a trailing ``-`` negates the last part.
    """
    parts = [p.strip() for p in text.split(",")]
    tangles = []
    for p in parts:
        neg = p.endswith("-")
        p = p.rstrip("-").strip()
        entries = [int(x) for x in (p.split() if " " in p else list(p))]
        t = rational(entries)
        if neg:
            t = t.mirror()
        tangles.append(t)
    if len(tangles) == 1:
        return tangles[0].numerator()
    total = tangles[0].reflect()
    for t in tangles[1:]:
        total = total + t.reflect()
    return total.numerator()


def coloring_determinant(T: TangleDiagram) -> int:
    """Order of the torsion of the Fox coloring module, 0 when it has rank above
    one.  This is |det| for knots and an independent oracle for links."""
    if T.boundary:
        raise ValueError("determinant needs a closed diagram")
    if not T.crossings:
        return 1 if T.loops == 1 else 0
    if T.loops:
        return 0
    ds = DisjointSet(T.edges)
    for X in T.crossings:
        ds.union(X[1], X[3])
    idx = {a: i for i, a in enumerate(sorted({ds.find(e) for e in T.edges}))}
    rows = []
    for X in T.crossings:
        r = [0] * len(idx)
        r[idx[ds.find(X[1])]] += 2
        r[idx[ds.find(X[0])]] -= 1
        r[idx[ds.find(X[2])]] -= 1
        rows.append(r)
    diag = smith_diagonal(rows)
    if len(diag) < len(idx) - 1:
        return 0
    out = 1
    for d in diag:
        out *= d
    return out


def is_alternating(T: TangleDiagram) -> bool:
    """Over and under alternate along every strand."""
    for c, X in enumerate(T.crossings):
        for p in range(4):
            m = T.mate((c, p))
            if m[0] >= 0 and (p % 2) == (m[1] % 2):
                return False
    return True


def link_components(T: TangleDiagram) -> int:
    """Number of link components (free loops included)."""
    ds = DisjointSet(T.edges)
    for X in T.crossings:
        ds.union(X[0], X[2])
        ds.union(X[1], X[3])
    return len({ds.find(e) for e in T.edges}) + T.loops
