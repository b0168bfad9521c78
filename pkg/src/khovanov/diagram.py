"""Tangle and link diagrams in PD notation, their gluing and Reidemeister rewrites.

Conventions
-----------
A crossing ``X[i,j,k,l]`` lists its four edge ends counterclockwise starting
from the incoming under-strand, so the under-strand runs ``i -> k``.  The
crossing is positive when the over-strand runs ``l -> j`` and negative when it
runs ``j -> l``.  The 0-smoothing joins ``(i,j)`` and ``(k,l)``; the
1-smoothing joins ``(i,l)`` and ``(j,k)``.

Edge ends are addressed by *slots*: ``(c, p)`` is position ``p`` of crossing
``c`` and ``(-1, p)`` is position ``p`` on the boundary circle.  A *dart* is
an edge traversed from one of its slots to the other and is named by its
starting slot.  Faces are traced keeping the face on the left.

PD grammar (one diagram per line, ``#`` starts a comment)::

    diagram := "PD[" [ item { "," item } ] "]"
    item    := xtag "[" int "," int "," int "," int "]"
             | "O[" int "]"                      (free unknotted loops)
             | "B[" bpt { "," bpt } "]"          (tangle boundary, counterclockwise)
    xtag    := "X" | "Xp" | "Xm"                 (Xp/Xm force the crossing sign)
    bpt     := [ "*" ] int                       ("*" marks the base point)
"""

from __future__ import annotations

import re
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

from .cob3 import compose_smoothings, elementary_smoothing
from .planar import DisjointSet, PlanarArcDiagram

Slot = tuple[int, int]


class PDSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class DiagramError(ValueError):
    """Invalid incidence, orientation or planarity data."""


@dataclass(frozen=True)
class TangleDiagram:
    crossings: tuple[tuple[int, int, int, int], ...] = ()
    signs: tuple[int, ...] = ()
    boundary: tuple[int, ...] = ()
    loops: int = 0

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(tuple(int(x) for x in c) for c in self.crossings))
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        object.__setattr__(self, "boundary", tuple(int(b) for b in self.boundary))
        if len(self.signs) != len(self.crossings):
            raise DiagramError("one sign per crossing is required")
        if any(len(c) != 4 for c in self.crossings):
            raise DiagramError("crossings have exactly four edge ends")
        if any(s not in (1, -1) for s in self.signs):
            raise DiagramError("signs must be +1 or -1")
        if self.loops < 0:
            raise DiagramError("loop count must be nonnegative")
        for lab, sl in self._slots_of.items():
            if len(sl) != 2:
                raise DiagramError(f"edge {lab} has {len(sl)} ends; every edge needs exactly two")
        self._check_orientation()
        self._check_planar()

    # -- incidence -------------------------------------------------------------

    @cached_property
    def _slots_of(self) -> dict[int, list[Slot]]:
        out: dict[int, list[Slot]] = {}
        for c, X in enumerate(self.crossings):
            for p, lab in enumerate(X):
                out.setdefault(lab, []).append((c, p))
        for p, lab in enumerate(self.boundary):
            out.setdefault(lab, []).append((-1, p))
        return out

    @cached_property
    def _mate(self) -> dict[Slot, Slot]:
        m = {}
        for a, b in self._slots_of.values():
            m[a], m[b] = b, a
        return m

    def label_at(self, s: Slot) -> int:
        c, p = s
        return self.boundary[p] if c < 0 else self.crossings[c][p]

    def mate(self, s: Slot) -> Slot:
        return self._mate[s]

    def slots(self) -> list[Slot]:
        out = [(c, p) for c in range(len(self.crossings)) for p in range(4)]
        return out + [(-1, p) for p in range(len(self.boundary))]

    @property
    def edges(self) -> list[int]:
        return sorted(self._slots_of)

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def is_link(self) -> bool:
        return not self.boundary

    def max_label(self) -> int:
        return max(self._slots_of, default=0)

    # -- orientation -----------------------------------------------------------

    @cached_property
    def heads(self) -> dict[Slot, bool]:
        """slot -> True when the edge arrives at this slot (flows into the crossing
        or out through the boundary)."""
        h: dict[Slot, bool] = {}
        for c, s in enumerate(self.signs):
            h[(c, 0)], h[(c, 2)] = True, False
            h[(c, 3)], h[(c, 1)] = s > 0, s < 0
        for p, lab in enumerate(self.boundary):
            m = self._mate[(-1, p)]
            if m[0] >= 0:
                h[(-1, p)] = not h[m]
            else:
                h[(-1, p)] = p > m[1]
        return h

    def _check_orientation(self) -> None:
        h = self.heads
        for lab, (a, b) in self._slots_of.items():
            if h[a] == h[b]:
                raise DiagramError(f"orientation clash along edge {lab}")

    # -- faces and planarity ----------------------------------------------------

    def next_dart(self, arrival: Slot) -> Slot:
        c, p = arrival
        if c >= 0:
            return (c, (p - 1) % 4)
        return (-1, (p + 1) % len(self.boundary))

    @cached_property
    def faces(self) -> list[tuple[Slot, ...]]:
        """Faces as cyclic lists of darts (starting slots), face on the left."""
        seen: set[Slot] = set()
        out = []
        for s in self.slots():
            if s in seen:
                continue
            face = []
            d = s
            while d not in seen:
                seen.add(d)
                face.append(d)
                d = self.next_dart(self._mate[d])
            if d != s:
                raise DiagramError("face tracing did not close up")
            out.append(tuple(face))
        return out

    def components(self) -> list[set[int]]:
        """Connected pieces of the 4-valent graph as sets of vertices (-1 = boundary)."""
        ds = DisjointSet()
        for c in range(self.n):
            ds.add(c)
        if self.boundary:
            ds.add(-1)
        for a, b in self._slots_of.values():
            ds.union(a[0], b[0])
        return [set(g) for g in ds.groups().values()]

    def _check_planar(self) -> None:
        nb = len(self.boundary)
        V = self.n + nb
        E = len(self._slots_of) + (nb if nb else 0)
        F = len(self.faces) + (1 if nb else 0)
        C = len(self.components())
        if V - E + F != 2 * C:
            raise DiagramError("incidence data admits no planar embedding with the given cyclic orders")

    # -- derived diagrams -------------------------------------------------------

    def arc_diagram(self) -> PlanarArcDiagram:
        """The arc diagram whose holes are the crossings of this diagram."""
        return PlanarArcDiagram(holes=self.crossings, boundary=self.boundary, loops=self.loops)

    def crossing_tangle(self, c: int) -> TangleDiagram:
        return TangleDiagram(((1, 2, 3, 4),), (self.signs[c],), (1, 2, 3, 4))

    def crossing_tangles(self) -> list[TangleDiagram]:
        return [self.crossing_tangle(c) for c in range(self.n)]

    def mirror(self) -> TangleDiagram:
        xs = []
        for X, s in zip(self.crossings, self.signs):
            i, j, k, l = X
            xs.append((l, i, j, k) if s > 0 else (j, k, l, i))
        return TangleDiagram(tuple(xs), tuple(-s for s in self.signs), self.boundary, self.loops)

    def relabeled(self) -> TangleDiagram:
        """Relabel edges 1, 2, ... consecutively along each oriented strand."""
        order: dict[int, int] = {}
        # start at boundary inflows first, then at crossings in order
        starts: list[Slot] = [(-1, p) for p in range(len(self.boundary)) if not self.heads[(-1, p)]]
        starts += [s for s in self.slots() if s[0] >= 0 and not self.heads[s]]
        for s in starts:
            d = s
            while True:
                lab = self.label_at(d)
                if lab in order:
                    break
                order[lab] = len(order) + 1
                arr = self._mate[d]
                if arr[0] < 0:
                    break
                d = (arr[0], (arr[1] + 2) % 4)
        m = lambda x: order[x]
        return TangleDiagram(
            tuple(tuple(map(m, X)) for X in self.crossings), self.signs, tuple(map(m, self.boundary)), self.loops
        )

    def same_up_to_order(self, other: TangleDiagram) -> bool:
        return (
            sorted(zip(self.crossings, self.signs)) == sorted(zip(other.crossings, other.signs))
            and self.boundary == other.boundary
            and self.loops == other.loops
        )

    def to_pd(self) -> str:
        plain = all(_fallback_sign(X) == s for X, s in zip(self.crossings, self.signs))
        if not plain:
            try:
                plain = parse_pd(_pd_text(self, tagged=False)).signs == self.signs
            except DiagramError:
                plain = False
        return _pd_text(self, tagged=not plain)

    def __str__(self) -> str:
        return self.to_pd()


def _pd_text(T: TangleDiagram, tagged: bool) -> str:
    items = []
    for X, s in zip(T.crossings, T.signs):
        tag = ("Xp" if s > 0 else "Xm") if tagged else "X"
        items.append(f"{tag}[{','.join(map(str, X))}]")
    if T.loops:
        items.append(f"O[{T.loops}]")
    if T.boundary:
        items.append("B[" + ",".join(("*" if i == 0 else "") + str(b) for i, b in enumerate(T.boundary)) + "]")
    return "PD[" + ", ".join(items) + "]"


def _fallback_sign(X: Sequence[int]) -> int:
    _, j, _, l = X
    return 1 if (j - l == 1 or l - j > 1) else -1


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<name>Xp|Xm|X|O|B|PD)\s*\[|(?P<star>\*)|(?P<int>-?\d+)|(?P<comma>,)|(?P<close>\]))")


def _tokens(text: str):
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            return
        m = _TOKEN.match(text, pos)
        if not m:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise PDSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        yield kind, m.group(kind), m.start(kind)
        pos = m.end()


def parse_pd(text: str) -> TangleDiagram:
    """Parse one diagram.  Comments after ``#`` are ignored."""
    text = text.split("#", 1)[0]
    toks = list(_tokens(text))
    if not toks:
        raise PDSyntaxError("empty input", 0)
    i = 0

    def expect(kind, value=None):
        nonlocal i
        if i >= len(toks):
            raise PDSyntaxError(f"expected {value or kind} but input ended", len(text))
        k, v, p = toks[i]
        if k != kind or (value is not None and v != value):
            raise PDSyntaxError(f"expected {value or kind}, found {v!r}", p)
        i += 1
        return v, p

    expect("name", "PD")
    crossings: list[tuple[int, ...]] = []
    hints: list[int | None] = []
    loops = 0
    boundary: list[int] | None = None
    base = 0
    first = True
    while True:
        if i < len(toks) and toks[i][0] == "close":
            i += 1
            break
        if not first:
            expect("comma")
        first = False
        name, pos = expect("name")
        if name in ("X", "Xp", "Xm"):
            vals = []
            for t in range(4):
                if t:
                    expect("comma")
                vals.append(int(expect("int")[0]))
            expect("close")
            crossings.append(tuple(vals))
            hints.append({"X": None, "Xp": 1, "Xm": -1}[name])
        elif name == "O":
            loops += int(expect("int")[0])
            expect("close")
        elif name == "B":
            if boundary is not None:
                raise PDSyntaxError("only one B[...] item is allowed", pos)
            boundary = []
            stars = []
            while True:
                if toks[i][0] == "star":
                    stars.append(len(boundary))
                    i += 1
                boundary.append(int(expect("int")[0]))
                if i < len(toks) and toks[i][0] == "comma":
                    i += 1
                    continue
                expect("close")
                break
            if len(stars) > 1:
                raise PDSyntaxError("at most one base point marker", pos)
            base = stars[0] if stars else 0
        else:
            raise PDSyntaxError(f"unexpected item {name}", pos)
    if i != len(toks):
        raise PDSyntaxError("trailing input", toks[i][2])
    boundary = boundary or []
    boundary = boundary[base:] + boundary[:base]
    return build_diagram(crossings, boundary, loops, hints)


def parse_pd_file(text: str) -> list[TangleDiagram]:
    out = []
    for line in text.splitlines():
        if line.split("#", 1)[0].strip():
            out.append(parse_pd(line))
    return out


def build_diagram(
    crossings: Sequence[Sequence[int]],
    boundary: Sequence[int] = (),
    loops: int = 0,
    hints: Sequence[int | None] | None = None,
) -> TangleDiagram:
    """Infer crossing signs from the orientation data carried by the PD code.

    Position 0 flows in and position 2 flows out; the two ends of an edge are
    opposite, as are positions 1 and 3.  Crossings left undetermined after
    propagation fall back to the usual label rule (over-strand runs from the
    smaller to the next label).
    """
    crossings = [tuple(c) for c in crossings]
    boundary = list(boundary)
    hints = list(hints) if hints is not None else [None] * len(crossings)
    slots_of: dict[int, list[Slot]] = {}
    for c, X in enumerate(crossings):
        if len(X) != 4:
            raise DiagramError(f"crossing {c} does not have four edge ends")
        for p, lab in enumerate(X):
            slots_of.setdefault(lab, []).append((c, p))
    for p, lab in enumerate(boundary):
        slots_of.setdefault(lab, []).append((-1, p))
    for lab, sl in slots_of.items():
        if len(sl) != 2:
            raise DiagramError(f"edge {lab} has {len(sl)} ends; every edge needs exactly two")
    mate = {}
    for a, b in slots_of.values():
        mate[a], mate[b] = b, a

    head: dict[Slot, bool] = {}
    work: deque = deque()

    def assign(s: Slot, v: bool) -> None:
        if s in head:
            if head[s] != v:
                raise DiagramError(f"strand orientations are inconsistent at {s}")
            return
        head[s] = v
        work.append(s)

    def flush() -> None:
        while work:
            s = work.popleft()
            assign(mate[s], not head[s])
            c, p = s
            if c >= 0 and p in (1, 3):
                assign((c, 4 - p), not head[s])

    for c, hint in enumerate(hints):
        assign((c, 0), True)
        assign((c, 2), False)
        if hint is not None:
            assign((c, 3), hint > 0)
    flush()
    for c, X in enumerate(crossings):
        if (c, 3) not in head:
            assign((c, 3), _fallback_sign(X) > 0)
            flush()
    signs = tuple(1 if head[(c, 3)] else -1 for c in range(len(crossings)))
    return TangleDiagram(tuple(crossings), signs, tuple(boundary), loops)


# ---------------------------------------------------------------------------
# gluing


@dataclass
class Gluing:
    diagram: TangleDiagram
    input_labels: list[dict[int, int]]
    d_labels: dict[int, int]
    crossing_origin: list[tuple[int, int]]


def glue(D: PlanarArcDiagram, inputs: Sequence[TangleDiagram]) -> Gluing:
    """Place tangle diagrams into the holes of ``D``.

    Edges that meet a label of ``D`` take the least such label; edges internal
    to an input keep their own label unless it is taken.
    """
    if len(inputs) != len(D.holes):
        raise DiagramError(f"diagram has {len(D.holes)} holes but {len(inputs)} tangles were given")
    ds = DisjointSet()
    for lab in D.boundary:
        ds.add((-1, lab))
    for i, (h, T) in enumerate(zip(D.holes, inputs)):
        if len(T.boundary) != len(h):
            raise DiagramError(f"tangle {i} has {len(T.boundary)} ends but hole {i} has {len(h)}")
        for lab in T.edges:
            ds.add((i, lab))
        for p, lab in enumerate(h):
            ds.union((-1, lab), (i, T.boundary[p]))
    groups = ds.groups()
    name: dict = {}
    used: set[int] = set()
    for root, members in groups.items():
        dl = [m[1] for m in members if m[0] == -1]
        if dl:
            name[root] = min(dl)
            used.add(min(dl))
    pending = sorted((min(members), root) for root, members in groups.items() if root not in name)
    all_input = [lab for T in inputs for lab in T.edges]
    fresh = max([*used, *all_input, *[l for h in D.holes for l in h], 0]) + 1
    for (i, lab), root in pending:
        if lab not in used:
            name[root] = lab
        else:
            name[root] = fresh
            fresh += 1
        used.add(name[root])
    crossing_members: set = set()
    xs, signs, origin = [], [], []
    for i, T in enumerate(inputs):
        for c, (X, s) in enumerate(zip(T.crossings, T.signs)):
            xs.append(tuple(name[ds.find((i, lab))] for lab in X))
            signs.append(s)
            origin.append((i, c))
            crossing_members.update(ds.find((i, lab)) for lab in X)
    bset = {ds.find((-1, lab)) for lab in D.boundary}
    closed = sum(1 for root in groups if root not in crossing_members and root not in bset)
    boundary = tuple(name[ds.find((-1, lab))] for lab in D.boundary)
    loops = D.loops + sum(T.loops for T in inputs) + closed
    try:
        T = TangleDiagram(tuple(xs), tuple(signs), boundary, loops)
    except DiagramError as e:
        raise DiagramError(f"glued diagram is invalid: {e}") from None
    in_maps = [{lab: name[ds.find((i, lab))] for lab in T_.edges} for i, T_ in enumerate(inputs)]
    d_map = {}
    for h in list(D.holes) + [D.boundary]:
        for lab in h:
            d_map[lab] = name[ds.find((-1, lab))]
    return Gluing(T, in_maps, d_map, origin)


def compose_tangles(D: PlanarArcDiagram, inputs: Sequence[TangleDiagram]) -> TangleDiagram:
    return glue(D, inputs).diagram


ARC = TangleDiagram((), (), (1, 1))


# ---------------------------------------------------------------------------
# resolutions


def resolve(T: TangleDiagram, v: str | Sequence[int]):
    """The smoothing at vertex ``v`` (a bit string, one bit per crossing)."""
    bits = [int(b) for b in v]
    if len(bits) != T.n:
        raise ValueError(f"vertex has {len(bits)} bits but the diagram has {T.n} crossings")
    parts = [elementary_smoothing(X, b) for X, b in zip(T.crossings, bits)]
    return compose_smoothings(T.arc_diagram(), parts).smoothing


# ---------------------------------------------------------------------------
# local rewrites


@dataclass(frozen=True)
class Site:
    """Where a local move happens.  ``inverse`` marks moves that remove crossings."""

    move: str
    inverse: bool
    data: tuple


@dataclass
class Rewrite:
    """``source`` equals ``D(rest..., before)`` and the result is ``D(rest..., after)``."""

    source: TangleDiagram
    site: Site
    D: PlanarArcDiagram
    rest: list[int]
    before: TangleDiagram
    after: TangleDiagram

    def inputs(self, local: TangleDiagram) -> list[TangleDiagram]:
        return [self.source.crossing_tangle(c) for c in self.rest] + [local]

    def glue_before(self) -> Gluing:
        return glue(self.D, self.inputs(self.before))

    def glue_after(self) -> Gluing:
        return glue(self.D, self.inputs(self.after))

    def result(self) -> TangleDiagram:
        return self.glue_after().diagram


def _make_D(T: TangleDiagram, removed: Iterable[int], relabel: dict, region: tuple, loops_delta: int = 0):
    removed = set(removed)
    rest = [c for c in range(T.n) if c not in removed]
    holes = [tuple(relabel.get((c, p), lab) for p, lab in enumerate(T.crossings[c])) for c in rest]
    holes.append(tuple(region))
    boundary = tuple(relabel.get((-1, p), lab) for p, lab in enumerate(T.boundary))
    return PlanarArcDiagram(tuple(holes), boundary, T.loops + loops_delta), rest


def _pd_from_ccw(ccw: Sequence[int], arrive: Sequence[bool], under_parity: int) -> tuple[tuple[int, ...], int]:
    """Rotate a counterclockwise 4-tuple so it starts at the incoming under end."""
    u = [p for p in (under_parity, under_parity + 2) if arrive[p]]
    o = [p for p in (1 - under_parity, 3 - under_parity) if arrive[p]]
    if len(u) != 1 or len(o) != 1:
        raise DiagramError("each strand must enter a crossing exactly once")
    r = u[0]
    X = tuple(ccw[r:]) + tuple(ccw[:r])
    arr = tuple(arrive[r:]) + tuple(arrive[:r])
    return X, (1 if arr[3] else -1)


def _local_before(T: TangleDiagram, removed: Sequence[int], region_slots: Sequence[Slot]) -> TangleDiagram:
    region_labels = [T.label_at(s) for s in region_slots]
    fresh = T.max_label() + 1
    pos_label: dict[Slot, int] = {}
    for s, lab in zip(region_slots, region_labels):
        if region_labels.count(lab) == 1:
            pos_label[s] = lab
        else:
            pos_label[s] = fresh
            fresh += 1
    xs = []
    for c in removed:
        xs.append(tuple(pos_label.get((c, p), lab) for p, lab in enumerate(T.crossings[c])))
    return TangleDiagram(tuple(xs), tuple(T.signs[c] for c in removed), tuple(pos_label[s] for s in region_slots))


def _removal_rewrite(T: TangleDiagram, site: Site, removed: Sequence[int], region_slots, after: TangleDiagram) -> Rewrite:
    region = tuple(T.label_at(s) for s in region_slots)
    D, rest = _make_D(T, removed, {}, region)
    before = _local_before(T, removed, region_slots)
    return Rewrite(T, site, D, rest, before, after)


# R1 kinks on the 2-ended tangle B[e1,e2] (strand runs e1 -> e2); variants 0,1
# are positive with the small circle in the 0-smoothing, variants 2,3 negative
# with the circle in the 1-smoothing.
def kink_tangle(variant: int, e1: int = 1, e2: int = 2, ell: int = 3) -> TangleDiagram:
    X = [
        (ell, ell, e2, e1),
        (e1, e2, ell, ell),
        (ell, e1, e2, ell),
        (e1, ell, ell, e2),
    ][variant]
    return TangleDiagram((X,), (1 if variant < 2 else -1,), (e1, e2))


def _split_edge(T: TangleDiagram, start: Slot) -> tuple[dict, int, int, bool]:
    """Relabel the far end of the dart at ``start`` so the edge can pass through a hole."""
    end = T.mate(start)
    lab = T.label_at(start)
    new = T.max_label() + 1
    return {start: lab, end: new}, lab, new, T.heads[end]


def _r1_add(T: TangleDiagram, site: Site) -> Rewrite:
    target, variant = site.data
    if target == "loop":
        if T.loops < 1:
            raise DiagramError("no free loop to put a kink on")
        u = T.max_label() + 1
        D, rest = _make_D(T, (), {}, (u, u), -1)
        return Rewrite(T, site, D, rest, ARC, kink_tangle(variant))
    start = T._slots_of[target][0]
    relabel, x, y, fwd = _split_edge(T, start)
    region = (x, y) if fwd else (y, x)
    D, rest = _make_D(T, (), relabel, region)
    return Rewrite(T, site, D, rest, ARC, kink_tangle(variant))


def _r1_remove(T: TangleDiagram, site: Site) -> Rewrite:
    c, p = site.data
    if T.mate((c, p)) != (c, (p + 1) % 4):
        raise DiagramError(f"no kink at crossing {c}")
    region_slots = [(c, (p + 2) % 4), (c, (p + 3) % 4)]
    return _removal_rewrite(T, site, [c], region_slots, ARC)


def _r2_tangle(a_fwd: bool, b_fwd: bool, a_over: bool, base: int = 1) -> TangleDiagram:
    a1, a2, a3, b1, b2, b3 = range(base, base + 6)
    P = ((a1, b2, a2, b3), (a_fwd, b_fwd, not a_fwd, not b_fwd))
    Q = ((a3, b1, a2, b2), (not a_fwd, b_fwd, a_fwd, not b_fwd))
    parity = 1 if a_over else 0
    xs, signs = [], []
    for ccw, arr in (P, Q):
        X, s = _pd_from_ccw(ccw, arr, parity)
        xs.append(X)
        signs.append(s)
    return TangleDiagram(tuple(xs), tuple(signs), (a1, a3, b1, b3))


PARALLEL = TangleDiagram((), (), (1, 1, 2, 2))  # arcs (0,1) and (2,3)
CROSSWISE = TangleDiagram((), (), (1, 2, 2, 1))  # arcs (0,3) and (1,2)


def _two_darts(T: TangleDiagram, a: Slot, b: Slot):
    ra, xa, ya, a_fwd = _split_edge(T, a)
    la = T.label_at(b)
    yb = ya + 1
    relabel = dict(ra)
    relabel[b] = la
    relabel[T.mate(b)] = yb
    return relabel, (xa, ya, la, yb), a_fwd, T.heads[T.mate(b)]


def _r2_add(T: TangleDiagram, site: Site) -> Rewrite:
    if site.data[0] == "loop":
        _, a, a_over, *more = site.data
        b_fwd = more[0] if more else True
        if T.loops < 1:
            raise DiagramError("no free loop available")
        relabel, x, y, a_fwd = _split_edge(T, a)
        u = y + 1
        D, rest = _make_D(T, (), relabel, (x, y, u, u), -1)
        return Rewrite(T, site, D, rest, PARALLEL, _r2_tangle(a_fwd, b_fwd, a_over))
    a, b, a_over = site.data
    if T.label_at(a) == T.label_at(b):
        raise DiagramError("the two darts must lie on different edges")
    if not any(a in f and b in f for f in T.faces):
        raise DiagramError("the two darts do not share a face")
    relabel, region, a_fwd, b_fwd = _two_darts(T, a, b)
    D, rest = _make_D(T, (), relabel, region)
    return Rewrite(T, site, D, rest, PARALLEL, _r2_tangle(a_fwd, b_fwd, a_over))


def _bigon(T: TangleDiagram, d1: Slot):
    P, p1 = d1
    Q, q1 = T.mate(d1)
    if P < 0 or Q < 0 or P == Q:
        raise DiagramError("not a bigon between two crossings")
    d2 = T.next_dart((Q, q1))
    if T.next_dart(T.mate(d2)) != d1:
        raise DiagramError("face is not a bigon")
    if p1 % 2 != q1 % 2:
        raise DiagramError("bigon is a clasp: the same strand must be over at both crossings")
    region_slots = [(Q, (q1 + 1) % 4), (Q, (q1 + 2) % 4), (P, (p1 + 2) % 4), (P, (p1 + 3) % 4)]
    return [P, Q], region_slots


def _r2_remove(T: TangleDiagram, site: Site) -> Rewrite:
    removed, region_slots = _bigon(T, site.data[0])
    return _removal_rewrite(T, site, removed, region_slots, CROSSWISE)


def _triangle(T: TangleDiagram, d1: Slot):
    d2 = T.next_dart(T.mate(d1))
    d3 = T.next_dart(T.mate(d2))
    if T.next_dart(T.mate(d3)) != d1:
        raise DiagramError("face is not a triangle")
    Q, q = T.mate(d1)
    R, r = T.mate(d2)
    P, p = T.mate(d3)
    if min(P, Q, R) < 0 or len({P, Q, R}) < 3:
        raise DiagramError("triangle must have three distinct crossings")
    if q % 2 == r % 2 == p % 2:
        raise DiagramError("cyclic triangle: no strand lies over both others")
    return P, p, Q, q, R, r


def r3_tangle(T: TangleDiagram, d1: Slot, base: int | None = None) -> TangleDiagram:
    P, p, Q, q, R, r = _triangle(T, d1)
    h = T.heads
    a_fwd = h[(P, (p + 1) % 4)]
    b_fwd = h[(Q, (q + 1) % 4)]
    c_fwd = h[(R, (r + 1) % 4)]
    if base is None:
        base = T.max_label() + 1
    a1, a2, a3, b1, b2, b3, c1, c2, c3 = range(base, base + 9)
    Qn = _pd_from_ccw((b2, a2, b3, a1), (b_fwd, not a_fwd, not b_fwd, a_fwd), 1 if q % 2 == 0 else 0)
    Pn = _pd_from_ccw((a3, c1, a2, c2), (not a_fwd, c_fwd, a_fwd, not c_fwd), 0 if p % 2 == 1 else 1)
    Rn = _pd_from_ccw((b1, c2, b2, c3), (b_fwd, c_fwd, not b_fwd, not c_fwd), 0 if r % 2 == 0 else 1)
    xs = (Qn[0], Pn[0], Rn[0])
    return TangleDiagram(xs, (Qn[1], Pn[1], Rn[1]), (b1, a3, c1, b3, a1, c3))


def _r3(T: TangleDiagram, site: Site) -> Rewrite:
    d1 = site.data[0]
    P, p, Q, q, R, r = _triangle(T, d1)
    region_slots = [
        (Q, (q + 1) % 4),
        (Q, (q + 2) % 4),
        (R, (r + 1) % 4),
        (R, (r + 2) % 4),
        (P, (p + 1) % 4),
        (P, (p + 2) % 4),
    ]
    return _removal_rewrite(T, site, [Q, R, P], region_slots, r3_tangle(T, d1, base=1))


def _saddle(T: TangleDiagram, site: Site) -> Rewrite:
    kind = site.data[0]
    if kind == "darts":
        _, a, b = site.data
        if T.label_at(a) == T.label_at(b):
            raise DiagramError("the two darts must lie on different edges")
        relabel, region, a_fwd, b_fwd = _two_darts(T, a, b)
        if a_fwd != b_fwd:
            raise DiagramError("saddle would not respect orientations")
        D, rest = _make_D(T, (), relabel, region)
        return Rewrite(T, site, D, rest, PARALLEL, CROSSWISE)
    if kind == "loop-merge":
        _, a = site.data
        if T.loops < 1:
            raise DiagramError("no free loop available")
        relabel, x, y, _ = _split_edge(T, a)
        u = y + 1
        D, rest = _make_D(T, (), relabel, (x, y, u, u), -1)
        return Rewrite(T, site, D, rest, PARALLEL, CROSSWISE)
    if kind == "loop-split":
        _, a = site.data
        relabel, x, y, _ = _split_edge(T, a)
        u = y + 1
        D, rest = _make_D(T, (), relabel, (x, y, u, u))
        return Rewrite(T, site, D, rest, CROSSWISE, PARALLEL)
    if kind == "loops-merge":
        if T.loops < 2:
            raise DiagramError("need two free loops")
        u = T.max_label() + 1
        D, rest = _make_D(T, (), {}, (u, u, u + 1, u + 1), -2)
        return Rewrite(T, site, D, rest, PARALLEL, CROSSWISE)
    if kind == "loop-self":
        if T.loops < 1:
            raise DiagramError("no free loop available")
        u = T.max_label() + 1
        D, rest = _make_D(T, (), {}, (u, u, u + 1, u + 1), -1)
        return Rewrite(T, site, D, rest, CROSSWISE, PARALLEL)
    raise DiagramError(f"unknown saddle site {kind!r}")


EMPTY = TangleDiagram()
LOOP = TangleDiagram(loops=1)


def _cup(T: TangleDiagram, site: Site) -> Rewrite:
    D, rest = _make_D(T, (), {}, ())
    return Rewrite(T, site, D, rest, EMPTY, LOOP)


def _cap(T: TangleDiagram, site: Site) -> Rewrite:
    if T.loops < 1:
        raise DiagramError("no free loop to cap off")
    D, rest = _make_D(T, (), {}, (), -1)
    return Rewrite(T, site, D, rest, LOOP, EMPTY)


def rewrite(T: TangleDiagram, site: Site) -> Rewrite:
    move = site.move
    if move in ("R1a", "R1b"):
        rw = _r1_remove(T, site) if site.inverse else _r1_add(T, site)
        want = "R1a" if _kink_kind(rw) == 0 else "R1b"
        if want != move:
            raise DiagramError(f"site carries a {want} kink, not {move}")
        return rw
    if move == "R2":
        return _r2_remove(T, site) if site.inverse else _r2_add(T, site)
    if move == "R3":
        return _r3(T, site)
    if move == "saddle":
        return _saddle(T, site)
    if move == "cup":
        return _cup(T, site)
    if move == "cap":
        return _cap(T, site)
    raise DiagramError(f"unknown move {move!r}")


def _kink_kind(rw: Rewrite) -> int:
    """0 when the kink's small circle sits in the 0-smoothing, 1 otherwise."""
    kink = rw.before if rw.site.inverse else rw.after
    X = kink.crossings[0]
    return 0 if (X[0] == X[1] or X[2] == X[3]) else 1


def apply_reidemeister(T: TangleDiagram, move: str, site: Site) -> TangleDiagram:
    if site.move != move:
        raise DiagramError(f"site is for {site.move}, not {move}")
    return rewrite(T, site).result()


def reidemeister_sites(T: TangleDiagram, move: str, inverse: bool | None = None) -> list[Site]:
    """All sites for ``move`` in ``T`` (both directions unless ``inverse`` is given)."""
    out: list[Site] = []
    want = (False, True) if inverse is None else (inverse,)
    if move in ("R1a", "R1b"):
        variants = (0, 1) if move == "R1a" else (2, 3)
        if False in want:
            for e in T.edges:
                out += [Site(move, False, (e, v)) for v in variants]
            if T.loops:
                out += [Site(move, False, ("loop", v)) for v in variants]
        if True in want:
            for c, X in enumerate(T.crossings):
                for p in range(4):
                    if T.mate((c, p)) == (c, (p + 1) % 4):
                        kind = 0 if p % 2 == 0 else 1
                        if (kind == 0) == (move == "R1a"):
                            out.append(Site(move, True, (c, p)))
    elif move == "R2":
        if False in want:
            for f in T.faces:
                for i in range(len(f)):
                    for j in range(i + 1, len(f)):
                        if T.label_at(f[i]) != T.label_at(f[j]):
                            out += [Site("R2", False, (f[i], f[j], o)) for o in (True, False)]
            if T.loops:
                for s in T.slots():
                    out += [Site("R2", False, ("loop", s, o, f)) for o in (True, False) for f in (True, False)]
        if True in want:
            for f in T.faces:
                if len(f) == 2:
                    try:
                        _bigon(T, f[0])
                    except DiagramError:
                        continue
                    out.append(Site("R2", True, (f[0],)))
    elif move == "R3":
        for f in T.faces:
            if len(f) == 3:
                try:
                    _triangle(T, f[0])
                except DiagramError:
                    continue
                out.append(Site("R3", False, (f[0],)))
    else:
        raise DiagramError(f"unknown move {move!r}")
    return out


# ---------------------------------------------------------------------------
# isomorphism


def _bfs_code(T: TangleDiagram, start: int):
    newlab: dict[int, int] = {}
    order = [start]
    seen = {start}
    rows = []
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        if v < 0:
            slots = [(-1, p) for p in range(len(T.boundary))]
        else:
            slots = [(v, p) for p in range(4)]
        for s in slots:
            lab = T.label_at(s)
            if lab not in newlab:
                newlab[lab] = len(newlab)
            w = T.mate(s)[0]
            if w not in seen:
                seen.add(w)
                order.append(w)
        if v < 0:
            rows.append(("B", tuple(newlab[T.label_at(s)] for s in slots)))
        else:
            rows.append((tuple(newlab[lab] for lab in T.crossings[v]), T.signs[v]))
    return tuple(rows), newlab, order


def _component_codes(T: TangleDiagram):
    out = []
    for comp in T.components():
        if -1 in comp:
            out.append(_bfs_code(T, -1))
        else:
            out.append(min((_bfs_code(T, c) for c in sorted(comp)), key=lambda t: t[0]))
    return out


def canonical_form(T: TangleDiagram) -> tuple:
    """Combinatorial invariant: equal exactly when the diagrams are isomorphic
    (incidence, cyclic orders, signs, base point and free loops)."""
    codes = [c[0] for c in _component_codes(T)]
    bpart = [c for c in codes if c and c[0][0] == "B"]
    rest = sorted(c for c in codes if not (c and c[0][0] == "B"))
    return (tuple(bpart), tuple(rest), T.loops)


def is_isomorphic(A: TangleDiagram, B: TangleDiagram) -> bool:
    return canonical_form(A) == canonical_form(B)


def isomorphism(A: TangleDiagram, B: TangleDiagram) -> tuple[dict[int, int], dict[int, int]] | None:
    """An explicit (edge label map, crossing map) from A to B, or None."""
    ca, cb = _component_codes(A), _component_codes(B)
    if A.loops != B.loops or sorted(c[0] for c in ca) != sorted(c[0] for c in cb):
        return None
    lab_map: dict[int, int] = {}
    x_map: dict[int, int] = {}
    pool = list(cb)
    for code, la, order_a in ca:
        j = next(i for i, c in enumerate(pool) if c[0] == code)
        _, lb, order_b = pool.pop(j)
        inv_b = {v: k for k, v in lb.items()}
        for lab, idx in la.items():
            lab_map[lab] = inv_b[idx]
        for va, vb in zip(order_a, order_b):
            if va >= 0:
                x_map[va] = vb
    return lab_map, x_map
