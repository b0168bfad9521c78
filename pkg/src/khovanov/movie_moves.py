"""Instances of the fifteen movie moves and their verification.

The pictures of the moves are reconstructed as follows.

* Type I (MM1-MM5): a Reidemeister move followed by its inverse, or an inverse
  followed by the move, on small closed diagrams.  Checked at chain level: the
  composite must be homotopic to plus or minus the identity.
* Type II (MM6-MM10): circular clips found by a deterministic search for a
  closed walk with a prescribed sequence of move kinds that never revisits a
  frame.  Checked on homology (and at chain level where small).  MM10 is the
  walk of eight R3 moves through the reduced words of the longest element of
  the braid group on four strands, taken on the open braid tangle and closed
  up afterwards.
* Type III (MM11-MM15): two clips with the same ends on a small tangle.  The
  two chain maps are compared exactly as matrices of cobordisms and, after
  closing the tangle up, on homology.  Both directions are checked.
"""

from __future__ import annotations

import time
from collections import defaultdict
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .bracket import ChainMap, extend_map, planar_compose
from .builders import braid_closure, braid_tangle
from .diagram import EMPTY, DiagramError, TangleDiagram, canonical_form, glue, rewrite
from .movies import (
    Movie,
    MovieError,
    MovieEvent,
    best_isomorphism,
    candidate_sites,
    check_homotopic_to_pm_identity,
    closing_map,
    evaluate_movie,
    find_event,
    homotopy_sign,
    induced_homology_map,
    isomorphisms,
    map_degrees,
    transport,
)
from .planar import PlanarArcDiagram

FIELDS = ("Q", "F2")
STRAND = TangleDiagram((), (), (1, 1))
TWO_STRANDS = TangleDiagram((), (), (1, 2, 2, 1))
# a vertical strand passing over two antiparallel horizontal arcs
OVERPASS = TangleDiagram(((4, 2, 5, 1), (7, 2, 6, 3)), (1, -1), (1, 4, 6, 3, 7, 5))


# ---------------------------------------------------------------------------
# searching for clips


def returns_home(last: TangleDiagram, start: TangleDiagram) -> bool:
    """Is ``last`` identified with ``start`` by an isomorphism fixing every edge
    label the two share?  Labels follow the strands through the moves, so this
    is the isomorphism coming from the pictures."""
    isos = isomorphisms(last, start, limit=2)
    if len(isos) == 1:
        return True  # e.g. every component touches the boundary
    m = best_isomorphism(last, start)
    return m is not None and all(m[k] == k for k in set(last.edges) & set(start.edges))


def circular_clip(start: TangleDiagram, kinds: Sequence[str], name: str = "") -> Movie:
    """The first closed walk from ``start`` whose events have the given kinds,
    whose intermediate frames are pairwise distinct and differ from ``start``,
    and which comes back to ``start`` itself (see ``returns_home``).

    Frames with free loops are skipped: a free loop does not record which face
    it lies in, so a walk through one might close up only combinatorially."""
    c0 = canonical_form(start)
    found: list = []

    def dfs(frames, codes, events):
        if found:
            return
        i = len(events)
        if i == len(kinds):
            if codes[-1] == c0 and returns_home(frames[-1], start):
                found.append((frames, events))
            return
        for s in candidate_sites(frames[-1], kinds[i]):
            try:
                nxt = rewrite(frames[-1], s).result()
            except DiagramError:
                continue
            if nxt.loops > start.loops:
                continue
            cf = canonical_form(nxt)
            if cf in codes[1:] or (cf == c0 and i < len(kinds) - 1):
                continue
            dfs(frames + [nxt], codes + [cf], events + [MovieEvent(kinds[i], s)])

    dfs([start], [c0], [])
    if not found:
        raise MovieError(f"no circular clip of kinds {list(kinds)}")
    frames, events = found[0]
    return Movie(frames, events, name)


def clip_pairs(start: TangleDiagram, kinds: Sequence[str]) -> list[list[Movie]]:
    """All clips of the given kinds from ``start``, grouped by their last frame."""
    groups: dict = defaultdict(list)

    def dfs(frames, events):
        if len(events) == len(kinds):
            groups[canonical_form(frames[-1])].append(Movie(frames, events))
            return
        for s in candidate_sites(frames[-1], kinds[len(events)]):
            try:
                nxt = rewrite(frames[-1], s).result()
            except DiagramError:
                continue
            dfs(frames + [nxt], events + [MovieEvent(kinds[len(events)], s)])

    dfs([start], [])
    return list(groups.values())


def there_and_back(start: TangleDiagram, kind: str, site_filter: Callable | None = None, name: str = "") -> list[Movie]:
    """Clips ``e`` followed by the inverse of ``e``, for every site of ``kind``
    accepted by ``site_filter``."""
    from .movies import INVERSE_KIND

    out = []
    for s in candidate_sites(start, kind):
        if site_filter is not None and not site_filter(s):
            continue
        e = MovieEvent(kind, s)
        try:
            m = Movie.from_events(start, [e])
            back = find_event(m.frames[1], start, INVERSE_KIND[kind])
        except (MovieError, DiagramError):
            continue
        out.append(Movie(m.frames + [back_frame(m.frames[1], back)], [e, back], name))
    return out


def back_frame(T: TangleDiagram, e: MovieEvent) -> TangleDiagram:
    return rewrite(T, e.site).result()


# ---------------------------------------------------------------------------
# closing tangle maps


def closures(T: TangleDiagram) -> list[PlanarArcDiagram]:
    """Crossingless closures of ``T`` (adjacent pairings and the nested pairing)
    that respect orientations."""
    k = len(T.boundary)
    if k == 0:
        return [PlanarArcDiagram(((),), ())]
    pairings = [
        [(i, i + 1) for i in range(0, k, 2)],
        [(i, (i + 1) % k) for i in range(1, k, 2)],
        [(i, k - 1 - i) for i in range(k // 2)],
    ]
    out, seen = [], set()
    for pr in pairings:
        hole = [0] * k
        for lab, (a, b) in enumerate(pr, 1):
            hole[a] = hole[b] = lab
        D = PlanarArcDiagram((tuple(hole),), ())
        if D.holes in seen:
            continue
        seen.add(D.holes)
        try:
            glue(D, [T])
        except DiagramError:
            continue
        out.append(D)
    return out


def close_map(f: ChainMap, D: PlanarArcDiagram) -> ChainMap:
    """``D(f)``: the chain map of the closed-up diagrams."""
    cs = planar_compose(D, [f.source])
    ct = planar_compose(D, [f.target])
    return extend_map(cs, ct, D, [f.source], [f.target], 0, f)


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class InstanceResult:
    label: str
    chain_sign: int | None = None  # None also when not computed
    homology_signs: dict[str, int | None] = field(default_factory=dict)
    exact_sign: int | None = None
    degree_ok: bool = True
    computed: tuple[str, ...] = ()
    passed: bool = False


@dataclass
class MoveVerdict:
    number: int
    type: str
    description: str
    instances: list[InstanceResult]
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(self.instances) and all(i.passed for i in self.instances)

    @property
    def signs(self) -> list:
        out = []
        for i in self.instances:
            s = i.exact_sign if "exact" in i.computed else i.chain_sign if "chain" in i.computed else None
            if s is None and i.homology_signs:
                s = next(iter(i.homology_signs.values()))
            out.append(s)
        return out

    def to_json(self) -> dict:
        return {
            "move": f"MM{self.number}",
            "type": self.type,
            "description": self.description,
            "passed": self.passed,
            "signs": self.signs,
            "seconds": round(self.seconds, 3),
            "instances": [
                {
                    "label": i.label,
                    "chain_sign": i.chain_sign,
                    "exact_sign": i.exact_sign,
                    "homology_signs": i.homology_signs,
                    "degree_ok": i.degree_ok,
                    "checked": list(i.computed),
                    "passed": i.passed,
                }
                for i in self.instances
            ],
        }


def _degree_ok(f: ChainMap, m: Movie) -> bool:
    degs = map_degrees(f)
    return degs <= {m.degree}


def _homology_signs(f: ChainMap, fields=FIELDS) -> dict[str, int | None]:
    return {F: induced_homology_map(f, F).is_pm_identity() for F in fields}


def check_identity_clip(m: Movie, label: str, chain: bool = True, fields=FIELDS) -> InstanceResult:
    """A clip that should act as plus or minus the identity."""
    f = closing_map(m)
    res = InstanceResult(label, degree_ok=_degree_ok(f, m))
    computed = []
    if chain:
        res.chain_sign = check_homotopic_to_pm_identity(f, "Q")
        computed.append("chain")
    res.homology_signs = _homology_signs(f, fields)
    computed.append("homology")
    res.computed = tuple(computed)
    ok = res.degree_ok and all(s is not None for s in res.homology_signs.values())
    if chain:
        ok = ok and res.chain_sign is not None
    res.passed = ok
    return res


def check_identity_tangle_clip(m: Movie, label: str, chain: bool = True, fields=FIELDS) -> InstanceResult:
    """A circular clip of tangles, checked on every closure."""
    f = closing_map(m)
    res = InstanceResult(label, degree_ok=_degree_ok(f, m))
    closed = [close_map(f, D) for D in closures(m.frames[0])]
    signs = {}
    for F in fields:
        vals = {induced_homology_map(g, F).is_pm_identity() for g in closed}
        signs[F] = vals.pop() if len(vals) == 1 else None
    res.homology_signs = signs
    computed = ["homology"]
    ok = res.degree_ok and bool(closed) and all(s is not None for s in signs.values())
    if chain:
        vals = {check_homotopic_to_pm_identity(g, "Q") for g in closed}
        res.chain_sign = vals.pop() if len(vals) == 1 else None
        computed.append("chain")
        ok = ok and res.chain_sign is not None
    res.computed = tuple(computed)
    res.passed = ok
    return res


def _compare_on_closures(fl: ChainMap, fr: ChainMap, T: TangleDiagram, fields=FIELDS) -> dict[str, int | None]:
    """For each field, a sign ``s`` with ``H(D(fl)) = s H(D(fr))`` for every
    closure ``D`` of ``T``, or None.  Closures where both maps vanish allow
    either sign; +1 is reported only when every closure allows it."""
    out: dict[str, int | None] = {}
    for F in fields:
        ok = {1, -1}
        for D in closures(T):
            hl = induced_homology_map(close_map(fl, D), F)
            hr = induced_homology_map(close_map(fr, D), F)
            ok &= hl.signs_against(hr)
        if F == "F2":
            ok = ok and {1}
        out[F] = (1 if 1 in ok else -1) if ok else None
    return out


def compare_clips(left: Movie, right: Movie | None, label: str, fields=FIELDS) -> InstanceResult:
    """Two clips with isomorphic first and last frames (``right=None`` is the
    identity clip on the first frame of ``left``)."""
    fl = evaluate_movie(left)
    L0, L1 = left.frames[0], left.frames[-1]
    if right is None:
        fr = transport(L0, fl.source, L1, fl.target)
        deg_ok = _degree_ok(fl, left)
    else:
        g = evaluate_movie(right)
        into = transport(L0, fl.source, right.frames[0], g.source)
        out = transport(right.frames[-1], g.target, L1, fl.target)
        fr = out.compose(g.compose(into))
        deg_ok = _degree_ok(fl, left) and _degree_ok(g, right)
    res = InstanceResult(label, degree_ok=deg_ok)
    res.exact_sign = next((s for s in (1, -1) if (fl - fr.scale(s)).is_zero()), None)
    computed = ["exact"]
    if not L0.boundary and not L1.boundary:
        res.homology_signs = {F: _closed_sign(fl, fr, F) for F in fields}
        res.chain_sign = homotopy_sign(fl, fr, "Q")
        computed += ["homology", "chain"]
    else:
        res.homology_signs = _compare_on_closures(fl, fr, L0 if L0.boundary else L1, fields)
        computed.append("homology")
    res.computed = tuple(computed)
    res.passed = deg_ok and all(s is not None for s in res.homology_signs.values()) and (
        res.exact_sign is not None or res.chain_sign is not None
    )
    return res


def _closed_sign(fl: ChainMap, fr: ChainMap, F: str) -> int | None:
    return induced_homology_map(fl, F).equal_up_to_sign(induced_homology_map(fr, F))


# ---------------------------------------------------------------------------
# the fifteen moves


def _type1(number: int) -> tuple[str, list[Movie]]:
    if number == 1:
        T = braid_closure([1, 1, 1])
        edge = T.edges[0]
        ms = there_and_back(T, "R1+", lambda s: s.data[0] == edge)
        return "R1 then its inverse on an edge of the trefoil (all four kinks)", ms
    if number == 2:
        T = braid_closure([1, 1])
        f = T.faces[0]
        ms = there_and_back(T, "R2+", lambda s: s.data[0] == f[0] and s.data[1] == f[1])
        return "R2 then its inverse in a face of the Hopf link (both layerings)", ms
    if number == 3:
        ms = []
        for w in ([1, 2, 1], [-1, -2, -1]):
            ms += there_and_back(braid_closure(w, 3), "R3")
        return "R3 then R3 back on the closures of s1 s2 s1 and its mirror", ms
    if number == 4:
        ms = []
        for over in (True, False):
            T = _after_first(braid_closure([1, 1, 1]), "R2+", lambda st: st.data[2] is over)
            ms += there_and_back(T, "R2-")[:1]
        return "R2 inverse then R2 on a bigon added to the trefoil (both layerings)", ms
    if number == 5:
        ms = []
        for kind in ("R1a", "R1b"):
            T = _after_first(braid_closure([1, 1, 1]), "R1+", lambda st: st.move == kind)
            ms += there_and_back(T, "R1-", lambda st: st.move == kind)
        return "R1 inverse then R1 on a kink added to the trefoil (both kink types)", ms
    raise ValueError(number)


def _after_first(T: TangleDiagram, kind: str, keep: Callable) -> TangleDiagram:
    site = next(st for st in candidate_sites(T, kind) if keep(st))
    return rewrite(T, site).result()


TYPE2 = {
    6: (lambda: braid_closure([1, 2], 3), ("R2+", "R3", "R3", "R2-"), "a bigon carried across two crossings and cancelled"),
    7: (lambda: braid_closure([1, 1, 1]), ("R1+", "R1+", "R1-", "R1-"), "two kinks on a strand of the trefoil removed in the other order"),
    8: (lambda: braid_closure([1, 1, 1]), ("R1+", "R2+", "R1-", "R2-"), "a kink traded across a strand of the trefoil"),
    9: (lambda: braid_closure([1, 1]), ("R2+", "R2+", "R2-", "R2-"), "two bigons of the Hopf link removed in the other order"),
    10: (lambda: braid_tangle([1, 2, 1, 3, 2, 1], 4), ("R3",) * 8, "eight R3 moves around the reduced words of the longest element of B4"),
}


def _type2(number: int) -> tuple[str, list[Movie]]:
    make, kinds, desc = TYPE2[number]
    return desc, [circular_clip(make(), kinds, f"MM{number}")]


def _pick_pairs(start: TangleDiagram, kinds, keep: Callable[[TangleDiagram], bool]) -> list[tuple[Movie, Movie]]:
    out = []
    for grp in clip_pairs(start, kinds):
        if len(grp) == 2 and keep(grp[0].frames[-1]):
            out.append((grp[0], grp[1]))
    return out


def _type3(number: int) -> tuple[str, list[tuple[Movie, Movie | None]]]:
    if number == 11:
        pairs = [(m, None) for grp in clip_pairs(STRAND, ("Cup", "Saddle")) for m in grp if m.frames[-1].loops == 0]
        return "a circle born beside a strand and merged into it, against doing nothing", pairs
    if number == 12:
        return "a circle born and kinked on either side", _pick_pairs(EMPTY, ("Cup", "R1+"), lambda T: True)
    if number == 13:
        keep = lambda T: T.n == 1 and len(set(T.boundary)) == 4
        return "a kink on either strand followed by a saddle, ending at a crossing", _pick_pairs(TWO_STRANDS, ("R1+", "Saddle"), keep)
    if number == 14:
        return "a circle born on either side of a strand and pushed across it", _pick_pairs(STRAND, ("Cup", "R2+"), lambda T: True)
    if number == 15:
        keep = lambda T: T.n == 0
        return "a saddle on either side of an overpass followed by R2 inverse", _pick_pairs(OVERPASS, ("Saddle", "R2-"), keep)
    raise ValueError(number)


def _reverse_pair(pair):
    left, right = pair
    return left.reversed(), (right.reversed() if right is not None else None)


def check_movie_move(number: int, fields: Sequence[str] = FIELDS, chain: bool | None = None) -> MoveVerdict:
    """Build the instances of movie move ``number`` and check them."""
    if not 1 <= number <= 15:
        raise ValueError("movie moves are numbered 1 to 15")
    t = time.time()
    results: list[InstanceResult] = []
    if number <= 5:
        desc, movies = _type1(number)
        for i, m in enumerate(movies):
            results.append(check_identity_clip(m, f"MM{number}.{i}", chain=True if chain is None else chain, fields=fields))
        kind = "I"
    elif number <= 10:
        desc, movies = _type2(number)
        use_chain = True if chain is None else chain
        for i, m in enumerate(movies):
            if m.frames[0].boundary:
                results.append(check_identity_tangle_clip(m, f"MM{number}.{i}", use_chain, fields))
            else:
                results.append(check_identity_clip(m, f"MM{number}.{i}", chain=use_chain, fields=fields))
        kind = "II"
    else:
        desc, pairs = _type3(number)
        for i, pair in enumerate(pairs):
            results.append(compare_clips(pair[0], pair[1], f"MM{number}.{i} down", fields))
            rl, rr = _reverse_pair(pair)
            results.append(compare_clips(rl, rr, f"MM{number}.{i} up", fields))
        kind = "III"
    return MoveVerdict(number, kind, desc, results, time.time() - t)


def movie_move_instances(number: int) -> list:
    """The clips used for movie move ``number`` (pairs for type III)."""
    if number <= 5:
        return _type1(number)[1]
    if number <= 10:
        return _type2(number)[1]
    return _type3(number)[1]


def two_knot_scalar(field: str = "Q"):
    """The movie empty -> circle -> empty (a sphere): the 1x1 matrix it induces."""
    m = Movie.from_events(EMPTY, [MovieEvent("Cup", find_event(EMPTY, TangleDiagram(loops=1), "Cup").site)])
    m = Movie.from_events(EMPTY, m.events + [find_event(m.frames[-1], EMPTY, "Cap")])
    f = evaluate_movie(m)
    return induced_homology_map(f, field).blocks
