"""Movies of tangle diagrams and the chain maps they induce.

Every elementary event (a Reidemeister move, a cap, a cup or a saddle) is
handled locally: the small tangle that changes gets an explicit map between
its complexes, the map is placed into the arc diagram with identities on the
untouched crossings, and the result is matched with the cube complexes of the
two frames.

* R1 uses the maps of the kink lemma: F = (curtain, dotted cup) - (dotted
  curtain, cup) and G = curtain with a cap, or the mirror pair for kinks whose
  small circle lives in the 1-smoothing.
* R2 uses the strong deformation retract obtained by delooping the circle and
  cancelling the two resulting isomorphisms.
* R3 peels the crossing of the two lower strands, retracts the half that
  contains a bigon, and identifies the two resulting cones.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict, deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cache

from .bracket import (
    ChainMap,
    FormalComplex,
    Matrix,
    cube_vertices,
    extend_map,
    khovanov_complex,
    match_complexes,
    planar_compose,
)
from .cob3 import BOT, MIX, TOP, Cobordism, Smoothing, boundary_curves, degree, reduce
from .diagram import (
    DiagramError,
    Site,
    TangleDiagram,
    glue,
    is_isomorphic,
    parse_pd,
    reidemeister_sites,
    rewrite,
)
from .linalg import TrackedEliminator, field_norm, kernel_basis
from .planar import DisjointSet
from .retract import simplify
from .tqft import (
    AlgebraicComplex,
    AlgebraicMap,
    apply_functor,
    apply_functor_map,
    spec_khovanov,
)

KINDS = ("R1+", "R1-", "R2+", "R2-", "R3", "Cap", "Cup", "Saddle")
INVERSE_KIND = {"R1+": "R1-", "R1-": "R1+", "R2+": "R2-", "R2-": "R2+", "R3": "R3", "Cap": "Cup", "Cup": "Cap", "Saddle": "Saddle"}
EVENT_DEGREE = {"R1+": 0, "R1-": 0, "R2+": 0, "R2-": 0, "R3": 0, "Cap": 1, "Cup": 1, "Saddle": -1}


class MovieError(ValueError):
    pass


@dataclass(frozen=True)
class MovieEvent:
    """One elementary string interaction at ``site`` of the current frame."""

    kind: str
    site: Site

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MovieError(f"unknown event kind {self.kind!r}")
        if _site_kind(self.site) != self.kind:
            raise MovieError(f"site for {self.site.move} does not describe a {self.kind} event")

    def to_text(self) -> str:
        return f"-- {self.kind} @ {site_to_text(self.site)}"


def _site_kind(site: Site) -> str:
    m = site.move
    if m in ("R1a", "R1b"):
        return "R1-" if site.inverse else "R1+"
    if m == "R2":
        return "R2-" if site.inverse else "R2+"
    return {"R3": "R3", "cap": "Cap", "cup": "Cup", "saddle": "Saddle"}.get(m, "?")


def site_to_text(site: Site) -> str:
    return json.dumps({"move": site.move, "inverse": site.inverse, "data": site.data}, separators=(",", ":"))


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(y) for y in x)
    return x


def site_from_text(text: str) -> Site:
    try:
        d = json.loads(text)
        return Site(d["move"], bool(d["inverse"]), _tuplify(d["data"]))
    except (ValueError, KeyError, TypeError) as e:
        raise MovieError(f"bad site {text!r}: {e}") from None


def cup_site() -> Site:
    return Site("cup", False, ())


def cap_site() -> Site:
    return Site("cap", True, ())


# ---------------------------------------------------------------------------
# transporting complexes along diagram isomorphisms


def isomorphisms(A: TangleDiagram, B: TangleDiagram, limit: int = 512):
    """All edge-label maps A -> B coming from diagram isomorphisms (up to ``limit``)."""
    from .diagram import _bfs_code, _component_codes

    if A.loops != B.loops or A.n != B.n:
        return []
    comps_a = _component_codes(A)
    comps_b = B.components()
    options = []
    for code, la, _ in comps_a:
        opts = []
        for k, comp in enumerate(comps_b):
            for st in ([-1] if -1 in comp else sorted(comp)):
                cb, lb, _ = _bfs_code(B, st)
                if cb == code:
                    inv = {v: key for key, v in lb.items()}
                    opts.append((k, {lab: inv[i] for lab, i in la.items()}))
        if not opts:
            return []
        options.append(opts)
    out = []
    for choice in itertools.product(*options):
        if len({k for k, _ in choice}) != len(choice):
            continue
        lab_map = {}
        for _, m in choice:
            lab_map.update(m)
        out.append(lab_map)
        if len(out) >= limit:
            break
    return out


def best_isomorphism(A: TangleDiagram, B: TangleDiagram) -> dict[int, int] | None:
    """The isomorphism A -> B fixing the most edge labels, so that strands
    carried along a movie are identified with themselves."""
    isos = isomorphisms(A, B)
    if not isos:
        return None
    return max(isos, key=lambda m: sum(1 for k, v in m.items() if k == v))


def _renamed_complex(C: FormalComplex, lab_map: dict[int, int]) -> FormalComplex:
    objects = {r: [_rename(S, lab_map) for S in objs] for r, objs in C.objects.items()}
    diffs = {r: {k: v.with_ends(objects[r][k[1]], objects[r + 1][k[0]]) for k, v in M.items()} for r, M in C.diffs.items()}
    return FormalComplex(objects, diffs, C.ring)


def _rename(S: Smoothing, lab_map) -> Smoothing:
    from dataclasses import replace

    return replace(S, meta=S.meta.renamed(lab_map)) if S.meta is not None else S


def _rebase(f: ChainMap, source: FormalComplex | None = None, target: FormalComplex | None = None) -> ChainMap:
    """The same matrices viewed between complexes with identical objects."""
    src = source or f.source
    tgt = target or f.target
    maps = {
        r: {(i, j): c.with_ends(src.obj(r)[j], tgt.obj(r + f.hdeg)[i]) for (i, j), c in M.items()} for r, M in f.maps.items()
    }
    return ChainMap(src, tgt, maps, f.hdeg)


def match_map(A: FormalComplex, B: FormalComplex) -> ChainMap:
    """The isomorphism A -> B found by matching states, circles and signs."""
    m = match_complexes(A, B)
    if m is None:
        raise MovieError("complexes do not match")
    return m.chain_map(A, B)


def _strip_free(C: FormalComplex, T: TangleDiagram) -> FormalComplex:
    """Forget circle labels that are not edges of ``T`` (free loops carry none)."""
    keep = set(T.edges)
    if all(S.meta is None or all(l <= keep for l in S.meta.circle_labels) for objs in C.objects.values() for S in objs):
        return C
    from dataclasses import replace

    def fix(S):
        m = S.meta
        m = replace(m, circle_labels=tuple(frozenset(l & keep) for l in m.circle_labels))
        return replace(S, meta=m)

    objects = {r: [fix(S) for S in objs] for r, objs in C.objects.items()}
    return FormalComplex(objects, C.diffs, C.ring)


def transport(T1: TangleDiagram, C1: FormalComplex, T2: TangleDiagram, C2: FormalComplex) -> ChainMap:
    """Isomorphism ``C1 -> C2`` of the complexes of isomorphic diagrams, where the
    metadata of ``C1`` refers to ``T1`` and that of ``C2`` to ``T2``."""
    A, B = _strip_free(C1, T1), _strip_free(C2, T2)
    if set(T1.edges) == set(T2.edges):
        m = match_complexes(A, B)
        if m is not None:
            return _rebase(m.chain_map(A, B), source=C1, target=C2)
    lab_map = best_isomorphism(T1, T2)
    if lab_map is None:
        raise MovieError("frames are not isomorphic diagrams")
    R = _renamed_complex(A, lab_map)
    return _rebase(match_map(R, B), source=C1, target=C2)


# ---------------------------------------------------------------------------
# local maps


def _single(C: FormalComplex) -> tuple[int, Smoothing]:
    objs = [(r, S) for r, o in C.objects.items() for S in o]
    if len(objs) != 1:
        raise MovieError("expected a one-object complex")
    return objs[0]


def _cob(S: Smoothing, T: Smoothing, comps, coeff=1) -> Cobordism:
    return Cobordism.from_components(S, T, comps, coeff)


def r1_maps(kink: TangleDiagram) -> tuple[FormalComplex, FormalComplex, ChainMap, ChainMap]:
    """``(arc complex, kink complex, F, G)`` with ``F`` adding and ``G`` removing the kink."""
    K = khovanov_complex(kink)
    E = crossingless_complex(ARC_TANGLE)
    arc = E.obj(0)[0]
    Sc = K.obj(0)[0]
    if Sc.circles != 1:
        raise MovieError("not a kink")
    positive = bool(K.obj(1))
    curtain = (((MIX, 0),), 0, 0)
    if positive:
        # a curtain and a torus with a disk removed, minus a saddle
        F = _cob(arc, Sc, [curtain, (((BOT, 0),), 1, 0)]) - _cob(arc, Sc, [(((MIX, 0), (BOT, 0)), 0, 0)])
        G = _cob(Sc, arc, [curtain, (((TOP, 0),), 0, 0)])
    else:
        F = _cob(arc, Sc, [curtain, (((BOT, 0),), 0, 0)])
        G = _cob(Sc, arc, [curtain, (((TOP, 0),), 1, 0)]) - _cob(Sc, arc, [(((MIX, 0), (TOP, 0)), 0, 0)])
    F, G = reduce(F), reduce(G)
    return E, K, ChainMap(E, K, {0: {(0, 0): F}}), ChainMap(K, E, {0: {(0, 0): G}})


ARC_TANGLE = TangleDiagram((), (), (1, 1))


def crossingless_complex(T: TangleDiagram) -> FormalComplex:
    if T.n:
        raise MovieError("tangle has crossings")
    return khovanov_complex(T)


def _one_object_iso(A: FormalComplex, B: FormalComplex) -> ChainMap:
    (ra, Sa), (rb, Sb) = _single(A), _single(B)
    if ra != rb or Sa.shape != Sb.shape or Sa.shift != Sb.shift or Sa.circles:
        raise MovieError("one-object complexes differ")
    return ChainMap(A, B, {ra: {(0, 0): Cobordism.identity(Sa).with_ends(Sa, Sb)}})


def retract_maps(E: FormalComplex, K: FormalComplex) -> tuple[ChainMap, ChainMap]:
    """``F: E -> K`` and ``G: K -> E`` from the simplification of ``K`` down to
    the single crossingless object ``E``."""
    R = simplify(K)
    i_in = _one_object_iso(E, R.small)
    i_out = _one_object_iso(R.small, E)
    return R.g.compose(i_in), i_out.compose(R.f)


def elementary_map(kind: str, before: FormalComplex, after: FormalComplex) -> ChainMap:
    """Cup, cap or saddle between one-object complexes."""
    (r0, S), (r1, T) = _single(before), _single(after)
    if r0 != r1:
        raise MovieError("cobordism events keep the height")
    if kind == "Cup":
        comps = [(((BOT, T.circles - 1),), 0, 0)] + [(((TOP, i), (BOT, i)), 0, 0) for i in range(S.circles)]
    elif kind == "Cap":
        comps = [(((TOP, S.circles - 1),), 0, 0)] + [(((TOP, i), (BOT, i)), 0, 0) for i in range(T.circles)]
    elif kind == "Saddle":
        comps = [(boundary_curves(S, T), 0, 0)]
    else:
        raise MovieError(kind)
    return ChainMap(before, after, {r0: {(0, 0): _cob(S, T, comps)}})


# -- R3 ---------------------------------------------------------------------


def _strands(T: TangleDiagram) -> DisjointSet:
    ds = DisjointSet(T.edges)
    for X in T.crossings:
        ds.union(X[0], X[2])
        ds.union(X[1], X[3])
    return ds


def peel_index(T: TangleDiagram) -> int:
    """The crossing of an R3 tangle that avoids the strand lying over both others."""
    ds = _strands(T)
    over = defaultdict(int)
    for X in T.crossings:
        over[ds.find(X[1])] += 1
    tops = [s for s, k in over.items() if k == 2]
    if len(tops) != 1:
        raise MovieError("not an R3 tangle")
    top = tops[0]
    idx = [c for c, X in enumerate(T.crossings) if ds.find(X[0]) != top and ds.find(X[1]) != top]
    if len(idx) != 1:
        raise MovieError("not an R3 tangle")
    return idx[0]


def peel_first(T: TangleDiagram) -> TangleDiagram:
    c = peel_index(T)
    order = [c] + [k for k in range(T.n) if k != c]
    return TangleDiagram(tuple(T.crossings[k] for k in order), tuple(T.signs[k] for k in order), T.boundary, T.loops)


@dataclass
class Split:
    """A complex written as ``P (+) Q`` with ``d = [[dP, 0], [psi, dQ]]``; ``psi``
    raises the height by one."""

    P: FormalComplex
    Q: FormalComplex
    psi: dict[int, Matrix]

    def assemble(self) -> FormalComplex:
        P, Q = self.P, self.Q
        heights = sorted(set(P.heights()) | set(Q.heights()))
        objects = {r: P.obj(r) + Q.obj(r) for r in heights}
        diffs = {}
        for r in heights:
            n_next = len(P.obj(r + 1))
            n_here = len(P.obj(r))
            M: Matrix = dict(P.d(r))
            for (i, j), c in self.psi.get(r, {}).items():
                M[(n_next + i, j)] = c
            for (i, j), c in Q.d(r).items():
                M[(n_next + i, n_here + j)] = c
            if M:
                diffs[r] = M
        return FormalComplex(objects, diffs, P.ring)


def split_first_crossing(K: FormalComplex, T: TangleDiagram) -> Split:
    """Split the cube complex of ``T`` by the bit of its first crossing."""
    base = -T.n_minus
    verts = cube_vertices(T.n)
    where = {}
    P_obj, Q_obj = defaultdict(list), defaultdict(list)
    for h, vs in verts.items():
        r = h + base
        for k, bits in enumerate(vs):
            side = P_obj if bits[0] == 0 else Q_obj
            where[(r, k)] = (bits[0], len(side[r]))
            side[r].append(K.obj(r)[k])
    Pd, Qd, psi = defaultdict(dict), defaultdict(dict), defaultdict(dict)
    for r, M in K.diffs.items():
        for (i, j), c in M.items():
            si, ii = where[(r + 1, i)]
            sj, jj = where[(r, j)]
            if sj == 0 and si == 0:
                Pd[r][(ii, jj)] = c
            elif sj == 1 and si == 1:
                Qd[r][(ii, jj)] = c
            else:
                psi[r][(ii, jj)] = c
    hs = list(K.heights())
    P = FormalComplex({r: P_obj.get(r, []) for r in hs}, dict(Pd), K.ring)
    Q = FormalComplex({r: Q_obj.get(r, []) for r in hs}, dict(Qd), K.ring)
    return Split(P, Q, dict(psi))


def _block(maps: Iterable[tuple[str, str, ChainMap | dict]], src: Split, tgt: Split, hdeg: int = 0) -> dict[int, Matrix]:
    """Assemble block matrices between split complexes; blocks are named 'P'/'Q'."""
    out: dict[int, Matrix] = defaultdict(dict)
    for t, s, f in maps:
        mats = f.maps if isinstance(f, ChainMap) else f
        fh = f.hdeg if isinstance(f, ChainMap) else hdeg
        for r, M in mats.items():
            off_s = 0 if s == "P" else len(src.P.obj(r))
            off_t = 0 if t == "P" else len(tgt.P.obj(r + fh))
            for (i, j), c in M.items():
                key = (off_t + i, off_s + j)
                out[r][key] = out[r][key] + c if key in out[r] else c
    return {r: {k: v for k, v in M.items() if not v.is_zero()} for r, M in out.items()}


def _psi_map(S: Split, source: FormalComplex, target: FormalComplex) -> ChainMap:
    return ChainMap(source, target, S.psi, 1)


@dataclass
class ConeReduction:
    """``K`` is the cube complex; ``small`` has the bigon half retracted;
    ``F: K -> small`` and ``G: small -> K`` are homotopy inverse."""

    K: FormalComplex
    small: FormalComplex
    split_small: Split
    F: ChainMap
    G: ChainMap


def _reduce_cone(T: TangleDiagram) -> ConeReduction:
    K = khovanov_complex(T)
    S = split_first_crossing(K, T)
    RP, RQ = simplify(S.P), simplify(S.Q)
    if RQ.small.size() == 1 and RP.small.size() != 1:
        side = "Q"
    elif RP.small.size() == 1 and RQ.small.size() != 1:
        side = "P"
    else:
        raise MovieError("could not locate the bigon half of the R3 tangle")
    if side == "Q":
        R = RQ
        psi = _psi_map(S, S.P, S.Q)
        new_psi = R.f.compose(psi)
        small_split = Split(S.P, R.small, new_psi.maps)
        small = small_split.assemble()
        hpsi = R.h.compose(psi)  # P -> Q, height 0
        F = ChainMap(K, small, _block([("P", "P", ChainMap.identity(S.P)), ("Q", "Q", R.f)], S, small_split))
        Gm = _block([("P", "P", ChainMap.identity(S.P)), ("Q", "Q", R.g), ("Q", "P", hpsi.scale(-1))], small_split, S)
        G = ChainMap(small, K, Gm)
    else:
        R = RP
        psi = _psi_map(S, S.P, S.Q)
        new_psi = psi.compose(R.g)
        small_split = Split(R.small, S.Q, new_psi.maps)
        small = small_split.assemble()
        psih = psi.compose(R.h)  # P -> Q, height 0
        F = ChainMap(K, small, _block([("P", "P", R.f), ("Q", "Q", ChainMap.identity(S.Q)), ("Q", "P", psih.scale(-1))], S, small_split))
        G = ChainMap(small, K, _block([("P", "P", R.g), ("Q", "Q", ChainMap.identity(S.Q))], small_split, S))
    return ConeReduction(K, small, small_split, F, G)


def find_isomorphism(A: FormalComplex, B: FormalComplex, limit: int = 100000) -> ChainMap | None:
    """A chain isomorphism made of signed identities, found by brute force over
    objects with equal shape and shift (for small complexes)."""
    hs = list(A.heights())
    if hs != list(B.heights()):
        return None
    per_height = []
    for r in hs:
        a, b = A.obj(r), B.obj(r)
        if sorted((S.arcs, S.circles, S.shift) for S in a) != sorted((S.arcs, S.circles, S.shift) for S in b):
            return None
        choices = []
        for S in a:
            choices.append([j for j, T in enumerate(b) if (T.arcs, T.circles, T.shift) == (S.arcs, S.circles, S.shift)])
        per_height.append(choices)

    def bijections(choices, used=()):
        if not choices:
            yield ()
            return
        for j in choices[0]:
            if j not in used:
                for rest in bijections(choices[1:], used + (j,)):
                    yield (j,) + rest

    def circle_perms(S):
        return list(itertools.permutations(range(S.circles)))

    tried = 0
    for perms in itertools.product(*(list(bijections(ch)) for ch in per_height)):
        perm = dict(zip(hs, perms))
        circ_opts = [circle_perms(S) for r in hs for S in A.obj(r)]
        for cps in itertools.product(*circ_opts):
            tried += 1
            if tried > limit:
                return None
            it = iter(cps)
            circ = {r: [list(next(it)) for _ in A.obj(r)] for r in hs}
            signs = _sign_solve(A, B, perm, circ)
            if signs is not None:
                maps = {}
                for r in hs:
                    M = {}
                    for i, S in enumerate(A.obj(r)):
                        T = B.obj(r)[perm[r][i]]
                        ident = Cobordism.identity(S, A.ring).relabel_circles(S, T, list(range(S.circles)), circ[r][i])
                        M[(perm[r][i], i)] = ident.scale(signs[r][i])
                    maps[r] = M
                return ChainMap(A, B, maps)
    return None


def _sign_solve(A, B, perm, circ):
    edges = defaultdict(list)
    for r in A.heights():
        MA = {k: reduce(v) for k, v in A.d(r).items()}
        MA = {k: v for k, v in MA.items() if not v.is_zero()}
        MB = {k: reduce(v) for k, v in B.d(r).items()}
        MB = {k: v for k, v in MB.items() if not v.is_zero()}
        if len(MA) != len(MB):
            return None
        for (i, k), c in MA.items():
            tb = MB.get((perm[r + 1][i], perm[r][k]))
            if tb is None:
                return None
            S, T = B.obj(r)[perm[r][k]], B.obj(r + 1)[perm[r + 1][i]]
            t = reduce(c.relabel_circles(S, T, circ[r][k], circ[r + 1][i]))
            if t == tb:
                s = 1
            elif t == -tb:
                s = -1
            else:
                return None
            edges[(r, k)].append(((r + 1, i), s))
            edges[(r + 1, i)].append(((r, k), s))
    signs = {r: [0] * len(A.obj(r)) for r in A.heights()}
    for r in A.heights():
        for i in range(len(A.obj(r))):
            if signs[r][i]:
                continue
            signs[r][i] = 1
            queue = deque([(r, i)])
            while queue:
                v = queue.popleft()
                for w, s in edges[v]:
                    want = signs[v[0]][v[1]] * s
                    if signs[w[0]][w[1]] == 0:
                        signs[w[0]][w[1]] = want
                        queue.append(w)
                    elif signs[w[0]][w[1]] != want:
                        return None
    return signs


def r3_map(before: TangleDiagram, after: TangleDiagram) -> tuple[TangleDiagram, TangleDiagram, ChainMap]:
    """The R3 chain map between the complexes of the two sides, each with its
    peeled crossing first.  Returns the reordered tangles and the map."""
    L, R = peel_first(before), peel_first(after)
    cl, cr = _reduce_cone(L), _reduce_cone(R)
    iso = find_isomorphism(cl.small, cr.small)
    if iso is None:
        raise MovieError("the reduced cones of the two sides of R3 do not match")
    return L, R, cr.G.compose(iso.compose(cl.F))


@cache
def _r3_cached(before: TangleDiagram, after: TangleDiagram):
    return r3_map(before, after)


# ---------------------------------------------------------------------------
# events


def local_map(kind: str, before: TangleDiagram, after: TangleDiagram) -> tuple[TangleDiagram, TangleDiagram, ChainMap]:
    """The local chain map of an event; the tangles may come back with their
    crossings reordered."""
    if kind in ("R1+", "R1-"):
        kink = after if kind == "R1+" else before
        E, K, F, G = r1_maps(kink)
        Eb = crossingless_complex(before if kind == "R1+" else after)
        if kind == "R1+":
            return before, after, _rebase(F, source=Eb)
        return before, after, _rebase(G, target=Eb)
    if kind in ("R2+", "R2-"):
        flat, z = (before, after) if kind == "R2+" else (after, before)
        E, K = crossingless_complex(flat), khovanov_complex(z)
        F, G = retract_maps(E, K)
        return before, after, (F if kind == "R2+" else G)
    if kind == "R3":
        return _r3_cached(before, after)
    return before, after, elementary_map(kind, crossingless_complex(before), crossingless_complex(after))


def map_degrees(f: ChainMap) -> set[int]:
    out = set()
    for M in f.maps.values():
        for c in M.values():
            for g in reduce(c).generators():
                out.add(degree(g, graded=True))
    return out


@dataclass
class EventResult:
    source: TangleDiagram
    target: TangleDiagram
    map: ChainMap


def apply_event(T: TangleDiagram, e: MovieEvent) -> TangleDiagram:
    try:
        return rewrite(T, e.site).result()
    except DiagramError as err:
        raise MovieError(f"{e.kind} does not apply: {err}") from None


def event_map(e: MovieEvent, frame: TangleDiagram, source: FormalComplex | None = None) -> EventResult:
    """The chain map ``Kh(frame) -> Kh(next frame)`` of one event."""
    try:
        rw = rewrite(frame, e.site)
    except DiagramError as err:
        raise MovieError(f"{e.kind} does not apply: {err}") from None
    if _site_kind(e.site) != e.kind:
        raise MovieError("event and site disagree")
    loc_b, loc_a, f = local_map(e.kind, rw.before, rw.after)
    ins_b, ins_a = rw.inputs(loc_b), rw.inputs(loc_a)
    gl_b, gl_a = glue(rw.D, ins_b), glue(rw.D, ins_a)
    parts_b = [khovanov_complex(x) for x in ins_b[:-1]] + [f.source]
    parts_a = parts_b[:-1] + [f.target]
    comp_b = planar_compose(rw.D, parts_b, gl_b.input_labels, gl_b.d_labels)
    comp_a = planar_compose(rw.D, parts_a, gl_a.input_labels, gl_a.d_labels)
    ext = extend_map(comp_b, comp_a, rw.D, parts_b, parts_a, len(parts_b) - 1, f)
    nxt = rw.result()
    Kb = source if source is not None else khovanov_complex(frame)
    Ka = khovanov_complex(nxt)
    into = transport(frame, Kb, gl_b.diagram, comp_b.complex)
    out = transport(gl_a.diagram, comp_a.complex, nxt, Ka)
    return EventResult(frame, nxt, out.compose(ext.compose(into)))


# ---------------------------------------------------------------------------
# movies


@dataclass
class Movie:
    frames: list[TangleDiagram]
    events: list[MovieEvent] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if len(self.frames) != len(self.events) + 1:
            raise MovieError(f"{len(self.frames)} frames need {len(self.frames) - 1} events, got {len(self.events)}")

    @classmethod
    def from_events(cls, start: TangleDiagram, events: Sequence[MovieEvent], name: str = "") -> Movie:
        frames = [start]
        for e in events:
            frames.append(apply_event(frames[-1], e))
        return cls(frames, list(events), name)

    def validate(self) -> None:
        for i, e in enumerate(self.events):
            got = apply_event(self.frames[i], e)
            if not is_isomorphic(got, self.frames[i + 1]):
                raise MovieError(f"event {i} ({e.kind}) does not produce frame {i + 1}")

    @property
    def degree(self) -> int:
        return sum(EVENT_DEGREE[e.kind] for e in self.events)

    def to_text(self) -> str:
        lines = [f"# {self.name}"] if self.name else []
        lines.append(self.frames[0].to_pd())
        for e, F in zip(self.events, self.frames[1:]):
            lines.append(e.to_text())
            lines.append(F.to_pd())
        return "\n".join(lines) + "\n"

    def reversed(self) -> Movie:
        """The same clip read from the bottom up."""
        frames = list(reversed(self.frames))
        events = []
        for i, e in enumerate(reversed(self.events)):
            events.append(find_event(frames[i], frames[i + 1], INVERSE_KIND[e.kind]))
        return Movie(frames, events, self.name + " (reversed)" if self.name else "")


def parse_movie(text: str) -> Movie:
    frames: list[TangleDiagram] = []
    events: list[MovieEvent] = []
    name = ""
    pending: str | None = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            name = name or line[1:].strip()
            continue
        if line.startswith("--"):
            if pending is not None or not frames:
                raise MovieError(f"line {ln}: an event must sit between two frames")
            pending = line[2:].strip()
            continue
        try:
            T = parse_pd(line)
        except ValueError as e:
            raise MovieError(f"line {ln}: {e}") from None
        if frames:
            if pending is None:
                raise MovieError(f"line {ln}: two frames without an event between them")
            kind, _, site_text = pending.partition("@")
            kind = kind.strip()
            if site_text.strip():
                events.append(MovieEvent(kind, site_from_text(site_text.strip())))
            else:
                events.append(find_event(frames[-1], T, kind))
            pending = None
        frames.append(T)
    if pending is not None:
        raise MovieError("movie ends with an event and no frame")
    if not frames:
        raise MovieError("empty movie")
    m = Movie(frames, events, name)
    m.validate()
    return m


def candidate_sites(T: TangleDiagram, kind: str) -> list[Site]:
    if kind in ("R1+", "R1-"):
        return reidemeister_sites(T, "R1a", kind == "R1-") + reidemeister_sites(T, "R1b", kind == "R1-")
    if kind in ("R2+", "R2-"):
        return reidemeister_sites(T, "R2", kind == "R2-")
    if kind == "R3":
        return reidemeister_sites(T, "R3")
    if kind == "Cup":
        return [cup_site()]
    if kind == "Cap":
        return [cap_site()] if T.loops else []
    if kind == "Saddle":
        return saddle_sites(T)
    raise MovieError(f"unknown event kind {kind!r}")


def saddle_sites(T: TangleDiagram) -> list[Site]:
    out = []
    for f in T.faces:
        for i in range(len(f)):
            for j in range(i + 1, len(f)):
                if T.label_at(f[i]) != T.label_at(f[j]):
                    out.append(Site("saddle", False, ("darts", f[i], f[j])))
    for s in T.slots():
        out.append(Site("saddle", False, ("loop-split", s)))
        if T.loops:
            out.append(Site("saddle", False, ("loop-merge", s)))
    if T.loops >= 2:
        out.append(Site("saddle", False, ("loops-merge",)))
    if T.loops:
        out.append(Site("saddle", False, ("loop-self",)))
    good = []
    for site in out:
        try:
            rewrite(T, site)
        except DiagramError:
            continue
        good.append(site)
    return good


def find_event(A: TangleDiagram, B: TangleDiagram, kind: str) -> MovieEvent:
    """An event of the given kind taking ``A`` to a diagram isomorphic to ``B``;
    results equal to ``B`` on the nose are preferred."""
    fallback = None
    for s in candidate_sites(A, kind):
        try:
            got = rewrite(A, s).result()
        except DiagramError:
            continue
        if got.crossings == B.crossings and got.signs == B.signs and got.loops == B.loops and got.boundary == B.boundary:
            return MovieEvent(kind, s)
        if fallback is None and is_isomorphic(got, B):
            fallback = MovieEvent(kind, s)
    if fallback is None:
        raise MovieError(f"no {kind} event turns the frame into the next one")
    return fallback


def evaluate_movie(m: Movie) -> ChainMap:
    """Composite of the event maps, ``Kh(first frame) -> Kh(last frame)``."""
    K0 = khovanov_complex(m.frames[0])
    f = ChainMap.identity(K0)
    cur = K0
    for i, e in enumerate(m.events):
        res = event_map(e, m.frames[i], source=cur)
        target = khovanov_complex(m.frames[i + 1])
        step = transport(res.target, res.map.target, m.frames[i + 1], target).compose(res.map)
        f = step.compose(f)
        cur = target
    return f


def closing_map(m: Movie) -> ChainMap:
    """For a circular movie, the evaluation followed by the identification of
    the last frame with the first."""
    f = evaluate_movie(m)
    back = transport(m.frames[-1], f.target, m.frames[0], f.source)
    return back.compose(f)


# ---------------------------------------------------------------------------
# linear algebra after the functor


def _p_of(field_name: str) -> int:
    if field_name == "Q":
        return 0
    if field_name == "F2":
        return 2
    raise ValueError(f"field must be Q or F2, got {field_name!r}")


def _qblocks(A: AlgebraicComplex, r: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = defaultdict(list)
    for i, q in enumerate(A.degrees.get(r, ())):
        out[q].append(i)
    return out


def _as_alg(f: ChainMap) -> AlgebraicMap:
    spec = spec_khovanov()
    A = apply_functor(spec, f.source)
    B = A if f.target is f.source else apply_functor(spec, f.target)
    return apply_functor_map(spec, f, A, B)


def check_homotopic_to_pm_identity(f: ChainMap | AlgebraicMap, field: str = "Q") -> int | None:
    """+1 or -1 when ``f - s I = d h + h d`` is solvable for ``h``, else None."""
    F = _as_alg(f) if isinstance(f, ChainMap) else f
    if F.hdeg != 0 or F.source.degrees != F.target.degrees:
        raise MovieError("source and target complexes differ")
    ident = {r: {i: {i: 1} for i in range(F.source.dim(r))} for r in F.source.heights()}
    return homotopy_sign(F, AlgebraicMap(F.source, F.target, ident), field)


def homotopy_sign(f: ChainMap | AlgebraicMap, g: ChainMap | AlgebraicMap, field: str = "Q") -> int | None:
    """+1 or -1 when ``f - s g`` is null-homotopic over the field, else None.

    The unknowns are the entries of a q-degree preserving ``h`` of height -1,
    so the system splits into one block per q-degree."""
    p = _p_of(field)
    F = _as_alg(f) if isinstance(f, ChainMap) else f
    G = _as_alg(g) if isinstance(g, ChainMap) else g
    if F.hdeg or G.hdeg:
        raise MovieError("homotopy_sign compares height-preserving maps")
    if F.source.degrees != G.source.degrees or F.target.degrees != G.target.degrees:
        raise MovieError("the two maps have different source or target")
    for sign in (1, -1):
        diff = _lin_comb(F.maps, G.maps, -sign)
        if _null_homotopic(F.source, F.target, diff, p):
            return sign
    return None


def _lin_comb(a, b, t):
    out: dict = {}
    for mats, c in ((a, 1), (b, t)):
        for r, M in mats.items():
            for col, rows in M.items():
                for row, v in rows.items():
                    key = (r, row, col)
                    out[key] = out.get(key, 0) + c * v
    return out


def _null_homotopic(A: AlgebraicComplex, B: AlgebraicComplex, target: dict, p: int) -> bool:
    """Is the map with entries ``target[(r, row, col)]`` equal to ``d h + h d``?"""
    target = {k: v for k, v in target.items() if field_norm(v, p)}
    if not target:
        return True
    qa = {r: A.degrees.get(r, []) for r in A.heights()}
    qb = {r: B.degrees.get(r, []) for r in B.heights()}
    for q in sorted({v for qs in qa.values() for v in qs} | {v for qs in qb.values() for v in qs}):
        # columns of the system are entries h_r[(b, c)]: A^r_c -> B^{r-1}_b in degree q
        ca = {r: [i for i, x in enumerate(qs) if x == q] for r, qs in qa.items()}
        cb = {r: [i for i, x in enumerate(qs) if x == q] for r, qs in qb.items()}
        want = {k: v for k, v in target.items() if qa.get(k[0]) and qa[k[0]][k[2]] == q}
        index: dict = {}
        key = lambda k: index.setdefault(k, len(index))
        tvec = {key(k): v for k, v in want.items()}
        E = TrackedEliminator(p)
        n = 0
        for r in A.heights():
            dA = A.d(r - 1)  # A^{r-1} -> A^r
            dB = B.d(r - 1)  # B^{r-1} -> B^r
            into_c: dict[int, list] = defaultdict(list)
            for x, rows in dA.items():
                for c, v in rows.items():
                    into_c[c].append((x, v))
            for c in ca.get(r, ()):
                for b in cb.get(r - 1, ()):
                    vec: dict = {}
                    for row, v in dB.get(b, {}).items():  # d_B o E_bc: column c of height r
                        k = key((r, row, c))
                        vec[k] = vec.get(k, 0) + v
                    for x, v in into_c.get(c, ()):  # E_bc o d_A: column x of height r-1
                        k = key((r - 1, b, x))
                        vec[k] = vec.get(k, 0) + v
                    if vec:
                        E.add(vec, n)
                    n += 1
        rem, _ = E.reduce(tvec)
        if rem:
            return False
    return True


@dataclass
class HomologyMap:
    """Matrices of an induced map on homology, per bidegree ``(r, q)``; columns
    index the source basis, rows the target basis."""

    field: str
    blocks: dict[tuple[int, int], list[list]]

    def is_pm_identity(self) -> int | None:
        sign = None
        for M in self.blocks.values():
            n = len(M)
            if any(len(row) != n for row in M):
                return None
            for i in range(n):
                for j in range(n):
                    v = M[i][j]
                    if i != j and v:
                        return None
                    if i == j:
                        if v not in (1, -1) and not (self.field == "F2" and v == 1):
                            return None
                        s = 1 if v == 1 else -1
                        if sign is None:
                            sign = s
                        elif sign != s:
                            return None
        return sign if sign is not None else 1

    def signs_against(self, other: HomologyMap) -> set[int]:
        """All ``s`` in {1, -1} with ``self = s * other`` (both when the maps vanish)."""
        keys = set(self.blocks) | set(other.blocks)
        return {s for s in (1, -1) if all(_scaled(self.blocks.get(k, []), s) == other.blocks.get(k, []) for k in keys)}

    def equal_up_to_sign(self, other: HomologyMap) -> int | None:
        ok = self.signs_against(other)
        return 1 if 1 in ok else (-1 if ok else None)

    def rank(self) -> int:
        from .linalg import rank_f2, rank_q

        total = 0
        for M in self.blocks.values():
            cols = [{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(len(M[0]) if M else 0)]
            total += rank_f2(cols) if self.field == "F2" else rank_q(cols)
        return total


def _scaled(M, s):
    return [[x * s if s != 1 else x for x in row] for row in M]


def _homology_data(A: AlgebraicComplex, r: int, q: int, p: int):
    """An eliminator holding the boundaries and then a basis of cycle
    representatives (tagged ``("H", k)``) in bidegree ``(r, q)``."""
    here = [i for i, x in enumerate(A.degrees.get(r, ())) if x == q]
    here_set = set(here)
    Z = kernel_basis({c: A.d(r).get(c, {}) for c in here}, here, p)
    E = TrackedEliminator(p)
    for x, qx in enumerate(A.degrees.get(r - 1, ())):
        if qx == q:
            E.add({row: c for row, c in A.d(r - 1).get(x, {}).items() if row in here_set}, ("B", x))
    reps = []
    for z in Z:
        if E.add(z, ("H", len(reps))) is None:
            reps.append(z)
    return E, reps


def induced_homology_map(f: ChainMap | AlgebraicMap, field: str = "Q") -> HomologyMap:
    """The map on homology in every bidegree, in bases of cycle representatives.

    Blocks are keyed by ``(r, q)``; a map that is not q-homogeneous also gets
    blocks ``(r, q, q')`` for the part landing in q-degree ``q'``."""
    p = _p_of(field)
    F = _as_alg(f) if isinstance(f, ChainMap) else f
    if F.hdeg != 0:
        raise MovieError("homology maps need height-preserving maps")
    A, B = F.source, F.target
    blocks: dict = {}
    cache: dict = {}

    def target_data(r, q):
        if (r, q) not in cache:
            cache[(r, q)] = _homology_data(B, r, q, p)
        return cache[(r, q)]

    for r in A.heights():
        M = F.maps.get(r, {})
        for q in sorted(set(A.degrees.get(r, ()))):
            _, reps = _homology_data(A, r, q, p)
            images = []
            for z in reps:
                img: dict = defaultdict(dict)
                for col, a in z.items():
                    for row, c in M.get(col, {}).items():
                        tq = B.degrees[r][row]
                        img[tq][row] = img[tq].get(row, 0) + a * c
                images.append(img)
            tqs = {q} | {tq for img in images for tq, v in img.items() if any(field_norm(x, p) for x in v.values())}
            for tq in sorted(tqs):
                Et, treps = target_data(r, tq)
                if not reps and not treps:
                    continue
                mat = [[0] * len(reps) for _ in treps]
                for j, img in enumerate(images):
                    coords = Et.express(img.get(tq, {}))
                    if coords is None:
                        raise MovieError("the image of a cycle is not a cycle")
                    for tag, c in coords.items():
                        if tag[0] == "H":
                            mat[tag[1]][j] = _clean(c, p)
                blocks[(r, q) if tq == q else (r, q, tq)] = mat
    return HomologyMap(field, blocks)


def _clean(c, p):
    if p:
        return int(c) % p
    c = field_norm(c, 0)
    return int(c) if c.denominator == 1 else c
