"""Formal complexes over the cobordism category.

A complex is a column of smoothings at each height with matrices of
cobordisms between consecutive columns.  Matrices are sparse dicts keyed by
``(row, col)``: ``row`` indexes the target column, ``col`` the source.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict, deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .algebra import ZZ, Ring
from .cob3 import (
    BOT,
    MIX,
    TOP,
    Cobordism,
    ComposedSmoothing,
    Smoothing,
    _mixed,
    compose_smoothings,
    degree,
    elementary_smoothing,
    horizontal_compose,
    normalize_components,
    reduce,
    vertical_compose,
)
from .diagram import TangleDiagram
from .planar import PlanarArcDiagram

Matrix = dict[tuple[int, int], Cobordism]


def mat_mul(B: Matrix, A: Matrix) -> Matrix:
    """``B o A`` with every entry reduced."""
    cols_of: dict[int, list] = defaultdict(list)
    for (j, k), a in A.items():
        cols_of[j].append((k, a))
    out: Matrix = {}
    for (i, j), b in B.items():
        for k, a in cols_of.get(j, ()):
            c = vertical_compose(b, a)
            out[(i, k)] = out[(i, k)] + c if (i, k) in out else c
    return {key: v for key, v in out.items() if not v.is_zero()}


def mat_add(A: Matrix, B: Matrix, sign: int = 1) -> Matrix:
    out = dict(A)
    for key, b in B.items():
        b = b if sign == 1 else b.scale(sign)
        out[key] = out[key] + b if key in out else b
    return {key: v for key, v in out.items() if not v.is_zero()}


def mat_scale(A: Matrix, a) -> Matrix:
    return {key: v.scale(a) for key, v in A.items() if a}


def mat_equal(A: Matrix, B: Matrix) -> bool:
    return not mat_add({k: reduce(v) for k, v in A.items()}, {k: reduce(v) for k, v in B.items()}, -1)


@dataclass
class FormalComplex:
    objects: dict[int, list[Smoothing]]
    diffs: dict[int, Matrix] = field(default_factory=dict)
    ring: Ring = ZZ

    def __post_init__(self):
        if self.objects:
            lo, hi = min(self.objects), max(self.objects)
            for r in range(lo, hi + 1):
                self.objects.setdefault(r, [])
        self.objects = dict(sorted(self.objects.items()))

    @property
    def min_height(self) -> int:
        return min(self.objects, default=0)

    @property
    def max_height(self) -> int:
        return max(self.objects, default=-1)

    def heights(self) -> range:
        return range(self.min_height, self.max_height + 1)

    def obj(self, r: int) -> list[Smoothing]:
        return self.objects.get(r, [])

    def d(self, r: int) -> Matrix:
        return self.diffs.get(r, {})

    def size(self) -> int:
        return sum(len(v) for v in self.objects.values())

    def validate(self) -> None:
        """Entries must run between the objects their row and column name."""
        for r, M in self.diffs.items():
            src, tgt = self.obj(r), self.obj(r + 1)
            for (i, j), c in M.items():
                if not (0 <= j < len(src) and 0 <= i < len(tgt)):
                    raise ValueError(f"entry ({i},{j}) at height {r} is out of range")
                if c.source.shape != src[j].shape or c.target.shape != tgt[i].shape:
                    raise ValueError(f"entry ({i},{j}) at height {r} has the wrong ends")

    def to_json(self) -> dict:
        return {
            "heights": [self.min_height, self.max_height],
            "objects": {str(r): [S.to_json() for S in objs] for r, objs in self.objects.items()},
            "diffs": {
                str(r): [[i, j, c.to_json()] for (i, j), c in sorted(M.items())] for r, M in sorted(self.diffs.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass
class ChainMap:
    """Maps ``source.objects[r] -> target.objects[r + hdeg]``; ``hdeg = -1`` holds homotopies."""

    source: FormalComplex
    target: FormalComplex
    maps: dict[int, Matrix]
    hdeg: int = 0

    def at(self, r: int) -> Matrix:
        return self.maps.get(r, {})

    @classmethod
    def identity(cls, C: FormalComplex) -> ChainMap:
        return cls(C, C, {r: {(i, i): Cobordism.identity(S, C.ring) for i, S in enumerate(objs)} for r, objs in C.objects.items()})

    @classmethod
    def zero(cls, A: FormalComplex, B: FormalComplex, hdeg: int = 0) -> ChainMap:
        return cls(A, B, {}, hdeg)

    def compose(self, first: ChainMap) -> ChainMap:
        """``self o first``."""
        maps = {}
        for r in first.source.heights():
            M = mat_mul(self.at(r + first.hdeg), first.at(r))
            if M:
                maps[r] = M
        return ChainMap(first.source, self.target, maps, self.hdeg + first.hdeg)

    def __add__(self, other: ChainMap) -> ChainMap:
        keys = set(self.maps) | set(other.maps)
        return ChainMap(self.source, self.target, {r: mat_add(self.at(r), other.at(r)) for r in keys}, self.hdeg)

    def __neg__(self) -> ChainMap:
        return self.scale(-1)

    def __sub__(self, other: ChainMap) -> ChainMap:
        return self + (-other)

    def scale(self, a) -> ChainMap:
        return ChainMap(self.source, self.target, {r: mat_scale(M, a) for r, M in self.maps.items()}, self.hdeg)

    def is_chain_map(self) -> bool:
        for r in range(self.source.min_height - 1, self.source.max_height + 1):
            left = mat_mul(self.target.d(r), self.at(r))
            right = mat_mul(self.at(r + 1), self.source.d(r))
            if not mat_equal(left, right):
                return False
        return True

    def is_zero(self) -> bool:
        return all(not {k: v for k, v in M.items() if not reduce(v).is_zero()} for M in self.maps.values())

    def validate(self) -> None:
        for r, M in self.maps.items():
            src, tgt = self.source.obj(r), self.target.obj(r + self.hdeg)
            for (i, j), c in M.items():
                if not (0 <= j < len(src) and 0 <= i < len(tgt)):
                    raise ValueError(f"map entry ({i},{j}) at height {r} is out of range")
                if c.source.shape != src[j].shape or c.target.shape != tgt[i].shape:
                    raise ValueError(f"map entry ({i},{j}) at height {r} has the wrong ends")


def verify_d_squared(C: FormalComplex) -> bool:
    return all(not mat_mul(C.d(r + 1), C.d(r)) for r in C.heights())


def graded_degrees(C: FormalComplex) -> set[int]:
    """Graded degrees of all differential entries."""
    out = set()
    for M in C.diffs.values():
        for c in M.values():
            for g in c.generators():
                out.add(degree(g, graded=True))
    return out


# ---------------------------------------------------------------------------
# the cube


def saddle_components(S0: Smoothing, S1: Smoothing, labels) -> tuple:
    """The saddle between two resolutions differing at one crossing, identity
    elsewhere.  Circles and arcs are located through their metadata labels."""
    m0, m1 = S0.meta, S1.meta
    L = set(labels)
    mix = _mixed(S0.arcs, S1.arcs)
    touched: list = []
    for i, labs in enumerate(m0.circle_labels):
        if labs & L:
            touched.append((TOP, i))
    for i, labs in enumerate(m1.circle_labels):
        if labs & L:
            touched.append((BOT, i))
    hit_mix = set()
    for arcs, meta in ((S0.arcs, m0), (S1.arcs, m1)):
        for (a, _), labs in zip(arcs, meta.arc_labels):
            if labs & L:
                hit_mix.add(mix[a])
    touched += [(MIX, p) for p in sorted(hit_mix)]
    comps = [(tuple(touched), 0, 0)]
    free: dict[frozenset, list[int]] = defaultdict(list)
    for i, labs in enumerate(m1.circle_labels):
        if not labs & L:
            free[labs].append(i)
    for i, labs in enumerate(m0.circle_labels):
        if not labs & L:
            comps.append((((TOP, i), (BOT, free[labs].pop(0))), 0, 0))
    for p in sorted(set(mix.values()) - hit_mix):
        comps.append((((MIX, p),), 0, 0))
    return normalize_components(comps)


def cube_vertices(n: int) -> dict[int, list[tuple[int, ...]]]:
    out: dict[int, list[tuple[int, ...]]] = {h: [] for h in range(n + 1)}
    for bits in itertools.product((0, 1), repeat=n):
        out[sum(bits)].append(bits)
    return out


def build_cube(T: TangleDiagram, ring: Ring = ZZ) -> FormalComplex:
    """The cube of resolutions of ``T``; the all-zero vertex sits at height ``-n_minus``."""
    n = T.n
    D = T.arc_diagram()
    verts = cube_vertices(n)
    base = -T.n_minus
    smooth: dict[tuple[int, ...], Smoothing] = {}
    index: dict[tuple[int, ...], int] = {}
    objects: dict[int, list[Smoothing]] = {}
    for h, vs in verts.items():
        col = []
        for k, bits in enumerate(vs):
            parts = [elementary_smoothing(X, b) for X, b in zip(T.crossings, bits)]
            S = compose_smoothings(D, parts).smoothing
            smooth[bits] = S
            index[bits] = k
            col.append(S)
        objects[h + base] = col
    diffs: dict[int, Matrix] = {}
    for h, vs in verts.items():
        if h == n:
            continue
        M: Matrix = {}
        for bits in vs:
            for j in range(n):
                if bits[j]:
                    continue
                tgt = bits[:j] + (1,) + bits[j + 1 :]
                sign = -1 if sum(bits[:j]) % 2 else 1
                S0, S1 = smooth[bits], smooth[tgt]
                comps = saddle_components(S0, S1, T.crossings[j])
                M[(index[tgt], index[bits])] = Cobordism(S0, S1, {comps: sign}, ring)
        diffs[h + base] = M
    return FormalComplex(objects, diffs, ring)


def _reend(M: Matrix, src: list[Smoothing], tgt: list[Smoothing]) -> Matrix:
    return {(i, j): c.with_ends(src[j], tgt[i]) for (i, j), c in M.items()}


def shift(C: FormalComplex, s: int = 0, m: int = 0) -> FormalComplex:
    """``C[s]{m}``: height ``r`` of the result is height ``r + s`` of ``C``."""
    objects = {r - s: [S.shifted(m) for S in objs] for r, objs in C.objects.items()}
    diffs = {r - s: _reend(M, objects[r - s], objects[r - s + 1]) for r, M in C.diffs.items()}
    return FormalComplex(objects, diffs, C.ring)


def kh_normalize(C: FormalComplex, n_plus: int, n_minus: int) -> FormalComplex:
    """Add ``r + n_plus - n_minus`` to the q-shift of every object at height ``r``."""
    objects = {r: [S.shifted(r + n_plus - n_minus) for S in objs] for r, objs in C.objects.items()}
    diffs = {r: _reend(M, objects[r], objects[r + 1]) for r, M in C.diffs.items()}
    return FormalComplex(objects, diffs, C.ring)


def khovanov_complex(T: TangleDiagram, ring: Ring = ZZ) -> FormalComplex:
    return kh_normalize(build_cube(T, ring), T.n_plus, T.n_minus)


# ---------------------------------------------------------------------------
# cones


def cone(psi: ChainMap) -> FormalComplex:
    """``Gamma^r = source^{r+1} + target^r`` with ``d = [[-d0, 0], [psi, d1]]``."""
    A, B = psi.source, psi.target
    lo = min(A.min_height - 1, B.min_height)
    hi = max(A.max_height - 1, B.max_height)
    objects = {r: A.obj(r + 1) + B.obj(r) for r in range(lo, hi + 1)}
    diffs: dict[int, Matrix] = {}
    for r in range(lo, hi):
        n0, n0_next = len(A.obj(r + 1)), len(A.obj(r + 2))
        M: Matrix = {}
        for (i, j), c in A.d(r + 1).items():
            M[(i, j)] = -c
        for (i, j), c in psi.at(r + 1).items():
            M[(n0_next + i, j)] = c
        for (i, j), c in B.d(r).items():
            M[(n0_next + i, n0 + j)] = c
        diffs[r] = M
    return FormalComplex(objects, diffs, A.ring)


# ---------------------------------------------------------------------------
# planar composition


@dataclass
class PlanarComposite:
    """A composed complex together with where each object came from."""

    complex: FormalComplex
    keys: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]
    composed: dict[tuple, ComposedSmoothing]


def _rename_smoothing(S: Smoothing, mapping: Mapping[int, int] | None) -> Smoothing:
    if not mapping or S.meta is None:
        return S
    return Smoothing(S.arcs, S.circles, S.shift, S.meta.renamed(mapping))


def planar_compose(
    D: PlanarArcDiagram,
    parts: Sequence[FormalComplex],
    renames: Sequence[Mapping[int, int] | None] | None = None,
    d_rename: Mapping[int, int] | None = None,
) -> PlanarComposite:
    """Tensor the parts through ``D``.  Objects at a height are ordered by the
    tuple of part heights, then by the tuple of part indices."""
    if len(parts) != len(D.holes):
        raise ValueError(f"diagram has {len(D.holes)} holes, got {len(parts)} complexes")
    ring = parts[0].ring if parts else ZZ
    renames = list(renames) if renames is not None else [None] * len(parts)
    for h, P in zip(D.holes, parts):
        for objs in P.objects.values():
            for S in objs:
                if S.size != len(h):
                    raise ValueError(f"a part object has {S.size} boundary points but its hole has {len(h)}")
    ren_objs = [{r: [_rename_smoothing(S, renames[i]) for S in objs] for r, objs in P.objects.items()} for i, P in enumerate(parts)]
    keys: dict[int, list] = defaultdict(list)
    for hts in itertools.product(*(list(P.heights()) for P in parts)):
        sizes = [len(P.obj(r)) for P, r in zip(parts, hts)]
        if any(s == 0 for s in sizes):
            continue
        for idxs in itertools.product(*(range(s) for s in sizes)):
            keys[sum(hts)].append((hts, idxs))
    composed: dict[tuple, ComposedSmoothing] = {}
    objects: dict[int, list[Smoothing]] = {}
    pos: dict[tuple, int] = {}
    for r in sorted(keys):
        col = []
        for k, key in enumerate(keys[r]):
            hts, idxs = key
            cs = compose_smoothings(D, [ren_objs[i][hts[i]][idxs[i]] for i in range(len(parts))], d_rename)
            composed[key] = cs
            pos[key] = k
            col.append(cs.smoothing)
        objects[r] = col
    # column -> entries, per part and height
    by_col = [{r: defaultdict(list) for r in P.heights()} for P in parts]
    for i, P in enumerate(parts):
        for r, M in P.diffs.items():
            for (a, b), c in M.items():
                by_col[i][r][b].append((a, c))
    diffs: dict[int, Matrix] = {}
    for r in sorted(keys):
        M: Matrix = {}
        for key in keys[r]:
            hts, idxs = key
            for i in range(len(parts)):
                entries = by_col[i].get(hts[i], {}).get(idxs[i], ())
                if not entries:
                    continue
                sign = -1 if sum(hts[:i]) % 2 else 1
                for a, c in entries:
                    nkey = (hts[:i] + (hts[i] + 1,) + hts[i + 1 :], idxs[:i] + (a,) + idxs[i + 1 :])
                    pieces = [
                        c if k == i else Cobordism.identity(parts[k].obj(hts[k])[idxs[k]], ring) for k in range(len(parts))
                    ]
                    cob = horizontal_compose(D, pieces, composed[key], composed[nkey])
                    if sign < 0:
                        cob = -cob
                    M[(pos[nkey], pos[key])] = M[(pos[nkey], pos[key])] + cob if (pos[nkey], pos[key]) in M else cob
        M = {k: v for k, v in M.items() if not v.is_zero()}
        if r + 1 in keys:
            diffs[r] = M
    return PlanarComposite(FormalComplex(objects, diffs, ring), dict(keys), composed)


def planar_compose_complexes(
    D: PlanarArcDiagram,
    parts: Sequence[FormalComplex],
    renames: Sequence[Mapping[int, int] | None] | None = None,
    d_rename: Mapping[int, int] | None = None,
) -> FormalComplex:
    return planar_compose(D, parts, renames, d_rename).complex


def extend_map(
    comp_src: PlanarComposite,
    comp_tgt: PlanarComposite,
    D: PlanarArcDiagram,
    parts_src: Sequence[FormalComplex],
    parts_tgt: Sequence[FormalComplex],
    slot: int,
    f: ChainMap,
) -> ChainMap:
    """``D(I, ..., f, ..., I)`` for a map placed in hole ``slot``; the other parts
    must agree between source and target.  Odd maps (homotopies) pick up the
    Koszul sign of the parts before ``slot``."""
    ring = comp_src.complex.ring
    pos_t = {key: k for r, ks in comp_tgt.keys.items() for k, key in enumerate(ks)}
    maps: dict[int, Matrix] = {}
    by_col: dict[int, dict[int, list]] = defaultdict(lambda: defaultdict(list))
    for r, M in f.maps.items():
        for (a, b), c in M.items():
            by_col[r][b].append((a, c))
    for r, ks in comp_src.keys.items():
        M: Matrix = {}
        for k, key in enumerate(ks):
            hts, idxs = key
            entries = by_col.get(hts[slot], {}).get(idxs[slot], ())
            if not entries:
                continue
            sign = -1 if f.hdeg % 2 and sum(hts[:slot]) % 2 else 1
            for a, c in entries:
                nkey = (hts[:slot] + (hts[slot] + f.hdeg,) + hts[slot + 1 :], idxs[:slot] + (a,) + idxs[slot + 1 :])
                pieces = [
                    c if i == slot else Cobordism.identity(parts_src[i].obj(hts[i])[idxs[i]], ring)
                    for i in range(len(parts_src))
                ]
                cob = horizontal_compose(D, pieces, comp_src.composed[key], comp_tgt.composed[nkey])
                if sign < 0:
                    cob = -cob
                t = (pos_t[nkey], k)
                M[t] = M[t] + cob if t in M else cob
        M = {k: v for k, v in M.items() if not v.is_zero()}
        if M:
            maps[r] = M
    return ChainMap(comp_src.complex, comp_tgt.complex, maps, f.hdeg)


# ---------------------------------------------------------------------------
# matching two presentations of the same complex


@dataclass
class ComplexMatch:
    """``B.objects[r][perm[r][i]]`` is ``A.objects[r][i]`` up to ``signs[r][i]``,
    with circle ``c`` of the A-object becoming circle ``circles[r][i][c]``."""

    perm: dict[int, list[int]]
    signs: dict[int, list[int]]
    circles: dict[int, list[list[int]]]

    def chain_map(self, A: FormalComplex, B: FormalComplex) -> ChainMap:
        maps = {}
        for r, objs in A.objects.items():
            M = {}
            for i, S in enumerate(objs):
                T = B.obj(r)[self.perm[r][i]]
                ident = Cobordism.identity(S, A.ring).relabel_circles(S, T, list(range(S.circles)), self.circles[r][i])
                M[(self.perm[r][i], i)] = ident.scale(self.signs[r][i])
            maps[r] = M
        return ChainMap(A, B, maps)


def _circle_perm(S: Smoothing, T: Smoothing) -> list[int] | None:
    pool: dict[frozenset, list[int]] = defaultdict(list)
    for j, labs in enumerate(T.meta.circle_labels):
        pool[labs].append(j)
    out = []
    for labs in S.meta.circle_labels:
        if not pool.get(labs):
            return None
        out.append(pool[labs].pop(0))
    return out


def match_complexes(A: FormalComplex, B: FormalComplex) -> ComplexMatch | None:
    """Find a permutation of objects and a diagonal of signs turning ``A`` into ``B``.

    Objects are matched by their resolution state, circles by strand labels;
    signs are propagated along nonzero differential entries.
    """
    if list(A.heights()) != list(B.heights()):
        return None
    perm, circles = {}, {}
    for r in A.heights():
        a, b = A.obj(r), B.obj(r)
        if len(a) != len(b):
            return None
        where: dict[frozenset, list[int]] = defaultdict(list)
        for j, T in enumerate(b):
            where[T.meta.state].append(j)
        p, cp = [], []
        for S in a:
            if not where.get(S.meta.state):
                return None
            j = where[S.meta.state].pop(0)
            T = b[j]
            if S.shape != T.shape or S.shift != T.shift:
                return None
            c = _circle_perm(S, T)
            if c is None:
                return None
            p.append(j)
            cp.append(c)
        perm[r], circles[r] = p, cp

    def transported(r: int, i: int, k: int, c: Cobordism) -> Cobordism:
        S, T = B.obj(r)[perm[r][k]], B.obj(r + 1)[perm[r + 1][i]]
        return reduce(c.relabel_circles(S, T, circles[r][k], circles[r + 1][i]))

    # adjacency with the sign relating the two entries
    edges: dict[tuple[int, int], list] = defaultdict(list)
    for r in A.heights():
        MA = {key: reduce(v) for key, v in A.d(r).items()}
        MA = {key: v for key, v in MA.items() if not v.is_zero()}
        MB = {key: reduce(v) for key, v in B.d(r).items()}
        MB = {key: v for key, v in MB.items() if not v.is_zero()}
        if len(MA) != len(MB):
            return None
        for (i, k), c in MA.items():
            tb = MB.get((perm[r + 1][i], perm[r][k]))
            if tb is None:
                return None
            t = transported(r, i, k, c)
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
    return ComplexMatch(perm, signs, circles)


def permute_objects(C: FormalComplex, perms: Mapping[int, Sequence[int]]) -> FormalComplex:
    """Reorder objects: old object ``i`` at height ``r`` moves to ``perms[r][i]``."""
    objects = {}
    for r, objs in C.objects.items():
        p = perms.get(r, range(len(objs)))
        new = [None] * len(objs)
        for i, S in enumerate(objs):
            new[p[i]] = S
        objects[r] = new
    diffs = {}
    for r, M in C.diffs.items():
        ps, pt = perms.get(r, None), perms.get(r + 1, None)
        diffs[r] = {((pt[i] if pt else i), (ps[j] if ps else j)): c for (i, j), c in M.items()}
    return FormalComplex(objects, diffs, C.ring)
