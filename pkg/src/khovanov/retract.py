"""Strong deformation retracts of formal complexes.

``simplify`` removes every circle by delooping and then cancels invertible
differential entries by Gaussian elimination, keeping track of the maps

    f: C -> C',  g: C' -> C,  h: C -> C (height -1)

with ``f g = I`` and ``I - g f = d h + h d``.  These are the homotopy
equivalences the Reidemeister maps are built from.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .bracket import ChainMap, FormalComplex, Matrix, mat_add
from .cob3 import (
    BOT,
    MIX,
    TOP,
    Cobordism,
    Smoothing,
    SmoothingMeta,
    _mixed,
    identity_components,
    reduce,
    vertical_compose,
)


@dataclass
class Retract:
    small: FormalComplex
    f: ChainMap
    g: ChainMap
    h: ChainMap

    @classmethod
    def trivial(cls, C: FormalComplex) -> Retract:
        I = ChainMap.identity(C)
        return cls(C, I, I, ChainMap.zero(C, C, -1))

    def then(self, nxt: Retract) -> Retract:
        """Compose with a retract of ``self.small``."""
        f = nxt.f.compose(self.f)
        g = self.g.compose(nxt.g)
        h = self.h + self.g.compose(nxt.h.compose(self.f))
        return Retract(nxt.small, f, g, h)


def _drop_circle(S: Smoothing, c: int, shift: int) -> Smoothing:
    meta = S.meta
    if meta is not None:
        labs = meta.circle_labels[:c] + meta.circle_labels[c + 1 :]
        meta = SmoothingMeta(meta.state, labs, meta.arc_labels)
    return replace(Smoothing(S.arcs, S.circles - 1, S.shift + shift), meta=meta)


def _with_disk(S: Smoothing, T: Smoothing, c: int, side: int, dots: int, ring) -> Cobordism:
    """Identity on everything but circle ``c`` of the larger end, which is capped
    (``side == TOP``) or cupped (``side == BOT``) by a disk with ``dots`` dots."""
    big = S if side == TOP else T
    comps = []
    for i in range(big.circles):
        if i == c:
            comps.append((((side, c),), 0, dots))
            continue
        j = i if i < c else i - 1
        pair = ((TOP, i), (BOT, j)) if side == TOP else ((TOP, j), (BOT, i))
        comps.append((pair, 0, 0))
    for p in sorted(set(_mixed(S.arcs, T.arcs).values())):
        comps.append((((MIX, p),), 0, 0))
    return Cobordism.from_components(S, T, comps, 1, ring)


def _after(*cobs: Cobordism) -> Cobordism:
    """``cobs[0] o cobs[1] o ...``, reduced."""
    out = cobs[-1]
    for x in reversed(cobs[:-1]):
        out = vertical_compose(x, out)
    return out


def deloop(C: FormalComplex, r: int, i: int, c: int | None = None) -> Retract:
    """Replace circle ``c`` (default: the last) of object ``i`` at height ``r`` by
    two copies of the rest, shifted by +1 and -1."""
    ring = C.ring
    S = C.obj(r)[i]
    if S.circles == 0:
        raise ValueError("object has no circle to deloop")
    c = S.circles - 1 if c is None else c
    Sp, Sm = _drop_circle(S, c, 1), _drop_circle(S, c, -1)
    psi = (_with_disk(S, Sp, c, TOP, 1, ring), _with_disk(S, Sm, c, TOP, 0, ring))
    phi = (_with_disk(Sp, S, c, BOT, 0, ring), _with_disk(Sm, S, c, BOT, 1, ring))
    col = C.obj(r)
    new_col = col[:i] + [Sp, Sm] + col[i + 1 :]
    pos = lambda j: j if j < i else j + 1
    objects = dict(C.objects)
    objects[r] = new_col
    diffs = {}
    for h, M in C.diffs.items():
        N: Matrix = {}
        for (a, b), x in M.items():
            if h == r - 1:
                if a == i:
                    for k in range(2):
                        N[(i + k, b)] = _after(psi[k], x)
                else:
                    N[(pos(a), b)] = x
            elif h == r:
                if b == i:
                    for k in range(2):
                        N[(a, i + k)] = _after(x, phi[k])
                else:
                    N[(a, pos(b))] = x
            else:
                N[(a, b)] = x
        diffs[h] = {k: v for k, v in N.items() if not v.is_zero()}
    D = FormalComplex(objects, diffs, ring)
    fmaps, gmaps = {}, {}
    for h, objs in C.objects.items():
        if h == r:
            F = {(pos(j), j): Cobordism.identity(S_, ring) for j, S_ in enumerate(objs) if j != i}
            F[(i, i)], F[(i + 1, i)] = psi
            G = {(j, pos(j)): Cobordism.identity(S_, ring) for j, S_ in enumerate(objs) if j != i}
            G[(i, i)], G[(i, i + 1)] = phi
        else:
            F = {(j, j): Cobordism.identity(S_, ring) for j, S_ in enumerate(objs)}
            G = dict(F)
        fmaps[h], gmaps[h] = F, G
    return Retract(D, ChainMap(C, D, fmaps), ChainMap(D, C, gmaps), ChainMap.zero(C, C, -1))


def _unit_entry(x: Cobordism) -> int:
    """+-1 when ``x`` is plus or minus the identity of a circle-free smoothing, else 0."""
    S, T = x.source, x.target
    if S.circles or T.circles or S.arcs != T.arcs or S.shift != T.shift:
        return 0
    y = reduce(x)
    ident = identity_components(S)
    if set(y.terms) != {ident}:
        return 0
    c = y.terms[ident]
    return c if c in (1, -1) else 0


def find_unit(C: FormalComplex) -> tuple[int, int, int, int] | None:
    for r in C.heights():
        for (a, b), x in sorted(C.d(r).items()):
            s = _unit_entry(x)
            if s:
                return r, a, b, s
    return None


def gauss(C: FormalComplex, r: int, i0: int, j0: int, s: int) -> Retract:
    """Cancel the unit entry ``d_r[(i0, j0)] = s * I`` (row ``i0`` at height r+1,
    column ``j0`` at height r)."""
    ring = C.ring
    b, c = C.obj(r), C.obj(r + 1)
    inv = Cobordism(c[i0], b[j0], {identity_components(c[i0]): s}, ring)
    d = C.d(r)
    delta = {j: x for (i, j), x in d.items() if i == i0 and j != j0}  # b2 -> c1
    gamma = {i: x for (i, j), x in d.items() if j == j0 and i != i0}  # b1 -> c2
    bpos = lambda j: j if j < j0 else j - 1
    cpos = lambda i: i if i < i0 else i - 1
    objects = dict(C.objects)
    objects[r] = b[:j0] + b[j0 + 1 :]
    objects[r + 1] = c[:i0] + c[i0 + 1 :]
    diffs = {}
    for h, M in C.diffs.items():
        if h == r - 1:
            diffs[h] = {(bpos(a), x): v for (a, x), v in M.items() if a != j0}
        elif h == r + 1:
            diffs[h] = {(a, cpos(x)): v for (a, x), v in M.items() if x != i0}
        elif h == r:
            N: Matrix = {(cpos(a), bpos(x)): v for (a, x), v in M.items() if a != i0 and x != j0}
            corr = {(cpos(i), bpos(j)): _after(gm, inv, dl) for i, gm in gamma.items() for j, dl in delta.items()}
            diffs[h] = mat_add(N, corr, -1)
        else:
            diffs[h] = dict(M)
    D = FormalComplex(objects, diffs, ring)
    fmaps, gmaps = {}, {}
    for h, objs in C.objects.items():
        F, G = {}, {}
        if h == r:
            for j, S in enumerate(objs):
                if j != j0:
                    F[(bpos(j), j)] = Cobordism.identity(S, ring)
                    G[(j, bpos(j))] = Cobordism.identity(S, ring)
            for j, dl in delta.items():
                y = _after(inv, dl)
                if y:
                    G[(j0, bpos(j))] = -y
        elif h == r + 1:
            for i, S in enumerate(objs):
                if i != i0:
                    F[(cpos(i), i)] = Cobordism.identity(S, ring)
                    G[(i, cpos(i))] = Cobordism.identity(S, ring)
            for i, gm in gamma.items():
                y = _after(gm, inv)
                if y:
                    F[(cpos(i), i0)] = -y
        else:
            F = {(j, j): Cobordism.identity(S, ring) for j, S in enumerate(objs)}
            G = dict(F)
        fmaps[h], gmaps[h] = F, G
    hmap = ChainMap(C, C, {r + 1: {(j0, i0): inv}}, -1)
    return Retract(D, ChainMap(C, D, fmaps), ChainMap(D, C, gmaps), hmap)


def simplify(C: FormalComplex) -> Retract:
    """Deloop every circle, then cancel unit entries until none is left."""
    R = Retract.trivial(C)
    while True:
        spot = next(((r, i) for r in R.small.heights() for i, S in enumerate(R.small.obj(r)) if S.circles), None)
        if spot is None:
            break
        R = R.then(deloop(R.small, *spot))
    while True:
        u = find_unit(R.small)
        if u is None:
            break
        r, a, b, s = u
        R = R.then(gauss(R.small, r, a, b, s))
    return R
