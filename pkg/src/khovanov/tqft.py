"""Rank-two Frobenius algebras and the functors they define on closed cobordisms.

Basis index 0 is ``v+`` (degree +1) and index 1 is ``v-`` (degree -1).  A
basis element of ``V^{(x)k}`` is a bitmask whose bit ``i`` is set when circle
``i`` carries ``v-``.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Mapping
from dataclasses import dataclass, field

from .algebra import F2, QQ, ZZ, Laurent, PolyRing, Ring
from .bracket import FormalComplex, Matrix
from .cob3 import (
    BOT,
    MIX,
    TOP,
    Cobordism,
    Gen,
    RelationInstance,
    Smoothing,
    relation_sides,
)

DEG = (1, -1)
Vec = list  # two coefficients, on v+ and v-


@dataclass(eq=False)
class FrobeniusSpec:
    name: str
    ring: Ring
    unit: tuple  # eps(1)
    counit: tuple  # eta(v+), eta(v-)
    mult: Mapping[tuple[int, int], tuple]  # m(a (x) b) as a vector
    comult: Mapping[int, Mapping[tuple[int, int], object]]  # Delta(a)
    graded: bool = True
    var_degree: int = 0  # q-degree of the ring variable, if any
    descends: bool = True  # satisfies S, T and 4Tu
    _cache: dict = field(default_factory=dict, repr=False)

    def __repr__(self) -> str:
        return f"FrobeniusSpec({self.name})"

    # -- elementary operations on V ---------------------------------------------

    def zero(self) -> Vec:
        return [0, 0]

    def m(self, x: Vec, y: Vec) -> Vec:
        out = [0, 0]
        for a in (0, 1):
            if not x[a]:
                continue
            for b in (0, 1):
                if not y[b]:
                    continue
                c = x[a] * y[b]
                p = self.mult[(a, b)]
                out[0] = out[0] + c * p[0]
                out[1] = out[1] + c * p[1]
        return [self.ring.norm(v) for v in out]

    def delta(self, x: Vec) -> dict[tuple[int, int], object]:
        out: dict = {}
        for a in (0, 1):
            if not x[a]:
                continue
            for bc, c in self.comult[a].items():
                out[bc] = out.get(bc, 0) + x[a] * c
        return {k: self.ring.norm(v) for k, v in out.items() if self.ring.norm(v) != 0}

    def eta(self, x: Vec):
        return self.ring.norm(x[0] * self.counit[0] + x[1] * self.counit[1])

    def handle(self, x: Vec) -> Vec:
        out = [0, 0]
        for (b, c), coef in self.delta(x).items():
            p = self.mult[(b, c)]
            out[0] = out[0] + coef * p[0]
            out[1] = out[1] + coef * p[1]
        return [self.ring.norm(v) for v in out]

    def dot(self, x: Vec) -> Vec:
        """Multiplication by ``v-``."""
        return self.m(x, [0, 1])

    # -- connected components -----------------------------------------------------

    def component_map(self, n_in: int, n_out: int, genus: int, dots: int) -> dict:
        """Linear map of a connected surface: input bits -> {output bits: coeff}."""
        key = (n_in, n_out, genus, dots)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        table = {}
        for inp in itertools.product((0, 1), repeat=n_in):
            vec = list(self.unit)
            for b in inp:
                vec = self.m(vec, [1 - b, b])
            for _ in range(genus):
                vec = self.handle(vec)
            for _ in range(dots):
                vec = self.dot(vec)
            if n_out == 0:
                val = self.eta(vec)
                out = {(): val} if val != 0 else {}
            else:
                out = {(a,): c for a, c in enumerate(vec) if c != 0}
                for _ in range(n_out - 1):
                    nxt: dict = {}
                    for bits, c in out.items():
                        e = [0, 0]
                        e[bits[-1]] = 1
                        for (b1, b2), c2 in self.delta(e).items():
                            k = bits[:-1] + (b1, b2)
                            nxt[k] = nxt.get(k, 0) + c * c2
                    out = {k: self.ring.norm(v) for k, v in nxt.items() if self.ring.norm(v) != 0}
            table[inp] = out
        self._cache[key] = table
        return table

    def generator_map(self, gen: Gen, n_src: int, n_tgt: int) -> dict[int, dict[int, object]]:
        """Matrix (src mask -> {tgt mask: coeff}) of one generator between closed smoothings."""
        key = ("gen", gen, n_src, n_tgt)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        comps = []
        for curves, g, d in gen:
            ins = [i for kind, i in curves if kind == TOP]
            outs = [i for kind, i in curves if kind == BOT]
            if any(kind == MIX for kind, _ in curves):
                raise ValueError("the functor is only defined on closed smoothings (no boundary arcs)")
            comps.append((ins, outs, self.component_map(len(ins), len(outs), g, d)))
        result: dict[int, dict[int, object]] = {}
        for mask in range(1 << n_src):
            acc = {0: self.ring.one()}
            for ins, outs, table in comps:
                inp = tuple((mask >> i) & 1 for i in ins)
                images = table[inp]
                if not images:
                    acc = {}
                    break
                nxt: dict = {}
                for tmask, c in acc.items():
                    for obits, c2 in images.items():
                        t = tmask
                        for o, b in zip(outs, obits):
                            if b:
                                t |= 1 << o
                        nxt[t] = nxt.get(t, 0) + c * c2
                acc = nxt
            acc = {k: self.ring.norm(v) for k, v in acc.items()}
            acc = {k: v for k, v in acc.items() if v != 0}
            if acc:
                result[mask] = acc
        self._cache[key] = result
        return result

    def cobordism_map(self, C: Cobordism) -> dict[int, dict[int, object]]:
        """Matrix of a linear combination of generators."""
        out: dict[int, dict[int, object]] = {}
        for gen, coef in C.terms.items():
            for s, row in self.generator_map(gen, C.source.circles, C.target.circles).items():
                tgt = out.setdefault(s, {})
                for t, c in row.items():
                    tgt[t] = tgt.get(t, 0) + coef * c
        clean = {}
        for s, row in out.items():
            row = {t: self.ring.norm(v) for t, v in row.items()}
            row = {t: v for t, v in row.items() if v != 0}
            if row:
                clean[s] = row
        return clean

    def evaluate_closed(self, C: Cobordism):
        """Scalar value of a closed cobordism (empty to empty)."""
        if C.source.circles or C.target.circles or C.source.arcs:
            raise ValueError("evaluate_closed needs a cobordism from the empty set to itself")
        return self.cobordism_map(C).get(0, {}).get(0, self.ring.zero())


def _basis_tables(unit, counit, mult, comult):
    return tuple(unit), tuple(counit), dict(mult), {a: dict(v) for a, v in comult.items()}


def spec_khovanov(ring: Ring = ZZ) -> FrobeniusSpec:
    mult = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (0, 0)}
    comult = {0: {(0, 1): 1, (1, 0): 1}, 1: {(1, 1): 1}}
    return FrobeniusSpec("khovanov", ring, *_basis_tables((1, 0), (0, 1), mult, comult))


def spec_lee(ring: Ring = QQ) -> FrobeniusSpec:
    mult = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (1, 0)}
    comult = {0: {(0, 1): 1, (1, 0): 1}, 1: {(1, 1): 1, (0, 0): 1}}
    return FrobeniusSpec("lee", ring, *_basis_tables((1, 0), (0, 1), mult, comult), graded=False, descends=True)


def spec_f3(h: int | None = None) -> FrobeniusSpec:
    """Over F2[H] with deg H = -2; ``h=1`` specializes H and keeps only a filtration."""
    if h is None:
        ring: Ring = PolyRing(F2, "H", -2)
        H = ring.gen()
        graded = True
    else:
        ring, H, graded = F2, h, False
    mult = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (0, H)}
    comult = {0: {(0, 1): 1, (1, 0): 1, (0, 0): H}, 1: {(1, 1): 1}}
    name = "f3" if h is None else f"f3[H={h}]"
    return FrobeniusSpec(name, ring, *_basis_tables((1, 0), (0, 1), mult, comult), graded=graded, var_degree=-2)


def spec_fc() -> FrobeniusSpec:
    """Khovanov's theory over Z[c] with deg c = 2; does not respect S or 4Tu."""
    ring = PolyRing(ZZ, "c", 2)
    c = ring.gen()
    mult = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (0, 0)}
    comult = {0: {(0, 1): 1, (1, 0): 1, (1, 1): c}, 1: {(1, 1): 1}}
    return FrobeniusSpec("fc", ring, *_basis_tables((1, 0), (-c, 1), mult, comult), var_degree=2, descends=False)


SPECS = {"khovanov": spec_khovanov, "lee": spec_lee, "f3": spec_f3, "fc": spec_fc}


def get_spec(name: str, ring: Ring | None = None) -> FrobeniusSpec:
    if name == "khovanov":
        return spec_khovanov(ring or ZZ)
    if name == "lee":
        return spec_lee(ring or QQ)
    if name == "f3":
        return spec_f3()
    if name == "fc":
        return spec_fc()
    raise ValueError(f"unknown functor {name!r}; choose from {sorted(SPECS)}")


# ---------------------------------------------------------------------------
# axioms


def _poly_degree_ok(spec: FrobeniusSpec, coef, expected: int) -> bool:
    """A coefficient ``coef`` shifting degree by ``expected`` must be homogeneous."""
    if isinstance(coef, Laurent):
        return all(e * spec.var_degree == expected for e, _ in coef)
    return expected == 0


def check_homogeneous(spec: FrobeniusSpec) -> bool:
    """Structure maps have degrees +1 (unit, counit) and -1 (m, Delta)."""
    if not spec.graded:
        return True
    ok = all(_poly_degree_ok(spec, c, 1 - DEG[a]) for a, c in enumerate(spec.unit) if c != 0)
    ok &= all(_poly_degree_ok(spec, c, 1 + DEG[a]) for a, c in enumerate(spec.counit) if c != 0)
    for (a, b), vec in spec.mult.items():
        ok &= all(_poly_degree_ok(spec, c, DEG[a] + DEG[b] - 1 - DEG[k]) for k, c in enumerate(vec) if c != 0)
    for a, out in spec.comult.items():
        ok &= all(_poly_degree_ok(spec, c, DEG[a] - 1 - DEG[b] - DEG[d]) for (b, d), c in out.items() if c != 0)
    return bool(ok)


def _e(a: int) -> Vec:
    return [1 - a, a]


def frobenius_axioms(spec: FrobeniusSpec) -> dict[str, bool]:
    """Associativity, commutativity, unit, counit, coassociativity, cocommutativity
    and the Frobenius identity, each checked on all basis elements."""
    R = spec.ring
    eq = lambda x, y: all(R.norm(a - b) == 0 for a, b in zip(x, y))

    def tensor_eq(x: dict, y: dict) -> bool:
        keys = set(x) | set(y)
        return all(R.norm(x.get(k, 0) - y.get(k, 0)) == 0 for k in keys)

    res = {}
    B = (0, 1)
    res["associative"] = all(
        eq(spec.m(spec.m(_e(a), _e(b)), _e(c)), spec.m(_e(a), spec.m(_e(b), _e(c)))) for a in B for b in B for c in B
    )
    res["commutative"] = all(eq(spec.m(_e(a), _e(b)), spec.m(_e(b), _e(a))) for a in B for b in B)
    res["unit"] = all(eq(spec.m(list(spec.unit), _e(a)), _e(a)) for a in B)

    def counit_left(a):
        out = [0, 0]
        for (b, c), coef in spec.delta(_e(a)).items():
            out[c] = out[c] + coef * spec.eta(_e(b))
        return out

    res["counit"] = all(eq(counit_left(a), _e(a)) for a in B)

    def coassoc(a, left: bool):
        out: dict = {}
        for (b, c), coef in spec.delta(_e(a)).items():
            split = b if left else c
            for (d, f), c2 in spec.delta(_e(split)).items():
                k = (d, f, c) if left else (b, d, f)
                out[k] = out.get(k, 0) + coef * c2
        return out

    res["coassociative"] = all(tensor_eq(coassoc(a, True), coassoc(a, False)) for a in B)
    res["cocommutative"] = all(
        tensor_eq(spec.delta(_e(a)), {(c, b): v for (b, c), v in spec.delta(_e(a)).items()}) for a in B
    )

    def frob(a, b, which):
        out: dict = {}
        if which == 0:  # Delta o m
            for k, c in enumerate(spec.m(_e(a), _e(b))):
                if c:
                    for bc, c2 in spec.delta(_e(k)).items():
                        out[bc] = out.get(bc, 0) + c * c2
        elif which == 1:  # (m (x) 1)(1 (x) Delta)
            for (d, f), c in spec.delta(_e(b)).items():
                for k, c2 in enumerate(spec.m(_e(a), _e(d))):
                    if c2:
                        out[(k, f)] = out.get((k, f), 0) + c * c2
        else:  # (1 (x) m)(Delta (x) 1)
            for (d, f), c in spec.delta(_e(a)).items():
                for k, c2 in enumerate(spec.m(_e(f), _e(b))):
                    if c2:
                        out[(d, k)] = out.get((d, k), 0) + c * c2
        return out

    res["frobenius"] = all(tensor_eq(frob(a, b, 0), frob(a, b, 1)) and tensor_eq(frob(a, b, 0), frob(a, b, 2)) for a in B for b in B)
    return res


def closed_surface(spec: FrobeniusSpec, genus: int, dots: int = 0):
    return spec.component_map(0, 0, genus, dots).get((), {}).get((), spec.ring.zero())


def sphere_value(spec: FrobeniusSpec):
    return closed_surface(spec, 0)


def torus_value(spec: FrobeniusSpec):
    """eta o m o Delta o eps."""
    return spec.eta(spec.handle(list(spec.unit)))


def four_tu_sides(spec: FrobeniusSpec) -> tuple[dict, dict]:
    """Both sides of 4Tu for four disks around the four circles of a target object:
    ``C12 + C34`` and ``C13 + C24`` as vectors in ``V^{(x)4}`` keyed by bit tuples."""

    def tubes(i, j):
        comps = [((((BOT, i), (BOT, j))), 0, 0)] + [(((BOT, k),), 0, 0) for k in range(4) if k not in (i, j)]
        gen = tuple(sorted((tuple(sorted(c)), g, d) for c, g, d in comps))
        img = spec.generator_map(gen, 0, 4).get(0, {})
        return {tuple((m >> k) & 1 for k in range(4)): v for m, v in img.items()}

    def add(x, y):
        out = dict(x)
        for k, v in y.items():
            out[k] = spec.ring.norm(out.get(k, 0) + v)
        return {k: v for k, v in out.items() if v != 0}

    return add(tubes(0, 1), tubes(2, 3)), add(tubes(0, 2), tubes(1, 3))


def check_relation_functor(spec: FrobeniusSpec, inst: RelationInstance) -> bool:
    """The functor kills ``lhs - rhs`` of a relation placed on a closed ambient."""
    lhs, rhs = relation_sides(inst)
    amb = inst.ambient
    L = spec.cobordism_map(Cobordism(amb.source, amb.target, lhs, spec.ring))
    R = spec.cobordism_map(Cobordism(amb.source, amb.target, rhs, spec.ring))
    return L == R


# ---------------------------------------------------------------------------
# algebraic complexes


@dataclass
class AlgebraicComplex:
    """Free modules with q-graded bases and sparse differentials ``diffs[r][col] = {row: coeff}``."""

    ring: Ring
    degrees: dict[int, list[int]]
    diffs: dict[int, dict[int, dict[int, object]]] = field(default_factory=dict)
    labels: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    graded: bool = True

    @property
    def min_height(self) -> int:
        return min(self.degrees, default=0)

    @property
    def max_height(self) -> int:
        return max(self.degrees, default=-1)

    def heights(self) -> range:
        return range(self.min_height, self.max_height + 1)

    def dim(self, r: int) -> int:
        return len(self.degrees.get(r, ()))

    def d(self, r: int) -> dict[int, dict[int, object]]:
        return self.diffs.get(r, {})

    def qdegrees(self) -> list[int]:
        return sorted({q for qs in self.degrees.values() for q in qs})

    def verify_d_squared(self) -> bool:
        for r in self.heights():
            d1, d2 = self.d(r), self.d(r + 1)
            for col, rows in d1.items():
                acc: dict = {}
                for mid, c in rows.items():
                    for row, c2 in d2.get(mid, {}).items():
                        acc[row] = acc.get(row, 0) + c * c2
                if any(self.ring.norm(v) != 0 for v in acc.values()):
                    return False
        return True

    def entry_degree_shifts(self) -> set[int]:
        """q(row) - q(col) over all nonzero entries (with ring-variable degrees included)."""
        out = set()
        for r, M in self.diffs.items():
            for col, rows in M.items():
                for row, c in rows.items():
                    base = self.degrees[r + 1][row] - self.degrees[r][col]
                    if isinstance(c, Laurent):
                        out.update(base + e * _var_deg(self.ring) for e, _ in c)
                    else:
                        out.add(base)
        return out

    def to_json(self) -> dict:
        return {
            "ring": self.ring.name,
            "graded": self.graded,
            "bases": {str(r): qs for r, qs in self.degrees.items()},
            "diffs": {
                str(r): [[row, col, str(c)] for col, rows in sorted(M.items()) for row, c in sorted(rows.items())]
                for r, M in sorted(self.diffs.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _var_deg(ring: Ring) -> int:
    return getattr(ring, "degree", 0)


def object_basis(S: Smoothing) -> list[int]:
    """q-degrees of the basis of ``V^{(x)k}{shift}`` indexed by bitmask."""
    k = S.circles
    return [k - 2 * bin(mask).count("1") + S.shift for mask in range(1 << k)]


def matrix_block(spec: FrobeniusSpec, M: Matrix, src: list[Smoothing], tgt: list[Smoothing]):
    """Apply the functor to a matrix of cobordisms; returns ``{col: {row: coeff}}`` in
    the concatenated bases of ``src`` and ``tgt``."""
    off_s = _offsets(src)
    off_t = _offsets(tgt)
    out: dict[int, dict[int, object]] = {}
    for (i, j), cob in M.items():
        for s, row in spec.cobordism_map(cob).items():
            col = out.setdefault(off_s[j] + s, {})
            for t, c in row.items():
                key = off_t[i] + t
                col[key] = col.get(key, 0) + c
    clean = {}
    for col, rows in out.items():
        rows = {k: spec.ring.norm(v) for k, v in rows.items()}
        rows = {k: v for k, v in rows.items() if v != 0}
        if rows:
            clean[col] = rows
    return clean


def _offsets(objs: list[Smoothing]) -> list[int]:
    out, acc = [], 0
    for S in objs:
        out.append(acc)
        acc += 1 << S.circles
    return out


def apply_functor(spec: FrobeniusSpec, C: FormalComplex) -> AlgebraicComplex:
    """Replace each smoothing by ``V^{(x)k}`` and each cobordism by its linear map."""
    for objs in C.objects.values():
        for S in objs:
            if S.arcs:
                raise ValueError("apply_functor needs a closed diagram (smoothings without boundary arcs)")
    degrees, labels = {}, {}
    for r, objs in C.objects.items():
        degrees[r] = [q for S in objs for q in object_basis(S)]
        labels[r] = [(k, mask) for k, S in enumerate(objs) for mask in range(1 << S.circles)]
    diffs = {r: matrix_block(spec, M, C.obj(r), C.obj(r + 1)) for r, M in C.diffs.items()}
    return AlgebraicComplex(spec.ring, degrees, diffs, labels, spec.graded)


@dataclass
class AlgebraicMap:
    """A map of algebraic complexes ``maps[r][col] = {row: coeff}`` from height r to r + hdeg."""

    source: AlgebraicComplex
    target: AlgebraicComplex
    maps: dict[int, dict[int, dict[int, object]]]
    hdeg: int = 0


def apply_functor_map(spec: FrobeniusSpec, f, source: AlgebraicComplex | None = None, target: AlgebraicComplex | None = None) -> AlgebraicMap:
    """Apply the functor to a ``bracket.ChainMap``."""
    A = source or apply_functor(spec, f.source)
    B = target or apply_functor(spec, f.target)
    maps = {r: matrix_block(spec, M, f.source.obj(r), f.target.obj(r + f.hdeg)) for r, M in f.maps.items()}
    return AlgebraicMap(A, B, maps, f.hdeg)
