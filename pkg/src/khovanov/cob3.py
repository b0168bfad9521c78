"""The cobordism category with local relations, in its dotted canonical form.

A cobordism between two crossingless smoothings is recorded abstractly: each
connected component is the set of boundary curves it touches together with
its genus and number of dots.  Boundary curves are

* ``(TOP, i)``  - circle ``i`` of the source smoothing,
* ``(BOT, i)``  - circle ``i`` of the target smoothing,
* ``(MIX, p)``  - the closed curve made of source arcs, target arcs and the
  vertical lines over the boundary points; ``p`` is its least boundary point.

Reduction rewrites everything into disks carrying 0 or 1 dot using
sphere = 0, dotted sphere = 1, two dots = 0 and the dotted neck cutting
relation (a handle is then twice a dot).
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import cache, lru_cache

from .algebra import ZZ, Ring
from .planar import DisjointSet, PlanarArcDiagram, is_noncrossing, mixed_curves, wire

TOP, BOT, MIX = 0, 1, 2

Curve = tuple[int, int]
Component = tuple[tuple[Curve, ...], int, int]
Gen = tuple[Component, ...]


@dataclass(frozen=True)
class SmoothingMeta:
    """Provenance of a smoothing: which crossings were resolved how, and the
    strand labels each circle and arc runs through."""

    state: frozenset = frozenset()
    circle_labels: tuple[frozenset, ...] = ()
    arc_labels: tuple[frozenset, ...] = ()

    def renamed(self, mapping: Mapping[int, int]) -> SmoothingMeta:
        f = lambda s: frozenset(mapping.get(x, x) for x in s)
        state = frozenset((tuple(mapping.get(x, x) for x in key), bit) for key, bit in self.state)
        return SmoothingMeta(state, tuple(map(f, self.circle_labels)), tuple(map(f, self.arc_labels)))


@dataclass(frozen=True)
class Smoothing:
    """A crossingless tangle: a noncrossing matching of ``2k`` boundary points
    (numbered counterclockwise from the base point) plus some circles, placed
    in q-degree ``shift``."""

    arcs: tuple[tuple[int, int], ...] = ()
    circles: int = 0
    shift: int = 0
    meta: SmoothingMeta | None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        arcs = tuple(sorted(tuple(sorted(a)) for a in self.arcs))
        object.__setattr__(self, "arcs", arcs)
        pts = sorted(p for a in arcs for p in a)
        if pts != list(range(len(pts))):
            raise ValueError(f"arcs {arcs} do not match the boundary points perfectly")
        if not is_noncrossing(arcs):
            raise ValueError(f"arcs {arcs} cross")
        if self.circles < 0:
            raise ValueError("negative circle count")

    @property
    def size(self) -> int:
        return 2 * len(self.arcs)

    @property
    def shape(self) -> tuple:
        return (self.arcs, self.circles)

    def shifted(self, m: int) -> Smoothing:
        return replace(self, shift=self.shift + m)

    def with_shift(self, m: int) -> Smoothing:
        return replace(self, shift=m)

    def to_json(self) -> dict:
        return {"arcs": [list(a) for a in self.arcs], "circles": self.circles, "shift": self.shift}


def elementary_smoothing(X: Sequence[int], bit: int, shift: int = 0) -> Smoothing:
    """The 0- or 1-smoothing of the crossing ``X``, remembering its labels."""
    arcs = ((0, 1), (2, 3)) if bit == 0 else ((0, 3), (1, 2))
    meta = SmoothingMeta(
        frozenset({(tuple(X), bit)}), (), tuple(frozenset((X[a], X[b])) for a, b in arcs)
    )
    return Smoothing(arcs, 0, shift, meta)


def boundary_curves(source: Smoothing, target: Smoothing) -> tuple[Curve, ...]:
    return _boundary_curves(source.arcs, source.circles, target.arcs, target.circles)


@cache
def _boundary_curves(sa, sc, ta, tc) -> tuple[Curve, ...]:
    mix = sorted(set(mixed_curves(sa, ta).values()))
    return tuple([(TOP, i) for i in range(sc)] + [(BOT, i) for i in range(tc)] + [(MIX, p) for p in mix])


@cache
def _mixed(sa, ta) -> dict[int, int]:
    return mixed_curves(sa, ta)


def _check_same_boundary(a: Smoothing, b: Smoothing) -> None:
    if a.size != b.size:
        raise ValueError(f"boundary mismatch: {a.size} vs {b.size} points")


def normalize_components(comps: Iterable[Component]) -> Gen:
    return tuple(sorted((tuple(sorted(c)), g, d) for c, g, d in comps))


def component_euler(comp: Component) -> int:
    curves, genus, _ = comp
    return 2 - 2 * genus - len(curves)


@dataclass(frozen=True)
class CobGenerator:
    """A single connected-component description of a cobordism."""

    source: Smoothing
    target: Smoothing
    components: Gen

    def __post_init__(self):
        _check_same_boundary(self.source, self.target)
        comps = normalize_components(self.components)
        object.__setattr__(self, "components", comps)
        seen = [c for comp in comps for c in comp[0]]
        expected = boundary_curves(self.source, self.target)
        if sorted(seen) != sorted(expected):
            raise ValueError(f"components {comps} do not partition the boundary curves {expected}")
        for _, g, d in comps:
            if g < 0 or d < 0:
                raise ValueError("genus and dots must be nonnegative")

    @property
    def is_canonical(self) -> bool:
        return all(len(c) == 1 and g == 0 and d <= 1 for c, g, d in self.components)


def degree(C: CobGenerator | Cobordism, graded: bool = False) -> int:
    """chi(C) - |B|/2 - 2*dots; with ``graded`` the target shift minus the
    source shift is added as well."""
    if isinstance(C, Cobordism):
        degs = {degree(g, graded) for g in C.generators()}
        if len(degs) != 1:
            raise ValueError(f"cobordism is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()
    base = sum(component_euler(c) - 2 * c[2] for c in C.components) - C.source.size // 2
    if graded:
        base += C.target.shift - C.source.shift
    return base


class Cobordism:
    """A formal linear combination of generators sharing a source and target."""

    __slots__ = ("ring", "source", "target", "terms")

    def __init__(self, source: Smoothing, target: Smoothing, terms: Mapping[Gen, object] | None = None, ring: Ring = ZZ):
        _check_same_boundary(source, target)
        self.source = source
        self.target = target
        self.ring = ring
        clean: dict[Gen, object] = {}
        if terms:
            for g, c in terms.items():
                c = ring.norm(c)
                if c != 0:
                    clean[g] = c
        self.terms = clean

    @classmethod
    def zero(cls, source: Smoothing, target: Smoothing, ring: Ring = ZZ) -> Cobordism:
        return cls(source, target, {}, ring)

    @classmethod
    def from_components(cls, source: Smoothing, target: Smoothing, comps: Iterable[Component], coeff=1, ring: Ring = ZZ) -> Cobordism:
        gen = CobGenerator(source, target, tuple(comps))
        return cls(source, target, {gen.components: coeff}, ring)

    @classmethod
    def identity(cls, S: Smoothing, ring: Ring = ZZ) -> Cobordism:
        return cls(S, S, {identity_components(S): 1}, ring)

    def generators(self) -> list[CobGenerator]:
        return [CobGenerator(self.source, self.target, g) for g in self.terms]

    def items(self):
        return self.terms.items()

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _like(self, terms) -> Cobordism:
        return Cobordism(self.source, self.target, terms, self.ring)

    def __add__(self, other: Cobordism) -> Cobordism:
        if other.source.shape != self.source.shape or other.target.shape != self.target.shape:
            raise ValueError("cannot add cobordisms with different source/target")
        acc = dict(self.terms)
        for g, c in other.terms.items():
            acc[g] = acc.get(g, 0) + c
        return self._like(acc)

    def __neg__(self) -> Cobordism:
        return self._like({g: -c for g, c in self.terms.items()})

    def __sub__(self, other: Cobordism) -> Cobordism:
        return self + (-other)

    def scale(self, a) -> Cobordism:
        return self._like({g: a * c for g, c in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cobordism):
            return NotImplemented
        return (
            self.source.shape == other.source.shape
            and self.target.shape == other.target.shape
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.source.shape, self.target.shape, frozenset(self.terms.items())))

    def with_ends(self, source: Smoothing, target: Smoothing) -> Cobordism:
        """Same surfaces, relabelled source/target objects (e.g. new shifts)."""
        if source.shape != self.source.shape or target.shape != self.target.shape:
            raise ValueError("with_ends may only change shifts or metadata")
        out = Cobordism.__new__(Cobordism)
        out.source, out.target, out.terms, out.ring = source, target, self.terms, self.ring
        return out

    def relabel_circles(
        self, source: Smoothing, target: Smoothing, src_perm: Sequence[int], tgt_perm: Sequence[int]
    ) -> Cobordism:
        """Transport to new ends whose circle ``src_perm[i]`` is old source circle ``i``
        (likewise for the target)."""
        if source.shape != self.source.shape or target.shape != self.target.shape:
            raise ValueError("relabel_circles keeps the shapes of both ends")
        maps = {TOP: src_perm, BOT: tgt_perm}
        f = lambda cv: (cv[0], maps[cv[0]][cv[1]]) if cv[0] != MIX else cv
        terms = {
            normalize_components((tuple(map(f, curves)), g, d) for curves, g, d in gen): c
            for gen, c in self.terms.items()
        }
        return Cobordism(source, target, terms, self.ring)

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "terms": [
                {
                    "coeff": str(c),
                    "components": [
                        {"curves": [list(cv) for cv in curves], "genus": g, "dots": d} for curves, g, d in gen
                    ],
                }
                for gen, c in sorted(self.terms.items(), key=lambda t: repr(t[0]))
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return f"Cobordism({self.source.shape}->{self.target.shape}, {self.terms})"


def identity_components(S: Smoothing) -> Gen:
    comps: list[Component] = [(((TOP, i), (BOT, i)), 0, 0) for i in range(S.circles)]
    for p in sorted(set(_mixed(S.arcs, S.arcs).values())):
        comps.append((((MIX, p),), 0, 0))
    return normalize_components(comps)


# ---------------------------------------------------------------------------
# vertical composition


@lru_cache(maxsize=200000)
def _compose_gen(A: tuple, B: tuple, C: tuple, f: Gen, g: Gen) -> Gen:
    """Glue ``f: A -> B`` on top of ``g: B -> C``; A, B, C are smoothing shapes."""
    (a_arcs, a_circ), (b_arcs, b_circ), (c_arcs, c_circ) = A, B, C
    nf = len(f)
    ds = DisjointSet(range(nf + len(g)))
    fcurve: dict[Curve, int] = {}
    for idx, (curves, _, _) in enumerate(f):
        for cv in curves:
            fcurve[cv] = idx
    gcurve: dict[Curve, int] = {}
    for idx, (curves, _, _) in enumerate(g):
        for cv in curves:
            gcurve[cv] = nf + idx
    for j in range(b_circ):
        ds.union(fcurve[(BOT, j)], gcurve[(TOP, j)])
    mf = _mixed(a_arcs, b_arcs)
    mg = _mixed(b_arcs, c_arcs)
    glued_arcs: list[int] = []
    for p, _ in b_arcs:
        glued_arcs.append(ds.union(fcurve[(MIX, mf[p])], gcurve[(MIX, mg[p])]))
    chi: dict[int, int] = {}
    dots: dict[int, int] = {}
    for idx, comp in enumerate(f + g):
        r = ds.find(idx)
        chi[r] = chi.get(r, 0) + component_euler(comp)
        dots[r] = dots.get(r, 0) + comp[2]
    for r in glued_arcs:
        r = ds.find(r)
        chi[r] -= 1
    curves: dict[int, list[Curve]] = {}
    for i in range(a_circ):
        curves.setdefault(ds.find(fcurve[(TOP, i)]), []).append((TOP, i))
    for k in range(c_circ):
        curves.setdefault(ds.find(gcurve[(BOT, k)]), []).append((BOT, k))
    mn = _mixed(a_arcs, c_arcs)
    for p in sorted(set(mn.values())):
        curves.setdefault(ds.find(fcurve[(MIX, mf[p])]), []).append((MIX, p))
    out: list[Component] = []
    for r in chi:
        cv = curves.get(r, [])
        twice_g = 2 - len(cv) - chi[r]
        if twice_g < 0 or twice_g % 2:
            raise AssertionError("gluing produced an impossible Euler characteristic")
        out.append((tuple(sorted(cv)), twice_g // 2, dots[r]))
    return normalize_components(out)


def vertical_compose(g: Cobordism, f: Cobordism, reduced: bool = True) -> Cobordism:
    """``g o f``: first ``f`` then ``g`` (placing g below f)."""
    if f.target != g.source:
        if f.target.shape != g.source.shape:
            raise ValueError(f"cannot compose: {f.target.shape} is not {g.source.shape}")
        if f.target.shift != g.source.shift:
            raise ValueError("cannot compose: degree shifts do not chain")
    ring = f.ring
    A, B, C = f.source.shape, f.target.shape, g.target.shape
    acc: dict[Gen, object] = {}
    for fg, fc in f.terms.items():
        for gg, gc in g.terms.items():
            h = _compose_gen(A, B, C, fg, gg)
            acc[h] = acc.get(h, 0) + fc * gc
    out = Cobordism(f.source, g.target, acc, ring)
    return reduce(out) if reduced else out


# ---------------------------------------------------------------------------
# reduction to dotted disks


@cache
def _expand_component(curves: tuple[Curve, ...], genus: int, dots: int) -> tuple[tuple[int, frozenset], ...]:
    """(coefficient, set of dotted curves) terms equal to one component."""
    k = genus + dots
    b = len(curves)
    if b == 0:
        return ((2**genus, frozenset()),) if k == 1 else ()
    if k >= 2:
        return ()
    if k == 1:
        return ((2**genus, frozenset(curves)),)
    return tuple((1, frozenset(curves[:i] + curves[i + 1 :])) for i in range(b))


def canonical_gen(all_curves: Iterable[Curve], dotted: Iterable[Curve]) -> Gen:
    dotted = set(dotted)
    return tuple(sorted(((cv,), 0, 1 if cv in dotted else 0) for cv in all_curves))


def _reduce_gen(gen: Gen) -> dict[Gen, int]:
    scalar = 1
    factors: list[tuple[tuple[int, frozenset], ...]] = []
    all_curves: list[Curve] = []
    for curves, genus, dots in gen:
        ex = _expand_component(curves, genus, dots)
        if not ex:
            return {}
        all_curves.extend(curves)
        if not curves:
            scalar *= ex[0][0]
        else:
            factors.append(ex)
    out: dict[Gen, int] = {}
    for choice in itertools.product(*factors):
        coeff = scalar
        dotted: set = set()
        for c, ds in choice:
            coeff *= c
            dotted |= ds
        key = canonical_gen(all_curves, dotted)
        out[key] = out.get(key, 0) + coeff
    return out


_reduce_cache: dict[Gen, dict[Gen, int]] = {}


def reduce(C: Cobordism) -> Cobordism:
    """Rewrite ``C`` as a combination of canonical (dotted disk) generators."""
    acc: dict[Gen, object] = {}
    for gen, c in C.terms.items():
        red = _reduce_cache.get(gen)
        if red is None:
            red = _reduce_gen(gen)
            if len(_reduce_cache) < 500000:
                _reduce_cache[gen] = red
        for h, k in red.items():
            acc[h] = acc.get(h, 0) + c * k
    return Cobordism(C.source, C.target, acc, C.ring)


def equal_mod_relations(a: Cobordism, b: Cobordism) -> bool:
    """Equality in the dotted quotient."""
    return reduce(a - b).is_zero()


# ---------------------------------------------------------------------------
# horizontal composition


@dataclass
class ComposedSmoothing:
    smoothing: Smoothing
    circle_source: list[tuple]
    label_root: dict[int, int]


def compose_smoothings(
    D: PlanarArcDiagram, parts: Sequence[Smoothing], d_rename: Mapping[int, int] | None = None
) -> ComposedSmoothing:
    """Place crossingless pieces in the holes of ``D``.

    ``circle_source[i]`` says where composite circle ``i`` came from:
    ``("L", root)`` for a curve through D's arcs, ``("P", part, circle)`` for a
    circle inside a part and ``("O", k)`` for a free loop of ``D``.  Labels of
    ``D`` recorded in the metadata are passed through ``d_rename``.
    """
    dr = (lambda x: d_rename.get(x, x)) if d_rename else (lambda x: x)
    if len(parts) != len(D.holes):
        raise ValueError(f"diagram has {len(D.holes)} holes, got {len(parts)} parts")
    for h, S in zip(D.holes, parts):
        if S.size != len(h):
            raise ValueError(f"part with {S.size} boundary points placed in a hole with {len(h)}")
    w = wire(D, [S.arcs for S in parts])
    circles: list[tuple[tuple, tuple, frozenset]] = []
    have_meta = all(S.meta is not None for S in parts)
    extra: dict[int, set] = {}
    if have_meta:
        for h, S in zip(D.holes, parts):
            for (a, b), labs in zip(S.arcs, S.meta.arc_labels):
                extra.setdefault(w.label_root[h[a]], set()).update(labs)
    for cls in w.circle_classes:
        root = w.label_root[next(iter(cls))]
        labs = frozenset(map(dr, cls)) | frozenset(extra.get(root, ()))
        circles.append(((0, min(labs)), ("L", root), labs))
    for i, S in enumerate(parts):
        for c in range(S.circles):
            labs = S.meta.circle_labels[c] if have_meta else frozenset()
            key = (0, min(labs)) if labs else (1, i, c)
            circles.append((key, ("P", i, c), labs))
    for k in range(D.loops):
        circles.append(((2, k), ("O", k), frozenset()))
    circles.sort(key=lambda t: t[0])
    meta = None
    if have_meta:
        state = frozenset().union(*(S.meta.state for S in parts)) if parts else frozenset()
        arc_labels = []
        for a, b in w.arcs:
            root = w.output_root[a]
            labs = {dr(lab) for lab, r in w.label_root.items() if r == root} | extra.get(root, set())
            arc_labels.append(frozenset(labs))
        meta = SmoothingMeta(state, tuple(c[2] for c in circles), tuple(arc_labels))
    S = Smoothing(w.arcs, len(circles), sum(S.shift for S in parts), meta)
    return ComposedSmoothing(S, [c[1] for c in circles], w.label_root)


def horizontal_compose(
    D: PlanarArcDiagram,
    parts: Sequence[Cobordism],
    source: ComposedSmoothing | None = None,
    target: ComposedSmoothing | None = None,
) -> Cobordism:
    """Glue cobordisms into ``D x [0,1]``; precomputed composite ends may be passed in."""
    if len(parts) != len(D.holes):
        raise ValueError(f"diagram has {len(D.holes)} holes, got {len(parts)} parts")
    ring = parts[0].ring if parts else ZZ
    if source is None:
        source = compose_smoothings(D, [P.source for P in parts])
    if target is None:
        target = compose_smoothings(D, [P.target for P in parts])
    acc: dict[Gen, object] = {}
    for combo in itertools.product(*(list(P.terms.items()) for P in parts)):
        coeff = 1
        for _, c in combo:
            coeff *= c
        gen = _hcompose_gen(D, parts, [g for g, _ in combo], source, target)
        acc[gen] = acc.get(gen, 0) + coeff
    return Cobordism(source.smoothing, target.smoothing, acc, ring)


def _hcompose_gen(D, parts, gens, source: ComposedSmoothing, target: ComposedSmoothing) -> Gen:
    nodes: list[tuple[int, int]] = []  # (chi, dots)
    comp_index: list[dict[Curve, int]] = []
    for gen in gens:
        where: dict[Curve, int] = {}
        for comp in gen:
            for cv in comp[0]:
                where[cv] = len(nodes)
            nodes.append((component_euler(comp), comp[2]))
        comp_index.append(where)
    strip: dict[int, int] = {}
    for lab in source.label_root:
        strip[lab] = len(nodes)
        nodes.append((1, 0))
    loop_node = []
    for _ in range(D.loops):
        loop_node.append(len(nodes))
        nodes.append((0, 0))
    ds = DisjointSet(range(len(nodes)))
    glued: list[int] = []
    for i, (h, P) in enumerate(zip(D.holes, parts)):
        mix = _mixed(P.source.arcs, P.target.arcs)
        for p, lab in enumerate(h):
            glued.append(ds.union(strip[lab], comp_index[i][(MIX, mix[p])]))
    chi: dict[int, int] = {}
    dots: dict[int, int] = {}
    for idx, (x, d) in enumerate(nodes):
        r = ds.find(idx)
        chi[r] = chi.get(r, 0) + x
        dots[r] = dots.get(r, 0) + d
    for r in glued:
        chi[ds.find(r)] -= 1
    curves: dict[int, list[Curve]] = {}

    def node_of(src, side: int) -> int:
        kind = src[0]
        if kind == "L":
            return strip[src[1]]
        if kind == "P":
            return comp_index[src[1]][(side, src[2])]
        return loop_node[src[1]]

    for i, src in enumerate(source.circle_source):
        curves.setdefault(ds.find(node_of(src, TOP)), []).append((TOP, i))
    for i, src in enumerate(target.circle_source):
        curves.setdefault(ds.find(node_of(src, BOT)), []).append((BOT, i))
    mix = _mixed(source.smoothing.arcs, target.smoothing.arcs)
    for p in sorted(set(mix.values())):
        curves.setdefault(ds.find(strip[D.boundary[p]]), []).append((MIX, p))
    out: list[Component] = []
    for r in chi:
        cv = curves.get(r, [])
        twice_g = 2 - len(cv) - chi[r]
        if twice_g < 0 or twice_g % 2:
            raise AssertionError("horizontal gluing produced an impossible Euler characteristic")
        out.append((tuple(sorted(cv)), twice_g // 2, dots[r]))
    return normalize_components(out)


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class RelationInstance:
    """A local relation placed on an ambient generator.

    ``kind`` is one of ``S``, ``T``, ``4Tu``, ``3S1``, ``3S2``, ``NeckCut``;
    ``sites`` are indices of components of ``ambient`` carrying the small
    disks the relation acts on (repeats allowed).
    """

    kind: str
    ambient: CobGenerator
    sites: tuple[int, ...] = ()


_SITE_COUNT = {"S": 0, "T": 0, "4Tu": 4, "3S1": 3, "3S2": 3, "NeckCut": 2}


def _tube(comps: list[list], i: int, j: int) -> Gen:
    comps = [list(c) for c in comps]
    if i == j:
        comps[i][1] += 1
    else:
        a, b = comps[i], comps[j]
        merged = [tuple(a[0]) + tuple(b[0]), a[1] + b[1], a[2] + b[2]]
        comps = [c for k, c in enumerate(comps) if k not in (i, j)] + [merged]
    return normalize_components((tuple(c[0]), c[1], c[2]) for c in comps)


def _handle(comps: list[list], i: int) -> Gen:
    comps = [list(c) for c in comps]
    comps[i][1] += 1
    return normalize_components((tuple(c[0]), c[1], c[2]) for c in comps)


def relation_sides(inst: RelationInstance) -> tuple[dict[Gen, int], dict[Gen, int]]:
    """Both sides of the relation as generator -> coefficient maps."""
    kind = inst.kind
    if kind not in _SITE_COUNT:
        raise ValueError(f"unknown relation {kind!r}")
    amb = inst.ambient.components
    comps = [[c[0], c[1], c[2]] for c in amb]
    if len(inst.sites) != _SITE_COUNT[kind]:
        raise ValueError(f"{kind} needs {_SITE_COUNT[kind]} sites, got {len(inst.sites)}")
    for s in inst.sites:
        if not 0 <= s < len(comps):
            raise ValueError(f"site {s} is not a component of the ambient generator")

    def add(d: dict, g: Gen, c: int) -> None:
        d[g] = d.get(g, 0) + c

    lhs: dict[Gen, int] = {}
    rhs: dict[Gen, int] = {}
    if kind == "S":
        add(lhs, normalize_components(list(amb) + [((), 0, 0)]), 1)
    elif kind == "T":
        add(lhs, normalize_components(list(amb) + [((), 1, 0)]), 1)
        add(rhs, amb, 2)
    elif kind == "4Tu":
        s = inst.sites
        add(lhs, _tube(comps, s[0], s[1]), 1)
        add(lhs, _tube(comps, s[2], s[3]), 1)
        add(rhs, _tube(comps, s[0], s[2]), 1)
        add(rhs, _tube(comps, s[1], s[3]), 1)
    elif kind == "NeckCut":
        s = inst.sites
        add(lhs, _tube(comps, s[0], s[1]), 2)
        add(rhs, _handle(comps, s[0]), 1)
        add(rhs, _handle(comps, s[1]), 1)
    else:
        s = inst.sites
        for a, b in ((0, 1), (1, 2), (0, 2)):
            add(lhs, _tube(comps, s[a], s[b]), 1)
        for a in range(3):
            add(rhs, _handle(comps, s[a]), 1)
        if kind == "3S1":
            # 3S1 is 3S2 plus the neck cutting relation on the first tube
            add(lhs, _tube(comps, s[0], s[1]), 2)
            add(rhs, _handle(comps, s[0]), 1)
            add(rhs, _handle(comps, s[1]), 1)
    return lhs, rhs


def check_relation(inst: RelationInstance, ring: Ring = ZZ) -> bool:
    """Build both sides, reduce, and compare in the dotted quotient."""
    lhs, rhs = relation_sides(inst)
    src, tgt = inst.ambient.source, inst.ambient.target
    diff = Cobordism(src, tgt, lhs, ring) - Cobordism(src, tgt, rhs, ring)
    return reduce(diff).is_zero()


# ---------------------------------------------------------------------------
# elementary pieces


def cobordism_from_pieces(
    source: Smoothing,
    target: Smoothing,
    pieces: Iterable[tuple[Iterable[int], Iterable[int], Iterable[int], int, int]],
    coeff=1,
    ring: Ring = ZZ,
    fill_identity: bool = False,
    circle_map: Mapping[int, int] | None = None,
) -> Cobordism:
    """Assemble a generator from ``(source circles, target circles, boundary
    points, genus, dots)`` pieces.

    Boundary points select the mixed curves through them.  With
    ``fill_identity`` every unmentioned curve is closed up by an identity
    piece, pairing source circle ``i`` with target circle ``circle_map[i]``.
    """
    mix = _mixed(source.arcs, target.arcs)
    comps: list[Component] = []
    used: set[Curve] = set()
    for tops, bots, pts, genus, dots in pieces:
        cv = {(TOP, i) for i in tops} | {(BOT, i) for i in bots} | {(MIX, mix[p]) for p in pts}
        if cv & used:
            raise ValueError(f"curves {sorted(cv & used)} used by two pieces")
        used |= cv
        comps.append((tuple(sorted(cv)), genus, dots))
    if fill_identity:
        cmap = dict(circle_map or {})
        for i in range(source.circles):
            if (TOP, i) in used:
                continue
            j = cmap.get(i, i)
            if (BOT, j) in used:
                raise ValueError(f"target circle {j} already used")
            used |= {(TOP, i), (BOT, j)}
            comps.append((((TOP, i), (BOT, j)), 0, 0))
        for p in sorted(set(mix.values())):
            if (MIX, p) not in used:
                used.add((MIX, p))
                comps.append((((MIX, p),), 0, 0))
    return Cobordism.from_components(source, target, comps, coeff, ring)
