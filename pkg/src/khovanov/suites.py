"""Property suites over the bundled corpus.

Each suite returns a ``SuiteReport``; the CLI ``check`` command prints them and
the acceptance tests assert on them.  Randomized suites take a seed so that a
report is reproducible.
"""

from __future__ import annotations

import itertools
import random
import time
from collections.abc import Callable, Iterator, Sequence
from dataclasses import asdict, dataclass, field

from . import corpus
from .algebra import F2, QQ
from .bracket import (
    graded_degrees,
    khovanov_complex,
    match_complexes,
    planar_compose,
    verify_d_squared,
)
from .cob3 import (
    MIX,
    CobGenerator,
    Cobordism,
    RelationInstance,
    Smoothing,
    boundary_curves,
    check_relation,
    cobordism_from_pieces,
    degree,
    horizontal_compose,
    reduce,
    vertical_compose,
)
from .diagram import (
    DiagramError,
    TangleDiagram,
    apply_reidemeister,
    glue,
    reidemeister_sites,
)
from .homology import betti, graded_euler, jones_hat, lee_dimension
from .planar import PlanarArcDiagram, noncrossing_matchings
from .tqft import apply_functor, four_tu_sides, spec_khovanov, sphere_value, torus_value


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def fail(self, **info) -> None:
        self.failures.append(info)

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _timed(fn: Callable[..., SuiteReport]) -> Callable[..., SuiteReport]:
    def run(*args, **kw) -> SuiteReport:
        t = time.time()
        rep = fn(*args, **kw)
        rep.seconds = round(time.time() - t, 3)
        return rep

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _corpus(max_crossings: int | None = None, skip: Sequence[str] = ("10_136",)) -> dict[str, TangleDiagram]:
    return {k: T for k, T in corpus.load_corpus().items() if k not in skip and (max_crossings is None or T.n <= max_crossings)}


# ---------------------------------------------------------------------------
# cobordisms

EMPTY = Smoothing()
CIRCLE = Smoothing(circles=1)
ARC = Smoothing(((0, 1),))
TWO = Smoothing(((0, 1), (2, 3)))
OTHER = Smoothing(((0, 3), (1, 2)))
SIDE_BY_SIDE = PlanarArcDiagram(((1, 2, 3, 4), (5, 6, 7, 8)), (1, 2, 7, 8, 5, 6, 3, 4))


def relation_ambients(max_comps: int = 3) -> Iterator[CobGenerator]:
    """Generators with at most ``max_comps`` components over a few small
    boundaries, each component carrying genus <= 1 or one dot."""
    shapes = [(EMPTY, EMPTY), (CIRCLE, EMPTY), (ARC, ARC), (TWO, OTHER), (CIRCLE, CIRCLE)]
    for src, tgt in shapes:
        curves = boundary_curves(src, tgt)
        for k in range(1, max_comps + 1):
            for labels in itertools.product(range(k), repeat=len(curves)):
                if curves and sorted(set(labels)) != list(range(max(labels) + 1)):
                    continue
                groups = [tuple(c for c, lab in zip(curves, labels) if lab == i) for i in range(k)]
                for decor in itertools.product([(0, 0), (0, 1), (1, 0)], repeat=k):
                    yield CobGenerator(src, tgt, tuple((g, gd[0], gd[1]) for g, gd in zip(groups, decor)))


def random_smoothing(rng: random.Random, points: int | None = None, max_circles: int = 2) -> Smoothing:
    if points is None:
        points = rng.choice((0, 2, 4))
    return Smoothing(rng.choice(noncrossing_matchings(points)), rng.randint(0, max_circles))


def random_generator(rng: random.Random, source: Smoothing, target: Smoothing, max_comps=4, max_genus=2, max_dots=2):
    curves = list(boundary_curves(source, target))
    k = rng.randint(1, max_comps)
    labels = [rng.randrange(k) for _ in curves]
    comps = []
    for i in range(k):
        cv = tuple(c for c, lab in zip(curves, labels) if lab == i)
        if not cv and curves and rng.random() < 0.5:
            continue
        comps.append((cv, rng.randint(0, max_genus), rng.randint(0, max_dots)))
    return CobGenerator(source, target, tuple(comps))


def random_cobordism(rng: random.Random, source: Smoothing | None = None, target: Smoothing | None = None, max_terms=3):
    source = source or random_smoothing(rng)
    target = target or random_smoothing(rng, source.size)
    terms: dict = {}
    for _ in range(rng.randint(0, max_terms)):
        g = random_generator(rng, source, target).components
        terms[g] = terms.get(g, 0) + rng.randint(-3, 3)
    return Cobordism(source, target, terms)


@_timed
def relations(samples: int = 1000, seed: int = 0) -> SuiteReport:
    """Every placement of S, T, 4Tu, 3S1, 3S2 and neck cutting on the small
    ambients, then idempotence and linearity of ``reduce`` on random input."""
    rep = SuiteReport("relations")
    counts: dict[str, int] = {}
    for amb in relation_ambients():
        n = len(amb.components)
        for kind, k in (("S", 0), ("T", 0), ("4Tu", 4), ("3S1", 3), ("3S2", 3), ("NeckCut", 2)):
            for sites in itertools.product(range(n), repeat=k):
                inst = RelationInstance(kind, amb, sites)
                counts[kind] = counts.get(kind, 0) + 1
                rep.checked += 1
                if not check_relation(inst):
                    rep.fail(kind=kind, ambient=str(amb.components), sites=sites)
    for ring in (QQ, F2):
        amb = CobGenerator(TWO, OTHER, ((((MIX, 0),), 0, 0),))
        rep.checked += 1
        if not check_relation(RelationInstance("4Tu", amb, (0, 0, 0, 0)), ring):
            rep.fail(kind="4Tu", ring=ring.name)
    rng = random.Random(seed)
    for i in range(samples):
        a = random_cobordism(rng)
        b = random_cobordism(rng, a.source, a.target)
        x, y = rng.randint(-4, 4), rng.randint(-4, 4)
        r = reduce(a)
        rep.checked += 1
        if reduce(r) != r or not all(g.is_canonical for g in r.generators()):
            rep.fail(kind="idempotent", sample=i)
        if reduce(a.scale(x) + b.scale(y)) != r.scale(x) + reduce(b).scale(y):
            rep.fail(kind="linear", sample=i)
    rep.details = {"instances": counts, "random_samples": samples}
    return rep


def _saddle() -> Cobordism:
    return cobordism_from_pieces(TWO, OTHER, [((), (), (0, 1, 2, 3), 0, 0)])


@_timed
def degrees(samples: int = 1000, seed: int = 0, max_crossings: int | None = None) -> SuiteReport:
    """Elementary degrees, additivity under both compositions, and degree-0
    differentials in every normalized corpus complex."""
    rep = SuiteReport("degrees")
    cup = cobordism_from_pieces(EMPTY, CIRCLE, [((), (0,), (), 0, 0)])
    cap = cobordism_from_pieces(CIRCLE, EMPTY, [((0,), (), (), 0, 0)])
    for name, cob, want in (("saddle", _saddle(), -1), ("cup", cup, 1), ("cap", cap, 1), ("identity", Cobordism.identity(TWO), 0)):
        rep.checked += 1
        if degree(cob) != want:
            rep.fail(kind=name, got=degree(cob), want=want)
    rng = random.Random(seed)
    for i in range(samples):
        rep.checked += 1
        if i % 2 == 0:
            a = random_smoothing(rng)
            b, c = random_smoothing(rng, a.size), random_smoothing(rng, a.size)
            f = Cobordism(a, b, {random_generator(rng, a, b).components: 1})
            g = Cobordism(b, c, {random_generator(rng, b, c).components: 1})
            h = vertical_compose(g, f, reduced=False)
        else:
            s1, t1 = random_smoothing(rng, 4), random_smoothing(rng, 4)
            s2, t2 = random_smoothing(rng, 4), random_smoothing(rng, 4)
            f = Cobordism(s1, t1, {random_generator(rng, s1, t1).components: 1})
            g = Cobordism(s2, t2, {random_generator(rng, s2, t2).components: 1})
            h = horizontal_compose(SIDE_BY_SIDE, [f, g])
        if degree(h) != degree(f) + degree(g):
            rep.fail(kind="additivity", sample=i)
    for name, T in _corpus(max_crossings).items():
        rep.checked += 1
        degs = graded_degrees(khovanov_complex(T))
        if not degs <= {0}:
            rep.fail(kind="differential", knot=name, degrees=sorted(degs))
    return rep


# ---------------------------------------------------------------------------
# complexes


@_timed
def dsquared(max_crossings: int | None = None) -> SuiteReport:
    rep = SuiteReport("dsquared")
    for name, T in _corpus(max_crossings).items():
        rep.checked += 1
        if not verify_d_squared(khovanov_complex(T)):
            rep.fail(knot=name)
    return rep


@_timed
def euler_jones(max_crossings: int = 8) -> SuiteReport:
    """The graded Euler characteristic of Kh equals the skein-theoretic Jones polynomial."""
    rep = SuiteReport("euler")
    for name, T in _corpus(max_crossings).items():
        rep.checked += 1
        chi, j = graded_euler(khovanov_complex(T)), jones_hat(T)
        if chi != j:
            rep.fail(knot=name, euler=str(chi), jones=str(j))
    return rep


def betti_pair(T: TangleDiagram) -> tuple:
    A = apply_functor(spec_khovanov(), khovanov_complex(T))
    return betti(A, "Q"), betti(A, "F2")


def random_move(T: TangleDiagram, rng: random.Random) -> tuple[str, object, TangleDiagram]:
    """Apply one Reidemeister move at a random site, retrying on sites that fail."""
    sites = [(m, s) for m in ("R1a", "R1b", "R2", "R3") for s in reidemeister_sites(T, m)]
    rng.shuffle(sites)
    for move, site in sites:
        try:
            return move, site, apply_reidemeister(T, move, site)
        except DiagramError:
            continue
    raise DiagramError("no applicable Reidemeister move")


@_timed
def invariance(moves: int = 100, max_crossings: int = 6, seed: int = 0) -> SuiteReport:
    """Random single Reidemeister moves leave the Betti tables over Q and F2 unchanged."""
    rep = SuiteReport("invariance")
    rng = random.Random(seed)
    pool = sorted(_corpus(max_crossings).items())
    cache = {name: betti_pair(T) for name, T in pool}
    kinds: dict[str, int] = {}
    for i in range(moves):
        name, T = pool[rng.randrange(len(pool))]
        move, site, U = random_move(T, rng)
        key = f"{move}{'-' if site.inverse else '+'}" if move != "R3" else "R3"
        kinds[key] = kinds.get(key, 0) + 1
        rep.checked += 1
        if betti_pair(U) != cache[name]:
            rep.fail(knot=name, move=move, site=repr(site.data), step=i)
    rep.details = {"moves": kinds}
    return rep


def planar_complex(T: TangleDiagram):
    """Kh(T) assembled from one-crossing complexes through the arc diagram of T."""
    parts = T.crossing_tangles()
    D = T.arc_diagram()
    g = glue(D, parts)
    return planar_compose(D, [khovanov_complex(p) for p in parts], g.input_labels, g.d_labels).complex


@_timed
def planar(max_crossings: int = 6) -> SuiteReport:
    """Composing crossing complexes through the arc diagram agrees with the cube."""
    rep = SuiteReport("planar")
    for name, T in _corpus(max_crossings).items():
        rep.checked += 1
        C, K = planar_complex(T), khovanov_complex(T)
        if match_complexes(C, K) is None:
            rep.fail(knot=name, reason="formal complexes differ beyond a permutation")
            continue
        A, B = apply_functor(spec_khovanov(), C), apply_functor(spec_khovanov(), K)
        for fld in ("Q", "F2"):
            if betti(A, fld) != betti(B, fld):
                rep.fail(knot=name, reason=f"homology differs over {fld}")
    return rep


@_timed
def lee(max_components: int = 3) -> SuiteReport:
    """Lee homology has dimension 2 for knots and 2^c for c-component links."""
    from .builders import link_components

    rep = SuiteReport("lee")
    for name, T in _corpus().items():
        c = link_components(T)
        if c > max_components:
            continue
        rep.checked += 1
        dim = lee_dimension(T)
        if dim != 2**c:
            rep.fail(knot=name, components=c, dimension=dim)
    return rep


@_timed
def frobenius() -> SuiteReport:
    """Sphere, torus and four-tube values of the Khovanov TQFT."""
    rep = SuiteReport("frobenius")
    s = spec_khovanov()
    one_minus = {tuple(int(k == i) for k in range(4)): 1 for i in range(4)}
    L, R = four_tu_sides(s)
    for label, got, want in (("sphere", sphere_value(s), 0), ("torus", torus_value(s), 2), ("4Tu L", L, one_minus), ("4Tu R", R, one_minus)):
        rep.checked += 1
        if got != want:
            rep.fail(kind=label, got=str(got), want=str(want))
    return rep


@_timed
def movies(numbers: Sequence[int] = tuple(range(1, 16)), fields: Sequence[str] = ("Q", "F2")) -> SuiteReport:
    from .movie_moves import check_movie_move

    rep = SuiteReport("movies")
    verdicts = {}
    for k in numbers:
        v = check_movie_move(k, fields)
        rep.checked += 1
        verdicts[f"MM{k}"] = v.to_json()
        if not v.passed:
            rep.fail(move=k, signs=v.signs)
    rep.details = verdicts
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "relations": relations,
    "degrees": degrees,
    "dsquared": dsquared,
    "euler": euler_jones,
    "invariance": invariance,
    "planar": planar,
    "lee": lee,
    "frobenius": frobenius,
    "movies": movies,
}
