import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khovanov.builders import (
    braid_closure,
    coloring_determinant,
    link_components,
    rational,
)
from khovanov.corpus import knots, load_corpus
from khovanov.diagram import (
    ARC,
    DiagramError,
    PDSyntaxError,
    Site,
    TangleDiagram,
    apply_reidemeister,
    compose_tangles,
    glue,
    is_isomorphic,
    isomorphism,
    parse_pd,
    parse_pd_file,
    reidemeister_sites,
    resolve,
    rewrite,
)
from khovanov.planar import DisjointSet, PlanarArcDiagram

TREFOIL = parse_pd("PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]")
MOVES = ("R1a", "R1b", "R2", "R3")


def brute_circles(T, bits):
    """Count circles of a smoothing straight from the PD data."""
    ds = DisjointSet(T.edges)
    for (i, j, k, l), b in zip(T.crossings, bits):
        if b == 0:
            ds.union(i, j), ds.union(k, l)
        else:
            ds.union(i, l), ds.union(j, k)
    return len(ds.groups()) + T.loops


def test_trefoil_is_left_handed():
    assert TREFOIL.signs == (-1, -1, -1)
    assert TREFOIL.mirror().signs == (1, 1, 1)
    assert TREFOIL.n_minus == 3 and TREFOIL.is_link


def test_parse_tags_and_boundary():
    T = parse_pd("PD[Xp[1,2,3,4], B[*1,2,3,4]]  # one crossing")
    assert T.signs == (1,) and T.boundary == (1, 2, 3, 4)
    assert parse_pd("PD[Xm[1,2,3,4], B[1,2,3,4]]").signs == (-1,)
    assert parse_pd("PD[O[2]]").loops == 2
    assert len(parse_pd_file("# two\nPD[O[1]]\n\nPD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]\n")) == 2


@pytest.mark.parametrize(
    "text",
    ["PD[X[1,2,3]]", "PD[Y[1,2,3,4]]", "PD[X[1,2,3,4]", "X[1,2,3,4]", "PD[X[1,2,3,4] B[1,2,3,4]]"],
)
def test_syntax_errors(text):
    with pytest.raises((PDSyntaxError, DiagramError)):
        parse_pd(text)


def test_syntax_error_reports_position():
    with pytest.raises(PDSyntaxError) as e:
        parse_pd("PD[X[1,2,3,4], Q]")
    assert e.value.pos == 15


@pytest.mark.parametrize(
    "text",
    [
        "PD[X[1,2,3,4]]",  # edges with one end
        "PD[X[1,1,2,3], B[2,3,4]]",
        "PD[X[1,2,3,4], B[1,4,3,2]]",  # boundary order admits no embedding
    ],
)
def test_invalid_diagrams(text):
    with pytest.raises(DiagramError):
        parse_pd(text)


def test_to_pd_roundtrip_corpus():
    for name, T in load_corpus().items():
        assert parse_pd(T.to_pd()) == T, name


def test_resolve_trefoil():
    assert resolve(TREFOIL, "000").circles == 3
    assert resolve(TREFOIL, "111").circles == 2
    assert resolve(TREFOIL, "100").circles == 2
    with pytest.raises(ValueError):
        resolve(TREFOIL, "00")


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "6_3"])
def test_resolve_matches_brute_force(name):
    T = load_corpus()[name]
    for bits in itertools.product((0, 1), repeat=T.n):
        assert resolve(T, bits).circles == brute_circles(T, bits)


def test_kink_resolutions():
    for move, zero, one in (("R1a", 2, 1), ("R1b", 1, 2)):
        loop = TangleDiagram(loops=1)
        T = apply_reidemeister(loop, move, reidemeister_sites(loop, move)[0])
        assert (resolve(T, "0").circles, resolve(T, "1").circles) == (zero, one)


@pytest.mark.parametrize("name", ["3_1", "4_1", "8_19", "L6a4"])
def test_recompose_from_crossings(name):
    T = load_corpus()[name]
    assert is_isomorphic(compose_tangles(T.arc_diagram(), T.crossing_tangles()), T)


def test_glue_two_crossings_into_twist():
    T = rational([2]).as_tangle()
    g = glue(T.arc_diagram(), T.crossing_tangles())
    assert g.diagram.n == 2 and g.diagram.boundary == T.boundary
    assert g.crossing_origin == [(0, 0), (1, 0)]
    with pytest.raises(DiagramError):
        glue(T.arc_diagram(), T.crossing_tangles()[:1])


def test_glue_closing_arc_makes_loop():
    D = PlanarArcDiagram(holes=((1, 1),), boundary=())
    assert compose_tangles(D, [ARC]).loops == 1


def test_compose_nested_equals_flat():
    # glue the R3 triangle of a braid closure as one 3-crossing tangle, or crossing by crossing
    T = braid_closure([1, 2, 1, 2])
    site = reidemeister_sites(T, "R3")[0]
    rw = rewrite(T, site)
    flat_inner = compose_tangles(rw.before.arc_diagram(), rw.before.crossing_tangles())
    nested = compose_tangles(rw.D, rw.inputs(flat_inner))
    assert is_isomorphic(nested, T)
    radial = PlanarArcDiagram.radial(4)
    inner = [compose_tangles(radial, [x]) for x in T.crossing_tangles()]
    assert is_isomorphic(compose_tangles(T.arc_diagram(), inner), T)


def test_isomorphism_is_explicit():
    T = load_corpus()["4_1"]
    shifted = TangleDiagram(tuple(tuple(x + 10 for x in X) for X in reversed(T.crossings)), tuple(reversed(T.signs)))
    labs, xs = isomorphism(T, shifted)
    for c, X in enumerate(T.crossings):
        assert tuple(labs[x] for x in X) == shifted.crossings[xs[c]]
    assert isomorphism(T, T.mirror()) is None


SAMPLE = {
    "3_1": TREFOIL,
    "4_1": load_corpus()["4_1"],
    "b121": braid_closure([1, 2, 1]),
    "b12m1": braid_closure([1, 2, -1]),
    "b11m21m2": braid_closure([1, 1, 2, -1, 2]),
    "tangle": rational([2, 2]).as_tangle(),
    "loop": TangleDiagram(loops=1),
    "arc": ARC,
}


def _all_sites():
    for name, T in SAMPLE.items():
        for move in MOVES:
            for site in reidemeister_sites(T, move):
                yield name, T, move, site


def test_every_site_rewrites_consistently():
    count = 0
    for name, T, move, site in _all_sites():
        rw = rewrite(T, site)
        assert is_isomorphic(rw.glue_before().diagram, T), (name, site)
        R = rw.result()
        step = {"R1a": 1, "R1b": 1, "R2": 2, "R3": 0}[move]
        assert R.n - T.n == (-step if site.inverse else step)
        assert link_components(R) == link_components(T)
        if not T.boundary:
            assert coloring_determinant(R) == coloring_determinant(T)
        count += 1
    assert count > 300


def test_every_move_can_be_undone():
    for name, T, move, site in _all_sites():
        R = apply_reidemeister(T, move, site)
        back = reidemeister_sites(R, move, None if move == "R3" else not site.inverse)
        assert any(is_isomorphic(apply_reidemeister(R, move, s), T) for s in back), (name, site)


def test_r3_twice_is_identity():
    T = braid_closure([1, 2, 1])
    (site,) = reidemeister_sites(T, "R3")
    R = apply_reidemeister(T, "R3", site)
    assert not is_isomorphic(R, T) or R.crossings != T.crossings
    assert any(is_isomorphic(apply_reidemeister(R, "R3", s), T) for s in reidemeister_sites(R, "R3"))


def test_wrong_kink_kind_rejected():
    with pytest.raises(DiagramError):
        apply_reidemeister(TREFOIL, "R1b", Site("R1b", False, (1, 0)))
    with pytest.raises(DiagramError):
        apply_reidemeister(TREFOIL, "R2", Site("R1a", False, (1, 0)))


def test_cyclic_triangle_has_no_r3():
    # the trefoil's triangles are alternating, so no strand passes over both others
    assert reidemeister_sites(TREFOIL, "R3") == []


@settings(max_examples=30)
@given(st.sampled_from(sorted(knots(6))), st.integers(0, 10**6), st.integers(1, 6))
def test_random_walk_keeps_determinant(name, seed, steps):
    rng = random.Random(seed)
    T = knots(6)[name]
    det = coloring_determinant(T)
    for _ in range(steps):
        move = rng.choice(MOVES)
        sites = reidemeister_sites(T, move)
        if sites:
            T = apply_reidemeister(T, move, rng.choice(sites))
    assert coloring_determinant(T) == det and link_components(T) == 1
