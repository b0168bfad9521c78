import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import cobordisms

from khovanov import corpus
from khovanov.algebra import F2, QQ, ZZ
from khovanov.bracket import build_cube, khovanov_complex
from khovanov.cob3 import (
    Cobordism,
    RelationInstance,
    Smoothing,
    cobordism_from_pieces,
    reduce,
    vertical_compose,
)
from khovanov.suites import relation_ambients
from khovanov.tqft import (
    apply_functor,
    check_homogeneous,
    check_relation_functor,
    closed_surface,
    four_tu_sides,
    frobenius_axioms,
    get_spec,
    object_basis,
    spec_f3,
    spec_khovanov,
    sphere_value,
    torus_value,
)

EMPTY, CIRCLE = Smoothing(), Smoothing(circles=1)
V_PLUS, V_MINUS = 0, 1


@pytest.mark.parametrize("name", ["khovanov", "lee", "f3", "fc"])
def test_frobenius_axioms(name):
    assert all(frobenius_axioms(get_spec(name)).values())


def test_khovanov_structure_maps():
    s = spec_khovanov()
    assert s.m([1, 0], [0, 1]) == [0, 1]
    assert s.m([0, 1], [0, 1]) == [0, 0]
    assert s.delta([1, 0]) == {(0, 1): 1, (1, 0): 1}
    assert s.delta([0, 1]) == {(1, 1): 1}
    assert list(s.unit) == [1, 0]
    assert (s.eta([1, 0]), s.eta([0, 1])) == (0, 1)


def test_lee_squares_v_minus_to_v_plus():
    s = get_spec("lee")
    assert s.m([0, 1], [0, 1]) == [1, 0]
    assert s.delta([0, 1]) == {(1, 1): 1, (0, 0): 1}


def test_homogeneity():
    assert check_homogeneous(spec_khovanov())
    assert check_homogeneous(spec_f3())
    assert check_homogeneous(get_spec("fc"))


def test_sphere_torus_and_four_tubes():
    s = spec_khovanov()
    assert sphere_value(s) == 0
    assert torus_value(s) == 2
    assert closed_surface(s, 0, 1) == 1
    assert closed_surface(s, 2) == 0
    L, R = four_tu_sides(s)
    one_minus = {tuple(int(k == i) for k in range(4)): 1 for i in range(4)}
    assert L == R == one_minus


def test_fc_breaks_the_sphere_relation():
    s = get_spec("fc")
    assert not s.descends
    assert sphere_value(s) != 0


def test_f3_torus_vanishes_in_characteristic_two():
    assert torus_value(spec_f3(1)) % 2 == 0


def test_functor_respects_every_relation_placement():
    s = spec_khovanov()
    n = 0
    for amb in relation_ambients(2):
        if amb.source.size:
            continue
        k = len(amb.components)
        for kind, sites in (("S", ()), ("T", ()), ("4Tu", (0,) * 4), ("NeckCut", (0, k - 1)), ("3S2", (0, 0, k - 1))):
            assert check_relation_functor(s, RelationInstance(kind, amb, sites))
            n += 1
    assert n > 50


@given(cobordisms(max_genus=2, max_dots=2))
def test_functor_factors_through_reduce(c):
    # the functor sees only the class of a cobordism in the dotted quotient
    if c.source.size or c.target.size:
        return
    s = spec_khovanov()
    assert s.cobordism_map(c) == s.cobordism_map(reduce(c))


def test_functor_is_functorial_on_cup_then_cap():
    s = spec_khovanov()
    cup = cobordism_from_pieces(EMPTY, CIRCLE, [((), (0,), (), 0, 0)])
    cap = cobordism_from_pieces(CIRCLE, EMPTY, [((0,), (), (), 0, 1)])
    sphere = vertical_compose(cap, cup)
    assert s.evaluate_closed(sphere) == 1  # one dot
    assert s.cobordism_map(sphere) == {0: {0: 1}}


def test_object_basis_degrees():
    assert object_basis(Smoothing(circles=2, shift=3)) == [5, 3, 3, 1]


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "L2a1"])
@pytest.mark.parametrize("ring", [ZZ, QQ, F2])
def test_algebraic_complex_is_a_complex(name, ring):
    A = apply_functor(spec_khovanov(ring), khovanov_complex(corpus.get(name), ring))
    assert A.verify_d_squared()
    assert A.entry_degree_shifts() <= {0}


def test_lee_complex_is_a_complex_but_not_graded():
    A = apply_functor(get_spec("lee"), build_cube(corpus.get("3_1")))
    assert A.verify_d_squared()
    assert not A.graded


def test_f3_complex_is_homogeneous():
    A = apply_functor(spec_f3(), khovanov_complex(corpus.get("3_1")))
    assert A.verify_d_squared()
    assert A.entry_degree_shifts() <= {0}


def test_apply_functor_needs_closed_objects():
    from khovanov.builders import braid_tangle

    with pytest.raises(ValueError):
        apply_functor(spec_khovanov(), khovanov_complex(braid_tangle([1], 2)))


@given(st.integers(0, 3), st.integers(0, 3))
def test_closed_surfaces_agree_with_dotted_reduction(genus, dots):
    # the dotted quotient is the Khovanov theory; Lee's (dot squared = 1) is not
    s = spec_khovanov()
    c = Cobordism.from_components(EMPTY, EMPTY, [((), genus, dots)])
    assert s.evaluate_closed(reduce(c)) == closed_surface(s, genus, dots)
