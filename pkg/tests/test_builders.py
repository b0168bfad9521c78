from fractions import Fraction

import pytest

from khovanov.builders import (
    braid_closure,
    coloring_determinant,
    continued_fraction,
    is_alternating,
    link_components,
    parse_conway,
    rational,
    twist,
)
from khovanov.corpus import get, knots, links, load_corpus, resolve_input

# tabulated determinants
DETS = {
    "3_1": 3, "4_1": 5, "5_1": 5, "5_2": 7, "6_1": 9, "6_2": 11, "6_3": 13,
    "7_1": 7, "7_2": 11, "7_3": 13, "7_4": 15, "7_5": 17, "7_6": 19, "7_7": 21,
    "8_1": 13, "8_2": 17, "8_3": 17, "8_4": 19, "8_5": 21, "8_6": 23, "8_7": 23,
    "8_8": 25, "8_9": 25, "8_10": 27, "8_11": 27, "8_12": 29, "8_13": 29, "8_14": 31,
    "8_15": 33, "8_16": 35, "8_17": 37, "8_18": 45, "8_19": 3, "8_20": 9, "8_21": 15,
    "10_136": 15,
}  # fmt: skip


def test_corpus_has_all_small_prime_knots():
    ks = knots(8)
    assert len(ks) == 1 + 35  # unknot plus the 35 prime knots up to eight crossings
    assert set(DETS) <= set(load_corpus())


@pytest.mark.parametrize("name", sorted(DETS))
def test_corpus_determinants(name):
    T = get(name)
    assert coloring_determinant(T) == DETS[name]
    assert T.n == int(name.split("_")[0])
    assert link_components(T) == 1


def test_non_alternating_knots():
    assert {k for k in DETS if not is_alternating(get(k))} == {"8_19", "8_20", "8_21", "10_136"}


def test_links():
    comps = {k: link_components(T) for k, T in links().items()}
    assert comps == {"L0a1": 2, "L0a2": 3, "L2a1": 2, "L4a1": 2, "L5a1": 2, "L6a4": 3}
    assert coloring_determinant(get("L0a1")) == 0


def test_rational_fraction_is_determinant():
    for seq in ([2, 2], [3, 1, 2], [2, 1, 1, 2], [4, 1, 3]):
        assert coloring_determinant(rational(seq).numerator()) == continued_fraction(seq).numerator
    assert continued_fraction([2, 2]) == Fraction(5, 2)


def test_twist_and_mirror():
    assert twist(3).numerator().n == 3
    assert twist(-3).numerator().signs == tuple(-s for s in twist(3).numerator().signs)
    with pytest.raises(ValueError):
        twist(0)


def test_braid_closure_conventions():
    hopf = braid_closure([1, 1])
    assert hopf.signs == (1, 1) and link_components(hopf) == 2
    assert braid_closure([-1, -1, -1]).signs == (-1, -1, -1)
    assert braid_closure([1], strands=3).loops == 1
    with pytest.raises(ValueError):
        braid_closure([3], strands=2)


def test_conway_words():
    assert coloring_determinant(parse_conway("2 2")) == 5
    assert coloring_determinant(parse_conway("3,3,2")) == 21
    assert coloring_determinant(parse_conway("3,3,2-")) == 3


def test_resolve_input(tmp_path):
    assert resolve_input("4.1") == get("4_1")
    assert resolve_input("PD[O[1]]").loops == 1
    p = tmp_path / "k.pd"
    p.write_text(get("3_1").to_pd())
    assert resolve_input(str(p)) == get("3_1")
    with pytest.raises(KeyError):
        resolve_input("no_such_knot")
