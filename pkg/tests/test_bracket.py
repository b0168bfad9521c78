import itertools

import networkx as nx
import pytest

from khovanov import corpus
from khovanov.algebra import F2, QQ
from khovanov.bracket import (
    ChainMap,
    build_cube,
    cone,
    graded_degrees,
    khovanov_complex,
    match_complexes,
    permute_objects,
    planar_compose,
    shift,
    verify_d_squared,
)
from khovanov.builders import braid_closure, braid_tangle
from khovanov.diagram import resolve
from khovanov.homology import betti
from khovanov.planar import PlanarArcDiagram
from khovanov.suites import planar_complex
from khovanov.tqft import apply_functor, spec_khovanov


def _circles_oracle(T, bits):
    """Circles of a closed resolution, by connected components of the edge graph."""
    G = nx.Graph()
    G.add_nodes_from(T.edges)
    for (i, j, k, l), b in zip(T.crossings, bits):
        G.add_edges_from([(i, j), (k, l)] if b == 0 else [(i, l), (j, k)])
    return nx.number_connected_components(G) + T.loops


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "L2a1", "L4a1"])
def test_resolutions_match_graph_components(name):
    T = corpus.get(name)
    for bits in itertools.product((0, 1), repeat=T.n):
        S = resolve(T, bits)
        assert S.arcs == () and S.circles == _circles_oracle(T, bits)


def test_kink_resolutions():
    K = braid_closure([1], 2)  # a one-crossing diagram of the unknot
    assert sorted(resolve(K, b).circles for b in ("0", "1")) == [1, 2]
    with pytest.raises(ValueError):
        resolve(corpus.get("3_1"), "01")


@pytest.mark.parametrize("name", ["0_1", "3_1", "4_1", "6_2", "8_19", "L6a4"])
def test_cube_is_a_complex_with_degree_zero_differentials(name):
    T = corpus.get(name)
    K = khovanov_complex(T)
    assert verify_d_squared(K)
    assert graded_degrees(K) <= {0}
    assert (K.min_height, K.max_height) == (-T.n_minus, T.n_plus)
    assert [len(K.obj(r)) for r in K.heights()] == [len(list(itertools.combinations(range(T.n), h))) for h in range(T.n + 1)]


def test_unnormalized_cube_has_saddle_degrees():
    K = build_cube(corpus.get("3_1"))
    assert graded_degrees(K) == {-1}


def test_tangle_complexes():
    T = braid_tangle([1, 2, -1], 3)
    K = khovanov_complex(T)
    assert verify_d_squared(K)
    assert all(S.size == 6 for objs in K.objects.values() for S in objs)


@pytest.mark.parametrize("ring", [QQ, F2])
def test_cone_of_identity_is_acyclic(ring):
    K = khovanov_complex(corpus.get("3_1"), ring)
    C = cone(ChainMap.identity(K))
    assert verify_d_squared(C)
    fld = "Q" if ring is QQ else "F2"
    assert betti(apply_functor(spec_khovanov(ring), C), fld).total() == 0


def test_shift_moves_heights():
    K = khovanov_complex(corpus.get("3_1"))
    S = shift(K, 1, 2)
    assert S.min_height == K.min_height - 1
    assert S.obj(S.min_height)[0].shift == K.obj(K.min_height)[0].shift + 2


def test_match_recovers_a_permutation():
    K = khovanov_complex(corpus.get("4_1"))
    perms = {r: list(reversed(range(len(K.obj(r))))) for r in K.heights()}
    P = permute_objects(K, perms)
    m = match_complexes(P, K)
    assert m is not None
    f = m.chain_map(P, K)
    assert f.is_chain_map()


def test_match_rejects_a_different_knot():
    assert match_complexes(khovanov_complex(corpus.get("5_1")), khovanov_complex(corpus.get("5_2"))) is None


def test_radial_composition_is_identity():
    T = braid_tangle([1], 2)
    K = khovanov_complex(T)
    C = planar_compose(PlanarArcDiagram.radial(len(T.boundary)), [K]).complex
    assert [[S.arcs for S in C.obj(r)] for r in C.heights()] == [[S.arcs for S in K.obj(r)] for r in K.heights()]
    assert verify_d_squared(C)


@pytest.mark.parametrize("name", ["0_1", "3_1", "5_2", "6_3", "L0a2", "L5a1"])
def test_planar_composition_of_crossings(name):
    T = corpus.get(name)
    C, K = planar_complex(T), khovanov_complex(T)
    assert verify_d_squared(C)
    assert match_complexes(C, K) is not None


def test_chain_map_algebra():
    K = khovanov_complex(corpus.get("3_1"))
    I = ChainMap.identity(K)
    assert (I - I).is_zero()
    assert I.compose(I).is_chain_map()
    assert ((I + I).scale(-1) - ((-I) + (-I))).is_zero()
    assert not (I + I).is_zero()
