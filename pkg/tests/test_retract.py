import pytest

from khovanov import corpus
from khovanov.bracket import (
    ChainMap,
    khovanov_complex,
    mat_add,
    mat_equal,
    mat_mul,
    verify_d_squared,
)
from khovanov.builders import braid_tangle
from khovanov.diagram import kink_tangle
from khovanov.homology import betti
from khovanov.retract import Retract, deloop, find_unit, gauss, simplify
from khovanov.tqft import apply_functor, spec_khovanov


def is_homotopy(R: Retract, C) -> bool:
    """``I - g f == d h + h d`` at every height."""
    I = ChainMap.identity(C)
    lhs = I - R.g.compose(R.f)
    for r in range(C.min_height, C.max_height + 1):
        rhs = mat_add(mat_mul(C.d(r - 1), R.h.at(r)), mat_mul(R.h.at(r + 1), C.d(r)))
        if not mat_equal(lhs.at(r), rhs):
            return False
    return True


def check_retract(R: Retract, C) -> None:
    assert verify_d_squared(R.small)
    assert R.f.is_chain_map() and R.g.is_chain_map()
    assert (R.f.compose(R.g) - ChainMap.identity(R.small)).is_zero()
    assert is_homotopy(R, C)


CASES = {
    "kink": lambda: kink_tangle(0),
    "crossing": lambda: braid_tangle([1], 2),
    "bigon": lambda: braid_tangle([1, -1], 2),
    "twist": lambda: braid_tangle([1, 1], 2),
    "braid": lambda: braid_tangle([1, 2, -1], 3),
    "trefoil": lambda: corpus.get("3_1"),
    "hopf": lambda: corpus.get("L2a1"),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_simplify_is_a_strong_deformation_retract(name):
    C = khovanov_complex(CASES[name]())
    R = simplify(C)
    check_retract(R, C)
    assert all(S.circles == 0 for objs in R.small.objects.values() for S in objs)
    assert find_unit(R.small) is None


def test_kink_and_bigon_collapse_to_one_object():
    for name in ("kink", "bigon"):
        small = simplify(khovanov_complex(CASES[name]())).small
        assert sum(len(objs) for objs in small.objects.values()) == 1


@pytest.mark.parametrize("name", ["3_1", "4_1", "L4a1"])
def test_simplified_closed_complex_has_the_same_homology(name):
    C = khovanov_complex(corpus.get(name))
    small = simplify(C).small
    for fld in ("Q", "F2"):
        assert betti(apply_functor(spec_khovanov(), small), fld) == betti(apply_functor(spec_khovanov(), C), fld)


def test_single_steps():
    C = khovanov_complex(kink_tangle(1))
    r, i = next((r, i) for r in C.heights() for i, S in enumerate(C.obj(r)) if S.circles)
    D = deloop(C, r, i)
    check_retract(D, C)
    assert sum(map(len, D.small.objects.values())) == sum(map(len, C.objects.values())) + 1
    u = find_unit(D.small)
    assert u is not None
    G = gauss(D.small, *u)
    check_retract(G, D.small)
    check_retract(D.then(G), C)


def test_deloop_needs_a_circle():
    C = khovanov_complex(kink_tangle(1))
    r, i = next((r, i) for r in C.heights() for i, S in enumerate(C.obj(r)) if not S.circles)
    with pytest.raises(ValueError):
        deloop(C, r, i)
