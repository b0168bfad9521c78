import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from khovanov import corpus
from khovanov.algebra import Laurent
from khovanov.bracket import khovanov_complex
from khovanov.builders import braid_tangle, is_alternating, link_components
from khovanov.homology import (
    BettiTable,
    betti,
    fig10_tables,
    format_grid,
    graded_euler,
    jones_hat,
    jones_skein,
    khovanov_betti,
    knight_moves,
    lee_dimension,
    skein_class,
    standard_jones,
)
from khovanov.linalg import (
    TrackedEliminator,
    in_span,
    kernel_basis,
    rank_f2,
    rank_q,
    smith_diagonal,
)
from khovanov.tqft import apply_functor, spec_khovanov

# tabulated Jones polynomials of amphichiral knots, so chirality cannot matter
JONES = {
    "4_1": {2: 1, 1: -1, 0: 1, -1: -1, -2: 1},
    "6_3": {3: -1, 2: 2, 1: -2, 0: 3, -1: -2, -2: 2, -3: -1},
    "8_3": {4: 1, 3: -1, 2: 2, 1: -3, 0: 3, -1: -3, -2: 2, -3: -1, -4: 1},
    "8_9": {4: 1, 3: -2, 2: 3, 1: -4, 0: 5, -1: -4, -2: 3, -3: -2, -4: 1},
    "8_17": {4: 1, 3: -3, 2: 5, 1: -6, 0: 7, -1: -6, -2: 5, -3: -3, -4: 1},
}


def test_unknot():
    t = khovanov_betti(corpus.get("0_1"))
    assert t.entries == {(0, 1): 1, (0, -1): 1}


def test_left_trefoil_rational_and_mod_two():
    T = corpus.get("3_1")
    assert khovanov_betti(T, "Q").entries == {(0, -1): 1, (0, -3): 1, (-2, -5): 1, (-3, -9): 1}
    # the Z/2 torsion in bidegree (-2,-7) adds a pair of F2 classes (universal coefficients)
    assert khovanov_betti(T, "F2").entries == {
        (0, -1): 1, (0, -3): 1, (-2, -5): 1, (-2, -7): 1, (-3, -7): 1, (-3, -9): 1,
    }  # fmt: skip


def test_hopf_link():
    t = khovanov_betti(corpus.get("L2a1"))
    assert t.total() == 4
    assert {r for r, _ in t.support()} in ({0, 2}, {0, -2})


@pytest.mark.parametrize("name", sorted(JONES))
def test_jones_of_amphichiral_knots(name):
    assert standard_jones(jones_hat(corpus.get(name))) == Laurent(JONES[name])


def test_jones_hat_normalization():
    assert jones_hat(corpus.get("0_1")) == Laurent({1: 1, -1: 1})
    assert jones_hat(corpus.get("4_1")) == Laurent({5: 1, -5: 1})


@pytest.mark.parametrize("name", ["3_1", "5_2", "7_4", "8_19", "L4a1"])
def test_euler_characteristic_of_homology_is_jones(name):
    T = corpus.get(name)
    for fld in ("Q", "F2"):
        t = khovanov_betti(T, fld)
        chi = Laurent({})
        for (r, j), b in t.entries.items():
            chi = chi + Laurent({j: (-1) ** r * b})
        assert chi == jones_hat(T)
    assert graded_euler(khovanov_complex(T)) == jones_hat(T)


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_1", "6_2", "L2a1"])
def test_mirror_flips_bidegrees(name):
    T = corpus.get(name)
    a, b = khovanov_betti(T), khovanov_betti(T.mirror())
    assert b.entries == {(-r, -j): v for (r, j), v in a.entries.items()}


@pytest.mark.parametrize("name", sorted(k for k, T in corpus.knots(7).items() if is_alternating(T) and T.n))
def test_alternating_knots_are_thin(name):
    t = khovanov_betti(corpus.get(name))
    diag = {j - 2 * r for r, j in t.support()}
    assert len(diag) == 2 and max(diag) - min(diag) == 2
    # after one pair in homological degree 0 the rest peels off in knight moves
    left = dict(t.entries)
    zero = sorted(j for r, j in left if r == 0)
    pair = next((j, j + 2) for j in zero if left.get((0, j + 2)))
    for j in pair:
        left[(0, j)] -= 1
    for r, j in sorted(left):
        c = left[(r, j)]
        if c:
            assert left.get((r + 1, j + 4), 0) >= c, (r, j)
            left[(r + 1, j + 4)] -= c
            left[(r, j)] = 0
    assert not any(left.values())
    assert knight_moves(t)


def test_f2_dominates_q():
    for name in ("3_1", "5_2", "8_19"):
        T = corpus.get(name)
        q, f = khovanov_betti(T, "Q"), khovanov_betti(T, "F2")
        assert all(f[k] >= q[k] for k in q.support())
        assert f.total() > q.total()


def test_fig10_grid_text():
    tables = fig10_tables(corpus.get("4_1"))
    text = format_grid(tables)
    assert text.splitlines()[0].split("|")[0].strip() == "j\\r"
    assert "1,1,1" in text


def test_lee_dimension_counts_components():
    for name in ("0_1", "3_1", "L2a1", "L0a2"):
        T = corpus.get(name)
        assert lee_dimension(T) == 2 ** link_components(T)


def test_skein_of_tangles():
    T = braid_tangle([1], 2)
    sk = jones_skein(T)
    assert len(sk.terms) == 2
    assert skein_class(khovanov_complex(T)) == sk


def test_closed_only_errors():
    T = braid_tangle([1], 2)
    with pytest.raises(ValueError):
        jones_hat(T)
    with pytest.raises(ValueError):
        lee_dimension(T)
    A = apply_functor(spec_khovanov(), khovanov_complex(corpus.get("3_1")))
    with pytest.raises(ValueError):
        betti(A, "Z")


def test_betti_table_equality_ignores_zeros():
    assert BettiTable({(0, 1): 1, (1, 3): 0}) == BettiTable({(0, 1): 1})


# --- exact linear algebra against sympy -------------------------------------------

matrices = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 6).flatmap(lambda m: st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m), min_size=n, max_size=n))
)


def _columns(rows):
    return [{i: rows[i][j] for i in range(len(rows)) if rows[i][j]} for j in range(len(rows[0]))]


@given(matrices)
def test_rank_q_matches_sympy(rows):
    assert rank_q(_columns(rows)) == sympy.Matrix(rows).rank()


@given(matrices)
def test_rank_f2_matches_sympy(rows):
    M = sympy.Matrix(rows).applyfunc(lambda x: x % 2)
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix

    expected = DomainMatrix.from_Matrix(M).convert_to(GF(2)).rank()
    assert rank_f2(_columns(rows)) == expected


@given(matrices)
def test_smith_matches_sympy(rows):
    from sympy.matrices.normalforms import smith_normal_form

    S = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    expected = sorted(abs(S[i, i]) for i in range(min(S.shape)) if S[i, i])
    assert sorted(smith_diagonal(rows)) == expected


@given(matrices, st.sampled_from([0, 2]))
def test_kernel_basis_is_kernel(rows, p):
    cols = dict(enumerate(_columns(rows)))
    ker = kernel_basis(cols, list(cols), p)
    for v in ker:
        acc = {}
        for c, x in v.items():
            for r, y in cols[c].items():
                acc[r] = acc.get(r, 0) + x * y
        assert all((a % p if p else a) == 0 for a in acc.values())
    rank = rank_q(cols.values()) if p == 0 else rank_f2(cols.values())
    assert len(ker) == len(cols) - rank


def test_tracked_express_and_span():
    E = TrackedEliminator(0)
    E.add({0: 1, 1: 1}, "a")
    E.add({1: 1}, "b")
    assert E.express({0: 2, 1: 5}) == {"a": 2, "b": 3}
    assert not in_span([{0: 1}], {1: 1})
    rng = random.Random(1)
    vecs = [{i: rng.randint(-2, 2) for i in range(3)} for _ in range(2)]
    target = {i: vecs[0].get(i, 0) - 3 * vecs[1].get(i, 0) for i in range(3)}
    assert in_span(vecs, target)
