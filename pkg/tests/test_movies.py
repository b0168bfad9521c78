import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khovanov.bracket import ChainMap, khovanov_complex
from khovanov.builders import braid_closure
from khovanov.cob3 import degree, reduce
from khovanov.diagram import EMPTY, LOOP, kink_tangle
from khovanov.movie_moves import (
    check_movie_move,
    movie_move_instances,
    there_and_back,
    two_knot_scalar,
)
from khovanov.movies import (
    EVENT_DEGREE,
    KINDS,
    Movie,
    MovieError,
    MovieEvent,
    candidate_sites,
    check_homotopic_to_pm_identity,
    closing_map,
    cup_site,
    evaluate_movie,
    event_map,
    find_event,
    induced_homology_map,
    map_degrees,
    parse_movie,
    r1_maps,
)

TREFOIL = braid_closure([1, 1, 1])
HOPF = braid_closure([1, 1])

# observed signs; the theory fixes them only up to the choices made for each R-move map
SIGNS = {
    1: [1, 1, 1, 1], 2: [1, 1], 3: [1, 1], 4: [-1, 1], 5: [1, 1],
    6: [1], 7: [1], 8: [-1], 9: [1], 10: [1],
    11: [1, 1, 1, 1], 12: [-1, 1, 1, 1], 13: [-1, 1, 1, -1], 14: [1] * 8, 15: [-1, 1],
}  # fmt: skip


def test_event_validation():
    with pytest.raises(MovieError):
        MovieEvent("R4", cup_site())
    with pytest.raises(MovieError):
        MovieEvent("Cap", cup_site())


@pytest.mark.parametrize("kind", ["R1+", "R2+", "R3", "Saddle", "Cup"])
def test_event_maps_are_chain_maps_of_the_right_degree(kind):
    start = {"R3": braid_closure([1, 2, 1], 3), "Saddle": HOPF, "Cup": TREFOIL}.get(kind, TREFOIL)
    sites = candidate_sites(start, kind)
    assert sites
    for site in sites[:3]:
        res = event_map(MovieEvent(kind, site), start)
        assert res.map.is_chain_map()
        assert map_degrees(res.map) <= {EVENT_DEGREE[kind]}


def test_inverse_events_have_the_right_degree():
    for kind, start in (("R1-", kink_tangle(0)), ("Cap", LOOP)):
        for site in candidate_sites(start, kind):
            res = event_map(MovieEvent(kind, site), start)
            assert res.map.is_chain_map()
            assert map_degrees(res.map) <= {EVENT_DEGREE[kind]}


@pytest.mark.parametrize("variant", [0, 1, 2, 3])
def test_r1_local_maps(variant):
    _, _, F, G = r1_maps(kink_tangle(variant))
    assert F.is_chain_map() and G.is_chain_map()
    assert (G.compose(F) - ChainMap.identity(F.source)).is_zero()
    assert map_degrees(F) <= {0} and map_degrees(G) <= {0}


def test_saddle_between_crossingless_frames_is_one_generator():
    two = braid_closure([], 2)  # two unlinked circles
    e = find_event(two, LOOP, "Saddle")
    f = event_map(e, two).map
    entries = [c for M in f.maps.values() for c in M.values()]
    assert len(entries) == 1
    # the reduced pants is a sum of dotted pieces, all of degree -1
    assert {degree(g) for g in reduce(entries[0]).generators()} == {-1}


def test_identity_movie():
    m = Movie([TREFOIL])
    f = evaluate_movie(m)
    assert (f - ChainMap.identity(f.source)).is_zero()
    H = induced_homology_map(f)
    assert H.is_pm_identity() == 1
    assert all(M == [[int(i == j) for j in range(len(M))] for i in range(len(M))] for M in H.blocks.values())


def test_sign_solver_controls():
    I = ChainMap.identity(khovanov_complex(TREFOIL))
    for fld in ("Q", "F2"):
        assert check_homotopic_to_pm_identity(I, fld) == 1
        assert check_homotopic_to_pm_identity(I.scale(0), fld) is None
    assert check_homotopic_to_pm_identity(-I, "Q") == -1
    assert check_homotopic_to_pm_identity(I.scale(2), "Q") is None


@pytest.mark.parametrize("kind,start", [("R1+", TREFOIL), ("R2+", HOPF), ("R3", braid_closure([1, 2, 1], 3))])
def test_round_trips_are_plus_identity(kind, start):
    for m in there_and_back(start, kind)[:4]:
        g = closing_map(m)
        for fld in ("Q", "F2"):
            assert check_homotopic_to_pm_identity(g, fld) == 1
            assert induced_homology_map(g, fld).is_pm_identity() == 1


def test_movie_text_round_trip():
    m = movie_move_instances(8)[0]
    back = parse_movie(m.to_text())
    assert [e.kind for e in back.events] == [e.kind for e in m.events]
    assert back.degree == m.degree == 0


def test_movie_events_found_by_search():
    text = "PD[]\n-- Cup\nPD[O[1]]\n-- Cap\nPD[]\n"
    m = parse_movie(text)
    assert [e.kind for e in m.events] == ["Cup", "Cap"]
    assert m.degree == 2


@pytest.mark.parametrize(
    "text",
    ["", "PD[]\nPD[O[1]]\n", "PD[]\n-- Cup\n", "-- Cup\nPD[]\n", "PD[]\n-- Cup @ {bad\nPD[O[1]]\n", "PD[]\n-- Cap\nPD[O[1]]\n"],
)
def test_bad_movies(text):
    with pytest.raises(MovieError):
        parse_movie(text)


def test_reversed_movie():
    m = movie_move_instances(12)[0][0]
    r = m.reversed()
    assert [e.kind for e in r.events] == ["R1-", "Cap"]
    assert r.frames[0] == m.frames[-1]


def test_sphere_movie_scalar_is_recorded():
    # empty -> circle -> empty: the sphere relation makes the scalar 0
    for fld in ("Q", "F2"):
        assert two_knot_scalar(fld) == {(0, 0): [[0]]}


@st.composite
def random_movies(draw, start=TREFOIL, length=3):
    events, T = [], start
    for _ in range(draw(st.integers(1, length))):
        kind = draw(st.sampled_from([k for k in KINDS if k != "Cap"]))
        sites = candidate_sites(T, kind)
        if not sites:
            continue
        e = MovieEvent(kind, draw(st.sampled_from(sites)))
        events.append(e)
        T = Movie.from_events(T, [e]).frames[-1]
        if T.n > 6:
            break
    return Movie.from_events(start, events)


@settings(max_examples=12)
@given(random_movies())
def test_movie_degree_is_sum_of_event_degrees(m):
    f = evaluate_movie(m)
    assert f.is_chain_map()
    assert map_degrees(f) <= {m.degree}


@pytest.mark.parametrize("number", range(1, 16))
def test_movie_move(number):
    v = check_movie_move(number)
    assert v.passed, v.to_json()
    assert v.signs == SIGNS[number]
    assert all(i.degree_ok for i in v.instances)


def test_empty_frame_constant():
    assert EMPTY.n == 0 and not EMPTY.boundary
