"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from khovanov.cob3 import CobGenerator, Cobordism, Smoothing, boundary_curves
from khovanov.planar import noncrossing_matchings


@st.composite
def smoothings(draw, points=None, max_circles=2):
    if points is None:
        points = draw(st.sampled_from([0, 2, 4]))
    arcs = draw(st.sampled_from(noncrossing_matchings(points)))
    return Smoothing(arcs, draw(st.integers(0, max_circles)))


@st.composite
def generators_between(draw, source, target, max_comps=4, max_genus=3, max_dots=3):
    curves = list(boundary_curves(source, target))
    k = draw(st.integers(1, max_comps))
    labels = [draw(st.integers(0, k - 1)) for _ in curves]
    comps = []
    for i in range(k):
        cv = tuple(c for c, lab in zip(curves, labels) if lab == i)
        if not cv and curves and draw(st.booleans()):
            continue
        comps.append((cv, draw(st.integers(0, max_genus)), draw(st.integers(0, max_dots))))
    return CobGenerator(source, target, tuple(comps)).components


@st.composite
def cobordisms(draw, source=None, target=None, max_terms=3, **kw):
    if source is None:
        source = draw(smoothings())
    if target is None:
        target = draw(smoothings(points=source.size))
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        g = draw(generators_between(source, target, **kw))
        terms[g] = terms.get(g, 0) + draw(st.integers(-3, 3))
    return Cobordism(source, target, terms)


@st.composite
def homogeneous_generator(draw, source=None, target=None, **kw):
    """A single generator wrapped as a cobordism (always homogeneous)."""
    if source is None:
        source = draw(smoothings())
    if target is None:
        target = draw(smoothings(points=source.size))
    g = draw(generators_between(source, target, **kw))
    return Cobordism(source, target, {g: 1})
