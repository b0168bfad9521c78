"""The bundled PD corpus: prime knots through 8 crossings, 10_136 and a few links."""

from __future__ import annotations

from functools import cache
from importlib import resources

from .diagram import TangleDiagram, parse_pd


@cache
def load_corpus() -> dict[str, TangleDiagram]:
    text = resources.files("khovanov").joinpath("data/corpus.pd").read_text()
    out: dict[str, TangleDiagram] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, pd = line.split(None, 1)
        out[name] = parse_pd(pd)
    return out


def get(name: str) -> TangleDiagram:
    """Look up a corpus diagram; ``4_1`` and ``4.1`` are both accepted."""
    corpus = load_corpus()
    key = name.replace(".", "_")
    if key not in corpus:
        raise KeyError(f"{name!r} is not in the corpus")
    return corpus[key]


def knots(max_crossings: int | None = None) -> dict[str, TangleDiagram]:
    return {
        k: T
        for k, T in load_corpus().items()
        if k[0].isdigit() and (max_crossings is None or T.n <= max_crossings)
    }


def links() -> dict[str, TangleDiagram]:
    return {k: T for k, T in load_corpus().items() if k.startswith("L")}


def resolve_input(spec: str) -> TangleDiagram:
    """A corpus name, a PD literal, or a path to a file holding one PD code."""
    spec = spec.strip()
    if spec.startswith("PD["):
        return parse_pd(spec)
    try:
        return get(spec)
    except KeyError:
        pass
    from pathlib import Path

    p = Path(spec)
    if p.exists():
        return parse_pd(p.read_text())
    raise KeyError(f"{spec!r} is neither a corpus name, a PD code nor a file")
