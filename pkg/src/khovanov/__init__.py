"""Khovanov homology of tangles via Bar-Natan's cobordism category."""

from .bracket import khovanov_complex
from .corpus import get as corpus_diagram
from .diagram import TangleDiagram, parse_pd
from .homology import BettiTable, betti, fig10_tables, jones_hat, khovanov_betti

__all__ = [
    "BettiTable",
    "TangleDiagram",
    "betti",
    "corpus_diagram",
    "fig10_tables",
    "jones_hat",
    "khovanov_betti",
    "khovanov_complex",
    "parse_pd",
]
__version__ = "0.1.0"
