"""Print Betti grids (b^Q, b^F2, b^3) in the layout of the paper's tables.

    python3 scripts/fig10.py [4_1 10_136 ...] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from khovanov import corpus_diagram, fig10_tables, jones_hat
from khovanov.homology import format_grid, homology_json


@dataclass
class Fig10Config:
    knots: list[str] = field(default_factory=lambda: ["4_1", "10_136"])
    json_out: Path | None = None


def run(cfg: Fig10Config) -> dict:
    out = {}
    for name in cfg.knots:
        T = corpus_diagram(name)
        t0 = time.perf_counter()
        tables = fig10_tables(T)
        dt = time.perf_counter() - t0
        print(f"{name}  ({len(T.crossings)} crossings, {dt:.2f}s)")
        print(format_grid(tables))
        print()
        out[name] = homology_json(name, tables, jones_hat(T))
    if cfg.json_out:
        cfg.json_out.write_text(json.dumps(out, indent=1))
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("knots", nargs="*", default=Fig10Config().knots)
    ap.add_argument("--json", dest="json_out", type=Path)
    a = ap.parse_args()
    run(Fig10Config(a.knots, a.json_out))
