"""Regenerate the bundled PD corpus from Conway notation and braid words.

    python3 scripts/build_corpus.py [--out src/khovanov/data/corpus.pd]

Every knot is checked against its tabulated determinant and crossing count
before it is written.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from khovanov.builders import (
    braid_closure,
    coloring_determinant,
    is_alternating,
    link_components,
    parse_conway,
    rational,
)
from khovanov.diagram import parse_pd

# name: (construction, determinant)
RATIONAL = {
    "4_1": ([2, 2], 5),
    "5_1": ([5], 5),
    "5_2": ([3, 2], 7),
    "6_1": ([4, 2], 9),
    "6_2": ([3, 1, 2], 11),
    "6_3": ([2, 1, 1, 2], 13),
    "7_1": ([7], 7),
    "7_2": ([5, 2], 11),
    "7_3": ([4, 3], 13),
    "7_4": ([3, 1, 3], 15),
    "7_5": ([3, 2, 2], 17),
    "7_6": ([2, 2, 1, 2], 19),
    "7_7": ([2, 1, 1, 1, 2], 21),
    "8_1": ([6, 2], 13),
    "8_2": ([5, 1, 2], 17),
    "8_3": ([4, 4], 17),
    "8_4": ([4, 1, 3], 19),
    "8_6": ([3, 3, 2], 23),
    "8_7": ([4, 1, 1, 2], 23),
    "8_8": ([2, 3, 1, 2], 25),
    "8_9": ([3, 1, 1, 3], 25),
    "8_11": ([3, 2, 1, 2], 27),
    "8_12": ([2, 2, 2, 2], 29),
    "8_13": ([3, 1, 1, 1, 2], 29),
    "8_14": ([2, 2, 1, 1, 2], 31),
}
MONTESINOS = {
    "8_5": ("3,3,2", 21),
    "8_10": ("3,21,2", 27),
    "8_15": ("21,21,2", 33),
    "8_19": ("3,3,2-", 3),
    "8_20": ("3,21,2-", 9),
    "8_21": ("21,21,2-", 15),
    "10_136": ("22,22,2-", 15),
}
BRAIDS = {
    "8_16": ([1, 1, -2, 1, 1, -2, 1, -2], 35),
    "8_17": ([1, 1, -2, 1, -2, 1, -2, -2], 37),
    "8_18": ([1, -2] * 4, 45),
}
# the KnotTheory tables' trefoil, kept verbatim as an anchor for chirality
TREFOIL = "PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]"


@dataclass
class CorpusConfig:
    out: Path = Path(__file__).resolve().parent.parent / "src" / "khovanov" / "data" / "corpus.pd"
    mirror: set[str] = field(default_factory=set)


def build(cfg: CorpusConfig) -> list[tuple[str, str]]:
    rows: list[tuple[str, object, int | None]] = [("0_1", parse_pd("PD[O[1]]"), 1)]
    rows.append(("3_1", parse_pd(TREFOIL), 3))
    rows += [(k, rational(seq).numerator(), det) for k, (seq, det) in RATIONAL.items()]
    rows += [(k, parse_conway(w), det) for k, (w, det) in MONTESINOS.items()]
    rows += [(k, braid_closure(w), det) for k, (w, det) in BRAIDS.items()]
    rows += [
        ("L0a1", parse_pd("PD[O[2]]"), None),
        ("L0a2", parse_pd("PD[O[3]]"), None),
        ("L2a1", rational([2]).numerator(), 2),
        ("L4a1", rational([4]).numerator(), 4),
        ("L5a1", rational([2, 1, 2]).numerator(), 8),
        ("L6a4", braid_closure([1, -2] * 3), 16),
    ]
    out = []
    for name, T, det in rows:
        if name in cfg.mirror:
            T = T.mirror()
        if det is not None and coloring_determinant(T) != det:
            raise SystemExit(f"{name}: determinant {coloring_determinant(T)} != {det}")
        if name[0].isdigit():
            n = int(name.split("_")[0])
            if T.n != n or link_components(T) != 1:
                raise SystemExit(f"{name}: bad diagram")
        note = f"alternating={is_alternating(T)} components={link_components(T)}"
        out.append((name, T.to_pd(), note))
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=CorpusConfig.out)
    ap.add_argument("--mirror", nargs="*", default=[])
    args = ap.parse_args(argv)
    cfg = CorpusConfig(out=args.out, mirror=set(args.mirror))
    lines = ["# name  PD code  (generated by scripts/build_corpus.py)"]
    for name, pd, note in build(cfg):
        lines.append(f"# {note}")
        lines.append(f"{name} {pd}")
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) // 2} diagrams to {cfg.out}")


if __name__ == "__main__":
    main()
