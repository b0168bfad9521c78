"""Write one instance of every movie move into the bundled movie files.

    python3 scripts/export_movies.py [--out src/khovanov/data]

Type I and II moves give ``mmK.movie``; type III moves give the two sides
``mmK_left.movie`` and ``mmK_right.movie`` (a missing right side is the
identity clip).  Each file is parsed back and compared before it is kept.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from khovanov.diagram import is_isomorphic
from khovanov.movie_moves import movie_move_instances
from khovanov.movies import Movie, parse_movie


@dataclass
class ExportConfig:
    out: Path = Path("src/khovanov/data")
    moves: tuple[int, ...] = tuple(range(1, 16))


def _write(m: Movie, path: Path) -> None:
    text = m.to_text()
    back = parse_movie(text)
    assert [e.kind for e in back.events] == [e.kind for e in m.events]
    assert all(is_isomorphic(a, b) for a, b in zip(back.frames, m.frames))
    path.write_text(text)
    print(f"wrote {path} ({len(m.events)} events)")


def export(cfg: ExportConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    for k in cfg.moves:
        first = movie_move_instances(k)[0]
        if k <= 10:
            first.name = f"MM{k}"
            _write(first, cfg.out / f"mm{k}.movie")
            continue
        left, right = first
        left.name = f"MM{k} left"
        _write(left, cfg.out / f"mm{k}_left.movie")
        if right is not None:
            right.name = f"MM{k} right"
            _write(right, cfg.out / f"mm{k}_right.movie")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=ExportConfig.out)
    p.add_argument("--moves", type=int, nargs="*", default=list(ExportConfig.moves))
    a = p.parse_args()
    export(ExportConfig(a.out, tuple(a.moves)))


if __name__ == "__main__":
    main()
