"""Run every movie move instance and tabulate the signs and timings.

    python3 scripts/movie_survey.py [--moves 1 2 10] [--fields Q F2]

A sign column lists one entry per instance: the chain homotopy sign for
closed type I and II moves, the sign on all closures for tangle moves.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from khovanov.movie_moves import check_movie_move


@dataclass
class SurveyConfig:
    moves: tuple[int, ...] = tuple(range(1, 16))
    fields: tuple[str, ...] = ("Q", "F2")


def survey(cfg: SurveyConfig) -> bool:
    ok = True
    print(f"{'move':6}{'type':6}{'time':>8}  signs")
    for k in cfg.moves:
        v = check_movie_move(k, cfg.fields)
        ok &= v.passed
        signs = " ".join("?" if s is None else f"{s:+d}" for s in v.signs)
        mark = "" if v.passed else "  FAILED"
        print(f"MM{k:<4}{v.type:6}{v.seconds:7.2f}s  {signs}{mark}")
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--moves", type=int, nargs="+", default=list(SurveyConfig.moves))
    ap.add_argument("--fields", nargs="+", default=list(SurveyConfig.fields))
    a = ap.parse_args()
    raise SystemExit(0 if survey(SurveyConfig(tuple(a.moves), tuple(a.fields))) else 1)
