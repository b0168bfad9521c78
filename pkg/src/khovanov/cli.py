"""Command-line front end: ``python -m khovanov <command> ...``.

Exit codes: 0 on success or a passing check, 1 on a failing check, 2 on bad
usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import suites
from .algebra import format_laurent, get_ring
from .bracket import khovanov_complex, match_complexes
from .corpus import resolve_input
from .diagram import DiagramError, compose_tangles, is_isomorphic
from .homology import (
    betti,
    betti_b3,
    fig10_tables,
    format_grid,
    graded_euler,
    homology_json,
    jones_hat,
    jones_skein,
    standard_jones,
    total_homology_dim,
)
from .tqft import apply_functor, get_spec, spec_f3

FUNCTORS = ("khovanov", "lee", "f3", "fc")
RINGS = ("Q", "F2", "b3")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# JSON printed by ``homology --json``: tables map a field name to [r, j, rank] triples
HOMOLOGY_SCHEMA = {
    "type": "object",
    "required": ["knot", "tables", "jones_hat"],
    "properties": {
        "knot": {"type": "string"},
        "tables": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3},
            },
        },
        "jones_hat": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
    },
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    functor: str = "khovanov"
    ring: str = "Q"
    output: str = "table"
    threads: int = 1
    verbosity: int = 0
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.functor not in FUNCTORS:
            raise UsageError(f"unknown functor {self.functor!r}")
        if self.ring not in RINGS:
            raise UsageError(f"unknown ring {self.ring!r}; choose from {', '.join(RINGS)}")
        if self.ring == "b3" and self.functor != "khovanov":
            raise UsageError("b3 is the F2 theory of the Khovanov functor only")
        if self.functor == "lee" and self.ring != "Q":
            raise UsageError("Lee homology is computed over Q")
        if self.functor == "f3" and self.ring != "F2":
            raise UsageError("the F3 theory lives in characteristic 2; use --ring F2")
        if self.functor == "fc":
            raise UsageError("the c-deformed functor does not respect the sphere relation; no homology is reported")
        if self.threads < 1:
            raise UsageError("--threads must be positive")

    @property
    def as_json(self) -> bool:
        return self.output == "json"


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    print(json.dumps(payload, sort_keys=True) if cfg.as_json else text)


def _diagram(spec: str):
    try:
        return resolve_input(spec)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_homology(cfg: RunConfig) -> int:
    T = _diagram(cfg.inputs[0])
    if T.boundary:
        raise UsageError("homology needs a closed diagram")
    name = cfg.inputs[0]
    if cfg.functor == "khovanov":
        if cfg.options.get("all"):
            tables = fig10_tables(T)
        elif cfg.ring == "b3":
            tables = {"b3": betti_b3(T)}
        else:
            K = khovanov_complex(T)
            tables = {cfg.ring: betti(apply_functor(get_spec("khovanov"), K), cfg.ring)}
        payload = homology_json(name, tables, jones_hat(T))
        _emit(cfg, payload, format_grid(tables))
        return EXIT_OK
    spec = get_spec("lee") if cfg.functor == "lee" else spec_f3(1)
    from .bracket import build_cube

    dim = total_homology_dim(apply_functor(spec, build_cube(T)), cfg.ring)
    _emit(cfg, {"knot": name, "functor": cfg.functor, "ring": cfg.ring, "dimension": dim}, f"{cfg.functor} homology of {name}: total dimension {dim} over {cfg.ring}")
    return EXIT_OK


def cmd_jones(cfg: RunConfig) -> int:
    T = _diagram(cfg.inputs[0])
    if T.boundary:
        sk = jones_skein(T)
        _emit(cfg, {"skein": sk.to_json()}, str(sk))
        return EXIT_OK
    jh = jones_hat(T)
    j = standard_jones(jh)
    payload = {"jones_hat": format_laurent(jh), "jones": format_laurent(j, "t") if j is not None else None}
    text = f"J-hat(q) = {format_laurent(jh)}"
    if j is not None:
        text += f"\nJ(t)     = {format_laurent(j, 't')}"
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_skein(cfg: RunConfig) -> int:
    """The state sum next to the Euler characteristic of the complex."""
    from .homology import skein_class

    T = _diagram(cfg.inputs[0])
    sk = jones_skein(T)
    chi = skein_class(khovanov_complex(T))
    ok = chi == sk
    _emit(
        cfg,
        {"skein": sk.to_json(), "euler": chi.to_json(), "agree": ok},
        f"state sum : {sk}\neuler char: {chi}\n{'agree' if ok else 'DISAGREE'}",
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compose(cfg: RunConfig) -> int:
    """Cut a diagram into its crossings and glue them back through its arc diagram."""
    T = _diagram(cfg.inputs[0])
    U = compose_tangles(T.arc_diagram(), T.crossing_tangles())
    C, K = suites.planar_complex(T), khovanov_complex(T)
    same_diagram = is_isomorphic(U, T)
    same_complex = match_complexes(C, K) is not None
    ok = same_diagram and same_complex
    if not T.boundary:
        ok = ok and graded_euler(C) == graded_euler(K)
    payload = {
        "input": cfg.inputs[0],
        "holes": len(T.crossings),
        "diagram_isomorphic": same_diagram,
        "complex_matches": same_complex,
        "composed_pd": U.to_pd(),
    }
    text = f"{len(T.crossings)} holes; diagram isomorphic: {same_diagram}; complex matches: {same_complex}\n{U.to_pd()}"
    _emit(cfg, payload, text)
    return EXIT_OK if ok else EXIT_FAIL


def _load_movie(spec: str):
    from .movies import MovieError, parse_movie

    p = Path(spec)
    if p.exists():
        text = p.read_text()
    else:
        bundled = resources.files("khovanov").joinpath(f"data/{spec}.movie")
        if not bundled.is_file():
            raise UsageError(f"{spec!r} is neither a movie file nor a bundled movie")
        text = bundled.read_text()
    try:
        return parse_movie(text)
    except (MovieError, DiagramError) as e:
        raise UsageError(str(e)) from None


def cmd_movie(cfg: RunConfig) -> int:
    from .movie_moves import check_identity_tangle_clip, compare_clips, returns_home
    from .movies import (
        check_homotopic_to_pm_identity,
        closing_map,
        evaluate_movie,
        induced_homology_map,
        map_degrees,
    )

    m = _load_movie(cfg.inputs[0])
    fields = ("Q", "F2") if cfg.ring == "Q" else (cfg.ring,)
    payload: dict = {"movie": m.name or cfg.inputs[0], "events": [e.kind for e in m.events], "degree": m.degree}
    lines = [f"movie {payload['movie']}: {len(m.events)} events, expected degree {m.degree}"]
    if cfg.options.get("against"):
        other = _load_movie(cfg.options["against"])
        res = compare_clips(m, other, "compare", fields)
        payload["verdict"] = res.exact_sign if res.exact_sign is not None else next(iter(res.homology_signs.values()), None)
        payload["homology_signs"] = res.homology_signs
        payload["passed"] = res.passed
        lines.append(f"equal up to sign on homology: {res.homology_signs}; verdict {_fmt(payload['verdict'])}")
        _emit(cfg, payload, "\n".join(lines))
        return EXIT_OK if res.passed else EXIT_FAIL
    f = evaluate_movie(m)
    degs = sorted(map_degrees(f))
    payload["map_degrees"] = degs
    lines.append(f"map degrees: {degs}")
    home = returns_home(m.frames[-1], m.frames[0])
    if home and m.frames[0].boundary:
        res = check_identity_tangle_clip(m, "movie", True, fields)
        payload.update(chain_verdicts={"Q": res.chain_sign}, homology_verdicts=res.homology_signs, verdict=res.chain_sign)
        lines.append(f"on every closure: chain level {_fmt(res.chain_sign)}, homology {res.homology_signs}")
        _emit(cfg, payload, "\n".join(lines))
        return EXIT_OK if res.passed else EXIT_FAIL
    if not home:
        if not m.frames[0].boundary and not m.frames[-1].boundary:
            for fld in fields:
                H = induced_homology_map(f, fld)
                payload[f"rank_{fld}"] = H.rank()
                lines.append(f"rank of the induced map over {fld}: {payload[f'rank_{fld}']}")
        payload["verdict"] = None
        lines.append("verdict: none (the movie does not return to its first frame; use --against)")
        _emit(cfg, payload, "\n".join(lines))
        return EXIT_OK
    g = closing_map(m)
    verdicts = {fld: check_homotopic_to_pm_identity(g, fld) for fld in fields}
    hom = {fld: induced_homology_map(g, fld).is_pm_identity() for fld in fields}
    payload.update(chain_verdicts=verdicts, homology_verdicts=hom, verdict=verdicts[fields[0]])
    for fld in fields:
        lines.append(f"{fld}: chain level {_fmt(verdicts[fld])}, homology {_fmt(hom[fld])}")
    _emit(cfg, payload, "\n".join(lines))
    return EXIT_OK if all(v is not None for v in verdicts.values()) else EXIT_FAIL


def _fmt(s) -> str:
    return "none" if s is None else f"{s:+d}"


def cmd_check(cfg: RunConfig) -> int:
    suite = cfg.inputs[0]
    if suite not in suites.SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(suites.SUITES)}")
    kw = {}
    if suite == "movies" and cfg.options.get("mm"):
        kw["numbers"] = cfg.options["mm"]
    if suite in ("relations", "degrees", "invariance") and cfg.options.get("seed") is not None:
        kw["seed"] = cfg.options["seed"]
    rep = suites.SUITES[suite](**kw)
    text = f"{suite}: {'PASS' if rep.passed else 'FAIL'} ({rep.checked} checks, {rep.seconds:.2f} s)"
    if suite == "movies":
        for k, v in rep.details.items():
            text += f"\n  {k}: {'pass' if v['passed'] else 'FAIL'} signs {v['signs']}"
    for f in rep.failures[:20]:
        text += f"\n  failure: {json.dumps(f, sort_keys=True, default=str)}"
    _emit(cfg, rep.to_json(), text)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_dump(cfg: RunConfig) -> int:
    T = _diagram(cfg.inputs[0])
    what = cfg.options.get("what", "diagram")
    if what == "diagram":
        payload = {
            "pd": T.to_pd(),
            "crossings": [list(x) for x in T.crossings],
            "signs": list(T.signs),
            "boundary": list(T.boundary),
            "loops": T.loops,
            "n_plus": T.n_plus,
            "n_minus": T.n_minus,
        }
    elif what == "complex":
        payload = khovanov_complex(T).to_json()
    else:
        ring = get_ring(cfg.ring if cfg.ring != "b3" else "F2")
        payload = apply_functor(get_spec("khovanov", ring), khovanov_complex(T)).to_json()
    print(json.dumps(payload, sort_keys=True, indent=None if cfg.as_json else 1))
    return EXIT_OK


COMMANDS = {
    "homology": cmd_homology,
    "jones": cmd_jones,
    "skein": cmd_skein,
    "compose": cmd_compose,
    "movie": cmd_movie,
    "check": cmd_check,
    "dump": cmd_dump,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--functor", choices=FUNCTORS, default="khovanov")
    common.add_argument("--ring", default="Q", help="Q, F2, or b3 (F2 ranks of the degree truncations)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; computation is serial")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="khovanov", description="Khovanov homology of tangles and links")
    sub = p.add_subparsers(dest="command", required=True)
    h = sub.add_parser("homology", parents=[common], help="Betti tables of a closed diagram")
    h.add_argument("input", help="corpus name, PD literal or file")
    h.add_argument("--all", action="store_true", help="Q, F2 and b3 tables in one grid")
    for name, helptext in (("jones", "Jones polynomial or skein element"), ("skein", "state sum against the Euler characteristic"), ("compose", "decompose into crossings and recompose")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input")
    m = sub.add_parser("movie", parents=[common], help="evaluate a movie file")
    m.add_argument("input", help="path to a .movie file or a bundled movie name")
    m.add_argument("--against", help="second movie with the same ends, compared up to sign")
    c = sub.add_parser("check", parents=[common], help="run a property suite")
    c.add_argument("suite", choices=sorted(suites.SUITES))
    c.add_argument("--mm", type=int, action="append", help="movie move number (repeatable)")
    c.add_argument("--seed", type=int)
    d = sub.add_parser("dump", parents=[common], help="print a diagram or complex as JSON")
    d.add_argument("input")
    d.add_argument("--what", choices=("diagram", "complex", "algebraic"), default="diagram")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    inputs = [ns.suite] if ns.command == "check" else [ns.input]
    opts = {k: getattr(ns, k) for k in ("all", "against", "mm", "seed", "what") if hasattr(ns, k)}
    return RunConfig(
        command=ns.command,
        inputs=inputs,
        functor=ns.functor,
        ring=ns.ring,
        output="json" if ns.json else "table",
        threads=ns.threads,
        verbosity=ns.verbose,
        options=opts,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    cfg = config_from_args(ns)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(message)s")
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DiagramError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
