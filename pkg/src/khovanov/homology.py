"""Betti tables, the filtered b3 numbers, Euler characteristics and the Jones polynomial."""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field

from .algebra import CIRCLE, Laurent, format_laurent
from .bracket import FormalComplex, build_cube, khovanov_complex
from .diagram import TangleDiagram
from .linalg import F2Eliminator, _as_bits, rank
from .planar import DisjointSet
from .tqft import AlgebraicComplex, apply_functor, spec_f3, spec_khovanov, spec_lee

FIELDS = ("Q", "F2")


@dataclass
class BettiTable:
    entries: dict[tuple[int, int], int] = field(default_factory=dict)
    field: str = "Q"

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def support(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.entries.items() if v)

    def total(self) -> int:
        return sum(self.entries.values())

    def as_list(self) -> list[list[int]]:
        return [[r, j, b] for (r, j), b in sorted(self.entries.items()) if b]

    def poincare(self) -> dict[int, Laurent]:
        """Height -> q-graded dimension."""
        out: dict[int, dict[int, int]] = defaultdict(dict)
        for (r, j), b in self.entries.items():
            if b:
                out[r][j] = b
        return {r: Laurent(v) for r, v in sorted(out.items())}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.support() == other.support() and all(self[k] == other[k] for k in self.support())


def _blocks(A: AlgebraicComplex, r: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = defaultdict(list)
    for idx, q in enumerate(A.degrees.get(r, ())):
        out[q].append(idx)
    return out


def _coerce_field(A: AlgebraicComplex, fld: str) -> None:
    if fld not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}, got {fld!r}")
    if A.ring.characteristic == 2 and fld == "Q":
        raise ValueError("a characteristic-2 complex has no rational homology")
    if getattr(A.ring, "base", None) is not None:
        raise ValueError("specialize polynomial coefficients before computing Betti numbers")


def betti(A: AlgebraicComplex, fld: str = "Q") -> BettiTable:
    """Dimensions of homology per (height, q-degree) over Q or F2."""
    _coerce_field(A, fld)
    if not A.graded:
        raise ValueError("betti needs a graded complex; use total_homology_dim for filtered ones")
    ranks: dict[tuple[int, int], int] = {}
    for r in A.heights():
        M = A.d(r)
        for q, cols in _blocks(A, r).items():
            colvecs = [M.get(c, {}) for c in cols]
            for c in colvecs:
                for row in c:
                    if A.degrees[r + 1][row] != q:
                        raise ValueError("differential is not homogeneous of degree 0")
            ranks[(r, q)] = rank(colvecs, fld)
    out = {}
    for r in A.heights():
        for q, cols in _blocks(A, r).items():
            b = len(cols) - ranks.get((r, q), 0) - ranks.get((r - 1, q), 0)
            if b:
                out[(r, q)] = b
    return BettiTable(out, fld)


def total_homology_dim(A: AlgebraicComplex, fld: str = "Q") -> int:
    _coerce_field(A, fld)
    total = 0
    for r in A.heights():
        M = A.d(r)
        rk = rank([M.get(c, {}) for c in range(A.dim(r))], fld)
        total += A.dim(r) - 2 * rk
    return total


def khovanov_betti(T: TangleDiagram, fld: str = "Q") -> BettiTable:
    return betti(apply_functor(spec_khovanov(), khovanov_complex(T)), fld)


# ---------------------------------------------------------------------------
# the filtered theory with H = 1


def _truncation_ranks(A: AlgebraicComplex, r: int) -> list[tuple[int, int]]:
    """``(j, rank of d^r on degrees >= j)`` for each degree j where the rank changes."""
    M = A.d(r)
    order = sorted(range(A.dim(r)), key=lambda c: -A.degrees[r][c])
    E = F2Eliminator()
    out = []
    for c in order:
        E.add(_as_bits(M.get(c, {})))
        out.append((A.degrees[r][c], E.rank))
    return out


def betti_b3(C: FormalComplex | TangleDiagram, j_range: tuple[int, int] | None = None) -> BettiTable:
    """``b3[r, j] = dim_F2 H^r`` of the subcomplex spanned by chains of degree >= j.

    Degrees are reported for ``j`` of the complex's parity from the top degree
    down to two below the bottom one (that last row is the whole complex)."""
    if isinstance(C, TangleDiagram):
        C = khovanov_complex(C)
    A = apply_functor(spec_f3(1), C)
    for r, M in A.diffs.items():
        for col, rows in M.items():
            if any(A.degrees[r + 1][row] < A.degrees[r][col] for row in rows):
                raise AssertionError("H=1 differential lowers degree; truncations are not subcomplexes")
    qs = A.qdegrees()
    if not qs:
        return BettiTable({}, "b3")
    if j_range is None:
        j_range = (qs[0] - 2, qs[-1])
    lo, hi = j_range
    parity = qs[0] % 2
    js = [j for j in range(lo, hi + 1) if j % 2 == parity]
    rank_at: dict[int, list[tuple[int, int]]] = {r: _truncation_ranks(A, r) for r in A.heights()}

    def rk(r: int, j: int) -> int:
        best = 0
        for deg, k in rank_at.get(r, ()):
            if deg >= j:
                best = k
            else:
                break
        return best

    out = {}
    for r in A.heights():
        for j in js:
            dim = sum(1 for q in A.degrees[r] if q >= j)
            b = dim - rk(r, j) - rk(r - 1, j)
            if b:
                out[(r, j)] = b
    return BettiTable(out, "b3")


# ---------------------------------------------------------------------------
# Euler characteristic, skein oracle


def graded_euler(C: AlgebraicComplex | FormalComplex) -> Laurent:
    acc: dict[int, int] = defaultdict(int)
    if isinstance(C, AlgebraicComplex):
        for r, qs in C.degrees.items():
            for q in qs:
                acc[q] += -1 if r % 2 else 1
        return Laurent(acc)
    total = Laurent()
    for r, objs in C.objects.items():
        for S in objs:
            if S.arcs:
                raise ValueError("graded_euler of a tangle complex: use skein_class")
            total = total + (CIRCLE**S.circles).shift(S.shift) * (-1 if r % 2 else 1)
    return total


Matching = tuple[tuple[int, int], ...]


@dataclass
class SkeinElement:
    """Formal combination of crossingless matchings with Laurent coefficients."""

    terms: dict[Matching, Laurent] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: v for k, v in self.terms.items() if v}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SkeinElement):
            return NotImplemented
        return self.terms == other.terms

    def value(self) -> Laurent:
        """The coefficient of the empty matching (the invariant of a link)."""
        return self.terms.get((), Laurent())

    def to_json(self) -> list:
        return [{"arcs": [list(a) for a in k], "coeff": format_laurent(v)} for k, v in sorted(self.terms.items())]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({format_laurent(v)})*{list(k)}" for k, v in sorted(self.terms.items()))


def _state_smoothing(T: TangleDiagram, bits) -> tuple[Matching, int]:
    ds = DisjointSet(T.edges)
    for (i, j, k, l), b in zip(T.crossings, bits):
        if b == 0:
            ds.union(i, j)
            ds.union(k, l)
        else:
            ds.union(i, l)
            ds.union(j, k)
    ends: dict = defaultdict(list)
    for p, lab in enumerate(T.boundary):
        ends[ds.find(lab)].append(p)
    arcs = tuple(sorted(tuple(sorted(v)) for v in ends.values()))
    roots = {ds.find(e) for e in T.edges}
    circles = len(roots - set(ends)) + T.loops
    return arcs, circles


def jones_skein(T: TangleDiagram) -> SkeinElement:
    """Expand every crossing by the skein relation and evaluate circles as q + q^-1.

    A positive crossing is ``q (0-smoothing) - q^2 (1-smoothing)``, a negative one
    ``-q^-2 (0-smoothing) + q^-1 (1-smoothing)``.
    """
    weights = {1: (Laurent({1: 1}), Laurent({2: -1})), -1: (Laurent({-2: -1}), Laurent({-1: 1}))}
    acc: dict[Matching, Laurent] = defaultdict(Laurent)
    for bits in itertools.product((0, 1), repeat=T.n):
        coef = Laurent({0: 1})
        for s, b in zip(T.signs, bits):
            coef = coef * weights[s][b]
        arcs, k = _state_smoothing(T, bits)
        acc[arcs] = acc[arcs] + coef * CIRCLE**k
    return SkeinElement(dict(acc))


def jones_hat(T: TangleDiagram) -> Laurent:
    if T.boundary:
        raise ValueError("the Jones polynomial needs a closed diagram")
    return jones_skein(T).value()


def standard_jones(jhat: Laurent) -> Laurent | None:
    """``J`` with ``J-hat(q) = (q + q^-1) J(q^2)``, as a polynomial in ``t = q^2``;
    None when the division is not exact."""
    try:
        j = jhat.divide_exact(CIRCLE)
    except ValueError:
        return None
    if any(e % 2 for e, _ in j):
        return None
    return Laurent({e // 2: c for e, c in j})


def skein_class(C: FormalComplex) -> SkeinElement:
    """Euler characteristic of a tangle complex in the skein module."""
    acc: dict[Matching, Laurent] = defaultdict(Laurent)
    for r, objs in C.objects.items():
        for S in objs:
            sign = -1 if r % 2 else 1
            acc[S.arcs] = acc[S.arcs] + (CIRCLE**S.circles).shift(S.shift) * sign
    return SkeinElement(dict(acc))


def lee_dimension(T: TangleDiagram) -> int:
    if T.boundary:
        raise ValueError("Lee homology is computed for closed diagrams")
    return total_homology_dim(apply_functor(spec_lee(), build_cube(T)), "Q")


# ---------------------------------------------------------------------------
# reporting


def fig10_tables(T: TangleDiagram) -> dict[str, BettiTable]:
    K = khovanov_complex(T)
    A = apply_functor(spec_khovanov(), K)
    return {"Q": betti(A, "Q"), "F2": betti(A, "F2"), "b3": betti_b3(K)}


def homology_json(name: str, tables: dict[str, BettiTable], jhat: Laurent) -> dict:
    return {
        "knot": name,
        "tables": {k: t.as_list() for k, t in tables.items()},
        "jones_hat": [[e, int(c)] for e, c in jhat],
    }


def format_grid(tables: dict[str, BettiTable], order: tuple[str, ...] = ("Q", "F2", "b3")) -> str:
    """Text grid: rows are q-degrees (descending), columns heights; each box lists
    the requested tables' entries separated by commas, blank when all vanish."""
    names = [k for k in order if k in tables]
    keys = set()
    for k in names:
        keys.update(tables[k].support())
    if not keys:
        return "(empty)"
    rs = sorted({r for r, _ in keys})
    js = sorted({j for _, j in keys}, reverse=True)
    main = [k for k in names if k != "b3"]
    main_js = {j for k in main for _, j in tables[k].support()}
    below = None
    if "b3" in names and main_js:
        low = min(main_js)
        js = [j for j in js if j >= low]
        below = low
    rows = []
    header = ["j\\r"] + [str(r) for r in range(rs[0], rs[-1] + 1)]

    def box(r, j, below_row=False):
        vals = []
        for k in names:
            if below_row:
                vals.append(tables[k][(r, j)] if k == "b3" else 0)
            else:
                vals.append(tables[k][(r, j)])
        return ",".join(map(str, vals)) if any(vals) else ""

    for j in js:
        rows.append([str(j)] + [box(r, j) for r in range(rs[0], rs[-1] + 1)])
    if below is not None:
        bj = below - 2
        rows.append([f"<{below}"] + [box(r, bj, True) for r in range(rs[0], rs[-1] + 1)])
    widths = [max(len(x) for x in col) for col in zip(header, *rows)]
    fmt = lambda row: " | ".join(x.rjust(w) for x, w in zip(row, widths))
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), sep] + [fmt(row) for row in rows])


def knight_moves(table: BettiTable) -> list[tuple[int, int]]:
    """Positions (r, j) with nonzero entries at both (r, j) and (r+1, j+4)."""
    return [(r, j) for (r, j) in table.support() if table[(r + 1, j + 4)]]


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True)
