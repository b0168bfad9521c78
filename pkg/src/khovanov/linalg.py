"""Exact ranks of sparse matrices over F2 and Q.

Matrices are given column-wise as ``{col: {row: coeff}}`` (or an iterable of
such column dicts).  Over Q the elimination is fraction free: rows are kept
integral and divided by their content after each update.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from math import gcd


class F2Eliminator:
    """Incremental column space over F2; vectors are Python ints used as bitsets."""

    def __init__(self):
        self.pivots: dict[int, int] = {}  # leading bit -> reduced vector

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            p = self.pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; True when it was independent of what came before."""
        v = self.reduce(v)
        if v:
            self.pivots[v.bit_length() - 1] = v
            return True
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _as_bits(col: Mapping[int, object]) -> int:
    v = 0
    for row, c in col.items():
        if int(c) & 1:
            v ^= 1 << row
    return v


def rank_f2(columns: Iterable[Mapping[int, object]]) -> int:
    E = F2Eliminator()
    for col in columns:
        E.add(_as_bits(col))
    return E.rank


def _content(row: dict[int, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    return g


def _integral(col: Mapping[int, object]) -> dict[int, int]:
    vals = {k: Fraction(v) for k, v in col.items() if v != 0}
    if not vals:
        return {}
    den = 1
    for v in vals.values():
        den = den * v.denominator // gcd(den, v.denominator)
    return {k: int(v * den) for k, v in vals.items()}


class QEliminator:
    """Incremental column space over Q with integer, content-free vectors."""

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}  # pivot row -> vector

    def reduce(self, v: dict[int, int]) -> dict[int, int]:
        v = dict(v)
        while v:
            top = max(v)
            p = self.pivots.get(top)
            if p is None:
                return v
            a, b = v[top], p[top]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            out = {k: fa * x for k, x in v.items()}
            for k, y in p.items():
                out[k] = out.get(k, 0) - fb * y
            v = {k: x for k, x in out.items() if x}
            c = _content(v)
            if c > 1:
                v = {k: x // c for k, x in v.items()}
        return v

    def add(self, v: Mapping[int, object]) -> bool:
        r = self.reduce(_integral(v))
        if r:
            self.pivots[max(r)] = r
            return True
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank_q(columns: Iterable[Mapping[int, object]]) -> int:
    """Exact rank over Q.  Columns are eliminated sparsest first."""
    cols = sorted((c for c in columns if c), key=len)
    E = QEliminator()
    for col in cols:
        E.add(col)
    return E.rank


def rank(columns: Iterable[Mapping[int, object]], field: str) -> int:
    if field == "F2":
        return rank_f2(columns)
    if field == "Q":
        return rank_q(columns)
    raise ValueError(f"unknown field {field!r}")


def smith_form(columns: list[Mapping[int, object]], nrows: int) -> list[int]:
    """Invariant factors (nonzero) of a small integer matrix."""
    M = [[0] * len(columns) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            M[i][j] = int(v)
    return sorted(smith_diagonal(M))


def smith_diagonal(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix (up to order)."""
    M = [list(r) for r in rows]
    out = []
    while M and M[0]:
        nz = [(abs(v), i, j) for i, r in enumerate(M) for j, v in enumerate(r) if v]
        if not nz:
            break
        _, i, j = min(nz)
        M[0], M[i] = M[i], M[0]
        for r in M:
            r[0], r[j] = r[j], r[0]
        p = M[0][0]
        clean = True
        for i in range(1, len(M)):
            q = M[i][0] // p
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[0])]
            clean &= M[i][0] == 0
        for j in range(1, len(M[0])):
            q = M[0][j] // p
            if q:
                for r in M:
                    r[j] -= q * r[0]
            clean &= M[0][j] == 0
        if not clean:
            continue
        if any(v % p for r in M[1:] for v in r[1:]):
            # fold a bad row into the first to restore divisibility
            i = next(i for i in range(1, len(M)) if any(v % p for v in M[i][1:]))
            M[0] = [a + b for a, b in zip(M[0], M[i])]
            continue
        out.append(abs(p))
        M = [r[1:] for r in M[1:]]
    return out


# ---------------------------------------------------------------------------
# elimination that remembers how each pivot was built


def field_norm(x, p: int):
    """Coerce a coefficient into Q (``p == 0``) or F_p."""
    if p == 0:
        return Fraction(x)
    return int(x) % p


class TrackedEliminator:
    """Echelon basis of a span of sparse vectors over Q or F_p, where each pivot
    also stores its expression in terms of the tags of the inserted vectors."""

    def __init__(self, p: int = 0):
        self.p = p
        self.pivots: dict[int, tuple[dict, dict]] = {}  # pivot -> (vector, combination)

    def _norm(self, v: Mapping) -> dict:
        out = {k: field_norm(x, self.p) for k, x in v.items()}
        return {k: x for k, x in out.items() if x}

    def _inv(self, x):
        return 1 / x if self.p == 0 else pow(x, -1, self.p)

    def _axpy(self, y: dict, a, x: Mapping) -> None:
        for k, v in x.items():
            w = y.get(k, 0) + a * v
            if self.p:
                w %= self.p
            if w:
                y[k] = w
            else:
                y.pop(k, None)

    def reduce(self, v: Mapping, combo: Mapping | None = None) -> tuple[dict, dict]:
        v = self._norm(v)
        combo = dict(combo or {})
        while v:
            top = max(v)
            piv = self.pivots.get(top)
            if piv is None:
                break
            a = -v[top]
            self._axpy(v, a, piv[0])
            self._axpy(combo, a, piv[1])
        return v, combo

    def add(self, v: Mapping, tag) -> dict | None:
        """Insert ``v``; returns None when independent, else the relation
        ``{tag: coeff}`` expressing that the combination vanishes."""
        r, combo = self.reduce(v, {tag: 1})
        if not r:
            return combo
        top = max(r)
        a = self._inv(r[top])
        r = {k: (x * a) % self.p if self.p else x * a for k, x in r.items()}
        combo = {k: (x * a) % self.p if self.p else x * a for k, x in combo.items()}
        self.pivots[top] = (r, combo)
        return None

    def express(self, v: Mapping) -> dict | None:
        """Coefficients ``{tag: c}`` with ``v = sum c * vec(tag)``, or None."""
        r, combo = self.reduce(v)
        if r:
            return None
        return {k: -x if self.p == 0 else (-x) % self.p for k, x in combo.items() if x}

    @property
    def rank(self) -> int:
        return len(self.pivots)


def kernel_basis(columns: Mapping[int, Mapping], domain: Sequence[int], p: int = 0) -> list[dict]:
    """Basis of the kernel of the map sending basis vector ``c`` to ``columns[c]``."""
    E = TrackedEliminator(p)
    out = []
    for c in domain:
        rel = E.add(columns.get(c, {}), c)
        if rel is not None:
            out.append(rel)
    return out


def in_span(columns: Iterable[Mapping], target: Mapping, p: int = 0) -> bool:
    E = TrackedEliminator(p)
    for i, col in enumerate(columns):
        E.add(col, i)
    r, _ = E.reduce(target)
    return not r
