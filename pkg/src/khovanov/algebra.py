"""Coefficient rings and Laurent polynomials used throughout the package."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction


class Laurent:
    """A Laurent polynomial in one variable with coefficients in a base ring.

    Stored as a sorted tuple of ``(exponent, coefficient)`` pairs with no zero
    coefficients, so instances hash and compare structurally.
    """

    __slots__ = ("_hash", "terms")

    def __init__(self, terms: Mapping[int, object] | Iterable[tuple[int, object]] = (), base: Ring | None = None):
        acc: dict[int, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            acc[e] = acc.get(e, 0) + c
        norm = base.norm if base is not None else (lambda x: x)
        self.terms = tuple(sorted((e, norm(c)) for e, c in acc.items() if norm(c) != 0))
        self._hash = None

    @classmethod
    def monomial(cls, exp: int, coef: object = 1) -> Laurent:
        return cls({exp: coef})

    def __iter__(self) -> Iterator[tuple[int, object]]:
        return iter(self.terms)

    def as_dict(self) -> dict[int, object]:
        return dict(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Laurent):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Laurent({0: other}).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def _coerce(self, other: object) -> Laurent:
        if isinstance(other, Laurent):
            return other
        return Laurent({0: other})

    def __add__(self, other: object) -> Laurent:
        o = self._coerce(other)
        return Laurent(list(self.terms) + list(o.terms))

    __radd__ = __add__

    def __neg__(self) -> Laurent:
        return Laurent([(e, -c) for e, c in self.terms])

    def __sub__(self, other: object) -> Laurent:
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> Laurent:
        return self._coerce(other) - self

    def __mul__(self, other: object) -> Laurent:
        o = self._coerce(other)
        acc: dict[int, object] = {}
        for e1, c1 in self.terms:
            for e2, c2 in o.terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return Laurent(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Laurent:
        if n < 0:
            if len(self.terms) != 1 or self.terms[0][1] not in (1, -1):
                raise ValueError("only unit monomials can be inverted")
            e, c = self.terms[0]
            return Laurent({-e * (-n): c ** (-n)})
        out = Laurent({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def shift(self, k: int) -> Laurent:
        return Laurent([(e + k, c) for e, c in self.terms])

    def substitute_square(self) -> Laurent:
        """Return p(q^2)."""
        return Laurent([(2 * e, c) for e, c in self.terms])

    def evaluate(self, x):
        return sum(c * x**e for e, c in self.terms)

    def coefficient(self, e: int):
        return dict(self.terms).get(e, 0)

    def divide_exact(self, other: Laurent) -> Laurent:
        """Exact division; raises ValueError if ``other`` does not divide ``self``."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        rem = dict(self.terms)
        lead_e, lead_c = other.terms[-1]
        low_e = other.terms[0][0]
        quot: dict[int, object] = {}
        while rem:
            e = max(rem)
            if e - lead_e + low_e < min(rem):
                raise ValueError("division is not exact")
            c = rem[e]
            if isinstance(c, int) and isinstance(lead_c, int):
                qc, r = divmod(c, lead_c)
                if r:
                    raise ValueError("division is not exact")
            else:
                qc = Fraction(c) / lead_c
            qe = e - lead_e
            quot[qe] = qc
            for oe, oc in other.terms:
                v = rem.get(qe + oe, 0) - qc * oc
                if v:
                    rem[qe + oe] = v
                else:
                    rem.pop(qe + oe, None)
        return Laurent(quot)

    def __repr__(self) -> str:
        return f"Laurent({dict(self.terms)!r})"

    def __str__(self) -> str:
        return format_laurent(self)


def format_laurent(p: Laurent, var: str = "q") -> str:
    if not p.terms:
        return "0"
    parts: list[str] = []
    for e, c in sorted(p.terms, key=lambda t: -t[0]):
        if e == 0:
            mono = ""
        elif e == 1:
            mono = var
        else:
            mono = f"{var}^{e}"
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        elif mono:
            s = f"{c}*{mono}"
        else:
            s = str(c)
        parts.append(s)
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


Q = Laurent({1: 1})
Q_INV = Laurent({-1: 1})
CIRCLE = Laurent({1: 1, -1: 1})


class Ring:
    """A coefficient ring: normalizes raw Python numbers into canonical elements."""

    name = "ring"
    is_field = False
    characteristic = 0

    def norm(self, x):
        return x

    def zero(self):
        return self.norm(0)

    def one(self):
        return self.norm(1)

    def inverse(self, x):
        raise ZeroDivisionError(f"{x!r} is not invertible in {self.name}")

    def __repr__(self) -> str:
        return self.name


class _Integers(Ring):
    name = "Z"

    def norm(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x)
        return int(x)

    def inverse(self, x):
        if x in (1, -1):
            return x
        return super().inverse(x)


class _Rationals(Ring):
    name = "Q"
    is_field = True

    def norm(self, x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return int(x)
        return x

    def inverse(self, x):
        if x == 0:
            return super().inverse(x)
        if x in (1, -1):
            return x
        return Fraction(1) / x


class _F2(Ring):
    name = "F2"
    is_field = True
    characteristic = 2

    def norm(self, x):
        if isinstance(x, Fraction):
            if x.denominator % 2 == 0:
                raise ValueError(f"{x} is not defined mod 2")
            x = x.numerator
        return int(x) & 1

    def inverse(self, x):
        if x & 1:
            return 1
        return super().inverse(x)


class _Z2Local(Ring):
    """Integers localized at 2: rationals with odd denominators."""

    name = "Z_(2)"

    def norm(self, x):
        x = Fraction(x)
        if x.denominator % 2 == 0:
            raise ValueError(f"{x} has an even denominator")
        return int(x) if x.denominator == 1 else x

    def inverse(self, x):
        x = Fraction(x)
        if x.numerator % 2 == 0:
            return super().inverse(x)
        return self.norm(1 / x)


ZZ = _Integers()
QQ = _Rationals()
F2 = _F2()
Z2LOC = _Z2Local()

RINGS = {"Z": ZZ, "Q": QQ, "F2": F2, "Z_(2)": Z2LOC, "Z2loc": Z2LOC}


class PolyRing(Ring):
    """Polynomial ring ``base[var]`` with the variable in a fixed q-degree."""

    def __init__(self, base: Ring, var: str, degree: int):
        self.base = base
        self.var = var
        self.degree = degree
        self.name = f"{base.name}[{var}]"
        self.characteristic = base.characteristic

    def norm(self, x):
        if isinstance(x, Laurent):
            return Laurent(x.terms, base=self.base)
        return Laurent({0: x}, base=self.base)

    def gen(self) -> Laurent:
        return Laurent({1: 1}, base=self.base)

    def is_zero(self, x) -> bool:
        return not self.norm(x)


def get_ring(name: str) -> Ring:
    try:
        return RINGS[name]
    except KeyError:
        raise ValueError(f"unknown ring {name!r}; choose from {sorted(set(RINGS))}") from None
