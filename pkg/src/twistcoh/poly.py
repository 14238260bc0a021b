"""Exact polynomials over the rationals in a fixed number of variables."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, Iterator, Tuple, Union

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def grlex_key(exp: Exponent):
    # Sorting with this key puts higher total degree first, then lex-larger.
    return (-sum(exp), tuple(-e for e in exp))


def monomials(n: int, degree: int) -> list:
    """All exponent vectors of the given total degree, in grlex order."""
    if degree < 0:
        return []
    if n == 0:
        return [()] if degree == 0 else []
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        exp = [0] * n
        for k in combo:
            exp[k] += 1
        out.append(tuple(exp))
    out.sort(key=grlex_key)
    return out


class Poly:
    """A polynomial in ``n`` variables with :class:`Fraction` coefficients.

    Values are immutable; zero coefficients are never stored.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Dict[Exponent, Fraction] | None = None):
        self.n = n
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != n:
                    raise ValueError(f"exponent {exp} has wrong length for {n} variables")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                c = as_fraction(c)
                if c:
                    clean[tuple(exp)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c: Scalar) -> "Poly":
        c = as_fraction(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls.const(n, 1)

    @classmethod
    def var(cls, n: int, k: int) -> "Poly":
        if not 0 <= k < n:
            raise IndexError(f"variable index {k} out of range for {n} variables")
        exp = [0] * n
        exp[k] = 1
        return cls._raw(n, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Exponent, c: Scalar = 1) -> "Poly":
        return cls(len(exp), {tuple(exp): c})

    # inspection

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        """Terms in canonical (graded lexicographic, descending) order."""
        for exp in sorted(self._terms, key=grlex_key):
            yield exp, self._terms[exp]

    def coeff(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degrees(self) -> set:
        return {sum(e) for e in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.n, Fraction(0))

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly._raw(self.n, {e: c for e, c in self._terms.items() if sum(e) == degree})

    # arithmetic

    def _check(self, other: "Poly"):
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero(self.n)
            return Poly._raw(self.n, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, k: int) -> "Poly":
        """Partial derivative with respect to variable ``k`` (0-based)."""
        out = {}
        for e, c in self._terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return Poly._raw(self.n, out)

    def evaluate(self, point: Iterable[Scalar]) -> Fraction:
        point = [as_fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.n}, {self})"

    def __str__(self):
        return format_poly(self)


def format_scalar(c: Fraction) -> str:
    c = as_fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(exp: Exponent, var: str = "x") -> str:
    parts = []
    for k, e in enumerate(exp):
        if e == 1:
            parts.append(f"{var}{k + 1}")
        elif e > 1:
            parts.append(f"{var}{k + 1}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Canonical text form, e.g. ``2*x1^2*x2 - 1/3*x3 + 1``."""
    if p.is_zero():
        return "0"
    out = []
    for exp, c in p.items():
        mono = format_monomial(exp)
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if mono:
            body = mono if a == 1 else f"{format_scalar(a)}*{mono}"
        else:
            body = format_scalar(a)
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
