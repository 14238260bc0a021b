"""Cochains: exterior forms on a free module with polynomial coefficients.

A cochain lives in ``Omega(A, V)`` for an algebroid ``A`` of rank ``r`` over
``R^n`` and a free module ``V`` of rank ``m``.  It is stored on the basis
``e^I (x) v_a`` where ``I`` is a strictly increasing tuple of 0-based
generator indices.  Mixed degrees are allowed; this is how even/odd forms are
represented.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .poly import Poly, as_fraction, format_poly, monomials

ExtIndex = Tuple[int, ...]


def sort_sign(seq: Sequence[int]) -> Tuple[int, Optional[ExtIndex]]:
    """Sign of the permutation sorting ``seq``; ``(0, None)`` on a repeat."""
    if len(set(seq)) != len(seq):
        return 0, None
    inversions = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inversions += 1
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def ext_indices(r: int, p: int) -> list:
    """Basis of the degree-``p`` exterior power, lexicographically ordered."""
    if p < 0 or p > r:
        return []
    return list(combinations(range(r), p))


def shuffle_sign(i: ExtIndex, j: ExtIndex) -> int:
    return sort_sign(tuple(i) + tuple(j))[0]


class Cochain:
    """Element of ``Omega(A, V)`` with ``V`` free of rank ``m``."""

    __slots__ = ("r", "n", "m", "_terms", "_hash")

    def __init__(self, r: int, n: int, terms: Optional[Dict] = None, m: int = 1):
        self.r, self.n, self.m = r, n, m
        clean: Dict[ExtIndex, Tuple[Poly, ...]] = {}
        for key, value in (terms or {}).items():
            if isinstance(value, Poly) or isinstance(value, (int, Fraction)):
                value = (value,)
            value = tuple(self._poly(v) for v in value)
            if len(value) != m:
                raise ValueError(f"value {key} has {len(value)} components, expected {m}")
            if any(k < 0 or k >= r for k in key):
                raise ValueError(f"generator index out of range in {key} (rank {r})")
            sign, skey = sort_sign(tuple(key))
            if not sign:
                continue
            if sign < 0:
                value = tuple(-v for v in value)
            if skey in clean:
                value = tuple(a + b for a, b in zip(clean[skey], value))
            clean[skey] = value
        self._terms = {k: v for k, v in clean.items() if any(v)}
        self._hash = None

    def _poly(self, v) -> Poly:
        if isinstance(v, Poly):
            if v.n != self.n:
                raise ValueError(f"coefficient has {v.n} variables, expected {self.n}")
            return v
        return Poly.const(self.n, as_fraction(v))

    @classmethod
    def _raw(cls, r, n, m, terms):
        obj = cls.__new__(cls)
        obj.r, obj.n, obj.m = r, n, m
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, r: int, n: int, m: int = 1) -> "Cochain":
        return cls._raw(r, n, m, {})

    @classmethod
    def constant(cls, r: int, n: int, c=1) -> "Cochain":
        return cls(r, n, {(): Poly.const(n, c)})

    @classmethod
    def basis(cls, r: int, n: int, index: ExtIndex, a: int = 0, m: int = 1,
              exp: Optional[Tuple[int, ...]] = None, coeff=1) -> "Cochain":
        exp = (0,) * n if exp is None else tuple(exp)
        value = [Poly.zero(n)] * m
        value[a] = Poly.monomial(exp, coeff)
        return cls(r, n, {tuple(index): tuple(value)}, m)

    @classmethod
    def generator(cls, r: int, n: int, *indices: int) -> "Cochain":
        """``e^{i1} ^ e^{i2} ^ ...`` as a scalar cochain (0-based indices)."""
        return cls(r, n, {tuple(indices): Poly.one(n)})

    # inspection

    @property
    def terms(self) -> Dict[ExtIndex, Tuple[Poly, ...]]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[ExtIndex, Tuple[Poly, ...]]]:
        for key in sorted(self._terms, key=lambda k: (len(k), k)):
            yield key, self._terms[key]

    def value(self, index: ExtIndex) -> Tuple[Poly, ...]:
        return self._terms.get(tuple(index), (Poly.zero(self.n),) * self.m)

    def scalar_value(self, index: ExtIndex) -> Poly:
        self._require_scalar()
        return self.value(index)[0]

    def evaluate(self, args: Sequence[int]) -> Tuple[Poly, ...]:
        """Value on a tuple of generators in any order (alternating)."""
        sign, key = sort_sign(tuple(args))
        if not sign:
            return (Poly.zero(self.n),) * self.m
        val = self.value(key)
        return val if sign > 0 else tuple(-v for v in val)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degrees(self) -> set:
        return {len(k) for k in self._terms}

    @property
    def degree(self) -> Optional[int]:
        """The form degree when homogeneous, else None (zero has no degree)."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def parity(self) -> str:
        """One of ``"zero"``, ``"even"``, ``"odd"``, ``"mixed"``."""
        ps = {d % 2 for d in self.degrees()}
        if not ps:
            return "zero"
        if len(ps) == 2:
            return "mixed"
        return "odd" if ps.pop() else "even"

    def component(self, p: int) -> "Cochain":
        return Cochain._raw(self.r, self.n, self.m,
                            {k: v for k, v in self._terms.items() if len(k) == p})

    def is_scalar(self) -> bool:
        return self.m == 1

    def _require_scalar(self):
        if self.m != 1:
            raise ValueError("operation needs a scalar-valued cochain")

    def iter_basis(self) -> Iterator[Tuple[ExtIndex, int, Tuple[int, ...], Fraction]]:
        """Expand into ``(I, a, exponent, coefficient)`` basis terms."""
        for key, value in self.items():
            for a, poly in enumerate(value):
                for exp, c in poly.items():
                    yield key, a, exp, c

    def bidegrees(self) -> set:
        """Set of ``(form degree, polynomial weight)`` pairs occurring."""
        return {(len(k), sum(exp)) for k, _, exp, _ in self.iter_basis()}

    def max_weight(self) -> int:
        return max((w for _, w in self.bidegrees()), default=-1)

    # arithmetic

    def same_space(self, other: "Cochain") -> bool:
        return (self.r, self.n, self.m) == (other.r, other.n, other.m)

    def _check(self, other: "Cochain"):
        if not self.same_space(other):
            raise ValueError(
                f"cochains live in different spaces: (r,n,m)={(self.r, self.n, self.m)} "
                f"vs {(other.r, other.n, other.m)}")

    def __add__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            if k in out:
                nv = tuple(a + b for a, b in zip(out[k], v))
                if any(nv):
                    out[k] = nv
                else:
                    del out[k]
            else:
                out[k] = v
        return Cochain._raw(self.r, self.n, self.m, out)

    def __neg__(self) -> "Cochain":
        return Cochain._raw(self.r, self.n, self.m,
                            {k: tuple(-x for x in v) for k, v in self._terms.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "Cochain":
        """Multiply by a function (Poly) or scalar."""
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cochain.zero(self.r, self.n, self.m)
            other = Poly.const(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        out = {}
        for k, v in self._terms.items():
            nv = tuple(x * other for x in v)
            if any(nv):
                out[k] = nv
        return Cochain._raw(self.r, self.n, self.m, out)

    __rmul__ = __mul__

    def map_values(self, fn) -> "Cochain":
        """Apply ``fn`` to every value tuple; ``fn`` returns a tuple of the same length."""
        return Cochain(self.r, self.n, {k: fn(v) for k, v in self._terms.items()}, self.m)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.same_space(other) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.r, self.n, self.m, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Cochain(r={self.r}, n={self.n}, m={self.m}: {self})"

    def __str__(self):
        return format_cochain(self)


def wedge(a: Cochain, b: Cochain) -> Cochain:
    """Wedge product with the shuffle sign convention.

    At most one operand may be vector-valued; the scalar factor multiplies
    the forms and the value is carried along unchanged.
    """
    if (a.r, a.n) != (b.r, b.n):
        raise ValueError("wedge of cochains over different models")
    if a.m != 1 and b.m != 1:
        raise ValueError("wedge needs at least one scalar-valued operand")
    m = max(a.m, b.m)
    out: Dict[ExtIndex, list] = {}
    for i, va in a._terms.items():
        for j, vb in b._terms.items():
            sign, key = sort_sign(i + j)
            if not sign:
                continue
            if a.m == 1:
                f = va[0] if sign > 0 else -va[0]
                prod = [f * x for x in vb]
            else:
                g = vb[0] if sign > 0 else -vb[0]
                prod = [x * g for x in va]
            if key in out:
                out[key] = [x + y for x, y in zip(out[key], prod)]
            else:
                out[key] = prod
    return Cochain._raw(a.r, a.n, m, {k: tuple(v) for k, v in out.items() if any(v)})


def cochain_basis(r: int, n: int, p: int, weight: int, m: int = 1) -> list:
    """Basis ``(I, a, exponent)`` of degree-``p`` cochains with coefficients
    homogeneous of the given polynomial weight, in canonical order."""
    monos = monomials(n, weight)
    return [(idx, a, exp) for idx in ext_indices(r, p) for a in range(m) for exp in monos]


def basis_cochain(r: int, n: int, m: int, key) -> Cochain:
    idx, a, exp = key
    return Cochain.basis(r, n, idx, a, m, exp)


def format_ext(index: ExtIndex, symbol: str = "e") -> str:
    return "^".join(f"{symbol}{k + 1}" for k in index)


def format_cochain(c: Cochain, symbol: str = "e") -> str:
    """Canonical text, e.g. ``2*e1^e2 + (x1 - x2)*e3``; vector values use v1..vm."""
    if c.is_zero():
        return "0"
    pieces = []
    for key, value in c.items():
        for a, poly in enumerate(value):
            if poly.is_zero():
                continue
            basis = format_ext(key, symbol)
            if c.m > 1:
                basis = f"{basis}*v{a + 1}" if basis else f"v{a + 1}"
            pieces.append(_term_text(poly, basis))
    return _join_terms(pieces)


def _term_text(poly: Poly, basis: str) -> Tuple[str, str]:
    if not basis:
        text = format_poly(poly)
        if text.startswith("-") and " " not in text:
            return "-", text[1:]
        if " " in text:
            return "+", f"({text})"
        return "+", text
    if len(poly.terms) == 1:
        ((exp, c),) = poly.terms.items()
        mono = format_poly(Poly.monomial(exp, abs(c)))
        sign = "-" if c < 0 else "+"
        if mono == "1":
            return sign, basis
        return sign, f"{mono}*{basis}"
    return "+", f"({format_poly(poly)})*{basis}"


def _join_terms(pieces) -> str:
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text
