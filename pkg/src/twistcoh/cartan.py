"""Polynomial Cartan calculus on R^n and multivector fields.

Differential forms on R^n are :class:`Cochain` objects with ``r == n``
(generator ``k`` stands for ``dx_{k+1}``).  Multivector fields use the
Schouten-Nijenhuis bracket fixed as the graded biderivation with
``[X, f] = X(f)``, ``[X, Y]`` the Lie bracket, and

    [P, Q] = -(-1)^((p-1)(q-1)) [Q, P]
    [P, Q ^ R] = [P, Q] ^ R + (-1)^((p-1)q) Q ^ [P, R].

Concretely, writing a multivector as a function of odd symbols ``z_i = d/dx_i``,
``[P, Q] = sum_i (P d/dz_i)(dQ/dx_i) - (dP/dx_i)(d/dz_i Q)`` with a right
derivative on ``P`` and a left derivative on ``Q``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .forms import Cochain, format_ext, sort_sign, _join_terms, _term_text
from .poly import Poly, as_fraction

VectorField = Tuple[Poly, ...]


def apply_field(field: Sequence[Poly], f: Poly) -> Poly:
    """``X(f) = sum_k X^k df/dx_k``."""
    out = Poly.zero(f.n)
    for k, xk in enumerate(field):
        if xk:
            out = out + xk * f.diff(k)
    return out


def field_bracket(x: Sequence[Poly], y: Sequence[Poly]) -> VectorField:
    """Lie bracket of polynomial vector fields."""
    return tuple(apply_field(x, yk) - apply_field(y, xk) for xk, yk in zip(x, y))


class Multivector:
    """A multivector field on R^n with polynomial coefficients.

    Keys are strictly increasing tuples of 0-based coordinate indices; mixed
    degrees are allowed so that sums of brackets can be represented.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Optional[Dict] = None):
        self.n = n
        clean: Dict[Tuple[int, ...], Poly] = {}
        for key, val in (terms or {}).items():
            if not isinstance(val, Poly):
                val = Poly.const(n, as_fraction(val))
            if val.n != n:
                raise ValueError("coefficient variable count mismatch")
            if any(k < 0 or k >= n for k in key):
                raise ValueError(f"coordinate index out of range in {key}")
            sign, skey = sort_sign(tuple(key))
            if not sign:
                continue
            val = val if sign > 0 else -val
            clean[skey] = clean[skey] + val if skey in clean else val
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def zero(cls, n: int) -> "Multivector":
        return cls(n)

    @classmethod
    def function(cls, f: Poly) -> "Multivector":
        return cls(f.n, {(): f})

    @classmethod
    def vector_field(cls, components: Sequence[Poly]) -> "Multivector":
        n = len(components)
        return cls(n, {(k,): c for k, c in enumerate(components)})

    @property
    def terms(self) -> Dict[Tuple[int, ...], Poly]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Tuple[int, ...], Poly]]:
        for key in sorted(self._terms, key=lambda k: (len(k), k)):
            yield key, self._terms[key]

    def coeff(self, key) -> Poly:
        sign, skey = sort_sign(tuple(key))
        if not sign:
            return Poly.zero(self.n)
        v = self._terms.get(skey, Poly.zero(self.n))
        return v if sign > 0 else -v

    def degrees(self) -> set:
        return {len(k) for k in self._terms}

    @property
    def degree(self) -> Optional[int]:
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def component(self, q: int) -> "Multivector":
        return Multivector(self.n, {k: v for k, v in self._terms.items() if len(k) == q})

    def as_field(self) -> VectorField:
        if self.degrees() - {1}:
            raise ValueError("multivector is not a vector field")
        return tuple(self._terms.get((k,), Poly.zero(self.n)) for k in range(self.n))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other: "Multivector") -> "Multivector":
        if not isinstance(other, Multivector):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("coordinate count mismatch")
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out[k] + v if k in out else v
        return Multivector(self.n, out)

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __mul__(self, other) -> "Multivector":
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return Multivector(self.n, {k: v * other for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self):
        return f"Multivector({self.n}: {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        return _join_terms([_term_text(v, format_ext(k, "d")) for k, v in self.items()])


def wedge_mv(p: Multivector, q: Multivector) -> Multivector:
    if p.n != q.n:
        raise ValueError("coordinate count mismatch")
    out: Dict[Tuple[int, ...], Poly] = {}
    for i, f in p._terms.items():
        for j, g in q._terms.items():
            sign, key = sort_sign(i + j)
            if not sign:
                continue
            val = f * g if sign > 0 else -(f * g)
            out[key] = out[key] + val if key in out else val
    return Multivector(p.n, out)


def _odd_derivative(key: Tuple[int, ...], k: int, right: bool):
    """Derivative of the odd monomial ``z_key`` by ``z_k``: (sign, remaining key)."""
    if k not in key:
        return 0, None
    pos = key.index(k)
    moves = len(key) - 1 - pos if right else pos
    rest = key[:pos] + key[pos + 1:]
    return (-1 if moves % 2 else 1), rest


def schouten_bracket(p: Multivector, q: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket (convention in the module docstring)."""
    if p.n != q.n:
        raise ValueError("coordinate count mismatch")
    n = p.n
    out: Dict[Tuple[int, ...], Poly] = {}

    def acc(key_a, key_b, coeff):
        sign, key = sort_sign(key_a + key_b)
        if not sign or not coeff:
            return
        val = coeff if sign > 0 else -coeff
        out[key] = out[key] + val if key in out else val

    for i, f in p._terms.items():
        for j, g in q._terms.items():
            for k in range(n):
                # (P d/dz_k) * dQ/dx_k
                s, rest = _odd_derivative(i, k, right=True)
                if s:
                    acc(rest, j, f * g.diff(k) * s)
                # - dP/dx_k * (d/dz_k Q)
                s, rest = _odd_derivative(j, k, right=False)
                if s:
                    acc(i, rest, -(f.diff(k) * g) * s)
    return Multivector(n, out)


# differential forms on R^n

def _check_form(form: Cochain):
    if form.r != form.n or form.m != 1:
        raise ValueError("expected a scalar differential form on R^n (r == n, m == 1)")


def derham_d(form: Cochain) -> Cochain:
    """De Rham differential: ``d(f dx_I) = sum_k df/dx_k dx_k ^ dx_I``."""
    _check_form(form)
    n = form.n
    out: Dict[Tuple[int, ...], Poly] = {}
    for key, (f,) in form.items():
        for k in range(n):
            df = f.diff(k)
            if not df:
                continue
            sign, skey = sort_sign((k,) + key)
            if not sign:
                continue
            val = df if sign > 0 else -df
            out[skey] = out[skey] + val if skey in out else val
    return Cochain(n, n, out)


def interior_product(field: Multivector, form: Cochain) -> Cochain:
    """Contraction of a vector field into the first slot of a form."""
    _check_form(form)
    if field.degrees() - {1}:
        raise ValueError("interior product needs a degree-1 multivector")
    x = field.as_field()
    out: Dict[Tuple[int, ...], Poly] = {}
    for key, (f,) in form.items():
        for pos, k in enumerate(key):
            if not x[k]:
                continue
            rest = key[:pos] + key[pos + 1:]
            val = x[k] * f
            if pos % 2:
                val = -val
            out[rest] = out[rest] + val if rest in out else val
    return Cochain(form.n, form.n, out)


def lie_derivative(field: Multivector, form: Cochain) -> Cochain:
    """Cartan formula ``L_X = i_X d + d i_X``."""
    return interior_product(field, derham_d(form)) + derham_d(interior_product(field, form))


def multivector_to_cochain(mv: Multivector) -> Cochain:
    """Identify ``f d_I`` with ``f e^I`` on the cotangent algebroid of R^n."""
    return Cochain(mv.n, mv.n, {k: v for k, v in mv._terms.items()})


def cochain_to_multivector(c: Cochain) -> Multivector:
    if c.m != 1 or c.r != c.n:
        raise ValueError("only scalar cochains of rank n correspond to multivectors")
    return Multivector(c.n, {k: v[0] for k, v in c.items()})
