from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import cochains, polys, rationals
from twistcoh.cartan import (Multivector, derham_d, interior_product, lie_derivative,
                             schouten_bracket, wedge_mv)
from twistcoh.forms import Cochain, format_cochain, shuffle_sign, sort_sign, wedge
from twistcoh.linalg import brute_rank, matvec, rank_and_kernel
from twistcoh.poly import Poly, format_poly, grlex_key, monomials

x = [Poly.var(2, k) for k in range(2)]


def form2(terms):
    return Cochain(2, 2, terms)


# polynomials

def test_zero_coefficients_are_dropped():
    p = Poly(2, {(1, 0): 1, (0, 1): 0})
    assert list(p.terms) == [(1, 0)]
    assert not (p - p).terms


def test_terms_iterate_in_grlex_order():
    p = x[0] * x[1] + x[1] ** 2 + 1 + x[0] ** 2 + x[0]
    keys = [exp for exp, _ in p.items()]
    assert keys == sorted(keys, key=grlex_key)
    assert format_poly(p) == "x1^2 + x1*x2 + x2^2 + x1 + 1"


def test_rationals_stay_reduced():
    p = Poly.const(1, Fraction(6, 4))
    (c,) = p.terms.values()
    assert (c.numerator, c.denominator) == (3, 2)


def test_big_integers_do_not_overflow():
    p = Poly.const(1, 2) ** 200
    assert p.constant_term() == 2 ** 200


@given(polys(2), polys(2), polys(2))
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == Poly.zero(2)


@given(polys(2), polys(2), st.integers(0, 1))
def test_derivative_product_rule(a, b, k):
    assert (a * b).diff(k) == a.diff(k) * b + a * b.diff(k)


@given(st.integers(0, 3), st.integers(0, 4))
def test_monomial_count(n, d):
    from math import comb
    assert len(monomials(n, d)) == (comb(n + d - 1, d) if n else int(d == 0))


# linear algebra

def test_identity_rank_and_kernel():
    assert rank_and_kernel([[1, 0], [0, 1]]) == (2, [])


def test_proportional_rows_kernel():
    assert rank_and_kernel([[1, 2], [2, 4]]) == (1, [[-2, 1]])


def test_sl2_first_ce_matrix_has_full_rank():
    # d: C^1 -> C^2 for sl2 with generators (h, e, f); columns h*, e*, f*;
    # rows e^he, e^hf, e^ef from d(a)(u, v) = -a([u, v])
    mat = [[0, -2, 0], [0, 0, 2], [-1, 0, 0]]
    assert rank_and_kernel(mat) == (3, [])


def test_empty_matrix():
    assert rank_and_kernel([]) == (0, [])


def test_rank_and_kernel_is_deterministic():
    mat = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank_and_kernel(mat) == rank_and_kernel([row[:] for row in mat])


matrices = st.integers(1, 4).flatmap(lambda cols: st.lists(
    st.lists(rationals, min_size=cols, max_size=cols), min_size=1, max_size=4))


@given(matrices)
def test_rank_nullity_and_annihilation(mat):
    rank, kernel = rank_and_kernel(mat)
    assert rank + len(kernel) == len(mat[0])
    assert rank == brute_rank(mat)
    for vec in kernel:
        assert all(v == 0 for v in matvec(mat, vec))
    if kernel:
        assert brute_rank(kernel) == len(kernel)


# exterior algebra

def test_basic_wedges():
    e1, e2 = Cochain.generator(2, 0, 0), Cochain.generator(2, 0, 1)
    e12 = Cochain.generator(2, 0, 0, 1)
    assert wedge(e1, e2) == e12
    assert wedge(e2, e1) == -e12
    assert not wedge(e1, e1)


def test_shuffle_sign_matches_sorting():
    assert shuffle_sign((0, 2), (1,)) == -1
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((1, 1)) == (0, None)


def test_cochain_keys_are_normalized():
    assert Cochain(2, 0, {(1, 0): 1}) == -Cochain.generator(2, 0, 0, 1)
    assert not Cochain(2, 0, {(1, 1): 1})
    with pytest.raises(ValueError):
        Cochain(2, 0, {(0, 2): 1})


def test_weight_decomposition_is_termwise():
    c = form2({(0,): x[0] ** 2 + x[1], (0, 1): 3})
    assert c.bidegrees() == {(1, 2), (1, 1), (2, 0)}


@given(st.data(), st.integers(0, 3), st.integers(0, 3))
def test_wedge_graded_commutative(data, p, q):
    a = data.draw(cochains(3, 1, [p]))
    b = data.draw(cochains(3, 1, [q]))
    assert wedge(a, b) == wedge(b, a) * (-1) ** (p * q)


@given(cochains(3, 1), cochains(3, 1), cochains(3, 1))
def test_wedge_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


# calculus on R^n

def test_derham_examples():
    assert derham_d(form2({(): x[0] * x[1]})) == form2({(0,): x[1], (1,): x[0]})
    assert not derham_d(form2({(0,): 1}))
    assert derham_d(form2({(1,): x[0] ** 2})) == form2({(0, 1): 2 * x[0]})


@given(cochains(3, 3, max_degree=3))
def test_derham_squares_to_zero(form):
    assert not derham_d(derham_d(form))


d1 = Multivector(2, {(0,): 1})
d2 = Multivector(2, {(1,): 1})


def test_contraction_and_lie_derivative_examples():
    assert interior_product(d1, form2({(0, 1): 1})) == form2({(1,): 1})
    assert lie_derivative(d1, form2({(1,): x[0]})) == form2({(1,): 1})
    x1d1 = Multivector(2, {(0,): x[0]})
    assert lie_derivative(x1d1, form2({(0,): 1})) == form2({(0,): 1})


@given(polys(2), polys(2), polys(2), polys(2))
def test_lie_derivative_is_a_derivation_on_functions(f, g, a, b):
    field = Multivector(2, {(0,): a, (1,): b})
    lhs = lie_derivative(field, form2({(): f * g}))
    rhs = wedge(lie_derivative(field, form2({(): f})), form2({(): g})) \
        + wedge(form2({(): f}), lie_derivative(field, form2({(): g})))
    assert lhs == rhs


@given(polys(2), polys(2), cochains(2, 2))
def test_cartan_magic_formula_commutes_with_d(a, b, form):
    field = Multivector(2, {(0,): a, (1,): b})
    assert derham_d(lie_derivative(field, form)) == lie_derivative(field, derham_d(form))


# Schouten bracket

def test_schouten_examples():
    x1d1 = Multivector(2, {(0,): x[0]})
    assert schouten_bracket(d1, x1d1) == d1
    const = Multivector(2, {(0, 1): 1})
    assert not schouten_bracket(const, const)
    lin = Multivector(2, {(0, 1): x[0]})
    assert not schouten_bracket(lin, lin)


def test_bracket_with_function_is_derivative():
    f = Multivector(2, {(): x[0] ** 2 * x[1]})
    field = Multivector(2, {(0,): x[1], (1,): 1})
    assert schouten_bracket(field, f) == Multivector(2, {(): 2 * x[0] * x[1] ** 2 + x[0] ** 2})


@st.composite
def multivectors(draw, n, q, max_degree=1):
    from itertools import combinations
    terms = {}
    for key in combinations(range(n), q):
        if draw(st.booleans()):
            terms[key] = draw(polys(n, max_degree, 2))
    return Multivector(n, terms)


degrees3 = st.integers(0, 3)


def sign(k):
    return -1 if k % 2 else 1


@given(st.data(), degrees3, degrees3)
def test_schouten_graded_antisymmetry(data, p, q):
    P = data.draw(multivectors(3, p))
    Q = data.draw(multivectors(3, q))
    lhs = schouten_bracket(P, Q)
    rhs = schouten_bracket(Q, P) * -sign((p - 1) * (q - 1))
    assert lhs == rhs


@given(st.data(), degrees3, degrees3, degrees3)
def test_schouten_graded_leibniz(data, p, q, s):
    P = data.draw(multivectors(3, p))
    Q = data.draw(multivectors(3, q))
    R = data.draw(multivectors(3, s))
    lhs = schouten_bracket(P, wedge_mv(Q, R))
    rhs = wedge_mv(schouten_bracket(P, Q), R) \
        + wedge_mv(Q, schouten_bracket(P, R)) * sign((p - 1) * q)
    assert lhs == rhs


@given(st.data())
def test_schouten_jacobi_on_vector_fields(data):
    X, Y, Z = (data.draw(multivectors(2, 1, 2)) for _ in range(3))
    br = schouten_bracket
    assert not (br(X, br(Y, Z)) + br(Y, br(Z, X)) + br(Z, br(X, Y)))


def test_text_forms():
    c = Cochain(3, 2, {(0, 2): Poly.var(2, 0) * Fraction(-1, 2), (): 1})
    assert format_cochain(c) == "1 - 1/2*x1*e1^e3"
