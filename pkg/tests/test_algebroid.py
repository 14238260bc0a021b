from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import cochains
from oracles import ce_matrix
from twistcoh import library
from twistcoh.algebroid import (algebroid_d, build_action_algebroid, build_lie_algebra,
                                build_poisson_algebroid, check_axioms, derivation_d)
from twistcoh.cartan import Multivector, multivector_to_cochain, schouten_bracket
from twistcoh.errors import NotPoissonError, ValidationError
from twistcoh.forms import Cochain, basis_cochain, cochain_basis, ext_indices, wedge
from twistcoh.poly import Poly
from twistcoh.twisted import window_basis

POISSON_MODELS = ("symplectic_plane", "poisson_x1", "poisson_r3", "lie_poisson_so3")


def gen(model, *idx):
    return Cochain.generator(model.rank, model.nvars, *idx)


# builders

def test_heisenberg_and_sl2_are_valid():
    assert check_axioms(library.heisenberg()).passed
    assert check_axioms(library.sl2()).passed


def test_jacobi_failure_names_the_triple():
    with pytest.raises(ValidationError) as info:
        build_lie_algebra(3, {(0, 1, 2): 1, (1, 2, 1): 1})
    assert "jacobi(1,2,3)" in str(info.value)
    assert info.value.report.violations[0].indices == (0, 1, 2)


def test_translation_action_differential():
    model = library.translation_action()
    x = Poly.var(1, 0)
    f = Cochain(1, 1, {(): x ** 3})
    assert algebroid_d(model, f) == Cochain(1, 1, {(0,): 3 * x ** 2})


def test_rotation_action_is_valid():
    assert check_axioms(library.rotation_action()).passed


def test_non_homomorphic_action_is_rejected():
    with pytest.raises(ValidationError) as info:
        library.non_homomorphic_action()
    assert info.value.witness == (0, 1)
    assert "(1,2)" in str(info.value)


def test_poisson_builder_examples():
    plane = library.symplectic_plane()
    one, zero = Poly.one(2), Poly.zero(2)
    assert plane.anchor == ((zero, one), (-one, zero))
    assert not plane.structure
    lin = library.linear_plane_poisson()
    assert lin.bracket(0, 1) == (one, zero)


def test_non_poisson_bivector_carries_trivector():
    with pytest.raises(NotPoissonError) as info:
        build_poisson_algebroid(library.NON_POISSON)
    assert info.value.trivector == Multivector(3, {(0, 1, 2): 2})


def test_non_homogeneous_data_is_rejected():
    x = Poly.var(1, 0)
    with pytest.raises(ValidationError):
        build_action_algebroid({}, 1, [[x + 1]])


# axiom checker

@pytest.mark.parametrize("name", library.AXIOM_SUITE)
def test_axiom_suite_passes(name):
    report = check_axioms(library.bundled(name))
    assert report.passed, report.summary()
    assert sum(report.checked.values()) > 0


@pytest.mark.parametrize("factory, kind, witness", [
    (library.corrupted_sl2, "jacobi", "-u1"),
    (library.jacobi_failing_rank3, "jacobi", "-u3"),
    (library.corrupted_poisson_plane, "anchor", None),
])
def test_corrupted_models_fail_with_witness(factory, kind, witness):
    report = check_axioms(factory())
    assert not report.passed
    first = report.violations[0]
    assert first.kind == kind
    assert first.witness
    if witness is not None:
        assert first.witness == witness


def test_axiom_window_is_reported():
    report = check_axioms(library.linear_plane_poisson(), window=4)
    assert report.window == 4
    assert "window 4" in report.summary()


# exterior derivative

def test_sl2_differentials():
    model = library.sl2()
    assert algebroid_d(model, gen(model, 0)) == -gen(model, 1, 2)
    assert algebroid_d(model, gen(model, 1)) == gen(model, 0, 1) * -2
    assert not algebroid_d(model, Cochain.constant(3, 0))


def test_top_degree_maps_to_zero():
    model = library.sl2()
    assert not algebroid_d(model, gen(model, 0, 1, 2))


@pytest.mark.parametrize("name", sorted(library.BUNDLED))
def test_d_squared_vanishes_on_basis(name):
    model = library.bundled(name)
    window = 6 if model.nvars < 3 else 4
    for omega in window_basis(model, 1, window):
        assert not algebroid_d(model, algebroid_d(model, omega)), str(omega)


@pytest.mark.parametrize("name", sorted(library.BUNDLED))
def test_intrinsic_formula_matches_derivation_assembly(name):
    model = library.bundled(name)
    for omega in window_basis(model, 1, 3):
        assert algebroid_d(model, omega) == derivation_d(model, omega)


@pytest.mark.parametrize("name", ["sl2_plane", "so2", "poisson_x1", "symplectic_plane",
                                  "lie_poisson_so3"])
def test_weight_homogeneity(name):
    model = library.bundled(name)
    for p in range(model.rank + 1):
        for w in range(4):
            for key in cochain_basis(model.rank, model.nvars, p, w):
                out = algebroid_d(model, basis_cochain(model.rank, model.nvars, 1, key))
                assert {wt for _, wt in out.bidegrees()} <= {w + model.shift}


@pytest.mark.parametrize("name", ["sl2_plane", "so2", "poisson_x1", "lie_poisson_so3"])
@given(data=st.data())
def test_graded_leibniz(name, data):
    model = library.bundled(name)
    p = data.draw(st.integers(0, model.rank))
    a = data.draw(cochains(model.rank, model.nvars, [p]))
    b = data.draw(cochains(model.rank, model.nvars))
    lhs = algebroid_d(model, wedge(a, b))
    rhs = wedge(algebroid_d(model, a), b) + wedge(a, algebroid_d(model, b)) * (-1) ** p
    assert lhs == rhs


@pytest.mark.parametrize("name", ["sl2_plane", "so2", "translation"])
def test_action_models_restrict_to_chevalley_eilenberg(name):
    model = library.bundled(name)
    constants = model.source["constants"]
    r, n = model.rank, model.nvars
    for p in range(r):
        mat = ce_matrix(r, constants, None, p)
        src, tgt = ext_indices(r, p), ext_indices(r, p + 1)
        for col, idx in enumerate(src):
            out = algebroid_d(model, Cochain(r, n, {idx: 1}))
            constant_part = {k: v[0].constant_term() for k, v in out.items()
                             if v[0].constant_term()}
            expected = {tgt[row]: mat[row][col] for row in range(len(tgt)) if mat[row][col]}
            assert constant_part == expected


def _schouten_sign(model, window):
    """Global sign eps with ``d = eps [pi, .]`` on every basis multivector, or None."""
    pi = model.source["pi"]
    n = model.nvars
    signs = set()
    for omega in window_basis(model, 1, window):
        mv = Multivector(n, {k: v[0] for k, v in omega.items()})
        bracket = multivector_to_cochain(schouten_bracket(pi, mv))
        d = algebroid_d(model, omega)
        if not bracket and not d:
            continue
        if d == bracket:
            signs.add(1)
        elif d == -bracket:
            signs.add(-1)
        else:
            return None
    return signs.pop() if len(signs) == 1 else None


@pytest.mark.parametrize("name", POISSON_MODELS)
def test_poisson_differential_is_plus_schouten(name):
    # with [X, f] = X(f) the cotangent differential is +[pi, .]; see the
    # acceptance suite for the opposite-sign identification
    model = library.bundled(name)
    assert _schouten_sign(model, 4 if model.nvars == 3 else 6) == 1


def test_symplectic_differential_by_hand():
    model = library.symplectic_plane()
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    f = x1 ** 2 * x2
    # (df)(dx1) = a(dx1) f = d2 f, (df)(dx2) = -d1 f
    expected = Cochain(2, 2, {(0,): x1 ** 2, (1,): -2 * x1 * x2})
    assert algebroid_d(model, Cochain(2, 2, {(): f})) == expected


def test_linear_poisson_structure_function():
    model = library.linear_plane_poisson()
    assert model.structure == {(0, 1): (Poly.one(2), Poly.zero(2))}
    assert Fraction(1) == model.bracket(0, 1)[0].constant_term()
