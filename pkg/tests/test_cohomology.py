import random

import pytest
from hypothesis import given, strategies as st

from conftest import all_classes, perturb
from oracles import ce_betti, ce_twisted_betti, derham_betti_by_line
from twistcoh import library
from twistcoh.algebroid import algebroid_d
from twistcoh.cohomology import (DEGREE, PARITY, Cohomology, CohomologyClass, Grading,
                                 class_vector,
                                 cup_product, find_grading, make_spec, module_action,
                                 operator_shifts, scalar_cohomology, verify_twist_invariance,
                                 weight_lines)
from twistcoh.errors import ValidationError, WindowOverflowError
from twistcoh.forms import Cochain, wedge
from twistcoh.linalg import brute_rank, dense
from twistcoh.poly import Poly
from twistcoh.properties import random_cochain
from twistcoh.representations import adjoint_connection, cov_ext_d, trivial_connection
from twistcoh.twisted import raw_twisted_d


def g(r, *idx):
    return Cochain.generator(r, 0, *idx)


def spec_for(name, theta=None, window=4, mode=None):
    return make_spec(trivial_connection(library.bundled(name)), theta, window, mode)


# Betti numbers

@pytest.mark.parametrize("name, constants, expected", [
    ("sl2", library.SL2_CONSTANTS, (1, 0, 0, 1)),
    ("h3", library.HEISENBERG_CONSTANTS, (1, 2, 2, 1)),
    ("abelian3", {}, (1, 3, 3, 1)),
])
def test_lie_algebra_betti(name, constants, expected):
    assert ce_betti(3, constants) == expected
    assert Cohomology(spec_for(name)).report().totals() == expected


def test_heisenberg_plus_line_against_oracle():
    got = Cohomology(spec_for("h3r")).report().totals()
    assert got == ce_betti(4, library.HEISENBERG_CONSTANTS) == (1, 3, 4, 3, 1)


def test_adjoint_sl2_vanishes():
    spec = make_spec(adjoint_connection(library.sl2()))
    assert Cohomology(spec).report().totals() == (0, 0, 0, 0)


def test_twisted_abelian_plane_vanishes():
    rep = Cohomology(spec_for("abelian2", g(2, 0))).report()
    assert rep.mode == PARITY
    assert rep.totals() == (0, 0)
    assert ce_twisted_betti(2, {}, {(0,): 1}) == (0, 0)


def test_sl2_top_form_twist_kills_everything():
    rep = Cohomology(spec_for("sl2", g(3, 0, 1, 2))).report()
    assert rep.totals() == ce_twisted_betti(3, library.SL2_CONSTANTS, {(0, 1, 2): 1}) == (0, 0)


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_twisted_h3r_against_oracle(coeffs):
    # closed 1-forms of h3 (+) R: combinations of e1, e2, e4; plus the closed 3-form e1^e2^e3
    theta_terms = {(0,): coeffs[0], (1,): coeffs[1], (3,): coeffs[2], (0, 1, 2): coeffs[3]}
    theta = Cochain(4, 0, {k: v for k, v in theta_terms.items()})
    assert not algebroid_d(library.heisenberg_plus_line(), theta)
    if not theta:
        return
    rep = Cohomology(spec_for("h3r", theta)).report()
    assert rep.totals() == ce_twisted_betti(4, library.HEISENBERG_CONSTANTS, theta_terms)


def test_symplectic_plane_matches_de_rham_oracle():
    coh = Cohomology(spec_for("symplectic_plane", window=5))
    rep = coh.report()
    oracle = derham_betti_by_line(2, 7)
    assert rep.totals() == (1, 0, 0)
    for e in rep.entries:
        # G = w + p, matching the de Rham split by weight + degree
        assert e.betti == oracle[e.cell[0]][e.grade]


def test_so2_lines_are_pairs_of_monomial_spaces():
    coh = Cohomology(spec_for("so2", window=3))
    for label, cells in coh.lines():
        assert cells == [(label, 0), (label, 1)]
        assert [len(coh.ctx.basis(k)) for k in cells] == [label + 1, label + 1]


def test_symplectic_line_weights_step_down():
    coh = Cohomology(spec_for("symplectic_plane", window=4))
    assert str(coh.spec.grading) == "G = w + p (shift 0)"
    for label, cells in coh.lines():
        weights = [label - p for _, p in cells]
        assert weights == list(range(label, label - len(cells), -1))


def test_point_base_is_a_single_line():
    coh = Cohomology(spec_for("sl2"))
    assert len(coh.lines()) == 1


@pytest.mark.parametrize("name", ["so2", "symplectic_plane", "poisson_x1", "sl2_plane"])
def test_line_matrices_compose_to_zero(name):
    for _, items in weight_lines(spec_for(name, window=3)):
        cols = {k: (tgt, c) for k, dim, tgt, c in items}
        for k, (tgt, c) in cols.items():
            if tgt is None or tgt not in cols or cols[tgt][0] is None:
                continue
            tgt2, c2 = cols[tgt]
            for vec in c:
                image = {}
                for i, v in vec.items():
                    for j, x in c2[i].items():
                        image[j] = image.get(j, 0) + v * x
                assert not any(image.values())


@pytest.mark.parametrize("name", sorted(library.BUNDLED))
def test_lines_cover_window_once(name):
    coh = Cohomology(spec_for(name, window=3))
    window = coh.window_cells()
    seen = [k for _, cells in coh.lines() for k in cells if k in set(window)]
    assert sorted(seen, key=str) == sorted(window, key=str)


@pytest.mark.parametrize("name", sorted(library.BUNDLED))
def test_euler_identity_and_representatives(name):
    coh = Cohomology(spec_for(name, window=3))
    rep = coh.report()
    assert all(line.euler_ok for line in rep.lines)
    for e in rep.entries:
        assert e.dim >= 0 and e.betti >= 0
        for c in e.representatives:
            assert not coh.ctx.apply(c)
        res = coh.cell(e.cell)
        stacked = [dense(v, res.dim) for v in res.image + res.representatives]
        assert brute_rank(stacked) == res.rank_in + res.betti


def test_engine_ranks_match_brute_force():
    coh = Cohomology(spec_for("sl2"))
    for label, cells in coh.lines():
        for k in cells:
            res = coh.cell(k)
            nxt = coh.ctx.succ(k)
            if nxt is None:
                continue
            cols = coh.ctx.columns(k, nxt)
            n_rows = len(coh.ctx.basis(nxt))
            mat = [[col.get(i, 0) for col in cols] for i in range(n_rows)]
            assert brute_rank(mat) == res.rank_out


def test_parity_collapse_matches_degree_computation():
    for name in sorted(library.BUNDLED):
        deg = Cohomology(spec_for(name, window=3)).report().totals()
        par = Cohomology(spec_for(name, window=3, mode=PARITY)).report().totals()
        assert par == (sum(deg[0::2]), sum(deg[1::2])), name


def test_nonzero_twist_needs_parity_mode():
    with pytest.raises(ValidationError):
        spec_for("abelian2", g(2, 0), mode=DEGREE)


# gradings

def test_find_grading_examples():
    assert find_grading({(1, 0)}) == Grading(1, 0, 0)
    assert find_grading({(1, -1)}) == Grading(1, 1, 0)
    assert find_grading({(1, 1), (1, 2)}) is None


def test_r_twist_grading():
    model = library.constant_poisson_r3()
    theta = Cochain(3, 3, {(0, 1, 2): 1})
    shifts = operator_shifts(trivial_connection(model), theta)
    assert shifts == {(1, -1), (3, 0)}
    grading = find_grading(shifts, {(2, 1)})
    assert str(grading) == "G = 2*w - p (shift -3)"


def test_window_overflow_without_grading():
    model = library.poisson({(0, 1): Poly.var(2, 0) * Poly.var(2, 1)}, 2, "quad")
    spec = make_spec(trivial_connection(model), None, 3, grading=None)
    with pytest.raises(WindowOverflowError):
        Cohomology(spec).report()
    graded = make_spec(trivial_connection(model), None, 3)
    assert graded.grading is not None
    Cohomology(graded).report()


def test_window_check_flags_fallback_entries():
    model = library.constant_poisson_r3()
    spec = make_spec(trivial_connection(model), Cochain(3, 3, {(0, 1, 2): 1}), 3, grading=None)
    rep = Cohomology(spec).report(window_check=True)
    assert rep.window_checked
    assert all(not e.certified for e in rep.entries)
    plain = Cohomology(spec).report()
    assert all(not e.stable for e in plain.entries)


# classes and products

def test_cup_product_examples():
    ab = scalar_cohomology(library.abelian(2))
    e1, e2 = ab.class_of(g(2, 0)), ab.class_of(g(2, 1))
    prod = cup_product(e1, e2)
    assert not prod.is_zero()
    assert prod.representative == g(2, 0, 1) or ab.class_of(g(2, 0, 1)) == prod
    sl2 = scalar_cohomology(library.sl2())
    unit, top = sl2.class_of(Cochain.constant(3, 0)), sl2.class_of(g(3, 0, 1, 2))
    assert cup_product(unit, top) == top
    assert cup_product(top, top).is_zero()


def test_cup_product_rejects_twisted_or_foreign_classes():
    ab = scalar_cohomology(library.abelian(2))
    other = scalar_cohomology(library.abelian(3))
    with pytest.raises(ValueError):
        cup_product(ab.class_of(g(2, 0)), other.class_of(g(3, 1)))
    twisted = Cohomology(spec_for("sl2", g(3, 0, 1, 2)))
    base = scalar_cohomology(library.sl2())
    unit = base.class_of(Cochain.constant(3, 0))
    with pytest.raises(ValueError):
        cup_product(CohomologyClass(twisted, (None, 0), ()), unit)


def test_module_action_examples():
    sl2 = scalar_cohomology(library.sl2())
    unit = sl2.class_of(Cochain.constant(3, 0))
    top = sl2.class_of(g(3, 0, 1, 2))
    assert module_action(top, unit) == top
    for cls in all_classes(sl2):
        assert module_action(unit, cls) == cls
    base = scalar_cohomology(library.abelian(2))
    twisted = Cohomology(spec_for("abelian2", g(2, 0)))
    twisted.compute_all()
    zero = twisted.basis_classes((None, 0))
    assert zero == [] and twisted.cell((None, 0)).betti == 0
    e2 = base.class_of(g(2, 1))
    out = module_action(e2, CohomologyClass(twisted, (None, 0), ()))
    assert out.is_zero()


def test_cup_product_well_defined_on_h3():
    model = library.heisenberg()
    coh = scalar_cohomology(model)
    rng = random.Random(7)
    basis = all_classes(coh)
    for _ in range(30):
        a, b = rng.choice(basis), rng.choice(basis)
        pa, pb = perturb(coh, a, rng), perturb(coh, b, rng)
        assert class_vector(coh, wedge(pa, pb)) == class_vector(coh, wedge(a.representative,
                                                                            b.representative))


# twist invariance

def test_twist_invariance_zero_psi():
    spec = spec_for("h3r", g(4, 3))
    rep = verify_twist_invariance(spec, Cochain.zero(4, 0))
    assert rep.isomorphic
    assert rep.betti_theta.dims_signature() == rep.betti_shifted.dims_signature()


def test_twist_invariance_heisenberg_plus_line():
    rep = verify_twist_invariance(spec_for("h3r", g(4, 3)), g(4, 2, 3))
    assert rep.isomorphic and rep.class_map_checked
    assert rep.betti_theta.totals() == rep.betti_shifted.totals()


def test_twist_invariance_closed_psi():
    rep = verify_twist_invariance(spec_for("abelian2", g(2, 0)), g(2, 0, 1))
    assert rep.isomorphic
    assert rep.betti_theta.dims_signature() == rep.betti_shifted.dims_signature()


def test_twist_invariance_r_twist():
    model = library.constant_poisson_r3()
    spec = make_spec(trivial_connection(model), Cochain(3, 3, {(0, 1, 2): 1}), 3)
    psi = Cochain(3, 3, {(0, 2): Poly.var(3, 0)})
    rep = verify_twist_invariance(spec, psi)
    assert rep.isomorphic
    assert rep.betti_theta.totals() == rep.betti_shifted.totals() == (3, 3)


def test_twist_invariance_with_adjoint_coefficients():
    conn = adjoint_connection(library.sl2())
    spec = make_spec(conn, g(3, 0, 1, 2))
    rep = verify_twist_invariance(spec, g(3, 0, 1) + g(3, 1, 2))
    assert rep.isomorphic


def test_parallel_matches_sequential():
    spec = spec_for("symplectic_plane", window=5)
    seq = Cohomology(spec).report(parallel=False)
    par = Cohomology(spec).report(parallel=True)
    assert seq.dims_signature() == par.dims_signature()
    assert [str(c) for e in seq.entries for c in e.representatives] == \
        [str(c) for e in par.entries for c in e.representatives]


def test_random_cochain_helper_respects_degrees():
    rng = random.Random(0)
    model = library.sl2_plane_action()
    c = random_cochain(rng, model, [1], 2)
    assert c.degrees() <= {1}
    assert cov_ext_d(trivial_connection(model), c) == raw_twisted_d(
        trivial_connection(model), Cochain.zero(3, 2), c)
