from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from twistcoh.forms import Cochain, ext_indices
from twistcoh.poly import Poly, monomials

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture
def models_dir() -> Path:
    return MODELS_DIR


rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))
nonzero_rationals = rationals.filter(bool)


@st.composite
def polys(draw, n: int, max_degree: int = 2, max_terms: int = 3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        degree = draw(st.integers(0, max_degree)) if n else 0
        exp = draw(st.sampled_from(monomials(n, degree)))
        terms[exp] = draw(rationals)
    return Poly(n, terms)


@st.composite
def cochains(draw, r: int, n: int, degrees=None, max_degree: int = 2, m: int = 1):
    """Scalar or V-valued cochain supported in the given form degrees."""
    degrees = range(r + 1) if degrees is None else degrees
    terms = {}
    for p in degrees:
        for idx in ext_indices(r, p):
            if draw(st.booleans()):
                terms[idx] = tuple(draw(polys(n, max_degree, 2)) for _ in range(m))
    return Cochain(r, n, terms, m)


def perturb(coh, cls, rng):
    """Representative of ``cls`` plus a random coboundary from the same cell."""
    rep = cls.representative
    pre = coh.ctx.pred(cls.cell)
    if pre is None or not coh.ctx.basis(pre):
        return rep
    vec = {i: Fraction(rng.randint(-3, 3)) for i in range(len(coh.ctx.basis(pre)))
           if rng.random() < 0.5}
    return rep + coh.ctx.apply(coh.cochain_from(pre, {i: v for i, v in vec.items() if v}))


def all_classes(coh):
    out = []
    for key in coh.window_cells():
        out.extend(coh.basis_classes(key))
    return out
