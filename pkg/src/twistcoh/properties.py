"""Seeded randomized identity checks on a model (the ``properties`` command)."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .algebroid import AlgebroidModel, algebroid_d
from .forms import Cochain, ext_indices, wedge
from .poly import Poly, monomials
from .representations import Connection, cov_ext_d
from .twisted import exp_form, raw_twisted_d


@dataclass
class PropertyResult:
    name: str
    trials: int
    failures: int
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def random_poly(rng: random.Random, n: int, max_weight: int, terms: int = 2,
                weight: Optional[int] = None) -> Poly:
    out = Poly.zero(n)
    for _ in range(terms):
        w = weight if weight is not None else rng.randint(0, max_weight if n else 0)
        monos = monomials(n, w if n else 0)
        if not monos:
            continue
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        out = out + Poly.monomial(rng.choice(monos), c)
    return out


def random_cochain(rng: random.Random, model: AlgebroidModel, degrees, max_weight: int = 2,
                   m: int = 1, density: float = 0.5) -> Cochain:
    r, n = model.rank, model.nvars
    terms = {}
    for p in degrees:
        if not 0 <= p <= r:
            continue
        for idx in ext_indices(r, p):
            if rng.random() < density:
                terms[idx] = tuple(random_poly(rng, n, max_weight) for _ in range(m))
    return Cochain(r, n, terms, m)


def run_properties(model: AlgebroidModel, conn: Connection, theta: Optional[Cochain],
                   seed: int = 0, trials: int = 20, max_weight: int = 2) -> List[PropertyResult]:
    rng = random.Random(seed)
    r = model.rank
    theta = theta if theta is not None else Cochain.zero(r, model.nvars)
    results = []

    def check(name, fn):
        res = PropertyResult(name, trials, 0)
        for _ in range(trials):
            bad = fn()
            if bad is not None:
                res.failures += 1
                if res.witness is None:
                    res.witness = bad
        results.append(res)

    degrees = range(r + 1)

    def d_squared():
        w = random_cochain(rng, model, degrees, max_weight, conn.rank)
        sq = raw_twisted_d(conn, theta, raw_twisted_d(conn, theta, w))
        return None if not sq else f"d^2({w}) = {sq}"

    def leibniz():
        p, q = rng.randint(0, r), rng.randint(0, r)
        a = random_cochain(rng, model, [p], max_weight)
        b = random_cochain(rng, model, [q], max_weight)
        lhs = algebroid_d(model, wedge(a, b))
        rhs = wedge(algebroid_d(model, a), b) + wedge(a, algebroid_d(model, b)) * (-1) ** p
        return None if lhs == rhs else f"a = {a}, b = {b}"

    def module_leibniz():
        p = rng.randint(0, r)
        a = random_cochain(rng, model, [p], max_weight)
        w = random_cochain(rng, model, degrees, max_weight, conn.rank)
        lhs = cov_ext_d(conn, wedge(a, w))
        rhs = wedge(algebroid_d(model, a), w) + wedge(a, cov_ext_d(conn, w)) * (-1) ** p
        return None if lhs == rhs else f"a = {a}, w = {w}"

    def commutativity():
        p, q = rng.randint(0, r), rng.randint(0, r)
        a = random_cochain(rng, model, [p], max_weight)
        b = random_cochain(rng, model, [q], max_weight)
        return None if wedge(a, b) == wedge(b, a) * (-1) ** (p * q) else f"a = {a}, b = {b}"

    def conjugation():
        psi = random_cochain(rng, model, range(2, r + 1, 2), 1, density=0.4)
        w = random_cochain(rng, model, degrees, max_weight, conn.rank)
        e = exp_form(psi)
        shifted = theta + algebroid_d(model, psi)
        lhs = raw_twisted_d(conn, theta, wedge(e, w))
        rhs = wedge(e, raw_twisted_d(conn, shifted, w))
        return None if lhs == rhs else f"psi = {psi}, w = {w}"

    def exp_inverse():
        psi = random_cochain(rng, model, range(2, r + 1, 2), 1, density=0.4)
        w = random_cochain(rng, model, degrees, max_weight, conn.rank)
        back = wedge(exp_form(-psi), wedge(exp_form(psi), w))
        return None if back == w else f"psi = {psi}"

    check("twisted_d_squared_zero", d_squared)
    check("graded_leibniz", leibniz)
    check("module_leibniz", module_leibniz)
    check("wedge_graded_commutative", commutativity)
    check("exp_conjugation", conjugation)
    check("exp_inverse", exp_inverse)
    return results
