"""Bundled example models and deliberately broken variants."""

from __future__ import annotations

from typing import Callable, Dict

from .algebroid import (LIE_ALGEBRA, POISSON, AlgebroidModel, build_action_algebroid,
                        build_lie_algebra, build_poisson_algebroid,
                        constants_to_structure, make_model)
from .cartan import Multivector
from .forms import Cochain
from .poly import Poly
from .representations import Connection, scalar_connection

# generator order for sl2 is (h, e, f)
SL2_CONSTANTS = {(0, 1, 1): 2, (0, 2, 2): -2, (1, 2, 0): 1}
HEISENBERG_CONSTANTS = {(0, 1, 2): 1}


def sl2() -> AlgebroidModel:
    return build_lie_algebra(3, SL2_CONSTANTS, "sl2")


def heisenberg() -> AlgebroidModel:
    return build_lie_algebra(3, HEISENBERG_CONSTANTS, "h3")


def heisenberg_plus_line() -> AlgebroidModel:
    """``h3 (+) R`` with the extra generator ``e4`` central."""
    return build_lie_algebra(4, HEISENBERG_CONSTANTS, "h3r")


def abelian(r: int) -> AlgebroidModel:
    return build_lie_algebra(r, {}, f"abelian{r}")


def rotation_action() -> AlgebroidModel:
    """``so(2)`` acting on the plane by ``x2*d1 - x1*d2``."""
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    return build_action_algebroid({}, 2, [[x2, -x1]], "so2")


def translation_action() -> AlgebroidModel:
    """``R`` acting on the line by ``d1``."""
    return build_action_algebroid({}, 1, [[1]], "translation")


def sl2_plane_action() -> AlgebroidModel:
    """Linear ``sl2`` action on the plane, ``A -> -(A x) . d``."""
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    z = Poly.zero(2)
    fields = [[-x1, x2], [-x2, z], [z, -x1]]
    return build_action_algebroid(SL2_CONSTANTS, 2, fields, "sl2_plane")


def poisson(terms: dict, n: int, name: str) -> AlgebroidModel:
    return build_poisson_algebroid(Multivector(n, terms), name)


def symplectic_plane() -> AlgebroidModel:
    return poisson({(0, 1): 1}, 2, "symplectic_plane")


def linear_plane_poisson() -> AlgebroidModel:
    return poisson({(0, 1): Poly.var(2, 0)}, 2, "poisson_x1")


def constant_poisson_r3() -> AlgebroidModel:
    """``d1^d2`` on R^3; ``x3`` is a Casimir direction."""
    return poisson({(0, 1): 1}, 3, "poisson_r3")


def lie_poisson_so3() -> AlgebroidModel:
    x1, x2, x3 = (Poly.var(3, k) for k in range(3))
    return poisson({(0, 1): x3, (1, 2): x1, (0, 2): -x2}, 3, "lie_poisson_so3")


BUNDLED: Dict[str, Callable[[], AlgebroidModel]] = {
    "sl2": sl2,
    "h3": heisenberg,
    "h3r": heisenberg_plus_line,
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
    "so2": rotation_action,
    "translation": translation_action,
    "sl2_plane": sl2_plane_action,
    "symplectic_plane": symplectic_plane,
    "poisson_x1": linear_plane_poisson,
    "poisson_r3": constant_poisson_r3,
    "lie_poisson_so3": lie_poisson_so3,
}

# models named in the axiom acceptance suite
AXIOM_SUITE = ("sl2", "h3", "h3r", "abelian3", "so2", "symplectic_plane", "poisson_x1")


def bundled(name: str) -> AlgebroidModel:
    try:
        return BUNDLED[name]()
    except KeyError:
        raise KeyError(f"no bundled model {name!r}; choose from {', '.join(BUNDLED)}") from None


# broken variants (unvalidated; check_axioms must reject them)

def corrupted_sl2() -> AlgebroidModel:
    """sl2 with ``[h, f] = -3 f``: Jacobi on (h, e, f) leaves ``h``."""
    constants = dict(SL2_CONSTANTS)
    constants[(0, 2, 2)] = -3
    return make_model(LIE_ALGEBRA, 3, 0, [()] * 3, constants_to_structure(3, 0, constants),
                      "sl2_corrupted")


def jacobi_failing_rank3() -> AlgebroidModel:
    """``[e1, e2] = e3, [e2, e3] = e2``; the Jacobi sum on (e1, e2, e3) is ``e3``."""
    constants = {(0, 1, 2): 1, (1, 2, 1): 1}
    return make_model(LIE_ALGEBRA, 3, 0, [()] * 3, constants_to_structure(3, 0, constants),
                      "jacobi_failing")


def corrupted_poisson_plane() -> AlgebroidModel:
    """``x1 d1^d2`` data with the structure function dropped: anchor is no longer a morphism."""
    x1 = Poly.var(2, 0)
    z = Poly.zero(2)
    return make_model(POISSON, 2, 2, [(z, x1), (-x1, z)], {}, "poisson_x1_corrupted")


NON_POISSON = Multivector(3, {(0, 1): 1, (1, 2): Poly.var(3, 1)})


def sl2_scalar_h_connection(model: AlgebroidModel) -> Connection:
    """``nabla_u = h*(u)``: curvature ``F(e, f) = -1``, not flat."""
    return scalar_connection(model, Cochain.generator(3, 0, 0), "h-dual")


def non_homomorphic_action():
    """``R^2`` acting on the line by ``d1, x1*d1``; raises ValidationError on (1, 2)."""
    return build_action_algebroid({}, 1, [[1], [Poly.var(1, 0)]], "bad_action")
