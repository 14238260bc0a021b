"""Exact (twisted) Lie algebroid cohomology for polynomial models."""

from .algebroid import (AlgebroidModel, algebroid_d, build_action_algebroid,
                        build_lie_algebra, build_poisson_algebroid, check_axioms)
from .cartan import (Multivector, derham_d, interior_product, lie_derivative,
                     schouten_bracket)
from .cohomology import (BettiReport, Cohomology, ComplexSpec, betti, cup_product,
                         make_spec, module_action, verify_twist_invariance,
                         weight_lines)
from .errors import (InvariantViolation, NotPoissonError, ParseError, TwistcohError,
                     ValidationError, WindowOverflowError)
from .forms import Cochain, wedge
from .linalg import rank_and_kernel
from .poly import Poly
from .representations import (Connection, adjoint_connection, build_connection,
                              cov_ext_d, curvature, is_flat, trivial_connection)
from .twisted import (check_square_zero, exp_wedge, twisted_d,
                      verify_conjugation)

__version__ = "0.1.0"

__all__ = [
    "AlgebroidModel", "BettiReport", "Cochain", "Cohomology", "ComplexSpec", "Connection",
    "InvariantViolation", "Multivector", "NotPoissonError", "ParseError", "Poly",
    "TwistcohError", "ValidationError", "WindowOverflowError", "adjoint_connection",
    "algebroid_d", "betti", "build_action_algebroid", "build_connection",
    "build_lie_algebra", "build_poisson_algebroid", "check_axioms", "check_square_zero",
    "cov_ext_d", "cup_product", "curvature", "derham_d", "exp_wedge", "interior_product",
    "is_flat", "lie_derivative", "make_spec", "module_action", "rank_and_kernel",
    "schouten_bracket", "trivial_connection", "twisted_d", "verify_conjugation",
    "verify_twist_invariance", "wedge", "weight_lines",
]
