"""The twisted differential ``d_nabla + theta ^ .`` and the ``exp(Psi) ^ .`` conjugation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import List, Optional, Tuple

from .algebroid import AlgebroidModel, algebroid_d
from .errors import ValidationError
from .forms import Cochain, basis_cochain, cochain_basis, wedge
from .representations import Connection, cov_ext_d, is_flat


def _require_model(model: AlgebroidModel, form: Cochain, what: str):
    if form.m != 1:
        raise ValidationError(f"{what} must be scalar-valued")
    if (form.r, form.n) != (model.rank, model.nvars):
        raise ValidationError(f"{what} does not belong to the model")


def validate_theta(model: AlgebroidModel, theta: Cochain) -> Cochain:
    """Check ``theta`` is odd and closed; returns it or raises with ``d theta`` as witness."""
    _require_model(model, theta, "theta")
    if theta.parity() not in ("odd", "zero"):
        raise ValidationError(f"theta must be odd, got degrees {sorted(theta.degrees())}",
                              witness=theta)
    dtheta = algebroid_d(model, theta)
    if dtheta:
        raise ValidationError(f"theta is not closed: d theta = {dtheta}", witness=dtheta)
    return theta


def validate_psi(model: AlgebroidModel, psi: Cochain) -> Cochain:
    _require_model(model, psi, "psi")
    if psi.parity() not in ("even", "zero"):
        raise ValidationError(f"psi must be even, got degrees {sorted(psi.degrees())}",
                              witness=psi)
    if psi.component(0):
        raise ValidationError("psi must have zero degree-0 component", witness=psi.component(0))
    return psi


def require_flat(conn: Connection):
    flat = is_flat(conn)
    if not flat:
        raise ValidationError(f"connection is {flat.describe()}", witness=flat)


def raw_twisted_d(conn: Connection, theta: Cochain, omega: Cochain) -> Cochain:
    """``d_nabla omega + theta ^ omega`` without any validation."""
    out = cov_ext_d(conn, omega)
    if theta:
        out = out + wedge(theta, omega)
    return out


class TwistedDifferential:
    """``d_nabla[theta]`` with flatness and closedness checked once, up front."""

    def __init__(self, conn: Connection, theta: Optional[Cochain] = None):
        model = conn.model
        if theta is None:
            theta = Cochain.zero(model.rank, model.nvars)
        require_flat(conn)
        validate_theta(model, theta)
        self.conn = conn
        self.theta = theta

    @property
    def model(self) -> AlgebroidModel:
        return self.conn.model

    def __call__(self, omega: Cochain) -> Cochain:
        return raw_twisted_d(self.conn, self.theta, omega)


def twisted_d(conn: Connection, theta: Cochain, omega: Cochain) -> Cochain:
    return TwistedDifferential(conn, theta)(omega)


def window_basis(model: AlgebroidModel, m: int, window: int) -> List[Cochain]:
    """All basis cochains ``x^a e^I (x) v_b`` of polynomial degree at most ``window``."""
    r, n = model.rank, model.nvars
    top = 0 if n == 0 else window
    out = []
    for w in range(top + 1):
        for p in range(r + 1):
            out.extend(basis_cochain(r, n, m, key) for key in cochain_basis(r, n, p, w, m))
    return out


@dataclass
class SquareZeroReport:
    checked: int
    closed: bool
    nonzero: List[Tuple[Cochain, Cochain]] = field(default_factory=list)
    matches_dtheta: bool = True

    @property
    def square_zero(self) -> bool:
        return not self.nonzero


def check_square_zero(conn: Connection, theta: Cochain, window: Optional[int] = None) -> SquareZeroReport:
    """Apply the twisted differential twice to every basis cochain in the window.

    ``theta`` need not be closed here; then the squares are compared against
    ``d theta ^ omega``.
    """
    require_flat(conn)
    model = conn.model
    _require_model(model, theta, "theta")
    window = model.default_window() if window is None else window
    dtheta = algebroid_d(model, theta)
    report = SquareZeroReport(checked=0, closed=not dtheta)
    for omega in window_basis(model, conn.rank, window):
        report.checked += 1
        sq = raw_twisted_d(conn, theta, raw_twisted_d(conn, theta, omega))
        if sq:
            report.nonzero.append((omega, sq))
        if sq != wedge(dtheta, omega):
            report.matches_dtheta = False
    return report


def exp_form(psi: Cochain) -> Cochain:
    """``exp(Psi) = sum_k Psi^k / k!``; the series stops by nilpotency."""
    if psi.component(0):
        raise ValidationError("exp of a form with nonzero degree-0 part is not exact",
                              witness=psi.component(0))
    result = Cochain.constant(psi.r, psi.n, 1)
    power = Cochain.constant(psi.r, psi.n, 1)
    k = 0
    while True:
        k += 1
        power = wedge(power, psi)
        if not power:
            break
        result = result + power * Fraction(1, factorial(k))
    return result


def exp_wedge(psi: Cochain, omega: Cochain) -> Cochain:
    if psi.parity() not in ("even", "zero"):
        raise ValidationError("exp_wedge needs an even form")
    return wedge(exp_form(psi), omega)


@dataclass
class ConjugationReport:
    checked: int
    exp_derivative_ok: bool
    failures: List[Tuple[Cochain, Cochain, Cochain]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.exp_derivative_ok and not self.failures


def verify_conjugation(conn: Connection, theta: Cochain, psi: Cochain,
                       window: Optional[int] = None) -> ConjugationReport:
    """Check ``d[theta](exp(Psi) ^ w) == exp(Psi) ^ d[theta + dPsi](w)`` on a basis.

    Also checks ``d exp(Psi) == exp(Psi) ^ dPsi``.
    """
    model = conn.model
    require_flat(conn)
    validate_theta(model, theta)
    validate_psi(model, psi)
    window = model.default_window() if window is None else window
    dpsi = algebroid_d(model, psi)
    e = exp_form(psi)
    report = ConjugationReport(checked=0,
                               exp_derivative_ok=algebroid_d(model, e) == wedge(e, dpsi))
    shifted = theta + dpsi
    for omega in window_basis(model, conn.rank, window):
        report.checked += 1
        lhs = raw_twisted_d(conn, theta, wedge(e, omega))
        rhs = wedge(e, raw_twisted_d(conn, shifted, omega))
        if lhs != rhs:
            report.failures.append((omega, lhs, rhs))
    return report
