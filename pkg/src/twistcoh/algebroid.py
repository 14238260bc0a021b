"""Finite models of Lie algebroids on free modules over R^n.

A model has generators ``u_0 .. u_{r-1}`` of the section module, an anchor
vector field for each generator and structure functions ``c_ij^k`` with
``[u_i, u_j] = sum_k c_ij^k u_k``.  Brackets of arbitrary sections are always
derived from the Leibniz rule.  Generator and coordinate indices are 0-based
in the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cartan import Multivector, apply_field, field_bracket, schouten_bracket
from .errors import NotPoissonError, ValidationError
from .forms import Cochain, _join_terms, _term_text, ext_indices
from .poly import Poly, as_fraction, monomials

Section = Tuple[Poly, ...]

LIE_ALGEBRA = "lie_algebra"
ACTION = "action"
POISSON = "poisson"
KINDS = (LIE_ALGEBRA, ACTION, POISSON)


@dataclass(frozen=True, eq=False)
class AlgebroidModel:
    kind: str
    rank: int
    nvars: int
    anchor: Tuple[Tuple[Poly, ...], ...]
    structure: Dict[Tuple[int, int], Tuple[Poly, ...]]
    shift: int = 0
    name: str = ""
    # optional provenance kept for canonical printing
    source: dict = field(default_factory=dict, repr=False)

    def bracket(self, i: int, j: int) -> Section:
        """Structure functions of ``[u_i, u_j]``."""
        if i == j:
            return self.zero_section()
        if i < j:
            return self.structure.get((i, j), self.zero_section())
        return tuple(-c for c in self.structure.get((j, i), self.zero_section()))

    def same_structure(self, other: "AlgebroidModel") -> bool:
        """Equality of the mathematical data (names and provenance ignored)."""
        return (self.kind, self.rank, self.nvars, self.anchor, self.structure) == \
            (other.kind, other.rank, other.nvars, other.anchor, other.structure)

    def zero_section(self) -> Section:
        return (Poly.zero(self.nvars),) * self.rank

    def generator(self, i: int) -> Section:
        z = Poly.zero(self.nvars)
        return tuple(Poly.one(self.nvars) if k == i else z for k in range(self.rank))

    def anchor_apply(self, i: int, f: Poly) -> Poly:
        return apply_field(self.anchor[i], f)

    def anchor_of(self, section: Sequence[Poly]) -> Tuple[Poly, ...]:
        n = self.nvars
        out = [Poly.zero(n)] * n
        for coeff, field_i in zip(section, self.anchor):
            if coeff:
                out = [a + coeff * b for a, b in zip(out, field_i)]
        return tuple(out)

    def section_bracket(self, x: Sequence[Poly], y: Sequence[Poly]) -> Section:
        """Bracket of arbitrary sections via bilinearity and the Leibniz rules."""
        r = self.rank
        out = list(self.zero_section())
        ax, ay = self.anchor_of(x), self.anchor_of(y)
        for a in range(r):
            if not x[a]:
                continue
            for b in range(r):
                if not y[b] or a == b:
                    continue
                coeff = x[a] * y[b]
                for k, c in enumerate(self.bracket(a, b)):
                    if c:
                        out[k] = out[k] + coeff * c
        for b in range(r):
            if y[b]:
                out[b] = out[b] + apply_field(ax, y[b])
        for a in range(r):
            if x[a]:
                out[a] = out[a] - apply_field(ay, x[a])
        return tuple(out)

    def structure_degree(self) -> int:
        degs = [p.degree() for f in self.anchor for p in f]
        degs += [p.degree() for s in self.structure.values() for p in s]
        return max(degs + [0])

    def default_window(self) -> int:
        return self.structure_degree() + 2

    def describe(self) -> str:
        return format_model(self)


def _shift_of(rank, nvars, anchor, structure) -> int:
    shifts = set()
    for i, fld in enumerate(anchor):
        for k, p in enumerate(fld):
            if not p:
                continue
            if not p.is_homogeneous():
                raise ValidationError(
                    f"anchor of u{i + 1} component d{k + 1} is not weight-homogeneous: {p}",
                    witness=("anchor", i, k))
            shifts.add(p.degree() - 1)
    for (i, j), vals in structure.items():
        for k, p in enumerate(vals):
            if not p:
                continue
            if not p.is_homogeneous():
                raise ValidationError(
                    f"structure function c[{i + 1},{j + 1}]^{k + 1} is not weight-homogeneous: {p}",
                    witness=("structure", i, j, k))
            shifts.add(p.degree())
    if len(shifts) > 1:
        raise ValidationError(f"structure data has non-uniform weight shifts {sorted(shifts)}",
                              witness=("shift", tuple(sorted(shifts))))
    return shifts.pop() if shifts else 0


def make_model(kind: str, rank: int, nvars: int, anchor, structure, name: str = "",
               source: Optional[dict] = None) -> AlgebroidModel:
    """Assemble a model without checking the algebroid axioms.

    Only the weight grading is checked here (it is needed to define the
    shift).  Use the ``build_*`` functions for validated models.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    if rank < 0 or nvars < 0:
        raise ValueError("rank and variable count must be non-negative")
    anchor = tuple(tuple(_as_poly(nvars, p) for p in fld) for fld in anchor)
    if len(anchor) != rank or any(len(f) != nvars for f in anchor):
        raise ValueError("anchor must be rank x nvars")
    clean = {}
    for (i, j), vals in structure.items():
        vals = tuple(_as_poly(nvars, p) for p in vals)
        if len(vals) != rank:
            raise ValueError(f"structure functions of ({i},{j}) must have {rank} entries")
        if i == j:
            if any(vals):
                raise ValidationError(f"[u{i + 1}, u{i + 1}] must vanish")
            continue
        if i > j:
            i, j, vals = j, i, tuple(-v for v in vals)
        if not (0 <= i < rank and 0 <= j < rank):
            raise ValueError(f"generator pair ({i},{j}) out of range")
        if (i, j) in clean:
            raise ValueError(f"bracket of ({i},{j}) given twice")
        if any(vals):
            clean[(i, j)] = vals
    shift = _shift_of(rank, nvars, anchor, clean)
    return AlgebroidModel(kind, rank, nvars, anchor, clean, shift, name, dict(source or {}))


def _as_poly(n: int, p) -> Poly:
    if isinstance(p, Poly):
        if p.n != n:
            raise ValueError(f"polynomial has {p.n} variables, expected {n}")
        return p
    return Poly.const(n, as_fraction(p))


def constants_to_structure(rank: int, nvars: int, constants: Dict[Tuple[int, int, int], object]):
    """``{(i, j, k): c}`` meaning ``[u_i, u_j] = ... + c u_k`` to structure dict."""
    table: Dict[Tuple[int, int], List[Fraction]] = {}
    for (i, j, k), c in constants.items():
        c = as_fraction(c)
        if not (0 <= i < rank and 0 <= j < rank and 0 <= k < rank):
            raise ValueError(f"index ({i},{j},{k}) out of range for rank {rank}")
        if i == j:
            if c:
                raise ValidationError(f"[u{i + 1}, u{i + 1}] must vanish")
            continue
        if i > j:
            i, j, c = j, i, -c
        row = table.setdefault((i, j), [Fraction(0)] * rank)
        row[k] += c
    return {key: tuple(Poly.const(nvars, c) for c in row) for key, row in table.items()}


# axiom checks

@dataclass
class Violation:
    kind: str
    indices: tuple
    witness: str

    def __str__(self):
        idx = ",".join(str(i + 1) if isinstance(i, int) else str(i) for i in self.indices)
        return f"{self.kind}({idx}): {self.witness}"


@dataclass
class AxiomReport:
    window: int
    checked: Dict[str, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.checked.items()))
        state = "pass" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return f"{state}; window {self.window}; checked {counts}"


def _combination_str(coeffs: Sequence[Poly], symbol: str) -> str:
    pieces = [_term_text(c, f"{symbol}{k + 1}") for k, c in enumerate(coeffs) if c]
    return _join_terms(pieces) if pieces else "0"


def _section_str(sec: Sequence[Poly]) -> str:
    return _combination_str(sec, "u")


def _field_str(fld: Sequence[Poly]) -> str:
    return _combination_str(fld, "d")


def _add_sections(*secs):
    out = list(secs[0])
    for s in secs[1:]:
        out = [a + b for a, b in zip(out, s)]
    return tuple(out)


def _scale(f: Poly, sec):
    return tuple(f * c for c in sec)


def jacobiator(model: AlgebroidModel, x, y, z) -> Section:
    br = model.section_bracket
    return _add_sections(br(br(x, y), z), br(br(y, z), x), br(br(z, x), y))


def check_axioms(model: AlgebroidModel, window: Optional[int] = None) -> AxiomReport:
    """Verify Jacobi, Leibniz and the anchor morphism property exactly.

    On polynomial models the Leibniz rule, the anchor-as-derivation identity
    and Jacobi with one function factor are tested for every monomial of
    degree up to ``window`` (default: structure degree + 2).
    """
    window = model.default_window() if window is None else window
    report = AxiomReport(window=window)
    r, n = model.rank, model.nvars
    gens = [model.generator(i) for i in range(r)]
    seen = set()

    def fail(kind, idx, witness):
        if (kind, idx) not in seen:
            seen.add((kind, idx))
            report.violations.append(Violation(kind, idx, witness))

    def count(kind):
        report.checked[kind] = report.checked.get(kind, 0) + 1

    for i in range(r):
        for j in range(i + 1, r):
            for k in range(j + 1, r):
                count("jacobi")
                jac = jacobiator(model, gens[i], gens[j], gens[k])
                if any(jac):
                    fail("jacobi", (i, j, k), _section_str(jac))
    for i in range(r):
        for j in range(i + 1, r):
            count("anchor")
            lhs = model.anchor_of(model.bracket(i, j))
            rhs = field_bracket(model.anchor[i], model.anchor[j])
            if lhs != rhs:
                diff = tuple(a - b for a, b in zip(lhs, rhs))
                fail("anchor", (i, j), _field_str(diff))
    if n == 0:
        return report

    test_functions = [Poly.monomial(e) for d in range(window + 1) for e in monomials(n, d)]
    for f in test_functions:
        for i in range(r):
            for j in range(r):
                count("leibniz")
                lhs = model.section_bracket(gens[i], _scale(f, gens[j]))
                rhs = _add_sections(_scale(f, model.bracket(i, j)),
                                    _scale(model.anchor_apply(i, f), gens[j]))
                if lhs != rhs:
                    fail("leibniz", (i, j), f"f = {f}")
        for i in range(r):
            for j in range(i + 1, r):
                count("anchor_derivation")
                lhs = apply_field(model.anchor_of(model.bracket(i, j)), f)
                rhs = (model.anchor_apply(i, model.anchor_apply(j, f))
                       - model.anchor_apply(j, model.anchor_apply(i, f)))
                if lhs != rhs:
                    fail("anchor_derivation", (i, j), f"f = {f}: {lhs - rhs}")
                for k in range(r):
                    count("jacobi_f")
                    jac = jacobiator(model, gens[i], gens[j], _scale(f, gens[k]))
                    if any(jac):
                        fail("jacobi_f", (i, j, k), f"f = {f}: {_section_str(jac)}")
    return report


def _validated(model: AlgebroidModel, window: Optional[int] = None) -> AlgebroidModel:
    report = check_axioms(model, window)
    if not report.passed:
        first = report.violations[0]
        raise ValidationError(f"{model.kind} model fails axiom check: {first}", report=report,
                              witness=first)
    return model


# builders

def build_lie_algebra(rank: int, constants: Dict[Tuple[int, int, int], object],
                      name: str = "") -> AlgebroidModel:
    """Lie algebra as an algebroid over a point.

    ``constants[(i, j, k)] = c`` means ``[u_i, u_j]`` has ``c`` on ``u_k``.
    """
    if rank < 0:
        raise ValueError("rank must be non-negative")
    structure = constants_to_structure(rank, 0, constants)
    model = make_model(LIE_ALGEBRA, rank, 0, [()] * rank, structure, name,
                       {"constants": dict(constants)})
    return _validated(model)


def build_action_algebroid(g_constants: Dict[Tuple[int, int, int], object], nvars: int,
                           action: Sequence[Sequence], name: str = "") -> AlgebroidModel:
    """Action algebroid of ``g`` acting on R^n through polynomial vector fields."""
    rank = len(action)
    algebra = build_lie_algebra(rank, g_constants)
    fields = [tuple(_as_poly(nvars, c) for c in fld) for fld in action]
    if any(len(f) != nvars for f in fields):
        raise ValueError(f"every action field needs {nvars} components")
    structure = constants_to_structure(rank, nvars, g_constants)
    for i in range(rank):
        for j in range(i + 1, rank):
            image = [Poly.zero(nvars)] * nvars
            for k, c in enumerate(algebra.bracket(i, j)):
                cval = c.constant_term()
                if cval:
                    image = [a + b * cval for a, b in zip(image, fields[k])]
            if tuple(image) != field_bracket(fields[i], fields[j]):
                raise ValidationError(
                    f"action is not a Lie algebra homomorphism on ({i + 1},{j + 1}): "
                    f"rho([u{i + 1},u{j + 1}]) = {_field_str(image)} but "
                    f"[rho(u{i + 1}), rho(u{j + 1})] = {_field_str(field_bracket(fields[i], fields[j]))}",
                    witness=(i, j))
    model = make_model(ACTION, rank, nvars, fields, structure, name,
                       {"constants": dict(g_constants)})
    return _validated(model)


def build_poisson_algebroid(pi: Multivector, name: str = "") -> AlgebroidModel:
    """Cotangent algebroid of a Poisson bivector, generated by ``dx_1 .. dx_n``.

    Anchor ``a(dx_i) = sum_k pi(dx_i, dx_k) d_k`` and ``[dx_i, dx_j] = d(pi_ij)``.
    """
    if pi.degrees() - {2}:
        raise ValueError("Poisson structure must be a bivector")
    n = pi.n
    tri = schouten_bracket(pi, pi)
    if tri:
        raise NotPoissonError(tri)
    anchor = [tuple(pi.coeff((i, k)) for k in range(n)) for i in range(n)]
    structure = {}
    for i in range(n):
        for j in range(i + 1, n):
            pij = pi.coeff((i, j))
            vals = tuple(pij.diff(k) for k in range(n))
            if any(vals):
                structure[(i, j)] = vals
    model = make_model(POISSON, n, n, anchor, structure, name, {"pi": pi})
    return _validated(model)


# exterior derivative

def intrinsic_d(model: AlgebroidModel, omega: Cochain,
                nabla: Callable[[int, Tuple[Poly, ...]], Tuple[Poly, ...]]) -> Cochain:
    """Covariant exterior derivative from the intrinsic (Cartan) formula.

    ``nabla(i, value)`` returns the covariant derivative along ``u_i`` of a
    V-valued function given by its frame components.
    """
    r, n, m = model.rank, model.nvars, omega.m
    if omega.r != r or omega.n != n:
        raise ValueError("cochain does not belong to this model")
    zero = Poly.zero(n)
    out: Dict[Tuple[int, ...], Tuple[Poly, ...]] = {}
    for p in sorted(omega.degrees()):
        if p >= r:
            continue
        comp = omega.component(p)
        for out_idx in ext_indices(r, p + 1):
            acc = [zero] * m
            for t, ut in enumerate(out_idx):
                rest = out_idx[:t] + out_idx[t + 1:]
                val = comp.value(rest)
                if not any(val):
                    continue
                val = nabla(ut, val)
                if t % 2:
                    acc = [a - b for a, b in zip(acc, val)]
                else:
                    acc = [a + b for a, b in zip(acc, val)]
            for t in range(p + 1):
                for s in range(t + 1, p + 1):
                    br = model.bracket(out_idx[t], out_idx[s])
                    rest = out_idx[:t] + out_idx[t + 1:s] + out_idx[s + 1:]
                    sgn = -1 if (t + s) % 2 else 1
                    for k, c in enumerate(br):
                        if not c:
                            continue
                        val = comp.evaluate((k,) + rest)
                        if not any(val):
                            continue
                        acc = [a + sgn * c * b for a, b in zip(acc, val)]
            if any(acc):
                out[out_idx] = tuple(acc)
    return Cochain(r, n, out, m)


def algebroid_d(model: AlgebroidModel, omega: Cochain) -> Cochain:
    """Exterior derivative of the algebroid on scalar cochains."""
    if omega.m != 1:
        raise ValueError("algebroid_d takes scalar cochains; use cov_ext_d for values in V")
    return intrinsic_d(model, omega, lambda i, val: (model.anchor_apply(i, val[0]),))


def derivation_d(model: AlgebroidModel, omega: Cochain) -> Cochain:
    """Exterior derivative assembled from ``d f`` and ``d e^k`` by the Leibniz rule.

    Shares no code with :func:`intrinsic_d`; used as a cross-check.
    """
    from .forms import wedge

    r, n = model.rank, model.nvars
    de = []
    for k in range(r):
        terms = {}
        for i in range(r):
            for j in range(i + 1, r):
                c = model.bracket(i, j)[k]
                if c:
                    terms[(i, j)] = -c
        de.append(Cochain(r, n, terms))
    out = Cochain.zero(r, n)
    for key, (f,) in omega.items():
        df = Cochain(r, n, {(i,): model.anchor_apply(i, f) for i in range(r)})
        term = wedge(df, Cochain(r, n, {key: Poly.one(n)}))
        for pos, k in enumerate(key):
            left = Cochain(r, n, {key[:pos]: Poly.one(n)})
            right = Cochain(r, n, {key[pos + 1:]: Poly.one(n)})
            piece = wedge(wedge(left, de[k]), right) * f
            term = term + (piece if pos % 2 == 0 else -piece)
        out = out + term
    return out


def format_model(model: AlgebroidModel) -> str:
    lines = [f"{model.kind} rank={model.rank} vars={model.nvars} shift={model.shift}"]
    for i, fld in enumerate(model.anchor):
        if any(fld):
            lines.append(f"  a(u{i + 1}) = {_field_str(fld)}")
    for (i, j), vals in sorted(model.structure.items()):
        lines.append(f"  [u{i + 1}, u{j + 1}] = {_section_str(vals)}")
    return "\n".join(lines)
