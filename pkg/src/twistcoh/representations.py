"""A-connections on free modules, curvature and the covariant exterior derivative."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from .algebroid import LIE_ALGEBRA, AlgebroidModel, intrinsic_d
from .forms import Cochain, sort_sign
from .poly import Poly, as_fraction, format_poly

Matrix = Tuple[Tuple[Poly, ...], ...]


@dataclass(frozen=True, eq=False)
class Connection:
    """``nabla_{u_i} v_a = sum_b christoffel[i][a][b] v_b`` on the frame ``v_a``."""

    model: AlgebroidModel
    rank: int
    christoffel: Tuple[Matrix, ...]
    name: str = ""

    def nabla(self, i: int, value: Sequence[Poly]) -> Tuple[Poly, ...]:
        """Covariant derivative along ``u_i`` of the section ``sum value[a] v_a``."""
        gamma = self.christoffel[i]
        out = []
        for b in range(self.rank):
            acc = self.model.anchor_apply(i, value[b])
            for a in range(self.rank):
                if value[a] and gamma[a][b]:
                    acc = acc + value[a] * gamma[a][b]
            out.append(acc)
        return tuple(out)

    def is_trivial(self) -> bool:
        return self.rank == 1 and not any(g[0][0] for g in self.christoffel)

    def shift_vectors(self) -> set:
        """``(form degree, weight)`` shifts contributed by the Christoffel data."""
        out = set()
        for gamma in self.christoffel:
            for row in gamma:
                for p in row:
                    out |= {(1, d) for d in p.degrees()}
        return out


def build_connection(model: AlgebroidModel, rank: int, christoffel, name: str = "") -> Connection:
    """Validate shapes and coerce entries; no flatness requirement."""
    n = model.nvars
    if len(christoffel) != model.rank:
        raise ValueError(f"need one Christoffel matrix per generator ({model.rank}), "
                         f"got {len(christoffel)}")
    mats = []
    for i, gamma in enumerate(christoffel):
        if len(gamma) != rank or any(len(row) != rank for row in gamma):
            raise ValueError(f"Christoffel matrix of u{i + 1} must be {rank}x{rank}")
        mats.append(tuple(tuple(_poly(n, x) for x in row) for row in gamma))
    return Connection(model, rank, tuple(mats), name)


def _poly(n, x) -> Poly:
    if isinstance(x, Poly):
        if x.n != n:
            raise ValueError("Christoffel entry has the wrong variable count")
        return x
    return Poly.const(n, as_fraction(x))


def trivial_connection(model: AlgebroidModel) -> Connection:
    zero = Poly.zero(model.nvars)
    return build_connection(model, 1, [[[zero]]] * model.rank, "trivial")


def scalar_connection(model: AlgebroidModel, one_form: Cochain, name: str = "") -> Connection:
    """Rank-1 connection ``nabla_u f = a(u) f + f * phi(u)`` for a 1-form ``phi``."""
    if one_form.m != 1 or one_form.degrees() - {1}:
        raise ValueError("scalar connection needs a scalar 1-form")
    gammas = [[[one_form.scalar_value((i,))]] for i in range(model.rank)]
    return build_connection(model, 1, gammas, name or "scalar")


def adjoint_connection(model: AlgebroidModel) -> Connection:
    """Adjoint representation of a Lie algebra: ``nabla_{u_i} u_a = [u_i, u_a]``."""
    if model.kind != LIE_ALGEBRA:
        raise ValueError("adjoint representation is only defined here for Lie algebras")
    r = model.rank
    gammas = [[[model.bracket(i, a)[b] for b in range(r)] for a in range(r)] for i in range(r)]
    return build_connection(model, r, gammas, "adjoint")


EndValuedTwoForm = Dict[Tuple[int, int], Matrix]


def _unit(n, m, a):
    return tuple(Poly.one(n) if b == a else Poly.zero(n) for b in range(m))


def curvature(conn: Connection) -> EndValuedTwoForm:
    """``F(u_i, u_j) = [nabla_i, nabla_j] - nabla_[u_i,u_j]`` on the frame; only nonzero pairs."""
    model, m, n = conn.model, conn.rank, conn.model.nvars
    out = {}
    for i in range(model.rank):
        for j in range(i + 1, model.rank):
            rows = []
            br = model.bracket(i, j)
            for a in range(m):
                v = _unit(n, m, a)
                lhs = conn.nabla(i, conn.nabla(j, v))
                rhs = conn.nabla(j, conn.nabla(i, v))
                val = [x - y for x, y in zip(lhs, rhs)]
                for k, c in enumerate(br):
                    if c:
                        nk = conn.nabla(k, v)
                        val = [x - c * y for x, y in zip(val, nk)]
                rows.append(tuple(val))
            if any(any(row) for row in rows):
                out[(i, j)] = tuple(rows)
    return out


@dataclass
class Flatness:
    flat: bool
    witness: Optional[Tuple[int, int]] = None
    matrix: Optional[Matrix] = None

    def __bool__(self):
        return self.flat

    def describe(self) -> str:
        if self.flat:
            return "flat"
        i, j = self.witness
        mat = "; ".join(", ".join(format_poly(x) for x in row) for row in self.matrix)
        return f"not flat: F(u{i + 1}, u{j + 1}) = [{mat}]"


def is_flat(conn: Connection) -> Flatness:
    curv = curvature(conn)
    if not curv:
        return Flatness(True)
    key = min(curv)
    return Flatness(False, key, curv[key])


def cov_ext_d(conn: Connection, omega: Cochain) -> Cochain:
    """Covariant exterior derivative (intrinsic formula); flatness not required."""
    if omega.m != conn.rank:
        raise ValueError(f"cochain takes values in rank {omega.m}, connection has rank {conn.rank}")
    return intrinsic_d(conn.model, omega, conn.nabla)


def end_wedge(form: EndValuedTwoForm, omega: Cochain) -> Cochain:
    """``(e^{ij} (x) Phi) ^ (e^I (x) w) = e^{ij} ^ e^I (x) Phi(w)``."""
    r, n, m = omega.r, omega.n, omega.m
    out: Dict[Tuple[int, ...], list] = {}
    for (i, j), mat in form.items():
        for key, val in omega.items():
            sign, skey = sort_sign((i, j) + key)
            if not sign:
                continue
            image = []
            for b in range(m):
                acc = Poly.zero(n)
                for a in range(m):
                    if val[a] and mat[a][b]:
                        acc = acc + val[a] * mat[a][b]
                image.append(acc if sign > 0 else -acc)
            prev = out.get(skey)
            out[skey] = image if prev is None else [x + y for x, y in zip(prev, image)]
    return Cochain(r, n, {k: tuple(v) for k, v in out.items()}, m)
