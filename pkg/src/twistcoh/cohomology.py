"""Exact (twisted) cohomology by weight-line slicing.

Every operator piece of ``d_nabla[theta]`` moves a basis cochain of form
degree ``p`` and polynomial weight ``w`` by a fixed ``(dp, dw)``: the anchor
by ``(1, deg - 1)``, structure functions and Christoffel symbols by
``(1, deg)``, and each term of ``theta`` by its own bidegree.  When integers
``alpha > 0, beta, delta`` exist with ``alpha*dw + beta*dp == delta`` for every
piece, the grading ``G = alpha*w + beta*p`` splits the complex into finite
cells ``(G, grade)`` (grade = form degree, or parity for twisted complexes)
and the cohomology at a cell depends only on its two neighbouring cells.  All
reported dimensions are then exact.  The ordinary weight lines are the case
``G = w - s*p``.

Without such a grading the whole window ``w <= W`` is treated as one complex
and each entry carries a stability flag obtained by recomputing at ``W - 2``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebroid import AlgebroidModel, algebroid_d
from .errors import InvariantViolation, ValidationError, WindowOverflowError
from .forms import Cochain, basis_cochain, cochain_basis, wedge
from .linalg import (EchelonBasis, brute_rank, columns_to_rows,
                     rank_and_kernel, rank_and_kernel_sparse)
from .representations import Connection, trivial_connection
from .twisted import (TwistedDifferential, exp_form, raw_twisted_d,
                      validate_psi)

DEGREE = "degree"
PARITY = "parity"
DEFAULT_WINDOW = 6


@dataclass(frozen=True)
class Grading:
    alpha: int
    beta: int
    delta: int

    def of(self, p: int, w: int) -> int:
        return self.alpha * w + self.beta * p

    def __str__(self):
        text = "w" if self.alpha == 1 else f"{self.alpha}*w"
        if self.beta:
            mag = abs(self.beta)
            text += f" {'-' if self.beta < 0 else '+'} {'' if mag == 1 else f'{mag}*'}p"
        return f"G = {text} (shift {self.delta})"


def operator_shifts(conn: Connection, theta: Optional[Cochain]) -> set:
    """All ``(dp, dw)`` moves made by pieces of the twisted differential."""
    model = conn.model
    out = set()
    for fld in model.anchor:
        for p in fld:
            out |= {(1, d - 1) for d in p.degrees()}
    for vals in model.structure.values():
        for p in vals:
            out |= {(1, d) for d in p.degrees()}
    out |= conn.shift_vectors()
    if theta is not None:
        out |= theta.bidegrees()
    return out


def _integer_vector(vec: Sequence[Fraction]) -> Tuple[int, ...]:
    den = 1
    for v in vec:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints] if g else ints
    if ints[0] < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def find_grading(shifts: Iterable[Tuple[int, int]],
                 zero_shifts: Iterable[Tuple[int, int]] = ()) -> Optional[Grading]:
    """Solve ``alpha*dw + beta*dp = delta`` (and ``= 0`` for ``zero_shifts``) exactly.

    A solution with ``delta == 0`` is preferred.  Returns None when every
    solution has ``alpha == 0``.
    """
    shifts, zero_shifts = sorted(set(shifts)), sorted(set(zero_shifts))
    base = [[w, p, -1] for p, w in shifts] + [[w, p, 0] for p, w in zero_shifts]
    for extra in ([[0, 0, 1]], []):
        rows = base + extra
        if rows:
            _, kernel = rank_and_kernel(rows)
        else:
            kernel = [[Fraction(1), Fraction(0), Fraction(0)]]
        for vec in kernel:
            if vec[0] != 0:
                a, b, d = _integer_vector(vec)
                return Grading(a, b, d)
    return None


@dataclass
class ComplexSpec:
    """A (twisted) complex ``(Omega(A, V), d_nabla + theta ^ .)`` with a weight window."""

    conn: Connection
    theta: Cochain
    mode: str
    window: int
    grading: Optional[Grading]

    @property
    def model(self) -> AlgebroidModel:
        return self.conn.model

    @property
    def twisted(self) -> bool:
        return self.mode == PARITY


def make_spec(conn: Connection, theta: Optional[Cochain] = None, window: int = DEFAULT_WINDOW,
              mode: Optional[str] = None, grading="auto",
              zero_shifts: Iterable[Tuple[int, int]] = ()) -> ComplexSpec:
    """Validate and assemble a complex.

    ``mode`` defaults to integer degrees for ``theta = 0`` and parity
    otherwise.  Flatness and closedness of ``theta`` are checked here.
    """
    model = conn.model
    if theta is None:
        theta = Cochain.zero(model.rank, model.nvars)
    TwistedDifferential(conn, theta)
    if mode is None:
        mode = PARITY if theta else DEGREE
    if mode not in (DEGREE, PARITY):
        raise ValueError(f"unknown grading mode {mode!r}")
    if mode == DEGREE and theta:
        raise ValidationError("a nonzero twist needs the parity grading")
    if window < 0:
        raise ValueError("window must be non-negative")
    if grading == "auto":
        grading = find_grading(operator_shifts(conn, theta), zero_shifts)
    return ComplexSpec(conn, theta, mode, window, grading)


# cells

Key = Tuple[Optional[int], int]


@dataclass
class CellResult:
    key: Key
    basis: list
    rank_in: int
    rank_out: int
    kernel: list
    representatives: list
    image: list

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def betti(self) -> int:
        return len(self.representatives)


class _Context:
    """Cell geometry and matrices; picklable so lines can be farmed out."""

    def __init__(self, spec: ComplexSpec):
        self.spec = spec
        self.conn = spec.conn
        self.theta = spec.theta
        self.model = spec.conn.model
        self.r, self.n, self.m = self.model.rank, self.model.nvars, spec.conn.rank
        self.grading = spec.grading
        self.parity = spec.mode == PARITY
        self.window = spec.window
        self._maps = {}
        self._bases = {}

    def __getstate__(self):
        return {"spec": self.spec}

    def __setstate__(self, state):
        self.__init__(state["spec"])

    def max_weight(self) -> int:
        return self.window if self.n else 0

    def pairs(self, key: Key) -> List[Tuple[int, int]]:
        g, grade = key
        ps = [p for p in range(self.r + 1) if p % 2 == grade] if self.parity else [grade]
        ps = [p for p in ps if 0 <= p <= self.r]
        out = []
        if g is None:
            for p in ps:
                out.extend((p, w) for w in range(self.max_weight() + 1))
            return out
        gr = self.grading
        for p in ps:
            num = g - gr.beta * p
            if num % gr.alpha:
                continue
            w = num // gr.alpha
            if w < 0 or (self.n == 0 and w > 0):
                continue
            out.append((p, w))
        return out

    def basis(self, key: Key) -> list:
        if key not in self._bases:
            keys = []
            for p, w in self.pairs(key):
                keys.extend(cochain_basis(self.r, self.n, p, w, self.m))
            self._bases[key] = keys
        return self._bases[key]

    def in_window(self, key: Key) -> bool:
        prs = self.pairs(key)
        return bool(prs) and all(w <= self.max_weight() for _, w in prs)

    def succ(self, key: Key) -> Optional[Key]:
        g, grade = key
        ng = None if g is None else g + self.grading.delta
        if self.parity:
            return (ng, 1 - grade)
        return (ng, grade + 1) if grade + 1 <= self.r else None

    def pred(self, key: Key) -> Optional[Key]:
        g, grade = key
        ng = None if g is None else g - self.grading.delta
        if self.parity:
            return (ng, 1 - grade)
        return (ng, grade - 1) if grade >= 1 else None

    def apply(self, cochain: Cochain) -> Cochain:
        return raw_twisted_d(self.conn, self.theta, cochain)

    def coordinates(self, cochain: Cochain, key: Key, index=None):
        if index is None:
            index = {b: i for i, b in enumerate(self.basis(key))}
        vec = {}
        for idx, a, exp, c in cochain.iter_basis():
            pos = index.get((idx, a, exp))
            if pos is None:
                if key[0] is None and sum(exp) > self.max_weight():
                    raise WindowOverflowError(
                        f"differential leaves the weight window W={self.window} "
                        f"(weight {sum(exp)} in degree {len(idx)}); increase --max-weight")
                raise InvariantViolation(
                    f"cochain term {idx},{a},{exp} does not lie in cell {key}")
            vec[pos] = c
        return vec

    def columns(self, src: Key, tgt: Optional[Key]) -> list:
        """Images of the ``src`` basis in ``tgt`` coordinates."""
        if (src, tgt) in self._maps:
            return self._maps[(src, tgt)]
        src_basis = self.basis(src)
        images = [self.apply(basis_cochain(self.r, self.n, self.m, b)) for b in src_basis]
        if tgt is None:
            for b, img in zip(src_basis, images):
                if img:
                    raise InvariantViolation(f"differential of top-degree basis {b} is nonzero")
            cols = [{} for _ in src_basis]
        else:
            index = {b: i for i, b in enumerate(self.basis(tgt))}
            cols = [self.coordinates(img, tgt, index) for img in images]
        self._maps[(src, tgt)] = cols
        return cols

    def compute(self, key: Key) -> CellResult:
        basis = self.basis(key)
        nxt, prv = self.succ(key), self.pred(key)
        out_cols = self.columns(key, nxt)
        rank_out, kernel = rank_and_kernel_sparse(columns_to_rows(out_cols), len(basis))
        in_cols = self.columns(prv, key) if prv is not None and self.basis(prv) else []
        # d o d = 0 on the incoming image
        for v in in_cols:
            acc = {}
            for j, c in v.items():
                for i, x in out_cols[j].items():
                    acc[i] = acc.get(i, 0) + c * x
            if any(acc.values()):
                raise InvariantViolation(f"differential does not square to zero at cell {key}")
        span = EchelonBasis()
        for v in in_cols:
            span.add(v)
        rank_in = len(span)
        reps = [k for k in kernel if span.add(k)]
        if len(reps) != len(kernel) - rank_in:
            raise InvariantViolation(f"image not contained in kernel at cell {key}")
        return CellResult(key, basis, rank_in, rank_out, kernel, reps, in_cols)


def _line_job(args):
    ctx, keys = args
    return [ctx.compute(k) for k in keys]


# reports

@dataclass
class BettiEntry:
    line: object
    cell: Key
    grade: object
    dim: int
    betti: int
    representatives: List[Cochain]
    certified: bool
    stable: bool


@dataclass
class LineSummary:
    label: object
    cells: List[Key]
    in_window: List[bool]
    dims: List[int]
    local_betti: List[int]
    euler_dims: int
    euler_betti: int

    @property
    def euler_ok(self) -> bool:
        return self.euler_dims == self.euler_betti


@dataclass
class BettiReport:
    mode: str
    rank: int
    grading: Optional[Grading]
    window: int
    entries: List[BettiEntry]
    lines: List[LineSummary]
    window_checked: bool = False

    def totals(self, stable_only: bool = True) -> Tuple[int, ...]:
        """Betti numbers per degree ``0..r`` or ``(even, odd)``."""
        size = 2 if self.mode == PARITY else self.rank + 1
        out = [0] * size
        for e in self.entries:
            if e.stable or not stable_only:
                out[e.grade if self.mode == DEGREE else (0 if e.grade == "even" else 1)] += e.betti
        return tuple(out)

    def unstable(self) -> List[BettiEntry]:
        return [e for e in self.entries if not e.stable]

    def table(self) -> Dict[object, Dict[object, int]]:
        out: Dict[object, Dict[object, int]] = {}
        for e in self.entries:
            out.setdefault(e.line, {})[e.grade] = e.betti
        return out

    def dims_signature(self):
        return [(e.cell, e.grade, e.dim, e.betti) for e in self.entries]


class Cohomology:
    """Cell-by-cell cohomology of a :class:`ComplexSpec` with a class calculus."""

    def __init__(self, spec: ComplexSpec):
        self.spec = spec
        self.ctx = _Context(spec)
        self._cells: Dict[Key, CellResult] = {}
        self._solvers: Dict[Key, EchelonBasis] = {}

    @property
    def graded(self) -> bool:
        return self.spec.grading is not None

    def grade_of(self, p: int):
        return p % 2 if self.ctx.parity else p

    def cell_of(self, p: int, w: int) -> Key:
        g = self.spec.grading.of(p, w) if self.graded else None
        return (g, self.grade_of(p))

    def window_cells(self) -> List[Key]:
        ctx = self.ctx
        keys = set()
        for p in range(ctx.r + 1):
            for w in range(ctx.max_weight() + 1):
                key = self.cell_of(p, w)
                if ctx.in_window(key):
                    keys.add(key)
        return sorted(keys, key=lambda k: (k[0] is not None, k[0] or 0, k[1]))

    def cell(self, key: Key) -> CellResult:
        if key not in self._cells:
            self._cells[key] = self.ctx.compute(key)
        return self._cells[key]

    # lines

    def lines(self) -> List[Tuple[object, List[Key]]]:
        """Finite lines covering every window cell exactly once.

        Each line is ``(label, cells ordered along the differential)``; cells
        outside the window are included where a window cell needs them.
        """
        ctx = self.ctx
        window = self.window_cells()
        if not self.graded:
            return [("window", window)]
        out, seen = [], set()
        delta = self.spec.grading.delta
        for key in window:
            if key in seen:
                continue
            if delta == 0:
                g = key[0]
                cells = [(g, gr) for gr in ((0, 1) if ctx.parity else range(ctx.r + 1))
                         if ctx.basis((g, gr))]
                out.append((g, cells))
                seen.update(cells)
                continue
            chain = [key]
            cur = key
            while True:
                nxt = ctx.succ(cur)
                if nxt is None or not ctx.basis(nxt) or nxt in chain:
                    break
                chain.append(nxt)
                if not ctx.in_window(nxt):
                    break
                cur = nxt
            cur = key
            while True:
                prv = ctx.pred(cur)
                if prv is None or not ctx.basis(prv) or prv in chain:
                    break
                chain.insert(0, prv)
                if not ctx.in_window(prv):
                    break
                cur = prv
            seen.update(chain)
            out.append((chain[0], chain))
        out.sort(key=lambda item: item[0])
        return out

    def compute_all(self, parallel: bool = False, workers: Optional[int] = None):
        lines = self.lines()
        todo = [[k for k in cells if k not in self._cells] for _, cells in lines]
        if parallel and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for results in pool.map(_line_job, [(self.ctx, keys) for keys in todo]):
                    for res in results:
                        self._cells.setdefault(res.key, res)
        else:
            for keys in todo:
                for k in keys:
                    self.cell(k)
        return lines

    def report(self, parallel: bool = False, window_check: bool = False) -> BettiReport:
        lines = self.compute_all(parallel)
        ctx = self.ctx
        window = set(self.window_cells())
        reference = None
        if window_check:
            lower = make_spec(self.spec.conn, self.spec.theta, max(self.spec.window - 2, 0),
                              self.spec.mode, grading=self.spec.grading)
            lower_coh = Cohomology(lower)
            lower_coh.compute_all(parallel)
            reference = {k: lower_coh.cell(k).betti for k in lower_coh.window_cells()}
        entries, summaries = [], []
        for label, cells in lines:
            results = [self.cell(k) for k in cells]
            members = set(cells)
            local = [res.dim
                     - (res.rank_out if ctx.succ(k) in members else 0)
                     - (res.rank_in if ctx.pred(k) in members else 0)
                     for k, res in zip(cells, results)]
            signs = [self._sign(k) for k in cells]
            summaries.append(LineSummary(
                label, cells, [k in window for k in cells], [r.dim for r in results], local,
                sum(s * r.dim for s, r in zip(signs, results)),
                sum(s * b for s, b in zip(signs, local))))
            for k, res in zip(cells, results):
                if k not in window:
                    continue
                certified = self.graded
                if certified:
                    stable = True
                else:
                    stable = reference is not None and reference.get(k) == res.betti
                grade = k[1] if not ctx.parity else ("even" if k[1] == 0 else "odd")
                reps = [self.cochain_from(k, v) for v in res.representatives]
                entries.append(BettiEntry(label, k, grade, res.dim, res.betti, reps,
                                          certified, stable))
        return BettiReport(self.spec.mode, ctx.r, self.spec.grading, self.spec.window,
                           entries, summaries, window_check)

    def _sign(self, key: Key) -> int:
        return -1 if key[1] % 2 else 1

    # classes

    def cochain_from(self, key: Key, vec) -> Cochain:
        ctx = self.ctx
        basis = ctx.basis(key)
        out = Cochain.zero(ctx.r, ctx.n, ctx.m)
        for i, c in vec.items():
            out = out + basis_cochain(ctx.r, ctx.n, ctx.m, basis[i]) * c
        return out

    def _solver(self, key: Key) -> EchelonBasis:
        if key not in self._solvers:
            res = self.cell(key)
            span = EchelonBasis(track=True)
            for j, v in enumerate(res.image):
                span.add(v, ("im", j))
            for i, v in enumerate(res.representatives):
                span.add(v, ("rep", i))
            self._solvers[key] = span
        return self._solvers[key]

    def locate(self, cochain: Cochain) -> Key:
        keys = {self.cell_of(p, w) for p, w in cochain.bidegrees()}
        if len(keys) > 1:
            raise ValueError(f"cochain spreads over several cells: {sorted(keys, key=str)}")
        if not keys:
            raise ValueError("the zero cochain has no cell; pass the cell explicitly")
        return keys.pop()

    def class_of(self, cochain: Cochain, key: Optional[Key] = None) -> "CohomologyClass":
        """Class of a cocycle, as coordinates on the cell's representatives."""
        if (cochain.r, cochain.n, cochain.m) != (self.ctx.r, self.ctx.n, self.ctx.m):
            raise ValueError("cochain does not belong to this complex")
        if key is None:
            key = self.locate(cochain)
        if self.ctx.apply(cochain):
            raise ValueError("not a cocycle")
        res = self.cell(key)
        vec = self.ctx.coordinates(cochain, key)
        combo = self._solver(key).coordinates(vec)
        if combo is None:
            raise InvariantViolation("cocycle not in span of image and representatives")
        coords = tuple(combo.get(("rep", i), Fraction(0)) for i in range(res.betti))
        return CohomologyClass(self, key, coords)

    def basis_classes(self, key: Key) -> List["CohomologyClass"]:
        res = self.cell(key)
        return [CohomologyClass(self, key, tuple(Fraction(int(i == j)) for j in range(res.betti)))
                for i in range(res.betti)]


@dataclass
class CohomologyClass:
    cohomology: Cohomology
    cell: Key
    coords: Tuple[Fraction, ...]

    @property
    def representative(self) -> Cochain:
        coh = self.cohomology
        res = coh.cell(self.cell)
        vec: Dict[int, Fraction] = {}
        for c, rep in zip(self.coords, res.representatives):
            # representatives are sparse {index: coeff} vectors
            if c:
                for i, x in rep.items():
                    nv = vec.get(i, 0) + c * x
                    if nv:
                        vec[i] = nv
                    else:
                        vec.pop(i, None)
        return coh.cochain_from(self.cell, vec)

    def is_zero(self) -> bool:
        return not any(self.coords)


# operations on classes

def weight_lines(spec: ComplexSpec):
    """Lines with their matrices: ``[(label, [(cell, dim, out_matrix_columns)])]``."""
    coh = Cohomology(spec)
    out = []
    for label, cells in coh.lines():
        items = []
        for k in cells:
            nxt = coh.ctx.succ(k)
            cols = coh.ctx.columns(k, nxt if nxt in cells else None) if nxt in cells else []
            items.append((k, len(coh.ctx.basis(k)), nxt if nxt in cells else None, cols))
        out.append((label, items))
    return out


def betti(spec: ComplexSpec, parallel: bool = False, window_check: bool = False) -> BettiReport:
    return Cohomology(spec).report(parallel=parallel, window_check=window_check)


def _same_model(a: Cohomology, b: Cohomology) -> bool:
    return a.spec.model is b.spec.model or a.spec.model.same_structure(b.spec.model)


def cup_product(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    """``[x] ^ [y] = [x ^ y]`` in the untwisted scalar cohomology."""
    coh = a.cohomology
    if b.cohomology is not coh:
        if not _same_model(coh, b.cohomology):
            raise ValueError("classes come from different models")
    if coh.spec.twisted or coh.ctx.m != 1 or coh.spec.theta:
        raise ValueError("cup product is defined on untwisted scalar cohomology")
    prod = wedge(a.representative, b.representative)
    if not prod:
        return _zero_class(coh, a, b)
    return coh.class_of(prod)


def _zero_class(coh: Cohomology, a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    # product cell by additivity of the grading
    ctx = coh.ctx
    (ga, pa), (gb, pb) = a.cell, b.cell
    g = None if ga is None else ga + gb
    grade = (pa + pb) % 2 if ctx.parity else pa + pb
    if not ctx.parity and grade > ctx.r:
        return CohomologyClass(coh, (g, grade), ())
    res = coh.cell((g, grade))
    return CohomologyClass(coh, (g, grade), tuple(Fraction(0) for _ in range(res.betti)))


def module_action(alpha: CohomologyClass, omega: CohomologyClass) -> CohomologyClass:
    """Action of ``H(A)`` on (twisted) cohomology with coefficients."""
    base, target = alpha.cohomology, omega.cohomology
    if not _same_model(base, target):
        raise ValueError("classes come from different models")
    if base.spec.twisted or base.ctx.m != 1 or base.spec.theta:
        raise ValueError("the acting class must be an untwisted scalar class")
    prod = wedge(alpha.representative, omega.representative)
    if prod:
        return target.class_of(prod)
    arep = alpha.representative
    if not arep:
        return CohomologyClass(target, omega.cell, tuple(0 for _ in omega.coords))
    (p, w), = {bd for bd in arep.bidegrees()} or {(0, 0)}
    g0, gr = omega.cell
    g = None if g0 is None else g0 + target.spec.grading.of(p, w)
    grade = (gr + p) % 2 if target.ctx.parity else gr + p
    if not target.ctx.parity and grade > target.ctx.r:
        return CohomologyClass(target, (g, grade), ())
    res = target.cell((g, grade))
    return CohomologyClass(target, (g, grade), tuple(Fraction(0) for _ in range(res.betti)))


def scalar_cohomology(model: AlgebroidModel, window: int = DEFAULT_WINDOW) -> Cohomology:
    return Cohomology(make_spec(trivial_connection(model), None, window, DEGREE))


# twist invariance

@dataclass
class TwistInvarianceReport:
    betti_theta: BettiReport
    betti_shifted: BettiReport
    betti_equal: bool
    class_map_checked: bool
    images_closed: bool = True
    class_map_bijective: bool = True
    equivariance_checked: int = 0
    equivariance_ok: bool = True
    witnesses: List[str] = field(default_factory=list)

    @property
    def isomorphic(self) -> bool:
        return (self.betti_equal and self.images_closed and self.class_map_bijective
                and self.equivariance_ok)


def verify_twist_invariance(spec: ComplexSpec, psi: Cochain, parallel: bool = False,
                            window_check: bool = False,
                            equivariance_limit: int = 40) -> TwistInvarianceReport:
    """Compare the twisted cohomologies for ``theta`` and ``theta + d psi``.

    Checks equal Betti tables, that ``exp(psi) ^ .`` sends cocycles to
    cocycles and induces a bijection on classes, and spot-checks
    ``e([a] . [w]) == [a] . e([w])``.
    """
    model, conn = spec.model, spec.conn
    validate_psi(model, psi)
    dpsi = algebroid_d(model, psi)
    shifted_theta = spec.theta + dpsi
    shifts = operator_shifts(conn, spec.theta) | operator_shifts(conn, shifted_theta)
    grading = find_grading(shifts, psi.bidegrees())
    spec1 = make_spec(conn, spec.theta, spec.window, PARITY, grading=grading)
    spec2 = make_spec(conn, shifted_theta, spec.window, PARITY, grading=grading)
    coh1, coh2 = Cohomology(spec1), Cohomology(spec2)
    rep1 = coh1.report(parallel, window_check)
    rep2 = coh2.report(parallel, window_check)
    sig1 = {(e.cell, e.betti) for e in rep1.entries if e.stable}
    sig2 = {(e.cell, e.betti) for e in rep2.entries if e.stable}
    equal = sig1 == sig2 and rep1.totals() == rep2.totals()
    report = TwistInvarianceReport(rep1, rep2, equal, class_map_checked=grading is not None)
    if not equal:
        report.witnesses.append(f"Betti tables differ: {rep1.totals()} vs {rep2.totals()}")
    if grading is None:
        report.witnesses.append("no joint grading; class map not checked")
        return report
    # exp(psi) ^ . carries (theta + d psi)-cocycles to theta-cocycles
    e = exp_form(psi)

    def eps(w):
        return wedge(e, w)

    for key in coh2.window_cells():
        classes = coh2.basis_classes(key)
        target_res = coh1.cell(key)
        if len(classes) != target_res.betti:
            report.class_map_bijective = False
            report.witnesses.append(f"cell {key}: {len(classes)} vs {target_res.betti} classes")
            continue
        if not classes:
            continue
        rows = []
        for cls in classes:
            img = eps(cls.representative)
            if coh1.ctx.apply(img):
                report.images_closed = False
                report.witnesses.append(f"exp(psi) ^ ({cls.representative}) is not closed")
                break
            rows.append(coh1.class_of(img, key).coords)
        else:
            if brute_rank(rows) != len(classes):
                report.class_map_bijective = False
                report.witnesses.append(f"class map singular on cell {key}")
    if not report.images_closed:
        return report
    # module equivariance spot check
    base = scalar_cohomology(model, spec.window)
    acting = []
    for key in base.window_cells():
        acting.extend(base.basis_classes(key))
    checked = 0
    for key in coh2.window_cells():
        for cls in coh2.basis_classes(key):
            for a in acting:
                if checked >= equivariance_limit:
                    break
                checked += 1
                lhs = class_vector(coh1, eps(wedge(a.representative, cls.representative)))
                rhs = class_vector(coh1, wedge(a.representative, eps(cls.representative)))
                if lhs != rhs:
                    report.equivariance_ok = False
                    report.witnesses.append(
                        f"equivariance fails for {a.representative} on {cls.representative}")
    report.equivariance_checked = checked
    return report


def class_vector(coh: Cohomology, cochain: Cochain) -> Dict[Key, Tuple[Fraction, ...]]:
    """Nonzero class coordinates of a cocycle, split by cell."""
    parts: Dict[Key, Cochain] = {}
    for idx, a, exp, c in cochain.iter_basis():
        key = coh.cell_of(len(idx), sum(exp))
        term = Cochain.basis(coh.ctx.r, coh.ctx.n, idx, a, coh.ctx.m, exp, c)
        parts[key] = parts[key] + term if key in parts else term
    out = {}
    for key in sorted(parts, key=str):
        cls = coh.class_of(parts[key], key)
        if not cls.is_zero():
            out[key] = cls.coords
    return out
