"""Command line interface.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 window
overflow, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback
from typing import List, Optional

from .algebroid import AxiomReport, check_axioms
from .cohomology import (DEGREE, PARITY, Cohomology, cup_product, make_spec,
                         scalar_cohomology, verify_twist_invariance)
from .errors import ParseError, TwistcohError, ValidationError
from .fileformat import ModelBundle, load_form, load_model
from .forms import format_cochain
from .properties import run_properties
from .report import (axiom_section, betti_section, document, render_json,
                     render_text, twist_section)
from .twisted import validate_psi, validate_theta, verify_conjugation

WINDOW_ENV = "TWISTCOH_MAX_WEIGHT"
COMMANDS = ("check", "cohomology", "twisted", "verify-twist", "cup-table", "properties")


def default_window() -> int:
    raw = os.environ.get(WINDOW_ENV)
    if raw is None:
        return 6
    try:
        value = int(raw)
    except ValueError:
        raise SystemExit(f"{WINDOW_ENV} must be a non-negative integer, got {raw!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistcoh",
        description="Exact (twisted) Lie algebroid cohomology of polynomial models.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("model", help="model file (.alg)")
    parser.add_argument("--max-weight", type=int, default=None, metavar="W",
                        help=f"weight window (default 6, or ${WINDOW_ENV})")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--parallel", choices=("on", "off"), default="off")
    parser.add_argument("--seed", type=int, default=0, help="seed for the properties command")
    parser.add_argument("--trials", type=int, default=20, help="trials per property")
    parser.add_argument("--window-check", action="store_true",
                        help="recompute at W-2 to set stability flags")
    parser.add_argument("--theta", metavar="FILE", help="odd closed twisting form")
    parser.add_argument("--psi", metavar="FILE", help="even form for verify-twist")
    parser.add_argument("--timings", action="store_true",
                        help="add wall-clock timings (output is then not byte-stable)")
    return parser


class _Run:
    def __init__(self, args):
        self.args = args
        self.window = args.max_weight if args.max_weight is not None else default_window()
        if self.window < 0:
            raise ValidationError("--max-weight must be non-negative")
        self.parallel = args.parallel == "on"
        self.started = time.perf_counter()

    def bundle(self) -> ModelBundle:
        return load_model(self.args.model)

    def theta(self, bundle: ModelBundle, required: bool):
        if self.args.theta:
            theta = load_form(self.args.theta, bundle.model)
        else:
            theta = bundle.theta
        if theta is None and required:
            raise ValidationError("a twisting form is needed: pass --theta FILE or add [theta]")
        return theta

    def psi(self, bundle: ModelBundle):
        if self.args.psi:
            return load_form(self.args.psi, bundle.model)
        if bundle.psi is None:
            raise ValidationError("verify-twist needs --psi FILE or a [psi] section")
        return bundle.psi

    def finish(self, bundle: ModelBundle, body: dict, status: str = "ok", code: int = 0) -> int:
        timings = None
        if self.args.timings:
            timings = {"total_seconds": time.perf_counter() - self.started}
        doc = document(self.args.command, bundle.model, bundle.connection, body, status, code,
                       timings)
        text = render_json(doc) if self.args.format == "json" else render_text(doc)
        sys.stdout.write(text)
        return code


def cmd_check(run: _Run) -> int:
    bundle = run.bundle()
    body = {"axioms": axiom_section(check_axioms(bundle.model))}
    body["connection"] = {"rank": str(bundle.connection.rank), "flat": True}
    theta = run.theta(bundle, required=False)
    if theta is not None:
        validate_theta(bundle.model, theta)
        body["theta"] = {"form": format_cochain(theta), "odd": True, "closed": True}
    psi = bundle.psi if not run.args.psi else load_form(run.args.psi, bundle.model)
    if psi is not None:
        validate_psi(bundle.model, psi)
        body["psi"] = {"form": format_cochain(psi), "admissible": True}
    return run.finish(bundle, body)


def cmd_cohomology(run: _Run) -> int:
    bundle = run.bundle()
    spec = make_spec(bundle.connection, None, run.window, DEGREE)
    report = Cohomology(spec).report(run.parallel, run.args.window_check)
    return run.finish(bundle, {"cohomology": betti_section(report)})


def cmd_twisted(run: _Run) -> int:
    bundle = run.bundle()
    theta = run.theta(bundle, required=True)
    spec = make_spec(bundle.connection, theta, run.window, PARITY)
    report = Cohomology(spec).report(run.parallel, run.args.window_check)
    body = {"theta": format_cochain(theta), "cohomology": betti_section(report)}
    return run.finish(bundle, body)


def cmd_verify_twist(run: _Run) -> int:
    bundle = run.bundle()
    theta = run.theta(bundle, required=True)
    psi = run.psi(bundle)
    spec = make_spec(bundle.connection, theta, run.window, PARITY)
    rep = verify_twist_invariance(spec, psi, run.parallel, run.args.window_check)
    conj = verify_conjugation(bundle.connection, theta, psi, run.window)
    body = {"theta": format_cochain(theta), "psi": format_cochain(psi),
            "twist_invariance": twist_section(rep, conj)}
    ok = rep.isomorphic and conj.passed
    return run.finish(bundle, body, "ok" if ok else "fail", 0 if ok else 1)


def cmd_cup_table(run: _Run) -> int:
    bundle = run.bundle()
    coh = scalar_cohomology(bundle.model, run.window)
    coh.compute_all(run.parallel)
    classes, ids = [], {}
    for key in coh.window_cells():
        for i, cls in enumerate(coh.basis_classes(key)):
            ids[(key, i)] = f"c{len(ids) + 1}"
            classes.append(cls)
    listing = [{"id": ids[(c.cell, c.coords.index(1))], "degree": str(c.cell[1]),
                "representative": format_cochain(c.representative)} for c in classes]
    products = []
    for a in classes:
        for b in classes:
            prod = cup_product(a, b)
            terms = []
            for i, coeff in enumerate(prod.coords):
                if not coeff:
                    continue
                name = ids.get((prod.cell, i))
                if name is None:
                    name = f"[{format_cochain(coh.basis_classes(prod.cell)[i].representative)}]"
                terms.append((coeff, name))
            products.append({"left": ids[(a.cell, a.coords.index(1))],
                             "right": ids[(b.cell, b.coords.index(1))],
                             "product": _combination(terms)})
    body = {"window": str(run.window), "classes": listing, "products": products}
    return run.finish(bundle, body)


def _combination(terms) -> str:
    if not terms:
        return "0"
    parts = []
    for coeff, name in terms:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = name if mag == 1 else f"{mag}*{name}"
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def cmd_properties(run: _Run) -> int:
    bundle = run.bundle()
    theta = run.theta(bundle, required=False)
    results = run_properties(bundle.model, bundle.connection, theta, run.args.seed,
                             run.args.trials)
    body = {"seed": str(run.args.seed), "properties": [
        {"name": r.name, "trials": str(r.trials), "failures": str(r.failures),
         "passed": r.passed, "witness": r.witness or ""} for r in results]}
    ok = all(r.passed for r in results)
    return run.finish(bundle, body, "ok" if ok else "fail", 0 if ok else 4)


HANDLERS = {
    "check": cmd_check,
    "cohomology": cmd_cohomology,
    "twisted": cmd_twisted,
    "verify-twist": cmd_verify_twist,
    "cup-table": cmd_cup_table,
    "properties": cmd_properties,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = _Run(args)
        return HANDLERS[args.command](run)
    except OSError as err:
        print(f"error: cannot read input: {err}", file=sys.stderr)
        return ParseError.exit_code
    except TwistcohError as err:
        kind = type(err).__name__
        print(f"error ({kind}): {err}", file=sys.stderr)
        report = getattr(err, "report", None)
        if isinstance(report, AxiomReport):
            for violation in report.violations:
                print(f"  violation: {violation}", file=sys.stderr)
        return err.exit_code
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
