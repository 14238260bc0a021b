"""Structured reports: plain dicts rendered as JSON or text.

Every number is stored as a decimal string so that JSON consumers never see
floats and the output is byte-stable.
"""

from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Optional

from .algebroid import AlgebroidModel, AxiomReport
from .cohomology import PARITY, BettiReport, TwistInvarianceReport
from .fileformat import format_model_file
from .forms import format_cochain
from .representations import Connection

TOOL = "twistcoh"
VERSION = "0.1.0"


def model_digest(model: AlgebroidModel, conn: Optional[Connection] = None) -> str:
    text = format_model_file(model, conn)
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def model_section(model: AlgebroidModel, conn: Optional[Connection] = None) -> dict:
    return {
        "name": model.name or "(unnamed)",
        "kind": model.kind,
        "rank": str(model.rank),
        "vars": str(model.nvars),
        "shift": str(model.shift),
        "coefficient_rank": str(conn.rank if conn is not None else 1),
        "digest": model_digest(model, conn),
    }


def axiom_section(report: AxiomReport) -> dict:
    return {
        "passed": report.passed,
        "window": str(report.window),
        "checked": {k: str(v) for k, v in sorted(report.checked.items())},
        "violations": [str(v) for v in report.violations],
    }


def _cell_label(cell, parity: bool) -> str:
    g, grade = cell
    grade_text = ("even" if grade == 0 else "odd") if parity else f"p={grade}"
    return grade_text if g is None else f"G={g},{grade_text}"


def betti_section(report: BettiReport) -> dict:
    parity = report.mode == PARITY
    lines = []
    by_line: Dict[object, List] = {}
    for e in report.entries:
        by_line.setdefault(e.line, []).append(e)
    for summary in report.lines:
        entries = by_line.get(summary.label, [])
        lines.append({
            "label": str(summary.label) if not isinstance(summary.label, tuple)
            else _cell_label(summary.label, parity),
            "cells": [{"cell": _cell_label(k, parity), "dim": str(d), "in_window": w}
                      for k, d, w in zip(summary.cells, summary.dims, summary.in_window)],
            "euler": {"cochains": str(summary.euler_dims), "betti": str(summary.euler_betti),
                      "ok": summary.euler_ok},
            "entries": [{
                "cell": _cell_label(e.cell, parity),
                "grade": str(e.grade),
                "dim": str(e.dim),
                "betti": str(e.betti),
                "certified": e.certified,
                "stable": e.stable,
                "representatives": [format_cochain(c) for c in e.representatives],
            } for e in entries],
        })
    totals = report.totals()
    names = ["even", "odd"] if parity else [f"H{p}" for p in range(len(totals))]
    return {
        "mode": report.mode,
        "window": str(report.window),
        "grading": str(report.grading) if report.grading else "none (whole window)",
        "window_check": report.window_checked,
        "lines": lines,
        "totals": {k: str(v) for k, v in zip(names, totals)},
        "unstable_entries": str(len(report.unstable())),
        "euler_ok": all(s.euler_ok for s in report.lines),
    }


def twist_section(rep: TwistInvarianceReport, conjugation=None) -> dict:
    out = {
        "isomorphic": rep.isomorphic,
        "betti_equal": rep.betti_equal,
        "class_map_checked": rep.class_map_checked,
        "images_closed": rep.images_closed,
        "class_map_bijective": rep.class_map_bijective,
        "equivariance_checked": str(rep.equivariance_checked),
        "equivariance_ok": rep.equivariance_ok,
        "witnesses": list(rep.witnesses),
    }
    if conjugation is not None:
        out["conjugation"] = {
            "checked": str(conjugation.checked),
            "passed": conjugation.passed,
            "exp_derivative_ok": conjugation.exp_derivative_ok,
            "failures": str(len(conjugation.failures)),
        }
    out["theta_cohomology"] = betti_section(rep.betti_theta)
    out["shifted_cohomology"] = betti_section(rep.betti_shifted)
    return out


def document(command: str, model: AlgebroidModel, conn: Optional[Connection],
             body: dict, status: str, exit_code: int, timings: Optional[dict] = None) -> dict:
    doc = {
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "model": model_section(model, conn),
    }
    doc.update(body)
    if timings is not None:
        doc["timings"] = {k: f"{v:.3f}" for k, v in timings.items()}
    doc["status"] = status
    doc["exit_code"] = str(exit_code)
    return doc


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_text(doc: dict) -> str:
    """Indented ``key: value`` rendering of the same document.

    In Betti tables a ``*`` marks cells outside the window (computed only as
    neighbours) and ``-`` their unreported Betti numbers.
    """
    out: List[str] = []
    _render(doc, 0, out)
    return "\n".join(out) + "\n"


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _is_betti(value) -> bool:
    return isinstance(value, dict) and "lines" in value and "totals" in value


def _render_betti(key: str, sec: dict, indent: int, out: List[str]):
    pad = "  " * indent
    out.append(f"{pad}{key}: mode {sec['mode']}, window {sec['window']}, "
               f"window_check {_scalar(sec['window_check'])}")
    out.append(f"{pad}  grading: {sec['grading']}")
    for line in sec["lines"]:
        dims = " ".join(c["dim"] + ("" if c["in_window"] else "*") for c in line["cells"])
        by_cell = {e["cell"]: e for e in line["entries"]}
        bettis = " ".join(by_cell[c["cell"]]["betti"] if c["cell"] in by_cell else "-"
                          for c in line["cells"])
        eu = line["euler"]
        out.append(f"{pad}  line {line['label']}: dims {dims} | betti {bettis} | "
                   f"euler {eu['cochains']} = {eu['betti']}")
        for e in line["entries"]:
            flags = []
            if not e["certified"]:
                flags.append("uncertified")
            if not e["stable"]:
                flags.append("unstable")
            note = f" ({', '.join(flags)})" if flags else ""
            if e["representatives"] or flags:
                reps = "; ".join(e["representatives"]) or "none"
                out.append(f"{pad}    [{e['cell']}] betti {e['betti']}{note}: {reps}")
    totals = ", ".join(f"{k} {v}" for k, v in sec["totals"].items())
    out.append(f"{pad}  totals: {totals}")
    out.append(f"{pad}  unstable entries: {sec['unstable_entries']}; "
               f"euler identity on every line: {_scalar(sec['euler_ok'])}")


def _render(value, indent: int, out: List[str]):
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if _is_betti(item):
                _render_betti(key, item, indent, out)
            elif isinstance(item, (dict, list)) and item:
                if isinstance(item, dict) and all(not isinstance(v, (dict, list)) for v in item.values()) \
                        and len(item) <= 8:
                    inner = ", ".join(f"{k} {_scalar(v)}" for k, v in item.items())
                    out.append(f"{pad}{key}: {inner}")
                else:
                    out.append(f"{pad}{key}:")
                    _render(item, indent + 1, out)
            elif isinstance(item, (dict, list)):
                out.append(f"{pad}{key}: none")
            else:
                out.append(f"{pad}{key}: {_scalar(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                first = True
                for key, sub in item.items():
                    lead = "- " if first else "  "
                    first = False
                    if isinstance(sub, (dict, list)) and sub:
                        if isinstance(sub, dict) and all(not isinstance(v, (dict, list)) for v in sub.values()):
                            inner = ", ".join(f"{k} {_scalar(v)}" for k, v in sub.items())
                            out.append(f"{pad}{lead}{key}: {inner}")
                        else:
                            out.append(f"{pad}{lead}{key}:")
                            _render(sub, indent + 2, out)
                    elif isinstance(sub, (dict, list)):
                        out.append(f"{pad}{lead}{key}: none")
                    else:
                        out.append(f"{pad}{lead}{key}: {_scalar(sub)}")
            else:
                out.append(f"{pad}- {_scalar(item)}")
