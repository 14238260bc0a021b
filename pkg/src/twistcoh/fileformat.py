"""Model and form files.

A model file is a sequence of sections::

    [model]
    kind = lie_algebra        # lie_algebra | action | poisson
    name = sl2
    rank = 3
    vars = 0
    pi = x1*d1^d2             # poisson only

    [anchor]
    e1 = x2*d1 - x1*d2

    [bracket]
    [e1, e2] = 2*e2

    [connection]
    rank = 1
    preset = trivial          # or adjoint
    D(e1, v1) = x1*v1         # nabla_{e1} v1

    [theta]
    e1 + x1*e2^e3

    [psi]
    e1^e2

Numbers are integers or ``p/q``.  ``^`` is a power when followed by an
integer and a wedge otherwise.  A form file holds one bare expression.
Generators ``e``, coordinate fields ``d``, frame sections ``v`` and
coordinates ``x`` are numbered from 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .algebroid import (ACTION, KINDS, LIE_ALGEBRA, POISSON, AlgebroidModel,
                        build_action_algebroid, build_lie_algebra,
                        build_poisson_algebroid)
from .cartan import Multivector
from .errors import ParseError, ValidationError
from .forms import Cochain, _join_terms, _term_text, format_cochain, sort_sign
from .poly import Poly
from .representations import (Connection, adjoint_connection, build_connection,
                              trivial_connection)
from .twisted import require_flat, validate_psi, validate_theta

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<sym>[xedv])(?P<idx>\d+)|(?P<op>[-+*/^(),\[\]=]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, x, e, d, v, op, end
    text: str
    value: int
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> List[Token]:
    """Tokens of one line of text; ``col`` is the column of ``text[0]``."""
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", line, col + start)
        start = m.start(m.lastgroup if m.lastgroup != "idx" else "sym")
        if m.group("num") is not None:
            out.append(Token("num", m.group("num"), int(m.group("num")), line, col + start))
        elif m.group("sym") is not None:
            idx = int(m.group("idx"))
            if idx < 1:
                raise ParseError(f"index must be at least 1 in {m.group(0).strip()}", line, col + start)
            out.append(Token(m.group("sym"), m.group("sym") + m.group("idx"), idx, line, col + start))
        else:
            out.append(Token("op", m.group("op"), 0, line, col + start))
        pos = m.end()
    out.append(Token("end", "", 0, line, col + len(text.rstrip())))
    return out


# expression values: {(wedge index tuple, frame index or None): Poly}

@dataclass
class _Val:
    terms: Dict[Tuple[Tuple[int, ...], Optional[int]], Poly]
    flavor: Optional[str]  # 'e', 'd' or None for wedge tokens present

    def is_scalar(self) -> bool:
        return all(k == ((), None) for k in self.terms)


class ExprParser:
    """Recursive-descent parser producing :class:`_Val` sums.

    ``limits`` bounds the indices: ``{'x': n, 'e': r, 'd': n, 'v': m}``.
    """

    def __init__(self, tokens: List[Token], limits: Dict[str, int]):
        self.tokens = tokens
        self.pos = 0
        self.limits = limits
        self.n = limits.get("x", 0)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of line'!r}")
        return self.take()

    def parse_all(self) -> _Val:
        val = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return val

    def _is_op(self, *texts) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in texts

    def expr(self) -> _Val:
        start = self.peek()
        neg = False
        if self._is_op("+", "-"):
            neg = self.take().text == "-"
        acc = self.term()
        if neg:
            acc = _scale(acc, Fraction(-1))
        while self._is_op("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = _add(acc, rhs if op.text == "+" else _scale(rhs, Fraction(-1)), op)
        if start.kind == "end":
            self.error("empty expression", start)
        return acc

    def term(self) -> _Val:
        acc = self.unary()
        while self._is_op("*", "/"):
            op = self.take()
            if op.text == "*":
                acc = _mul(acc, self.unary(), op)
            else:
                tok = self.take()
                if tok.kind != "num" or tok.value == 0:
                    self.error("division only by a nonzero integer literal", tok)
                acc = _scale(acc, Fraction(1, tok.value))
        return acc

    def unary(self) -> _Val:
        if self._is_op("-"):
            self.take()
            return _scale(self.unary(), Fraction(-1))
        return self.power()

    def power(self) -> _Val:
        acc = self.atom()
        while self._is_op("^"):
            op = self.take()
            if self.peek().kind == "num":
                tok = self.take()
                if not acc.is_scalar():
                    self.error("only polynomials can be raised to a power", op)
                poly = acc.terms.get(((), None), Poly.zero(self.n))
                acc = _Val({((), None): poly ** tok.value}, None)
                acc.terms = {k: v for k, v in acc.terms.items() if v}
            else:
                rhs = self.atom()
                if acc.flavor is None or rhs.flavor is None:
                    self.error("^ needs an integer exponent or forms on both sides", op)
                acc = _wedge(acc, rhs, op)
        return acc

    def atom(self) -> _Val:
        tok = self.take()
        n = self.n
        if tok.kind == "num":
            value = Fraction(tok.value)
            if self._is_op("/") and self.tokens[self.pos + 1].kind == "num":
                self.take()
                den = self.take()
                if den.value == 0:
                    self.error("zero denominator", den)
                value = Fraction(tok.value, den.value)
            return _Val({((), None): Poly.const(n, value)} if value else {}, None)
        if tok.kind in ("x", "e", "d", "v"):
            limit = self.limits.get(tok.kind)
            if limit is None:
                self.error(f"{tok.kind}-tokens are not allowed here", tok)
            if tok.value > limit:
                self.error(f"{tok.text} is out of range (at most {limit})", tok)
            k = tok.value - 1
            if tok.kind == "x":
                return _Val({((), None): Poly.var(n, k)}, None)
            if tok.kind == "v":
                return _Val({((), k): Poly.one(n)}, None)
            return _Val({((k,), None): Poly.one(n)}, tok.kind)
        if tok.kind == "op" and tok.text == "(":
            val = self.expr()
            self.expect(")")
            return val
        self.error(f"unexpected {tok.text or 'end of line'!r}", tok)


def _merge_flavor(a: _Val, b: _Val, tok: Token) -> Optional[str]:
    if a.flavor and b.flavor and a.flavor != b.flavor:
        raise ParseError(f"cannot combine {a.flavor}- and {b.flavor}-tokens", tok.line, tok.col)
    return a.flavor or b.flavor


def _add(a: _Val, b: _Val, tok: Token) -> _Val:
    flavor = _merge_flavor(a, b, tok)
    out = dict(a.terms)
    for k, v in b.terms.items():
        s = out[k] + v if k in out else v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return _Val(out, flavor)


def _scale(a: _Val, c: Fraction) -> _Val:
    return _Val({k: v * c for k, v in a.terms.items()} if c else {}, a.flavor)


def _combine(a: _Val, b: _Val, tok: Token, wedge: bool) -> _Val:
    flavor = _merge_flavor(a, b, tok)
    out: Dict = {}
    for (ia, va), pa in a.terms.items():
        for (ib, vb), pb in b.terms.items():
            if va is not None and vb is not None:
                raise ParseError("product of two frame sections", tok.line, tok.col)
            if ia and ib and not wedge:
                raise ParseError("use ^ for the wedge product", tok.line, tok.col)
            sign, key = sort_sign(ia + ib)
            if not sign:
                continue
            prod = pa * pb if sign > 0 else -(pa * pb)
            k = (key, va if va is not None else vb)
            s = out[k] + prod if k in out else prod
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return _Val(out, flavor)


def _mul(a, b, tok):
    return _combine(a, b, tok, wedge=False)


def _wedge(a, b, tok):
    return _combine(a, b, tok, wedge=True)


def parse_expression(text: str, limits: Dict[str, int], line: int = 1, col: int = 1) -> _Val:
    return ExprParser(tokenize(text, line, col), limits).parse_all()


# conversions

def _fail_at(message, line, col=None):
    raise ParseError(message, line, col)


def val_to_cochain(val: _Val, r: int, n: int, m: int = 1, line=None, col=None) -> Cochain:
    if val.flavor == "d":
        _fail_at("forms are written with e-tokens", line, col)
    terms: Dict[Tuple[int, ...], List[Poly]] = {}
    for (idx, v), p in val.terms.items():
        if m == 1 and v is not None and v != 0:
            _fail_at("scalar form cannot contain frame sections", line, col)
        if m > 1 and v is None:
            _fail_at("vector-valued form needs a frame section v<k> in every term", line, col)
        a = v or 0
        row = terms.setdefault(idx, [Poly.zero(n)] * m)
        row[a] = row[a] + p
    return Cochain(r, n, {k: tuple(v) for k, v in terms.items()}, m)


def val_to_multivector(val: _Val, n: int, line=None, col=None) -> Multivector:
    if val.flavor == "e" or any(v is not None for _, v in val.terms):
        _fail_at("multivectors are written with d-tokens", line, col)
    return Multivector(n, {idx: p for (idx, _), p in val.terms.items()})


def _degree_one(val: _Val, size: int, what: str, n: int, line, col) -> Tuple[Poly, ...]:
    out = [Poly.zero(n)] * size
    for (idx, v), p in val.terms.items():
        if v is not None or len(idx) != 1:
            _fail_at(f"{what} must be a combination of single tokens", line, col)
        out[idx[0]] = out[idx[0]] + p
    return tuple(out)


def val_to_frame_vector(val: _Val, m: int, n: int, line=None, col=None) -> Tuple[Poly, ...]:
    out = [Poly.zero(n)] * m
    for (idx, v), p in val.terms.items():
        if idx or v is None:
            _fail_at("connection values must be combinations of v-tokens", line, col)
        out[v] = out[v] + p
    return tuple(out)


# model files

@dataclass
class ModelBundle:
    model: AlgebroidModel
    connection: Connection
    theta: Optional[Cochain] = None
    psi: Optional[Cochain] = None
    path: Optional[str] = None


_SECTIONS = ("model", "anchor", "bracket", "connection", "theta", "psi")
_HEADER = re.compile(r"^\s*\[([A-Za-z_]+)\]\s*$")
_KEYVAL = re.compile(r"^\s*([A-Za-z_]+)\s*=\s*(.*?)\s*$")


@dataclass
class _Line:
    number: int
    text: str
    offset: int  # column of text[0] minus one


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _split_sections(text: str) -> Dict[str, Tuple[int, List[_Line]]]:
    sections: Dict[str, Tuple[int, List[_Line]]] = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _HEADER.match(line)
        if m:
            name = m.group(1)
            if name not in _SECTIONS:
                raise ParseError(f"unknown section [{name}]", number, line.index("[") + 1)
            if name in sections:
                raise ParseError(f"section [{name}] appears twice", number, line.index("[") + 1)
            sections[name] = (number, [])
            current = name
            continue
        if current is None:
            raise ParseError("content before the first section header", number, 1)
        sections[current][1].append(_Line(number, line, 0))
    return sections


def _keyvals(lines: List[_Line], allowed, section: str) -> Dict[str, Tuple[str, int, int]]:
    out = {}
    for ln in lines:
        m = _KEYVAL.match(ln.text)
        if not m:
            raise ParseError(f"expected key = value in [{section}]", ln.number, 1)
        key = m.group(1)
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} in [{section}]", ln.number, m.start(1) + 1)
        if key in out:
            raise ParseError(f"key {key!r} given twice", ln.number, m.start(1) + 1)
        out[key] = (m.group(2), ln.number, m.start(2) + 1)
    return out


def _int_value(entry, what) -> int:
    text, line, col = entry
    if not re.fullmatch(r"\d+", text):
        raise ParseError(f"{what} must be a non-negative integer", line, col)
    return int(text)


_BRACKET = re.compile(r"^\s*\[\s*e(\d+)\s*,\s*e(\d+)\s*\]\s*=\s*(.*)$")
_ANCHOR = re.compile(r"^\s*e(\d+)\s*=\s*(.*)$")
_CONN = re.compile(r"^\s*D\(\s*e(\d+)\s*,\s*v(\d+)\s*\)\s*=\s*(.*)$")


def _rhs(ln: _Line, m: re.Match, group: int, limits) -> Tuple[_Val, int]:
    col = m.start(group) + 1
    return parse_expression(m.group(group), limits, ln.number, col), col


def _check_index(value: int, limit: int, what: str, line: int, col: int) -> int:
    if not 1 <= value <= limit:
        raise ParseError(f"{what}{value} is out of range (1..{limit})", line, col)
    return value - 1


def _located(err: ValidationError, line: int, path: Optional[str]) -> ValidationError:
    where = f"{path or '<input>'}:{line}"
    err.args = (f"{where}: {err.args[0]}",)
    err.line = line
    return err


def parse_model(text: str, path: Optional[str] = None) -> ModelBundle:
    """Parse, build and validate a model file."""
    try:
        return _parse_model(text, path)
    except ParseError as err:
        raise err.with_path(path) if path else err


def _parse_model(text: str, path: Optional[str]) -> ModelBundle:
    sections = _split_sections(text)
    if "model" not in sections:
        raise ParseError("missing [model] section", 1, 1)
    head_line, head = sections["model"]
    kv = _keyvals(head, ("kind", "name", "rank", "vars", "pi"), "model")
    if "kind" not in kv:
        raise ParseError("[model] needs a kind", head_line, 1)
    kind, kline, kcol = kv["kind"]
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r} (expected one of {', '.join(KINDS)})", kline, kcol)
    name = kv["name"][0] if "name" in kv else ""
    n = _int_value(kv["vars"], "vars") if "vars" in kv else 0
    if kind == POISSON:
        if "pi" not in kv:
            raise ParseError("poisson model needs pi = ...", head_line, 1)
        r = n
        if "rank" in kv and _int_value(kv["rank"], "rank") != n:
            raise ParseError("poisson rank equals the number of variables", kv["rank"][1], kv["rank"][2])
        for sec in ("anchor", "bracket"):
            if sec in sections:
                raise ParseError(f"[{sec}] is derived from pi for poisson models", sections[sec][0], 1)
    else:
        if "pi" in kv:
            raise ParseError("pi is only allowed for poisson models", kv["pi"][1], kv["pi"][2])
        if "rank" not in kv:
            raise ParseError("[model] needs a rank", head_line, 1)
        r = _int_value(kv["rank"], "rank")
        if kind == LIE_ALGEBRA and n:
            raise ParseError("a lie_algebra lives over a point (vars = 0)", kv["vars"][1], kv["vars"][2])
        if kind == LIE_ALGEBRA and "anchor" in sections:
            raise ParseError("a lie_algebra has no anchor", sections["anchor"][0], 1)

    if kind == POISSON:
        text_pi, pline, pcol = kv["pi"]
        pi_val = parse_expression(text_pi, {"x": n, "d": n}, pline, pcol)
        pi = val_to_multivector(pi_val, n, pline, pcol)
        try:
            model = build_poisson_algebroid(pi, name)
        except ValidationError as err:
            raise _located(err, pline, path)
    else:
        anchor = [(Poly.zero(n),) * n for _ in range(r)]
        seen = {}
        for ln in sections.get("anchor", (0, []))[1]:
            m = _ANCHOR.match(ln.text)
            if not m:
                raise ParseError("expected e<k> = <vector field>", ln.number, 1)
            i = _check_index(int(m.group(1)), r, "e", ln.number, m.start(1))
            if i in seen:
                raise ParseError(f"anchor of e{i + 1} given twice", ln.number, 1)
            val, col = _rhs(ln, m, 2, {"x": n, "d": n})
            anchor[i] = _degree_one(val, n, "anchor", n, ln.number, col)
            seen[i] = ln.number
        constants = {}
        bracket_lines = {}
        for ln in sections.get("bracket", (0, []))[1]:
            m = _BRACKET.match(ln.text)
            if not m:
                raise ParseError("expected [e<i>, e<j>] = <combination of generators>", ln.number, 1)
            i = _check_index(int(m.group(1)), r, "e", ln.number, m.start(1))
            j = _check_index(int(m.group(2)), r, "e", ln.number, m.start(2))
            key = (min(i, j), max(i, j))
            if i == j:
                raise ParseError("bracket of a generator with itself", ln.number, 1)
            if key in bracket_lines:
                raise ParseError(f"bracket [e{key[0] + 1}, e{key[1] + 1}] given twice", ln.number, 1)
            bracket_lines[key] = ln.number
            val, col = _rhs(ln, m, 3, {"e": r})
            section = _degree_one(val, r, "bracket value", 0, ln.number, col)
            for k, c in enumerate(section):
                if c:
                    constants[(i, j, k)] = c.constant_term()
        try:
            if kind == LIE_ALGEBRA:
                model = build_lie_algebra(r, constants, name)
            else:
                model = build_action_algebroid(constants, n, anchor, name)
        except ValidationError as err:
            wit = err.witness
            line = sections.get("bracket", sections.get("anchor", (head_line,)))[0]
            if isinstance(wit, tuple) and len(wit) == 2 and all(isinstance(x, int) for x in wit):
                line = bracket_lines.get(tuple(sorted(wit)), line)
            raise _located(err, line, path)

    conn = _parse_connection(sections, model, path)
    theta = _parse_form_section(sections, "theta", model, path)
    psi = _parse_form_section(sections, "psi", model, path)
    return ModelBundle(model, conn, theta, psi, path)


def _parse_connection(sections, model: AlgebroidModel, path) -> Connection:
    if "connection" not in sections:
        return trivial_connection(model)
    head_line, lines = sections["connection"]
    n, r = model.nvars, model.rank
    settings = {}
    entries = []
    for ln in lines:
        m = _CONN.match(ln.text)
        if m:
            entries.append((ln, m))
            continue
        kv = _keyvals([ln], ("rank", "preset"), "connection")
        settings.update(kv)
    m_rank = _int_value(settings["rank"], "rank") if "rank" in settings else None
    preset = settings.get("preset", ("", 0, 0))
    if preset[0]:
        if entries:
            raise ParseError("preset and explicit D(...) lines cannot be mixed", entries[0][0].number, 1)
        if preset[0] == "trivial":
            conn = trivial_connection(model)
        elif preset[0] == "adjoint":
            try:
                conn = adjoint_connection(model)
            except ValueError as err:
                raise ParseError(str(err), preset[1], preset[2])
        else:
            raise ParseError(f"unknown preset {preset[0]!r}", preset[1], preset[2])
        if m_rank is not None and m_rank != conn.rank:
            raise ParseError(f"preset {preset[0]} has rank {conn.rank}", settings["rank"][1], settings["rank"][2])
    else:
        m = 1 if m_rank is None else m_rank
        if m < 1:
            raise ParseError("connection rank must be positive", head_line, 1)
        gammas = [[[Poly.zero(n)] * m for _ in range(m)] for _ in range(r)]
        seen = set()
        for ln, mt in entries:
            i = _check_index(int(mt.group(1)), r, "e", ln.number, mt.start(1))
            a = _check_index(int(mt.group(2)), m, "v", ln.number, mt.start(2))
            if (i, a) in seen:
                raise ParseError(f"D(e{i + 1}, v{a + 1}) given twice", ln.number, 1)
            seen.add((i, a))
            val, col = _rhs(ln, mt, 3, {"x": n, "v": m})
            gammas[i][a] = list(val_to_frame_vector(val, m, n, ln.number, col))
        conn = build_connection(model, m, gammas, "file")
    try:
        require_flat(conn)
    except ValidationError as err:
        raise _located(err, head_line, path)
    return conn


def _parse_form_section(sections, name: str, model: AlgebroidModel, path) -> Optional[Cochain]:
    if name not in sections:
        return None
    head_line, lines = sections[name]
    if not lines:
        raise ParseError(f"[{name}] is empty", head_line, 1)
    total = Cochain.zero(model.rank, model.nvars)
    for ln in lines:
        val = parse_expression(ln.text, {"x": model.nvars, "e": model.rank}, ln.number, 1)
        total = total + val_to_cochain(val, model.rank, model.nvars, 1, ln.number, 1)
    try:
        if name == "theta":
            validate_theta(model, total)
        else:
            validate_psi(model, total)
    except ValidationError as err:
        raise _located(err, head_line, path)
    return total


def parse_form(text: str, model: AlgebroidModel, path: Optional[str] = None) -> Cochain:
    """A bare scalar form expression (possibly spread over several lines)."""
    total = Cochain.zero(model.rank, model.nvars)
    found = False
    try:
        for number, raw in enumerate(text.splitlines(), start=1):
            line = _strip_comment(raw)
            if not line.strip():
                continue
            found = True
            val = parse_expression(line, {"x": model.nvars, "e": model.rank}, number, 1)
            total = total + val_to_cochain(val, model.rank, model.nvars, 1, number, 1)
        if not found:
            raise ParseError("empty form file", 1, 1)
    except ParseError as err:
        raise err.with_path(path) if path else err
    return total


def load_model(path) -> ModelBundle:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), str(path))


def load_form(path, model: AlgebroidModel) -> Cochain:
    path = Path(path)
    return parse_form(path.read_text(encoding="utf-8"), model, str(path))


# printing

def _section_text(vals, symbol: str) -> str:
    pieces = [_term_text(p, f"{symbol}{k + 1}") for k, p in enumerate(vals) if p]
    return _join_terms(pieces) if pieces else "0"


def format_model_file(model: AlgebroidModel, conn: Optional[Connection] = None,
                      theta: Optional[Cochain] = None, psi: Optional[Cochain] = None) -> str:
    """Canonical text of a model file; parses back to an equal model."""
    out = ["[model]", f"kind = {model.kind}"]
    if model.name:
        out.append(f"name = {model.name}")
    if model.kind == POISSON:
        out.append(f"vars = {model.nvars}")
        pi = model.source.get("pi")
        if pi is None:
            raise ValueError("poisson model without its bivector")
        out.append(f"pi = {pi}")
    else:
        out.append(f"rank = {model.rank}")
        out.append(f"vars = {model.nvars}")
        if model.kind == ACTION:
            lines = [f"e{i + 1} = {_section_text(f, 'd')}" for i, f in enumerate(model.anchor) if any(f)]
            if lines:
                out += ["", "[anchor]"] + lines
        if model.structure:
            out += ["", "[bracket]"]
            for (i, j), vals in sorted(model.structure.items()):
                out.append(f"[e{i + 1}, e{j + 1}] = {_section_text(vals, 'e')}")
    if conn is not None and not conn.is_trivial():
        out += ["", "[connection]", f"rank = {conn.rank}"]
        for i, gamma in enumerate(conn.christoffel):
            for a, row in enumerate(gamma):
                if any(row):
                    out.append(f"D(e{i + 1}, v{a + 1}) = {_section_text(row, 'v')}")
    if theta is not None:
        out += ["", "[theta]", format_cochain(theta)]
    if psi is not None:
        out += ["", "[psi]", format_cochain(psi)]
    return "\n".join(out) + "\n"


def format_bundle(bundle: ModelBundle) -> str:
    return format_model_file(bundle.model, bundle.connection, bundle.theta, bundle.psi)
