"""SMT-LIB 2 emission for formulas with numeric theory atoms.

Classification picks QF_IDL/QF_RDL when every theory atom is a difference
or bound, QF_LIA/QF_LRA for general affine atoms; solving is delegated to
an external solver process (command template), whose model is re-checked
against the formula before being reported.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .grounder import (
    GAnd,
    GBool,
    GCard,
    GIff,
    GImpl,
    GLit,
    GNot,
    GOr,
    GroundFormula,
    GTheory,
    collect_atoms,
)
from .lang import (
    AConst,
    ArithExpr,
    Bin,
    Int,
    LangError,
    NumTerm,
    Rat,
    Scalar,
    Sqrt,
    scalar_text,
)

DEFAULT_TIMEOUT = 30.0


class SmtError(LangError):
    pass


def term_name(name: str, indices: tuple[Scalar, ...]) -> str:
    """Canonical SMT symbol for a ground term or atom: name_i1_i2."""
    if not indices:
        return name
    return name + "_" + "_".join(scalar_text(i) for i in indices)


# ---------------------------------------------------------------------------
# Classification


def collect_theory_atoms(g: GroundFormula, out: list[GTheory] | None = None) -> list[GTheory]:
    if out is None:
        out = []
    if isinstance(g, GTheory):
        out.append(g)
    elif isinstance(g, GNot):
        collect_theory_atoms(g.child, out)
    elif isinstance(g, (GAnd, GOr)):
        for c in g.children:
            collect_theory_atoms(c, out)
    elif isinstance(g, (GImpl, GIff)):
        collect_theory_atoms(g.lhs, out)
        collect_theory_atoms(g.rhs, out)
    elif isinstance(g, GCard):
        for c in g.items:
            collect_theory_atoms(c, out)
    return out


def _linearize(a: ArithExpr) -> tuple[dict[str, Fraction], Fraction]:
    """Affine view {term -> coeff}, constant; raises SmtError on nonlinearity."""
    if isinstance(a, AConst):
        if not a.value.is_num:
            raise SmtError(
                f"symbol '{a.value.value}' is not numeric", a.span,
                note="declare it with 'int' or 'real' to use it in constraints",
            )
        return {}, Fraction(a.value.value).limit_denominator(10**12) if a.value.kind == "rat" else Fraction(a.value.value)
    if isinstance(a, NumTerm):
        key = term_name(a.name, tuple(i.value for i in a.indices))  # type: ignore[union-attr]
        return {key: Fraction(1)}, Fraction(0)
    if isinstance(a, Bin):
        lc, lk = _linearize(a.lhs)
        rc, rk = _linearize(a.rhs)
        if a.op == "+":
            return _merge(lc, rc, 1), lk + rk
        if a.op == "-":
            return _merge(lc, rc, -1), lk - rk
        if a.op == "*":
            if lc and rc:
                raise SmtError("nonlinear term: product of two theory terms", a.span)
            if lc:
                return {t: c * rk for t, c in lc.items()}, lk * rk
            return {t: c * lk for t, c in rc.items()}, lk * rk
        if a.op == "/":
            if rc:
                raise SmtError("division by a theory term is not linear", a.span)
            if rk == 0:
                raise SmtError("division by zero in theory atom", a.span)
            return {t: c / rk for t, c in lc.items()}, lk / rk
        if a.op == "mod":
            raise SmtError("mod is not supported on theory terms", a.span)
    if isinstance(a, Sqrt):
        raise SmtError("sqrt is not supported on theory terms", a.span)
    raise SmtError(f"cannot analyze term {a!r}", getattr(a, "span", None))


def _merge(lc: dict[str, Fraction], rc: dict[str, Fraction], sign: int) -> dict[str, Fraction]:
    out = dict(lc)
    for t, c in rc.items():
        out[t] = out.get(t, Fraction(0)) + sign * c
    return {t: c for t, c in out.items() if c != 0}


def collect_terms(g: GroundFormula) -> list[tuple[str, tuple[Scalar, ...]]]:
    """Distinct ground numeric terms in first-occurrence order."""
    seen: dict[tuple[str, tuple[Scalar, ...]], None] = {}

    def walk_arith(a: ArithExpr) -> None:
        if isinstance(a, NumTerm):
            key = (a.name, tuple(i.value for i in a.indices))  # type: ignore[union-attr]
            seen.setdefault(key, None)
        elif isinstance(a, Bin):
            walk_arith(a.lhs)
            walk_arith(a.rhs)
        elif isinstance(a, Sqrt):
            walk_arith(a.child)

    for atom in collect_theory_atoms(g):
        walk_arith(atom.lhs)
        walk_arith(atom.rhs)
    return list(seen)


def classify(g: GroundFormula, sorts: dict[str, str]) -> str:
    """"sat" for pure propositional input, else the SMT-LIB logic name."""
    atoms = collect_theory_atoms(g)
    if not atoms:
        return "sat"
    used_sorts = set()
    for name, _indices in collect_terms(g):
        sort = sorts.get(name)
        if sort is None:
            raise SmtError(f"numeric symbol '{name}' is not declared")
        used_sorts.add(sort)
    if used_sorts == {"int", "real"}:
        raise SmtError("mixed int and real theory terms are not supported")
    real = "real" in used_sorts
    difference = True
    for atom in atoms:
        lc, lk = _linearize(atom.lhs)
        rc, rk = _linearize(atom.rhs)
        coeffs = _merge(lc, rc, -1)
        values = sorted(coeffs.values())
        if values not in ([], [Fraction(1)], [Fraction(-1)], [Fraction(-1), Fraction(1)]):
            difference = False
        if not real and any(c.denominator != 1 for c in coeffs.values()):
            raise SmtError("non-integer coefficient with int-sorted terms")
    if difference:
        return "QF_RDL" if real else "QF_IDL"
    return "QF_LRA" if real else "QF_LIA"


# ---------------------------------------------------------------------------
# Emission


@dataclass(frozen=True)
class SmtScript:
    logic: str
    bools: tuple[str, ...]
    consts: tuple[tuple[str, str], ...]  # (name, "Int"|"Real")
    text: str


_CMP_SMT = {"==": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _numeral(s: Scalar, real: bool) -> str:
    if s.kind == "int":
        v = s.value
        body = f"{v}.0" if real else str(v)
        if v < 0:
            return f"(- {f'{-v}.0' if real else str(-v)})"
        return body
    if s.kind == "rat":
        if not real:
            raise SmtError(f"non-integer constant {scalar_text(s)} with int-sorted terms")
        v = s.value
        body = repr(abs(v))
        if "e" in body or "E" in body:  # SMT decimals have no exponent form
            frac = Fraction(abs(v)).limit_denominator(10**15)
            body = f"(/ {frac.numerator}.0 {frac.denominator}.0)"
        return f"(- {body})" if v < 0 else body
    raise SmtError(f"symbol '{s.value}' is not numeric")


def _emit_arith(a: ArithExpr, real: bool) -> str:
    if isinstance(a, AConst):
        return _numeral(a.value, real)
    if isinstance(a, NumTerm):
        return term_name(a.name, tuple(i.value for i in a.indices))  # type: ignore[union-attr]
    if isinstance(a, Bin):
        if a.op == "mod":
            raise SmtError("mod is not supported on theory terms", a.span)
        op = {"+": "+", "-": "-", "*": "*", "/": "/"}[a.op]
        if a.op == "/" and not real:
            raise SmtError("division is not supported with int-sorted terms", a.span)
        return f"({op} {_emit_arith(a.lhs, real)} {_emit_arith(a.rhs, real)})"
    if isinstance(a, Sqrt):
        raise SmtError("sqrt is not supported on theory terms", a.span)
    raise SmtError(f"cannot emit term {a!r}")


def _emit_formula(g: GroundFormula, real: bool) -> str:
    if isinstance(g, GBool):
        return "true" if g.value else "false"
    if isinstance(g, GLit):
        name = term_name(g.atom.name, g.atom.indices)
        return name if g.positive else f"(not {name})"
    if isinstance(g, GNot):
        return f"(not {_emit_formula(g.child, real)})"
    if isinstance(g, GAnd):
        return "(and " + " ".join(_emit_formula(c, real) for c in g.children) + ")"
    if isinstance(g, GOr):
        return "(or " + " ".join(_emit_formula(c, real) for c in g.children) + ")"
    if isinstance(g, GImpl):
        return f"(=> {_emit_formula(g.lhs, real)} {_emit_formula(g.rhs, real)})"
    if isinstance(g, GIff):
        return f"(= {_emit_formula(g.lhs, real)} {_emit_formula(g.rhs, real)})"
    if isinstance(g, GTheory):
        lhs = _emit_arith(g.lhs, real)
        rhs = _emit_arith(g.rhs, real)
        if g.cmp == "!=":
            return f"(distinct {lhs} {rhs})"
        return f"({_CMP_SMT[g.cmp]} {lhs} {rhs})"
    if isinstance(g, GCard):
        return _emit_card(g, real)
    raise SmtError(f"cannot emit {g!r}")


def _emit_card(g: GCard, real: bool) -> str:
    """Cardinality as plain Boolean structure (binomial shape)."""
    items = [_emit_formula(c, real) for c in g.items]
    n, k = len(items), g.k

    def atmost(bound: int) -> list[str]:
        if bound >= n:
            return []
        return [
            "(or " + " ".join(f"(not {e})" for e in subset) + ")"
            for subset in combinations(items, bound + 1)
        ]

    def atleast(bound: int) -> list[str]:
        if bound <= 0:
            return []
        return [
            "(or " + " ".join(subset) + ")"
            for subset in combinations(items, n - bound + 1)
        ]

    if g.kind == "atmost":
        parts = atmost(k)
    elif g.kind == "atleast":
        parts = atleast(k)
    else:
        parts = atleast(k) + atmost(k)
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def emit_smtlib(g: GroundFormula, sorts: dict[str, str]) -> SmtScript:
    logic = classify(g, sorts)
    if logic == "sat":
        raise SmtError("formula has no theory atoms; use the CNF pipeline")
    return _emit(g, sorts, logic)


def emit_smtlib_forced(g: GroundFormula, sorts: dict[str, str]) -> SmtScript:
    """Emit even for a pure propositional formula (Bool-only script)."""
    logic = classify(g, sorts)
    return _emit(g, sorts, "QF_UF" if logic == "sat" else logic)


def _emit(g: GroundFormula, sorts: dict[str, str], logic: str) -> SmtScript:
    real = logic in ("QF_RDL", "QF_LRA")
    bools = tuple(term_name(a.name, a.indices) for a in collect_atoms(g))
    consts = tuple(
        (term_name(name, indices), "Real" if sorts[name] == "real" else "Int")
        for name, indices in collect_terms(g)
    )
    names: set[str] = set()
    for n in list(bools) + [c[0] for c in consts]:
        if n in names:
            raise SmtError(
                f"name collision: '{n}' denotes two different atoms or terms",
                note="indexed names are flattened with underscores; rename one symbol",
            )
        names.add(n)
    lines = ["(set-option :produce-models true)", f"(set-logic {logic})"]
    for b in bools:
        lines.append(f"(declare-const {b} Bool)")
    for name, sort in consts:
        lines.append(f"(declare-const {name} {sort})")
    lines.append(f"(assert {_emit_formula(g, real)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return SmtScript(logic, bools, consts, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Structural validation (independent of any external solver)

_KNOWN_OPS = {
    "and", "or", "not", "=>", "=", "distinct", "<", "<=", ">", ">=",
    "+", "-", "*", "/", "true", "false",
}


def parse_sexprs(text: str) -> list:
    """Parse s-expressions into nested lists of strings."""
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "()":
            tokens.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append(text[i:j])
            i = j
    out: list = []
    stack: list[list] = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SmtError("unbalanced ')' in script")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise SmtError("unbalanced '(' in script")
    return out


def check_script(text: str) -> None:
    """Well-formedness: balanced s-exprs, declare-before-use, one assert."""
    forms = parse_sexprs(text)
    declared: set[str] = set()
    asserts = 0
    for form in forms:
        if not isinstance(form, list) or not form:
            raise SmtError(f"top-level junk in script: {form!r}")
        head = form[0]
        if head == "declare-const":
            name = form[1]
            if name in declared:
                raise SmtError(f"'{name}' declared twice")
            declared.add(name)
        elif head == "assert":
            asserts += 1
            _check_uses(form[1], declared)
        elif head in ("set-option", "set-logic", "check-sat", "get-model"):
            continue
        else:
            raise SmtError(f"unexpected command {head!r}")
    if asserts != 1:
        raise SmtError(f"expected exactly one assert, found {asserts}")


def _check_uses(node, declared: set[str]) -> None:
    if isinstance(node, list):
        if not node:
            raise SmtError("empty application")
        head = node[0]
        if isinstance(head, str) and head not in _KNOWN_OPS:
            raise SmtError(f"unknown operator {head!r}")
        for child in node[1:]:
            _check_uses(child, declared)
        return
    if node in _KNOWN_OPS:
        return
    if _is_numeral(node):
        return
    if node not in declared:
        raise SmtError(f"symbol '{node}' used before declaration")


def _is_numeral(tok: str) -> bool:
    body = tok
    try:
        float(body)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# External solver adapter


class SmtSolverError(LangError):
    pass


@dataclass
class SmtResult:
    status: str  # "sat" | "unsat" | "unknown"
    values: dict[str, object]  # name -> bool | Scalar


def run_external(
    script: str, cmd_template: str, timeout: float = DEFAULT_TIMEOUT
) -> SmtResult:
    """Run an SMT-LIB 2 solver; `{file}` in the template names a temp file,
    otherwise the script goes to stdin."""
    argv = shlex.split(cmd_template)
    tmp_path = None
    try:
        if any("{file}" in a for a in argv):
            fd, tmp_path = tempfile.mkstemp(suffix=".smt2")
            with os.fdopen(fd, "w") as f:
                f.write(script)
            argv = [a.replace("{file}", tmp_path) for a in argv]
            stdin_data = None
        else:
            stdin_data = script
        try:
            proc = subprocess.run(
                argv, input=stdin_data, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired:
            return SmtResult("unknown", {})
        except OSError as err:
            raise SmtSolverError(f"cannot run SMT solver: {err}") from err
        return parse_solver_output(proc.stdout)
    finally:
        if tmp_path is not None:
            os.unlink(tmp_path)


def parse_solver_output(out: str) -> SmtResult:
    status = None
    rest_lines = []
    for line in out.splitlines():
        word = line.strip()
        if status is None and word in ("sat", "unsat", "unknown"):
            status = word
            continue
        rest_lines.append(line)
    if status is None:
        raise SmtSolverError(f"unparseable solver output: {out[:200]!r}")
    if status != "sat":
        return SmtResult(status, {})
    values: dict[str, object] = {}
    try:
        forms = parse_sexprs("\n".join(rest_lines))
    except SmtError as err:
        raise SmtSolverError(f"unparseable model: {err}") from err
    defs: list = []
    for form in forms:
        if isinstance(form, list):
            if form and form[0] == "model":
                defs.extend(form[1:])
            else:
                defs.extend([form] if form and form[0] == "define-fun" else form)
    for d in defs:
        if not (isinstance(d, list) and len(d) >= 5 and d[0] == "define-fun"):
            continue
        name, _args, _sort, value = d[1], d[2], d[3], d[4]
        values[name] = _parse_value(value)
    return SmtResult("sat", values)


def _parse_value(v) -> object:
    if v == "true":
        return True
    if v == "false":
        return False
    if isinstance(v, str):
        try:
            return Int(int(v))
        except ValueError:
            return Rat(float(v))
    if isinstance(v, list) and v:
        if v[0] == "-":
            inner = _parse_value(v[1])
            return Int(-inner.value) if inner.kind == "int" else Rat(-inner.value)  # type: ignore[union-attr]
        if v[0] == "/":
            num = _parse_value(v[1])
            den = _parse_value(v[2])
            return Rat(num.value / den.value)  # type: ignore[union-attr]
    raise SmtSolverError(f"cannot parse model value {v!r}")


# ---------------------------------------------------------------------------
# Model re-checking


def verify_smt_model(g: GroundFormula, values: dict[str, object]) -> bool:
    """Re-evaluate the formula under a solver assignment (missing -> false/0)."""

    def num(name: str) -> Fraction:
        s = values.get(name)
        if s is None:
            return Fraction(0)
        if isinstance(s, Scalar):
            return Fraction(s.value) if s.kind == "int" else Fraction(s.value).limit_denominator(10**12)
        raise SmtSolverError(f"expected numeric value for {name}, got {s!r}")

    def ev_arith(a: ArithExpr) -> Fraction:
        if isinstance(a, AConst):
            return Fraction(a.value.value) if a.value.kind == "int" else Fraction(a.value.value).limit_denominator(10**12)
        if isinstance(a, NumTerm):
            return num(term_name(a.name, tuple(i.value for i in a.indices)))  # type: ignore[union-attr]
        if isinstance(a, Bin):
            lv, rv = ev_arith(a.lhs), ev_arith(a.rhs)
            return {
                "+": lv + rv,
                "-": lv - rv,
                "*": lv * rv,
                "/": lv / rv if rv else Fraction(0),
            }[a.op]
        raise SmtSolverError(f"cannot evaluate term {a!r}")

    def ev(g: GroundFormula) -> bool:
        if isinstance(g, GBool):
            return g.value
        if isinstance(g, GLit):
            val = bool(values.get(term_name(g.atom.name, g.atom.indices), False))
            return val if g.positive else not val
        if isinstance(g, GNot):
            return not ev(g.child)
        if isinstance(g, GAnd):
            return all(ev(c) for c in g.children)
        if isinstance(g, GOr):
            return any(ev(c) for c in g.children)
        if isinstance(g, GImpl):
            return (not ev(g.lhs)) or ev(g.rhs)
        if isinstance(g, GIff):
            return ev(g.lhs) == ev(g.rhs)
        if isinstance(g, GCard):
            count = sum(1 for c in g.items if ev(c))
            return {"atleast": count >= g.k, "atmost": count <= g.k, "exact": count == g.k}[g.kind]
        if isinstance(g, GTheory):
            lv, rv = ev_arith(g.lhs), ev_arith(g.rhs)
            return {
                "==": lv == rv,
                "!=": lv != rv,
                "<": lv < rv,
                "<=": lv <= rv,
                ">": lv > rv,
                ">=": lv >= rv,
            }[g.cmp]
        raise SmtSolverError(f"cannot evaluate {g!r}")

    return ev(g)
