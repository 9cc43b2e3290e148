"""Grounding: set/arith/condition evaluation and binder expansion.

Produces variable-free GroundFormula trees. Binder tuples are enumerated
in lexicographic order of the binder domains' iteration orders; `when`
filters are evaluated with all binders of the construct in scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lang import (
    AConst,
    AndC,
    ArithExpr,
    Atom,
    AVar,
    BigAnd,
    BigOr,
    Bin,
    BoolConst,
    Card,
    CmpC,
    Cond,
    Expr,
    Iff,
    Impl,
    InC,
    And,
    Int,
    LangError,
    Not,
    NotC,
    NumTerm,
    Or,
    OrC,
    Program,
    Rat,
    Scalar,
    SetExpr,
    SetLit,
    SetName,
    SetOp,
    SetRange,
    SetValue,
    Sqrt,
    TheoryAtom,
    VarAtom,
    scalar_cmp,
    scalar_text,
)


class GroundError(LangError):
    """Evaluation failure during grounding, decorated with binder values."""


@dataclass
class Env:
    sets: dict[str, SetValue] = field(default_factory=dict)
    binds: dict[str, Scalar] = field(default_factory=dict)
    numerics: dict[str, str] = field(default_factory=dict)  # name -> "int"|"real"


# ---------------------------------------------------------------------------
# Ground formula representation


@dataclass(frozen=True)
class GroundAtom:
    name: str
    indices: tuple[Scalar, ...] = ()

    def text(self) -> str:
        if not self.indices:
            return self.name
        return f"{self.name}({','.join(scalar_text(i) for i in self.indices)})"


class GroundFormula:
    pass


@dataclass(frozen=True)
class GLit(GroundFormula):
    atom: GroundAtom
    positive: bool = True


@dataclass(frozen=True)
class GNot(GroundFormula):
    child: GroundFormula


@dataclass(frozen=True)
class GAnd(GroundFormula):
    children: tuple[GroundFormula, ...]


@dataclass(frozen=True)
class GOr(GroundFormula):
    children: tuple[GroundFormula, ...]


@dataclass(frozen=True)
class GImpl(GroundFormula):
    lhs: GroundFormula
    rhs: GroundFormula


@dataclass(frozen=True)
class GIff(GroundFormula):
    lhs: GroundFormula
    rhs: GroundFormula


@dataclass(frozen=True)
class GCard(GroundFormula):
    kind: str  # atleast | atmost | exact
    k: int
    items: tuple[GroundFormula, ...]


@dataclass(frozen=True)
class GTheory(GroundFormula):
    cmp: str
    lhs: ArithExpr  # ground: AVar-free, NumTerm indices are constants
    rhs: ArithExpr


@dataclass(frozen=True)
class GBool(GroundFormula):
    value: bool


GTRUE = GBool(True)
GFALSE = GBool(False)


def g_and(items: list[GroundFormula]) -> GroundFormula:
    if not items:
        return GTRUE
    if len(items) == 1:
        return items[0]
    return GAnd(tuple(items))


def g_or(items: list[GroundFormula]) -> GroundFormula:
    if not items:
        return GFALSE
    if len(items) == 1:
        return items[0]
    return GOr(tuple(items))


# ---------------------------------------------------------------------------
# Evaluation


def eval_arith(a: ArithExpr, env: Env) -> Scalar:
    if isinstance(a, AConst):
        return a.value
    if isinstance(a, AVar):
        v = env.binds.get(a.name)
        if v is None:
            raise GroundError(f"unbound variable {a.name}", a.span)
        return v
    if isinstance(a, NumTerm):
        raise GroundError(
            f"numeric symbol '{a.name}' cannot appear in index arithmetic", a.span
        )
    if isinstance(a, Sqrt):
        v = eval_arith(a.child, env)
        if not v.is_num:
            raise GroundError(f"sqrt of non-numeric value {scalar_text(v)}", a.span)
        if v.value < 0:
            raise GroundError(f"sqrt of negative value {scalar_text(v)}", a.span)
        if v.kind == "int":
            r = math.isqrt(v.value)
            if r * r == v.value:
                return Int(r)
        return Rat(math.sqrt(v.value))
    if isinstance(a, Bin):
        lv = eval_arith(a.lhs, env)
        rv = eval_arith(a.rhs, env)
        if not (lv.is_num and rv.is_num):
            raise GroundError(
                f"arithmetic on non-numeric value "
                f"({scalar_text(lv)} {a.op} {scalar_text(rv)})",
                a.span,
            )
        both_int = lv.kind == "int" and rv.kind == "int"
        x, y = lv.value, rv.value
        if a.op == "+":
            return Int(x + y) if both_int else Rat(x + y)
        if a.op == "-":
            return Int(x - y) if both_int else Rat(x - y)
        if a.op == "*":
            return Int(x * y) if both_int else Rat(x * y)
        if a.op == "/":
            if y == 0:
                raise GroundError("division by zero", a.span)
            if both_int and x % y == 0:
                return Int(x // y)
            return Rat(x / y)
        if a.op == "mod":
            if not both_int:
                raise GroundError("mod requires integer operands", a.span)
            if y == 0:
                raise GroundError("mod by zero", a.span)
            return Int(x % y)
    raise GroundError(f"cannot evaluate {a!r}")


def eval_set(s: SetExpr, env: Env) -> SetValue:
    if isinstance(s, SetName):
        v = env.sets.get(s.name)
        if v is None:
            raise GroundError(f"undeclared set {s.name}", s.span)
        return v
    if isinstance(s, SetRange):
        lo = eval_arith(s.lo, env)
        hi = eval_arith(s.hi, env)
        if lo.kind != "int" or hi.kind != "int":
            raise GroundError(
                f"range bounds must be integers, got {scalar_text(lo)}..{scalar_text(hi)}",
                s.span,
            )
        return SetValue(tuple(Int(i) for i in range(lo.value, hi.value + 1)))
    if isinstance(s, SetLit):
        return SetValue.of(eval_arith(e, env) for e in s.elems)
    if isinstance(s, SetOp):
        lv = eval_set(s.lhs, env)
        rv = eval_set(s.rhs, env)
        if s.op == "union":
            return SetValue.of(list(lv) + list(rv))
        if s.op == "inter":
            return SetValue.of(x for x in lv if x in rv)
        if s.op == "diff":
            return SetValue.of(x for x in lv if x not in rv)
    raise GroundError(f"cannot evaluate set {s!r}")


def eval_cond(c: Cond, env: Env) -> bool:
    if isinstance(c, CmpC):
        lv = eval_arith(c.lhs, env)
        rv = eval_arith(c.rhs, env)
        cmp = scalar_cmp(lv, rv, c.span)
        return {
            "==": cmp == 0,
            "!=": cmp != 0,
            "<": cmp < 0,
            "<=": cmp <= 0,
            ">": cmp > 0,
            ">=": cmp >= 0,
        }[c.op]
    if isinstance(c, InC):
        v = eval_arith(c.elem, env)
        return v in eval_set(c.domain, env)
    if isinstance(c, NotC):
        return not eval_cond(c.child, env)
    if isinstance(c, AndC):
        return all(eval_cond(x, env) for x in c.children)
    if isinstance(c, OrC):
        return any(eval_cond(x, env) for x in c.children)
    raise GroundError(f"cannot evaluate condition {c!r}")


# ---------------------------------------------------------------------------
# Cardinality normalization


def normalize_card(c: GCard) -> GroundFormula:
    """Fold degenerate bounds; non-degenerate nodes are kept for CNF."""
    n = len(c.items)
    k = c.k
    if c.kind == "atleast":
        if k <= 0:
            return GTRUE
        if k > n:
            return GFALSE
        if k == n:
            return g_and(list(c.items))
        return c
    if c.kind == "atmost":
        if k < 0:
            return GFALSE
        if k >= n:
            return GTRUE
        if k == 0:
            return g_and([GNot(x) for x in c.items])
        return c
    if c.kind == "exact":
        if k < 0 or k > n:
            return GFALSE
        return c
    raise ValueError(f"bad cardinality kind {c.kind!r}")


# ---------------------------------------------------------------------------
# Grounding


def _has_numterm(a: ArithExpr) -> bool:
    if isinstance(a, NumTerm):
        return True
    if isinstance(a, Bin):
        return _has_numterm(a.lhs) or _has_numterm(a.rhs)
    if isinstance(a, Sqrt):
        return _has_numterm(a.child)
    return False


def _ground_arith(a: ArithExpr, env: Env) -> ArithExpr:
    """Close an arithmetic term over the current bindings.

    NumTerm-free subtrees fold to constants; theory-symbol occurrences keep
    their structure with constant indices.
    """
    if not _has_numterm(a):
        return AConst(eval_arith(a, env), span=a.span)
    if isinstance(a, NumTerm):
        idx = tuple(AConst(eval_arith(i, env), span=i.span) for i in a.indices)
        return NumTerm(a.name, idx, span=a.span)
    if isinstance(a, Bin):
        return Bin(a.op, _ground_arith(a.lhs, env), _ground_arith(a.rhs, env), span=a.span)
    if isinstance(a, Sqrt):
        return Sqrt(_ground_arith(a.child, env), span=a.span)
    raise GroundError(f"cannot ground {a!r}", a.span)


def _bind_context(env: Env) -> str:
    return ", ".join(f"{v}={scalar_text(s)}" for v, s in env.binds.items())


def _decorate(err: LangError, env: Env) -> GroundError:
    """Attach the binder values in effect, once."""
    if getattr(err, "ctx_added", False):
        return err  # type: ignore[return-value]
    ctx = _bind_context(env)
    msg = err.message + (f" (with {ctx})" if ctx else "")
    out = GroundError(msg, err.span, err.note)
    out.ctx_added = True  # type: ignore[attr-defined]
    return out


class _Grounder:
    def __init__(self, program: Program):
        self.env = Env()
        for sort, name in program.numerics:
            self.env.numerics[name] = sort
        for name, sx in program.sets:
            self.env.sets[name] = eval_set(sx, self.env)
        self.program = program

    def ground(self) -> GroundFormula:
        parts = [self._expr(f) for f in self.program.formulas]
        return g_and(parts) if len(parts) > 1 else parts[0]

    def _expr(self, e: Expr) -> GroundFormula:
        env = self.env
        try:
            if isinstance(e, Atom):
                idx = tuple(eval_arith(i, env) for i in e.indices)
                return GLit(GroundAtom(e.name, idx))
            if isinstance(e, VarAtom):
                val = env.binds.get(e.var)
                if val is None:
                    raise GroundError(
                        f"{e.var} is a set name, not a predicate variable", e.span
                    )
                if val.kind != "sym":
                    raise GroundError(
                        f"predicate variable {e.var} is bound to {scalar_text(val)}; "
                        "atom names must be identifiers",
                        e.span,
                    )
                idx = tuple(eval_arith(i, env) for i in e.indices)
                return GLit(GroundAtom(val.value, idx))
            if isinstance(e, BoolConst):
                return GTRUE if e.value else GFALSE
            if isinstance(e, Not):
                return GNot(self._expr(e.child))
            if isinstance(e, And):
                return GAnd(tuple(self._expr(c) for c in e.children))
            if isinstance(e, Or):
                return GOr(tuple(self._expr(c) for c in e.children))
            if isinstance(e, Impl):
                return GImpl(self._expr(e.lhs), self._expr(e.rhs))
            if isinstance(e, Iff):
                return GIff(self._expr(e.lhs), self._expr(e.rhs))
            if isinstance(e, (BigAnd, BigOr)):
                items = self._expand(e.binders, e.when, e.body)
                return g_and(items) if isinstance(e, BigAnd) else g_or(items)
            if isinstance(e, Card):
                kv = eval_arith(e.k, env)
                if kv.kind != "int":
                    raise GroundError(
                        f"cardinality bound must be an integer, got {scalar_text(kv)}",
                        e.k.span,
                    )
                items = self._expand(e.binders, e.when, e.body)
                return normalize_card(GCard(e.kind, kv.value, tuple(items)))
            if isinstance(e, TheoryAtom):
                lhs = _ground_arith(e.lhs, env)
                rhs = _ground_arith(e.rhs, env)
                if isinstance(lhs, AConst) and isinstance(rhs, AConst):
                    cmp = scalar_cmp(lhs.value, rhs.value, e.span)
                    result = {
                        "==": cmp == 0,
                        "!=": cmp != 0,
                        "<": cmp < 0,
                        "<=": cmp <= 0,
                        ">": cmp > 0,
                        ">=": cmp >= 0,
                    }[e.cmp]
                    return GTRUE if result else GFALSE
                return GTheory(e.cmp, lhs, rhs)
        except LangError as err:
            raise _decorate(err, env) from err
        raise GroundError(f"cannot ground {e!r}", e.span)

    def _expand(self, binders, when, body) -> list[GroundFormula]:
        env = self.env
        out: list[GroundFormula] = []
        saved = {b.var: env.binds.get(b.var) for b in binders}

        def rec(depth: int) -> None:
            if depth == len(binders):
                if when is not None:
                    try:
                        keep = eval_cond(when, env)
                    except LangError as err:
                        raise _decorate(err, env) from err
                    if not keep:
                        return
                out.append(self._expr(body))
                return
            b = binders[depth]
            try:
                domain = eval_set(b.domain, env)
            except LangError as err:
                raise _decorate(err, env) from err
            for value in domain:
                env.binds[b.var] = value
                rec(depth + 1)

        try:
            rec(0)
        finally:
            for var, old in saved.items():
                if old is None:
                    env.binds.pop(var, None)
                else:
                    env.binds[var] = old
        return out


def ground(program: Program) -> GroundFormula:
    """Ground a whole program; top-level formulas are conjoined in order."""
    return _Grounder(program).ground()


def ground_env(program: Program) -> Env:
    """Evaluate just the set declarations (useful for tooling and tests)."""
    return _Grounder(program).env


# ---------------------------------------------------------------------------
# Ground-formula utilities shared by later stages


def collect_atoms(g: GroundFormula, out: list[GroundAtom] | None = None) -> list[GroundAtom]:
    """User atoms in first-occurrence order of a left-to-right traversal."""
    if out is None:
        out = []
    seen = {a for a in out}
    _collect(g, out, seen)
    return out


def _collect(g: GroundFormula, out: list[GroundAtom], seen: set[GroundAtom]) -> None:
    if isinstance(g, GLit):
        if g.atom not in seen:
            seen.add(g.atom)
            out.append(g.atom)
    elif isinstance(g, GNot):
        _collect(g.child, out, seen)
    elif isinstance(g, (GAnd, GOr)):
        for c in g.children:
            _collect(c, out, seen)
    elif isinstance(g, (GImpl, GIff)):
        _collect(g.lhs, out, seen)
        _collect(g.rhs, out, seen)
    elif isinstance(g, GCard):
        for c in g.items:
            _collect(c, out, seen)


def has_theory(g: GroundFormula) -> bool:
    if isinstance(g, GTheory):
        return True
    if isinstance(g, GNot):
        return has_theory(g.child)
    if isinstance(g, (GAnd, GOr)):
        return any(has_theory(c) for c in g.children)
    if isinstance(g, (GImpl, GIff)):
        return has_theory(g.lhs) or has_theory(g.rhs)
    if isinstance(g, GCard):
        return any(has_theory(c) for c in g.items)
    return False


def eval_ground(g: GroundFormula, assignment: dict[GroundAtom, bool]) -> bool:
    """Truth value of a theory-free ground formula under a total assignment."""
    if isinstance(g, GBool):
        return g.value
    if isinstance(g, GLit):
        v = assignment[g.atom]
        return v if g.positive else not v
    if isinstance(g, GNot):
        return not eval_ground(g.child, assignment)
    if isinstance(g, GAnd):
        return all(eval_ground(c, assignment) for c in g.children)
    if isinstance(g, GOr):
        return any(eval_ground(c, assignment) for c in g.children)
    if isinstance(g, GImpl):
        return (not eval_ground(g.lhs, assignment)) or eval_ground(g.rhs, assignment)
    if isinstance(g, GIff):
        return eval_ground(g.lhs, assignment) == eval_ground(g.rhs, assignment)
    if isinstance(g, GCard):
        count = sum(1 for c in g.items if eval_ground(c, assignment))
        if g.kind == "atleast":
            return count >= g.k
        if g.kind == "atmost":
            return count <= g.k
        return count == g.k
    raise LangError(f"cannot evaluate {g!r} under a propositional assignment")
