"""Core value model and formula AST shared by all compilation stages.

Scalars are machine integers, double-precision rationals, or symbols.
Formulas carry source spans (byte offsets) on every node; structural
equality ignores spans so parse/render round-trips compare cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

Span = tuple[int, int]


class LangError(Exception):
    """Evaluation or typing error, with an optional source span."""

    def __init__(self, message: str, span: Span | None = None, note: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.note = note


# ---------------------------------------------------------------------------
# Scalars and set values


@dataclass(frozen=True)
class Scalar:
    """One scalar value: kind is "int", "rat" or "sym".

    Int and Rat compare numerically (1 == 1.0); Sym compares by string.
    Equality across the numeric/symbol divide is total (always unequal);
    *ordering* across it is a type error, raised by `scalar_cmp`.
    """

    kind: str
    value: Union[int, float, str]

    def __post_init__(self):
        if self.kind not in ("int", "rat", "sym"):
            raise ValueError(f"bad scalar kind {self.kind!r}")

    @property
    def is_num(self) -> bool:
        return self.kind != "sym"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.is_num and other.is_num:
            return self.value == other.value
        return self.kind == other.kind and self.value == other.value

    def __hash__(self) -> int:
        # hash(1) == hash(1.0) in Python, so numeric cross-kind equality is safe
        return hash(self.value)

    def __repr__(self) -> str:
        return f"Scalar({self.kind}, {self.value!r})"


def Int(n: int) -> Scalar:
    return Scalar("int", int(n))


def Rat(x: float) -> Scalar:
    """Rational constructor; integral doubles normalize to Int.

    Keeps canonical atom text unambiguous: P(3.0) and P(3) are the same
    ground atom, so the integral form is the canonical one.
    """
    f = float(x)
    if not math.isfinite(f):
        raise LangError(f"non-finite numeric value {f!r}")
    if f == int(f):
        return Int(int(f))
    return Scalar("rat", f)


def Sym(name: str) -> Scalar:
    return Scalar("sym", name)


def scalar_text(s: Scalar) -> str:
    """Canonical text form used in ground atom names and renderings."""
    if s.kind == "rat":
        return repr(s.value)
    return str(s.value)


def scalar_cmp(a: Scalar, b: Scalar, span: Span | None = None) -> int:
    """Three-way comparison; cross-kind numeric/symbol ordering is a type error."""
    if a.is_num and b.is_num:
        av, bv = a.value, b.value
    elif a.kind == "sym" and b.kind == "sym":
        av, bv = a.value, b.value
    else:
        raise LangError(
            f"cannot compare {scalar_text(a)} ({a.kind}) with {scalar_text(b)} ({b.kind})",
            span,
        )
    return -1 if av < bv else (1 if av > bv else 0)


@dataclass(frozen=True)
class SetValue:
    """Finite ordered duplicate-free collection of scalars."""

    elements: tuple[Scalar, ...]

    @staticmethod
    def of(items: Iterable[Scalar]) -> "SetValue":
        seen: list[Scalar] = []
        for x in items:
            if x not in seen:
                seen.append(x)
        return SetValue(tuple(seen))

    def __contains__(self, item: Scalar) -> bool:
        return item in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


# ---------------------------------------------------------------------------
# Arithmetic expressions (indices, cardinality bounds, theory-atom sides)


def _span():
    return field(default=None, compare=False, kw_only=True)


@dataclass(frozen=True)
class ArithExpr:
    span: Span | None = _span()


@dataclass(frozen=True)
class AConst(ArithExpr):
    value: Scalar


@dataclass(frozen=True)
class AVar(ArithExpr):
    name: str  # "$i"


@dataclass(frozen=True)
class NumTerm(ArithExpr):
    """Occurrence of a declared numeric theory symbol, e.g. x(1,2) or tau(a)."""

    name: str
    indices: tuple[ArithExpr, ...] = ()


@dataclass(frozen=True)
class Bin(ArithExpr):
    op: str  # one of + - * / mod
    lhs: ArithExpr
    rhs: ArithExpr


@dataclass(frozen=True)
class Sqrt(ArithExpr):
    child: ArithExpr


# ---------------------------------------------------------------------------
# Set expressions


@dataclass(frozen=True)
class SetExpr:
    span: Span | None = _span()


@dataclass(frozen=True)
class SetName(SetExpr):
    name: str  # "$N"


@dataclass(frozen=True)
class SetRange(SetExpr):
    lo: ArithExpr
    hi: ArithExpr


@dataclass(frozen=True)
class SetLit(SetExpr):
    elems: tuple[ArithExpr, ...]


@dataclass(frozen=True)
class SetOp(SetExpr):
    op: str  # union | inter | diff
    lhs: SetExpr
    rhs: SetExpr


# ---------------------------------------------------------------------------
# Binder conditions


@dataclass(frozen=True)
class Cond:
    span: Span | None = _span()


@dataclass(frozen=True)
class CmpC(Cond):
    op: str  # == != < <= > >=
    lhs: ArithExpr
    rhs: ArithExpr


@dataclass(frozen=True)
class InC(Cond):
    elem: ArithExpr
    domain: SetExpr


@dataclass(frozen=True)
class NotC(Cond):
    child: Cond


@dataclass(frozen=True)
class AndC(Cond):
    children: tuple[Cond, ...]


@dataclass(frozen=True)
class OrC(Cond):
    children: tuple[Cond, ...]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Expr:
    span: Span | None = _span()


@dataclass(frozen=True)
class Atom(Expr):
    name: str
    indices: tuple[ArithExpr, ...] = ()


@dataclass(frozen=True)
class VarAtom(Expr):
    """Predicate variable: $X(...) where $X ranges over a symbol domain."""

    var: str  # "$X"
    indices: tuple[ArithExpr, ...] = ()


@dataclass(frozen=True)
class Not(Expr):
    child: Expr


@dataclass(frozen=True)
class And(Expr):
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Or(Expr):
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Impl(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Iff(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Binder:
    var: str  # "$i"
    domain: SetExpr
    span: Span | None = _span()


@dataclass(frozen=True)
class BigAnd(Expr):
    binders: tuple[Binder, ...]
    body: Expr
    when: Cond | None = None


@dataclass(frozen=True)
class BigOr(Expr):
    binders: tuple[Binder, ...]
    body: Expr
    when: Cond | None = None


@dataclass(frozen=True)
class Card(Expr):
    kind: str  # atleast | atmost | exact
    k: ArithExpr
    binders: tuple[Binder, ...]
    body: Expr
    when: Cond | None = None


@dataclass(frozen=True)
class TheoryAtom(Expr):
    cmp: str  # == != < <= > >=
    lhs: ArithExpr
    rhs: ArithExpr


@dataclass(frozen=True)
class BoolConst(Expr):
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class Program:
    sets: tuple[tuple[str, SetExpr], ...] = ()  # ("$N", expr), declaration order
    numerics: tuple[tuple[str, str], ...] = ()  # (sort "int"|"real", name)
    formulas: tuple[Expr, ...] = ()

    def set_names(self) -> set[str]:
        return {name for name, _ in self.sets}

    def numeric_names(self) -> set[str]:
        return {name for _, name in self.numerics}


# ---------------------------------------------------------------------------
# Free variables

RESERVED_PREFIX = "_"  # generated atom names (Tseitin, counters) start with _


def free_vars(e: Expr) -> set[str]:
    """Unbound $-variables of a formula (declared set names count as free)."""
    out: set[str] = set()
    _fv_expr(e, set(), out)
    return out


def _fv_arith(a: ArithExpr, bound: set[str], out: set[str]) -> None:
    if isinstance(a, AVar):
        if a.name not in bound:
            out.add(a.name)
    elif isinstance(a, NumTerm):
        for i in a.indices:
            _fv_arith(i, bound, out)
    elif isinstance(a, Bin):
        _fv_arith(a.lhs, bound, out)
        _fv_arith(a.rhs, bound, out)
    elif isinstance(a, Sqrt):
        _fv_arith(a.child, bound, out)


def _fv_set(s: SetExpr, bound: set[str], out: set[str]) -> None:
    if isinstance(s, SetName):
        if s.name not in bound:
            out.add(s.name)
    elif isinstance(s, SetRange):
        _fv_arith(s.lo, bound, out)
        _fv_arith(s.hi, bound, out)
    elif isinstance(s, SetLit):
        for e in s.elems:
            _fv_arith(e, bound, out)
    elif isinstance(s, SetOp):
        _fv_set(s.lhs, bound, out)
        _fv_set(s.rhs, bound, out)


def _fv_cond(c: Cond, bound: set[str], out: set[str]) -> None:
    if isinstance(c, CmpC):
        _fv_arith(c.lhs, bound, out)
        _fv_arith(c.rhs, bound, out)
    elif isinstance(c, InC):
        _fv_arith(c.elem, bound, out)
        _fv_set(c.domain, bound, out)
    elif isinstance(c, NotC):
        _fv_cond(c.child, bound, out)
    elif isinstance(c, (AndC, OrC)):
        for ch in c.children:
            _fv_cond(ch, bound, out)


def _fv_expr(e: Expr, bound: set[str], out: set[str]) -> None:
    if isinstance(e, Atom):
        for i in e.indices:
            _fv_arith(i, bound, out)
    elif isinstance(e, VarAtom):
        if e.var not in bound:
            out.add(e.var)
        for i in e.indices:
            _fv_arith(i, bound, out)
    elif isinstance(e, Not):
        _fv_expr(e.child, bound, out)
    elif isinstance(e, (And, Or)):
        for ch in e.children:
            _fv_expr(ch, bound, out)
    elif isinstance(e, (Impl, Iff)):
        _fv_expr(e.lhs, bound, out)
        _fv_expr(e.rhs, bound, out)
    elif isinstance(e, (BigAnd, BigOr, Card)):
        if isinstance(e, Card):
            _fv_arith(e.k, bound, out)
        inner = set(bound)
        for b in e.binders:
            _fv_set(b.domain, inner, out)  # earlier binders visible in later domains
            inner.add(b.var)
        if e.when is not None:
            _fv_cond(e.when, inner, out)
        _fv_expr(e.body, inner, out)
    elif isinstance(e, TheoryAtom):
        _fv_arith(e.lhs, bound, out)
        _fv_arith(e.rhs, bound, out)
    # BoolConst: nothing
