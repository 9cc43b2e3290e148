"""Rendering of ASTs back to input syntax and to LaTeX display form.

render_input is the inverse of the parser: parse(render_input(e)) is
structurally equal to e (spans aside). render_latex is display-only and
never emits $-prefixed names.
"""

from __future__ import annotations

from .lang import (
    AConst,
    AndC,
    ArithExpr,
    Atom,
    AVar,
    BigAnd,
    BigOr,
    Bin,
    Binder,
    BoolConst,
    Card,
    CmpC,
    Cond,
    Expr,
    Iff,
    Impl,
    InC,
    And,
    Not,
    NotC,
    NumTerm,
    Or,
    OrC,
    Program,
    SetExpr,
    SetLit,
    SetName,
    SetOp,
    SetRange,
    Sqrt,
    TheoryAtom,
    VarAtom,
    scalar_text,
)

# Formula precedence levels, loosest to tightest.
_IFF, _IMPL, _OR, _AND, _NOT, _PRIM = 1, 2, 3, 4, 5, 6

# Arith precedence levels.
_ADD, _MUL, _UNARY = 1, 2, 3


def render_arith(a: ArithExpr, min_level: int = 0) -> str:
    if isinstance(a, AConst):
        text = scalar_text(a.value)
        level = _UNARY if not text.startswith("-") else _ADD
    elif isinstance(a, AVar):
        text, level = a.name, _UNARY
    elif isinstance(a, NumTerm):
        if a.indices:
            text = f"{a.name}({', '.join(render_arith(i) for i in a.indices)})"
        else:
            text = a.name
        level = _UNARY
    elif isinstance(a, Sqrt):
        text, level = f"sqrt({render_arith(a.child)})", _UNARY
    elif isinstance(a, Bin):
        level = _ADD if a.op in ("+", "-") else _MUL
        op = f" {a.op} " if a.op != "mod" else " mod "
        text = f"{render_arith(a.lhs, level)}{op}{render_arith(a.rhs, level + 1)}"
    else:
        raise TypeError(f"unknown arith node {a!r}")
    return f"({text})" if level < min_level else text


def render_set(s: SetExpr, min_level: int = 0) -> str:
    # set ops are left-associative and share one precedence level
    if isinstance(s, SetName):
        text, level = s.name, 2
    elif isinstance(s, SetRange):
        text, level = f"({render_arith(s.lo)}..{render_arith(s.hi)})", 2
    elif isinstance(s, SetLit):
        inner = ", ".join(render_arith(e) for e in s.elems)
        if len(s.elems) == 1:
            inner += ","
        text, level = f"({inner})", 2
    elif isinstance(s, SetOp):
        text = f"{render_set(s.lhs, 1)} {s.op} {render_set(s.rhs, 2)}"
        level = 1
    else:
        raise TypeError(f"unknown set node {s!r}")
    return f"({text})" if level < min_level else text


def render_cond(c: Cond, min_level: int = 0) -> str:
    # condition levels: or=1, and=2, not=3, primary=4
    if isinstance(c, CmpC):
        text, level = f"{render_arith(c.lhs)} {c.op} {render_arith(c.rhs)}", 4
    elif isinstance(c, InC):
        text, level = f"{render_arith(c.elem)} in {render_set(c.domain)}", 4
    elif isinstance(c, NotC):
        text, level = f"not {render_cond(c.child, 3)}", 3
    elif isinstance(c, AndC):
        text = " and ".join(render_cond(x, 3) for x in c.children)
        level = 2
    elif isinstance(c, OrC):
        text = " or ".join(render_cond(x, 2) for x in c.children)
        level = 1
    else:
        raise TypeError(f"unknown cond node {c!r}")
    return f"({text})" if level < min_level else text


def _render_binders(binders: tuple[Binder, ...], when: Cond | None) -> str:
    parts = ", ".join(f"{b.var} in {render_set(b.domain)}" for b in binders)
    if when is not None:
        parts += f" when {render_cond(when)}"
    return parts


def render_input(e: Expr, min_level: int = 0) -> str:
    """Formula in input syntax; parses back to a structurally equal AST."""
    if isinstance(e, Atom):
        text = e.name
        if e.indices:
            text += f"({', '.join(render_arith(i) for i in e.indices)})"
        level = _PRIM
    elif isinstance(e, VarAtom):
        text = e.var
        if e.indices:
            text += f"({', '.join(render_arith(i) for i in e.indices)})"
        level = _PRIM
    elif isinstance(e, BoolConst):
        text, level = ("true" if e.value else "false"), _PRIM
    elif isinstance(e, Not):
        text, level = f"not {render_input(e.child, _NOT)}", _NOT
    elif isinstance(e, And):
        text = " and ".join(render_input(c, _AND + 1) for c in e.children)
        level = _AND
    elif isinstance(e, Or):
        text = " or ".join(render_input(c, _OR + 1) for c in e.children)
        level = _OR
    elif isinstance(e, Impl):
        text = f"{render_input(e.lhs, _IMPL + 1)} => {render_input(e.rhs, _IMPL)}"
        level = _IMPL
    elif isinstance(e, Iff):
        text = f"{render_input(e.lhs, _IFF + 1)} <=> {render_input(e.rhs, _IFF)}"
        level = _IFF
    elif isinstance(e, BigAnd):
        text = f"bigand {_render_binders(e.binders, e.when)}: {render_input(e.body)} end"
        level = _PRIM
    elif isinstance(e, BigOr):
        text = f"bigor {_render_binders(e.binders, e.when)}: {render_input(e.body)} end"
        level = _PRIM
    elif isinstance(e, Card):
        text = (
            f"{e.kind} {render_arith(e.k)}, {_render_binders(e.binders, e.when)}:"
            f" {render_input(e.body)} end"
        )
        level = _PRIM
    elif isinstance(e, TheoryAtom):
        text = f"{render_arith(e.lhs)} {e.cmp} {render_arith(e.rhs)}"
        level = _NOT  # comparisons sit just below `not`
    else:
        raise TypeError(f"unknown formula node {e!r}")
    return f"({text})" if level < min_level else text


def render_program(p: Program) -> str:
    lines: list[str] = []
    if p.sets:
        lines.append("sets:")
        for name, sx in p.sets:
            lines.append(f"  {name} = {render_set(sx)}")
    for sort, name in p.numerics:
        lines.append(f"{sort} {name}")
    lines.append("formulas:")
    for f in p.formulas:
        lines.append(f"  {render_input(f)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# LaTeX display form

_CMP_LATEX = {"==": "=", "!=": r"\neq", "<": "<", ">": ">", "<=": r"\leq", ">=": r"\geq"}
_CARD_LATEX = {"atmost": r"\leq", "atleast": r"\geq", "exact": "="}


def latex_arith(a: ArithExpr, min_level: int = 0) -> str:
    if isinstance(a, AConst):
        text = scalar_text(a.value)
        level = _UNARY if not text.startswith("-") else _ADD
    elif isinstance(a, AVar):
        text, level = a.name.lstrip("$"), _UNARY
    elif isinstance(a, NumTerm):
        text = a.name
        if a.indices:
            text += "_{" + ",".join(latex_arith(i) for i in a.indices) + "}"
        level = _UNARY
    elif isinstance(a, Sqrt):
        text, level = r"\sqrt{" + latex_arith(a.child) + "}", _UNARY
    elif isinstance(a, Bin):
        level = _ADD if a.op in ("+", "-") else _MUL
        op = {"+": "+", "-": "-", "*": r" \cdot ", "/": "/", "mod": r" \bmod "}[a.op]
        text = f"{latex_arith(a.lhs, level)}{op}{latex_arith(a.rhs, level + 1)}"
    else:
        raise TypeError(f"unknown arith node {a!r}")
    return f"({text})" if level < min_level else text


def latex_set(s: SetExpr, min_level: int = 0) -> str:
    if isinstance(s, SetName):
        text, level = s.name.lstrip("$"), 2
    elif isinstance(s, SetRange):
        text, level = r"\{" + latex_arith(s.lo) + ".." + latex_arith(s.hi) + r"\}", 2
    elif isinstance(s, SetLit):
        text = r"\{" + ",".join(latex_arith(e) for e in s.elems) + r"\}"
        level = 2
    elif isinstance(s, SetOp):
        glyph = {"union": r"\cup", "inter": r"\cap", "diff": r"\setminus"}[s.op]
        text = f"{latex_set(s.lhs, 1)} {glyph} {latex_set(s.rhs, 2)}"
        level = 1
    else:
        raise TypeError(f"unknown set node {s!r}")
    return f"({text})" if level < min_level else text


def latex_cond(c: Cond, min_level: int = 0) -> str:
    if isinstance(c, CmpC):
        text, level = f"{latex_arith(c.lhs)} {_CMP_LATEX[c.op]} {latex_arith(c.rhs)}", 4
    elif isinstance(c, InC):
        text, level = latex_arith(c.elem) + r" \in " + latex_set(c.domain), 4
    elif isinstance(c, NotC):
        text, level = r"\lnot " + latex_cond(c.child, 3), 3
    elif isinstance(c, AndC):
        text, level = r" \land ".join(latex_cond(x, 3) for x in c.children), 2
    elif isinstance(c, OrC):
        text, level = r" \lor ".join(latex_cond(x, 2) for x in c.children), 1
    else:
        raise TypeError(f"unknown cond node {c!r}")
    return f"({text})" if level < min_level else text


def _latex_binders(binders: tuple[Binder, ...], when: Cond | None) -> str:
    parts = ", ".join(f"{b.var.lstrip('$')} " + r"\in " + latex_set(b.domain) for b in binders)
    if when is not None:
        parts += r" | " + latex_cond(when)
    return parts


def render_latex(e: Expr, min_level: int = 0) -> str:
    """LaTeX display form of a formula."""
    if isinstance(e, Atom):
        text = e.name
        if e.indices:
            text += "_{" + ",".join(latex_arith(i) for i in e.indices) + "}"
        level = _PRIM
    elif isinstance(e, VarAtom):
        text = e.var.lstrip("$")
        if e.indices:
            text += "_{" + ",".join(latex_arith(i) for i in e.indices) + "}"
        level = _PRIM
    elif isinstance(e, BoolConst):
        text, level = (r"\top" if e.value else r"\bot"), _PRIM
    elif isinstance(e, Not):
        text, level = r"\lnot " + render_latex(e.child, _NOT), _NOT
    elif isinstance(e, And):
        text = r" \land ".join(render_latex(c, _AND + 1) for c in e.children)
        level = _AND
    elif isinstance(e, Or):
        text = r" \lor ".join(render_latex(c, _OR + 1) for c in e.children)
        level = _OR
    elif isinstance(e, Impl):
        text = render_latex(e.lhs, _IMPL + 1) + r" \Rightarrow " + render_latex(e.rhs, _IMPL)
        level = _IMPL
    elif isinstance(e, Iff):
        text = render_latex(e.lhs, _IFF + 1) + r" \Leftrightarrow " + render_latex(e.rhs, _IFF)
        level = _IFF
    elif isinstance(e, BigAnd):
        text = r"\bigwedge_{" + _latex_binders(e.binders, e.when) + "} " + render_latex(e.body, _PRIM)
        level = _NOT
    elif isinstance(e, BigOr):
        text = r"\bigvee_{" + _latex_binders(e.binders, e.when) + "} " + render_latex(e.body, _PRIM)
        level = _NOT
    elif isinstance(e, Card):
        text = (
            r"\bigwedge"
            + "^{"
            + _CARD_LATEX[e.kind]
            + " "
            + latex_arith(e.k)
            + "}_{"
            + _latex_binders(e.binders, e.when)
            + "} "
            + render_latex(e.body, _PRIM)
        )
        level = _NOT
    elif isinstance(e, TheoryAtom):
        text = f"{latex_arith(e.lhs)} {_CMP_LATEX[e.cmp]} {latex_arith(e.rhs)}"
        level = _NOT
    else:
        raise TypeError(f"unknown formula node {e!r}")
    return f"({text})" if level < min_level else text


def latex_program(p: Program) -> str:
    """One LaTeX line per top-level formula."""
    return "\n".join(render_latex(f) for f in p.formulas)
