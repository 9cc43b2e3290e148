"""Tokenizer and recursive-descent parser for source programs.

A source file is: an optional `sets:` section of `$NAME = <setexpr>` lines,
optional `int name` / `real name` declarations, then a `formulas:` section
whose newline-separated formulas are implicitly conjoined. Section headers
are accepted but optional; statement kinds are self-distinguishing, and
declarations must precede all formulas.

Spans are byte offsets into the newline-normalized source.
"""

from __future__ import annotations

from dataclasses import dataclass

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
    Int,
    Not,
    NotC,
    NumTerm,
    Or,
    OrC,
    Program,
    Rat,
    SetExpr,
    SetLit,
    SetName,
    SetOp,
    SetRange,
    Span,
    Sqrt,
    Sym,
    TheoryAtom,
    VarAtom,
)

KEYWORDS = frozenset(
    """bigand bigor atleast atmost exact when in and or not end
       int real sets formulas mod sqrt union inter diff true false""".split()
)

_CMP_OPS = {"==", "!=", "<", "<=", ">", ">="}
_MAX_DEPTH = 200  # nesting guard; arbitrary input must not blow the stack


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Span
    note: str | None = None

    def format(self, src: str | None = None) -> str:
        head = f"{self.severity}: {self.message}"
        if src is None:
            return head
        line, col, text = _locate(src, self.span[0])
        out = f"{head}\n  --> line {line}, column {col}\n  | {text}\n  | " + " " * (col - 1) + "^"
        if self.note:
            out += f"\n  note: {self.note}"
        return out


def _locate(src: str, byte_off: int) -> tuple[int, int, str]:
    data = src.encode("utf-8")
    prefix = data[:byte_off].decode("utf-8", errors="replace")
    line = prefix.count("\n") + 1
    col = len(prefix) - (prefix.rfind("\n") + 1) + 1
    lines = src.split("\n")
    text = lines[line - 1] if line - 1 < len(lines) else ""
    return line, col, text


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "intlit", "ratlit", "var", "newline", "eof", a keyword, or an operator
    text: str
    span: Span


def normalize_source(src: str) -> str:
    return src.replace("\r\n", "\n")


def tokenize(src: str) -> tuple[list[Token], list[Diagnostic]]:
    """Token stream with byte spans; unknown characters become diagnostics."""
    src = normalize_source(src)
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    ascii_fast = src.isascii()
    i = 0  # char index
    b = 0  # byte offset
    n = len(src)

    def blen(ch: str) -> int:
        return 1 if ascii_fast else len(ch.encode("utf-8"))

    while i < n:
        ch = src[i]
        start = b
        if ch == "\n":
            toks.append(Token("newline", "\n", (b, b + 1)))
            i += 1
            b += 1
            continue
        if ch in " \t":
            i += 1
            b += blen(ch)
            continue
        if ch.isalpha():
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            end = b + (j - i if ascii_fast else len(word.encode("utf-8")))
            if not word.isascii():
                diags.append(Diagnostic("error", f"non-ASCII identifier {word!r}", (start, end)))
            else:
                kind = word if word in KEYWORDS else "ident"
                toks.append(Token(kind, word, (start, end)))
            i, b = j, end
            continue
        if ch == "$":
            j = i + 1
            if j >= n or not (src[j].isalpha()):
                diags.append(Diagnostic("error", "expected identifier after '$'", (b, b + 1)))
                i += 1
                b += 1
                continue
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            end = b + (j - i if ascii_fast else len(word.encode("utf-8")))
            if not word.isascii():
                diags.append(Diagnostic("error", f"non-ASCII identifier {word!r}", (start, end)))
            else:
                toks.append(Token("var", word, (start, end)))
            i, b = j, end
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            is_rat = False
            if j < n and src[j] == "." and j + 1 < n and src[j + 1].isdigit():
                # a second dot means a range, e.g. 1..9
                is_rat = True
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            word = src[i:j]
            end = b + (j - i)
            toks.append(Token("ratlit" if is_rat else "intlit", word, (start, end)))
            i, b = j, end
            continue
        two = src[i : i + 2]
        three = src[i : i + 3]
        if three == "<=>":
            toks.append(Token("<=>", three, (b, b + 3)))
            i += 3
            b += 3
            continue
        if two in ("=>", "==", "!=", "<=", ">=", ".."):
            toks.append(Token(two, two, (b, b + 2)))
            i += 2
            b += 2
            continue
        if ch in "<>+-*/(),:=":
            toks.append(Token(ch, ch, (b, b + 1)))
            i += 1
            b += 1
            continue
        diags.append(Diagnostic("error", f"unknown character {ch!r}", (b, b + blen(ch))))
        i += 1
        b += blen(ch)

    eof_pos = b
    toks.append(Token("eof", "", (eof_pos, eof_pos)))
    return toks, diags


class _Fail(Exception):
    """Internal parse failure; converted to a Diagnostic at statement level."""

    def __init__(self, message: str, span: Span, note: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.note = note


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0
        self.depth = 0  # paren/construct nesting; newlines are soft inside
        self.warnings: list[Diagnostic] = []
        self.numerics: dict[str, str] = {}  # name -> sort

    # -- token plumbing ------------------------------------------------

    def _peek(self, skip_nl: bool) -> Token:
        p = self.pos
        while skip_nl and self.toks[p].kind == "newline":
            p += 1
        return self.toks[p]

    def _next(self, skip_nl: bool) -> Token:
        while skip_nl and self.toks[self.pos].kind == "newline":
            self.pos += 1
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def _expect(self, kind: str, what: str) -> Token:
        t = self._next(skip_nl=True)
        if t.kind != kind:
            raise _Fail(f"expected {what}, found {self._describe(t)}", t.span)
        return t

    def _soft_peek(self) -> Token:
        # optional-continuation peek: newline terminates at statement level
        return self._peek(skip_nl=self.depth > 0)

    @staticmethod
    def _describe(t: Token) -> str:
        if t.kind == "eof":
            return "end of input"
        if t.kind == "newline":
            return "end of line"
        return f"'{t.text}'"

    def _enter(self, span: Span) -> None:
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            raise _Fail("nesting too deep", span)

    def _leave(self) -> None:
        self.depth -= 1

    # -- arithmetic ----------------------------------------------------

    def parse_arith(self) -> ArithExpr:
        lhs = self._arith_term()
        while self._soft_peek().kind in ("+", "-"):
            op = self._next(skip_nl=True)
            rhs = self._arith_term()
            lhs = Bin(op.kind, lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        return lhs

    def _arith_term(self) -> ArithExpr:
        lhs = self._arith_factor()
        while self._soft_peek().kind in ("*", "/", "mod"):
            op = self._next(skip_nl=True)
            rhs = self._arith_factor()
            lhs = Bin("mod" if op.kind == "mod" else op.kind, lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        return lhs

    def _arith_factor(self) -> ArithExpr:
        t = self._next(skip_nl=True)
        if t.kind == "intlit":
            return AConst(Int(int(t.text)), span=t.span)
        if t.kind == "ratlit":
            return AConst(Rat(float(t.text)), span=t.span)
        if t.kind == "var":
            return AVar(t.text, span=t.span)
        if t.kind == "-":
            inner = self._arith_factor()
            if isinstance(inner, AConst) and inner.value.is_num:
                v = inner.value.value
                neg = Int(-v) if inner.value.kind == "int" else Rat(-v)
                return AConst(neg, span=(t.span[0], inner.span[1]))
            zero = AConst(Int(0), span=t.span)
            return Bin("-", zero, inner, span=(t.span[0], inner.span[1]))
        if t.kind == "sqrt":
            self._expect("(", "'(' after sqrt")
            self._enter(t.span)
            inner = self.parse_arith()
            self._leave()
            close = self._expect(")", "')'")
            return Sqrt(inner, span=(t.span[0], close.span[1]))
        if t.kind == "(":
            self._enter(t.span)
            inner = self.parse_arith()
            self._leave()
            self._expect(")", "')'")
            return inner
        if t.kind == "ident":
            if t.text in self.numerics:
                indices: tuple[ArithExpr, ...] = ()
                end = t.span[1]
                if self._peek(skip_nl=False).kind == "(":
                    indices, end = self._parse_indices()
                return NumTerm(t.text, indices, span=(t.span[0], end))
            if self._peek(skip_nl=False).kind == "(":
                raise _Fail(
                    f"'{t.text}' is not a declared numeric symbol",
                    t.span,
                    note="declare it with 'int {0}' or 'real {0}' to use it in arithmetic".format(t.text),
                )
            return AConst(Sym(t.text), span=t.span)
        raise _Fail(f"expected arithmetic expression, found {self._describe(t)}", t.span)

    def _parse_indices(self) -> tuple[tuple[ArithExpr, ...], int]:
        open_tok = self._expect("(", "'('")
        self._enter(open_tok.span)
        indices = [self.parse_arith()]
        while self._peek(skip_nl=True).kind == ",":
            self._next(skip_nl=True)
            indices.append(self.parse_arith())
        self._leave()
        close = self._expect(")", "')' after indices")
        return tuple(indices), close.span[1]

    # -- set expressions -------------------------------------------------

    def parse_setexpr(self) -> SetExpr:
        lhs = self._set_term()
        while self._soft_peek().kind in ("union", "inter", "diff"):
            op = self._next(skip_nl=True)
            rhs = self._set_term()
            lhs = SetOp(op.kind, lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        return lhs

    def _set_term(self) -> SetExpr:
        t = self._peek(skip_nl=True)
        if t.kind == "var":
            self._next(skip_nl=True)
            return SetName(t.text, span=t.span)
        if t.kind != "(":
            raise _Fail(f"expected set expression, found {self._describe(t)}", t.span)
        open_tok = self._next(skip_nl=True)
        self._enter(open_tok.span)
        # a parenthesized set expression, or a range/literal of scalars
        mark, dmark = self.pos, self.depth
        try:
            inner_set = self.parse_setexpr()
            self._expect(")", "')'")
            self._leave()
            return inner_set
        except _Fail:
            self.pos, self.depth = mark, dmark
        first = self.parse_arith()
        t = self._next(skip_nl=True)
        if t.kind == "..":
            hi = self.parse_arith()
            close = self._expect(")", "')' after range")
            self._leave()
            return SetRange(first, hi, span=(open_tok.span[0], close.span[1]))
        if t.kind == ",":
            elems = [first]
            while True:
                nxt = self._peek(skip_nl=True)
                if nxt.kind == ")":
                    break
                elems.append(self.parse_arith())
                sep = self._peek(skip_nl=True)
                if sep.kind == ",":
                    self._next(skip_nl=True)
                    continue
                break
            close = self._expect(")", "')' after set literal")
            self._leave()
            return SetLit(tuple(elems), span=(open_tok.span[0], close.span[1]))
        if t.kind == ")":
            raise _Fail(
                "a one-element set literal needs a trailing comma",
                (open_tok.span[0], t.span[1]),
                note="write (x,) for the singleton set, or use a declared set name",
            )
        raise _Fail(f"expected '..', ',' or ')' in set, found {self._describe(t)}", t.span)

    # -- conditions ------------------------------------------------------

    def parse_cond(self) -> Cond:
        lhs = self._cond_and()
        children = [lhs]
        while self._soft_peek().kind == "or":
            self._next(skip_nl=True)
            children.append(self._cond_and())
        if len(children) == 1:
            return lhs
        return OrC(tuple(children), span=(children[0].span[0], children[-1].span[1]))

    def _cond_and(self) -> Cond:
        children = [self._cond_not()]
        while self._soft_peek().kind == "and":
            self._next(skip_nl=True)
            children.append(self._cond_not())
        if len(children) == 1:
            return children[0]
        return AndC(tuple(children), span=(children[0].span[0], children[-1].span[1]))

    def _cond_not(self) -> Cond:
        t = self._peek(skip_nl=True)
        if t.kind == "not":
            self._next(skip_nl=True)
            inner = self._cond_not()
            return NotC(inner, span=(t.span[0], inner.span[1]))
        return self._cond_prim()

    def _cond_prim(self) -> Cond:
        t = self._peek(skip_nl=True)
        if t.kind == "(":
            mark, dmark = self.pos, self.depth
            open_tok = self._next(skip_nl=True)
            self._enter(open_tok.span)
            try:
                inner = self.parse_cond()
                self._expect(")", "')'")
                self._leave()
                return inner
            except _Fail:
                self.pos, self.depth = mark, dmark
        lhs = self.parse_arith()
        op = self._next(skip_nl=True)
        if op.kind in _CMP_OPS:
            rhs = self.parse_arith()
            return CmpC(op.kind, lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        if op.kind == "in":
            dom = self.parse_setexpr()
            return InC(lhs, dom, span=(lhs.span[0], dom.span[1]))
        raise _Fail(f"expected comparison or 'in', found {self._describe(op)}", op.span)

    # -- formulas ----------------------------------------------------------

    def parse_formula(self) -> Expr:
        return self._iff()

    def _iff(self) -> Expr:
        lhs = self._impl()
        if self._soft_peek().kind == "<=>":
            self._next(skip_nl=True)
            rhs = self._iff()  # right-associative
            return Iff(lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        return lhs

    def _impl(self) -> Expr:
        lhs = self._or()
        if self._soft_peek().kind == "=>":
            self._next(skip_nl=True)
            rhs = self._impl()  # right-associative
            return Impl(lhs, rhs, span=(lhs.span[0], rhs.span[1]))
        return lhs

    def _or(self) -> Expr:
        children = [self._and()]
        while self._soft_peek().kind == "or":
            self._next(skip_nl=True)
            children.append(self._and())
        if len(children) == 1:
            return children[0]
        return Or(tuple(children), span=(children[0].span[0], children[-1].span[1]))

    def _and(self) -> Expr:
        children = [self._unary()]
        while self._soft_peek().kind == "and":
            self._next(skip_nl=True)
            children.append(self._unary())
        if len(children) == 1:
            return children[0]
        return And(tuple(children), span=(children[0].span[0], children[-1].span[1]))

    def _unary(self) -> Expr:
        t = self._peek(skip_nl=True)
        if t.kind == "not":
            self._next(skip_nl=True)
            inner = self._unary()
            return Not(inner, span=(t.span[0], inner.span[1]))
        return self._comparison_or_primary()

    def _parse_theory_cmp(self, lhs: ArithExpr) -> Expr:
        op = self._next(skip_nl=True)
        if op.kind not in _CMP_OPS:
            raise _Fail(f"expected comparison operator, found {self._describe(op)}", op.span)
        rhs = self.parse_arith()
        return TheoryAtom(op.kind, lhs, rhs, span=(lhs.span[0], rhs.span[1]))

    _ARITH_CONT = _CMP_OPS | {"+", "-", "*", "/", "mod"}

    def _comparison_or_primary(self) -> Expr:
        t = self._peek(skip_nl=True)
        # tokens that can only start an arithmetic comparison
        if t.kind in ("intlit", "ratlit", "sqrt") or t.kind == "-":
            lhs = self.parse_arith()
            return self._parse_theory_cmp(lhs)
        if t.kind == "(":
            mark, dmark = self.pos, self.depth
            open_tok = self._next(skip_nl=True)
            self._enter(open_tok.span)
            try:
                inner = self.parse_formula()
                self._expect(")", "')'")
                self._leave()
                return inner
            except _Fail:
                self.pos, self.depth = mark, dmark
            lhs = self.parse_arith()
            return self._parse_theory_cmp(lhs)
        return self._primary()

    def _primary(self) -> Expr:
        t = self._next(skip_nl=True)
        if t.kind == "true":
            return BoolConst(True, span=t.span)
        if t.kind == "false":
            return BoolConst(False, span=t.span)
        if t.kind in ("bigand", "bigor"):
            return self._big_op(t)
        if t.kind in ("atleast", "atmost", "exact"):
            return self._card(t)
        if t.kind == "ident":
            mark = self.pos
            indices: tuple[ArithExpr, ...] = ()
            end = t.span[1]
            if self._peek(skip_nl=False).kind == "(":
                indices, end = self._parse_indices()
            if self._soft_peek().kind in self._ARITH_CONT:
                # actually the left side of an arithmetic comparison
                self.pos = mark - 1  # put the ident back
                lhs = self.parse_arith()
                return self._parse_theory_cmp(lhs)
            return Atom(t.text, indices, span=(t.span[0], end))
        if t.kind == "var":
            mark = self.pos
            indices = ()
            end = t.span[1]
            if self._peek(skip_nl=False).kind == "(":
                indices, end = self._parse_indices()
            if self._soft_peek().kind in self._ARITH_CONT:
                self.pos = mark - 1
                lhs = self.parse_arith()
                return self._parse_theory_cmp(lhs)
            return VarAtom(t.text, indices, span=(t.span[0], end))
        if t.kind == "and":
            raise _Fail("expected formula before 'and'", t.span)
        if t.kind == "or":
            raise _Fail("expected formula before 'or'", t.span)
        raise _Fail(f"expected formula, found {self._describe(t)}", t.span)

    def _binder_list(self) -> tuple[tuple[Binder, ...], Cond | None]:
        binders: list[Binder] = []
        while True:
            v = self._expect("var", "binder variable like $i")
            self._expect("in", "'in'")
            dom = self.parse_setexpr()
            if any(b.var == v.text for b in binders):
                raise _Fail(f"duplicate binder variable {v.text}", v.span)
            binders.append(Binder(v.text, dom, span=(v.span[0], dom.span[1])))
            if self._peek(skip_nl=True).kind == ",":
                self._next(skip_nl=True)
                continue
            break
        when = None
        if self._peek(skip_nl=True).kind == "when":
            self._next(skip_nl=True)
            when = self.parse_cond()
        return tuple(binders), when

    def _expect_body_colon(self, construct_span: Span) -> None:
        t = self._peek(skip_nl=True)
        if t.kind == ":":
            self._next(skip_nl=True)
        else:
            self.warnings.append(
                Diagnostic(
                    "warning",
                    "missing ':' before the body of this construct",
                    construct_span,
                    note="the body is parsed as if ':' were present",
                )
            )

    def _big_op(self, kw: Token) -> Expr:
        self._enter(kw.span)
        binders, when = self._binder_list()
        self._expect_body_colon(kw.span)
        body = self.parse_formula()
        end = self._expect("end", "'end'")
        self._leave()
        cls = BigAnd if kw.kind == "bigand" else BigOr
        return cls(binders, body, when, span=(kw.span[0], end.span[1]))

    def _card(self, kw: Token) -> Expr:
        self._enter(kw.span)
        k = self.parse_arith()
        self._expect(",", "',' after the bound")
        binders, when = self._binder_list()
        self._expect_body_colon(kw.span)
        body = self.parse_formula()
        end = self._expect("end", "'end'")
        self._leave()
        return Card(kw.kind, k, binders, body, when, span=(kw.span[0], end.span[1]))


# ---------------------------------------------------------------------------
# Statement-level parsing


def parse(src: str) -> tuple[Program | None, list[Diagnostic]]:
    """Parse a source file; on any error the program is None."""
    import sys

    # ~12 interpreter frames per nesting level; _MAX_DEPTH guards the input
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)
    src = normalize_source(src)
    toks, diags = tokenize(src)
    if any(d.severity == "error" for d in diags):
        return None, diags

    p = _Parser(toks)
    sets: list[tuple[str, SetExpr]] = []
    numerics: list[tuple[str, str]] = []
    formulas: list[Expr] = []
    in_formulas = False  # set once a formula or the formulas: header is seen

    def sync_to_newline() -> None:
        while p.toks[p.pos].kind not in ("newline", "eof"):
            p.pos += 1
        p.depth = 0

    while True:
        while p.toks[p.pos].kind == "newline":
            p.pos += 1
        t = p.toks[p.pos]
        if t.kind == "eof":
            break
        try:
            if t.kind == "sets":
                p._next(skip_nl=True)
                p._expect(":", "':' after 'sets'")
                if in_formulas:
                    raise _Fail("'sets:' section must precede formulas", t.span)
                continue
            if t.kind == "formulas":
                p._next(skip_nl=True)
                p._expect(":", "':' after 'formulas'")
                in_formulas = True
                continue
            if t.kind == "var" and p.toks[p.pos + 1].kind == "=":
                name_tok = p._next(skip_nl=True)
                p._next(skip_nl=True)  # '='
                sx = p.parse_setexpr()
                if in_formulas:
                    raise _Fail("set declarations must precede formulas", name_tok.span)
                if any(n == name_tok.text for n, _ in sets):
                    raise _Fail(f"duplicate declaration of set {name_tok.text}", name_tok.span)
                sets.append((name_tok.text, sx))
                _expect_statement_end(p)
                continue
            if t.kind in ("int", "real"):
                p._next(skip_nl=True)
                name_tok = p._expect("ident", f"symbol name after '{t.kind}'")
                if in_formulas:
                    raise _Fail("numeric declarations must precede formulas", t.span)
                if name_tok.text in p.numerics:
                    raise _Fail(f"duplicate declaration of '{name_tok.text}'", name_tok.span)
                if any(n.lstrip("$") == name_tok.text for n, _ in sets):
                    raise _Fail(
                        f"numeric symbol '{name_tok.text}' collides with a set name", name_tok.span
                    )
                numerics.append((t.kind, name_tok.text))
                p.numerics[name_tok.text] = t.kind
                _expect_statement_end(p)
                continue
            f = p.parse_formula()
            _expect_statement_end(p)
            formulas.append(f)
            in_formulas = True
        except _Fail as fail:
            diags.append(Diagnostic("error", fail.message, fail.span, fail.note))
            sync_to_newline()

    diags.extend(p.warnings)
    if not any(d.severity == "error" for d in diags):
        if not formulas:
            diags.append(Diagnostic("error", "no formulas in input", (0, 0)))
        else:
            declared = {n for n, _ in sets}
            for f in formulas:
                diags.extend(_check_scopes(f, set(), declared))
    if any(d.severity == "error" for d in diags):
        return None, diags
    return Program(tuple(sets), tuple(numerics), tuple(formulas)), diags


def _expect_statement_end(p: _Parser) -> None:
    t = p.toks[p.pos]
    if t.kind not in ("newline", "eof"):
        raise _Fail(f"expected end of statement, found {p._describe(t)}", t.span)


# -- scope checking ----------------------------------------------------------


def _check_scopes(e: Expr, bound: set[str], declared: set[str]) -> list[Diagnostic]:
    """Every $-variable must be bound by a binder or be a declared set name."""
    out: list[Diagnostic] = []

    def err(name: str, span: Span | None) -> None:
        out.append(
            Diagnostic(
                "error",
                f"unbound variable {name}",
                span or (0, 0),
                note="bind it with bigand/bigor/atleast/atmost/exact or declare it as a set",
            )
        )

    def walk_arith(a: ArithExpr, b: set[str]) -> None:
        if isinstance(a, AVar):
            if a.name not in b and a.name not in declared:
                err(a.name, a.span)
        elif isinstance(a, NumTerm):
            for i in a.indices:
                walk_arith(i, b)
        elif isinstance(a, Bin):
            walk_arith(a.lhs, b)
            walk_arith(a.rhs, b)
        elif isinstance(a, Sqrt):
            walk_arith(a.child, b)

    def walk_set(s: SetExpr, b: set[str]) -> None:
        if isinstance(s, SetName):
            if s.name not in b and s.name not in declared:
                err(s.name, s.span)
        elif isinstance(s, SetRange):
            walk_arith(s.lo, b)
            walk_arith(s.hi, b)
        elif isinstance(s, SetLit):
            for el in s.elems:
                walk_arith(el, b)
        elif isinstance(s, SetOp):
            walk_set(s.lhs, b)
            walk_set(s.rhs, b)

    def walk_cond(c: Cond, b: set[str]) -> None:
        if isinstance(c, CmpC):
            walk_arith(c.lhs, b)
            walk_arith(c.rhs, b)
        elif isinstance(c, InC):
            walk_arith(c.elem, b)
            walk_set(c.domain, b)
        elif isinstance(c, NotC):
            walk_cond(c.child, b)
        elif isinstance(c, (AndC, OrC)):
            for ch in c.children:
                walk_cond(ch, b)

    def walk(e: Expr, b: set[str]) -> None:
        if isinstance(e, Atom):
            for i in e.indices:
                walk_arith(i, b)
        elif isinstance(e, VarAtom):
            if e.var not in b and e.var not in declared:
                err(e.var, e.span)
            for i in e.indices:
                walk_arith(i, b)
        elif isinstance(e, Not):
            walk(e.child, b)
        elif isinstance(e, (And, Or)):
            for ch in e.children:
                walk(ch, b)
        elif isinstance(e, (Impl, Iff)):
            walk(e.lhs, b)
            walk(e.rhs, b)
        elif isinstance(e, (BigAnd, BigOr, Card)):
            if isinstance(e, Card):
                walk_arith(e.k, b)
            inner = set(b)
            for binder in e.binders:
                walk_set(binder.domain, inner)
                inner.add(binder.var)
            if e.when is not None:
                walk_cond(e.when, inner)
            walk(e.body, inner)
        elif isinstance(e, TheoryAtom):
            walk_arith(e.lhs, b)
            walk_arith(e.rhs, b)

    walk(e, bound)
    return out
