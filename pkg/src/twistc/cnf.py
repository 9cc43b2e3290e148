"""Tseitin transformation to CNF, variable numbering, DIMACS emission.

User atoms are numbered 1..n_user in first-occurrence order of a
left-to-right traversal of the input formula; definition variables (_T<n>)
and counter registers (_S<row>_<level>) follow. Definitions are
polarity-aware: a subformula occurring under a single polarity gets a
one-sided definition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import cardinality
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
    GTRUE,
    GFALSE,
    collect_atoms,
    has_theory,
    normalize_card,
)
from .lang import LangError

POS, NEG, BOTH = 1, -1, 0


class TheoryPresentError(LangError):
    """CNF requested for a formula with numeric theory atoms."""


@dataclass
class VarMap:
    forward: dict[str, int] = field(default_factory=dict)
    backward: list[str] = field(default_factory=lambda: [""])  # 1-indexed
    n_user: int = 0

    def add(self, name: str) -> int:
        if name in self.forward:
            raise LangError(f"duplicate variable name {name!r}")
        n = len(self.backward)
        self.forward[name] = n
        self.backward.append(name)
        return n

    @property
    def n_vars(self) -> int:
        return len(self.backward) - 1

    def name_of(self, var: int) -> str:
        return self.backward[var]

    def user_vars(self) -> range:
        return range(1, self.n_user + 1)


@dataclass
class ClauseDb:
    clauses: list[list[int]]
    n_vars: int
    varmap: VarMap

    def add(self, lits: list[int]) -> None:
        seen: dict[int, None] = {}
        for l in lits:
            if -l in seen:
                return  # tautology
            seen[l] = None
        clause = list(seen)
        if not clause:
            raise LangError("empty clause generated")
        self.clauses.append(clause)


class _Fresh:
    """Allocator for definition and counter variables inside one compilation."""

    def __init__(self, varmap: VarMap):
        self.varmap = varmap
        self.n_t = 0
        self.n_row = 0

    def tseitin_var(self) -> int:
        self.n_t += 1
        return self.varmap.add(f"_T{self.n_t}")

    def counter_row(self, width: int) -> list[int]:
        self.n_row += 1
        return [self.varmap.add(f"_S{self.n_row}_{j}") for j in range(1, width + 1)]


# ---------------------------------------------------------------------------
# Simplification: constant folding, double-negation removal, flattening


def simplify(g: GroundFormula) -> GroundFormula:
    if isinstance(g, GLit):
        return g
    if isinstance(g, GBool):
        return g
    if isinstance(g, GNot):
        return _negate(simplify(g.child))
    if isinstance(g, GAnd):
        out: list[GroundFormula] = []
        for c in g.children:
            cs = simplify(c)
            if cs == GFALSE:
                return GFALSE
            if cs == GTRUE:
                continue
            if isinstance(cs, GAnd):
                out.extend(cs.children)
            else:
                out.append(cs)
        if not out:
            return GTRUE
        return out[0] if len(out) == 1 else GAnd(tuple(out))
    if isinstance(g, GOr):
        out = []
        for c in g.children:
            cs = simplify(c)
            if cs == GTRUE:
                return GTRUE
            if cs == GFALSE:
                continue
            if isinstance(cs, GOr):
                out.extend(cs.children)
            else:
                out.append(cs)
        if not out:
            return GFALSE
        return out[0] if len(out) == 1 else GOr(tuple(out))
    if isinstance(g, GImpl):
        a = simplify(g.lhs)
        b = simplify(g.rhs)
        if a == GFALSE or b == GTRUE:
            return GTRUE
        if a == GTRUE:
            return b
        if b == GFALSE:
            return _negate(a)
        return GImpl(a, b)
    if isinstance(g, GIff):
        a = simplify(g.lhs)
        b = simplify(g.rhs)
        if a == GTRUE:
            return b
        if b == GTRUE:
            return a
        if a == GFALSE:
            return _negate(b)
        if b == GFALSE:
            return _negate(a)
        return GIff(a, b)
    if isinstance(g, GCard):
        items: list[GroundFormula] = []
        k = g.k
        for c in g.items:
            cs = simplify(c)
            if cs == GTRUE:
                k -= 1  # a constant-true item always counts
            elif cs != GFALSE:
                items.append(cs)
        return normalize_card(GCard(g.kind, k, tuple(items)))
    if isinstance(g, GTheory):
        return g
    raise LangError(f"cannot simplify {g!r}")


def _negate(g: GroundFormula) -> GroundFormula:
    if isinstance(g, GBool):
        return GFALSE if g.value else GTRUE
    if isinstance(g, GLit):
        return GLit(g.atom, not g.positive)
    if isinstance(g, GNot):
        return g.child
    return GNot(g)


# ---------------------------------------------------------------------------
# Tseitin transformation


class _Tseitin:
    def __init__(self, enc: str | None):
        self.enc = enc  # None means size-based choice per constraint
        self.varmap = VarMap()
        self.db: ClauseDb | None = None
        self.fresh: _Fresh | None = None
        self.defs: dict[GroundFormula, int] = {}
        self.done: dict[GroundFormula, set[int]] = {}

    def run(self, g: GroundFormula) -> ClauseDb:
        if has_theory(g):
            raise TheoryPresentError(
                "formula contains numeric theory atoms; emit SMT-LIB instead"
            )
        for atom in collect_atoms(g):
            self.varmap.add(atom.text())
        self.varmap.n_user = self.varmap.n_vars
        self.db = ClauseDb([], 0, self.varmap)
        self.fresh = _Fresh(self.varmap)

        s = simplify(g)
        conjuncts = s.children if isinstance(s, GAnd) else (s,)
        for c in conjuncts:
            self._top(c)
        self.db.n_vars = self.varmap.n_vars
        return self.db

    def _pick_enc(self, n: int, k: int) -> str:
        return self.enc or cardinality.choose_encoding(n, k)

    def _top(self, g: GroundFormula) -> None:
        """Assert one top-level conjunct."""
        if g == GTRUE:
            return
        if g == GFALSE:
            f = self.fresh.tseitin_var()
            self.db.add([f])
            self.db.add([-f])
            return
        if isinstance(g, GLit):
            self.db.add([self._lit(g)])
            return
        if isinstance(g, GOr):
            self.db.add([self.lit_of(c, POS) for c in g.children])
            return
        if isinstance(g, GImpl):
            self.db.add([-self.lit_of(g.lhs, NEG), self.lit_of(g.rhs, POS)])
            return
        if isinstance(g, GIff):
            la = self.lit_of(g.lhs, BOTH)
            lb = self.lit_of(g.rhs, BOTH)
            self.db.add([-la, lb])
            self.db.add([-lb, la])
            return
        if isinstance(g, GCard):
            lits = [self.lit_of(c, BOTH) for c in g.items]
            enc = self._pick_enc(len(lits), g.k)
            for cl in cardinality.encode(g.kind, lits, g.k, enc, self.fresh):
                self.db.add(cl)
            return
        if isinstance(g, GNot):
            inner = g.child
            if isinstance(inner, GCard) and inner.kind != "exact":
                # complement of a single bound encodes directly
                ((kind, k),) = cardinality.complement(inner.kind, inner.k)
                lits = [self.lit_of(c, BOTH) for c in inner.items]
                enc = self._pick_enc(len(lits), k)
                for cl in cardinality.encode(kind, lits, k, enc, self.fresh):
                    self.db.add(cl)
                return
            self.db.add([-self.lit_of(inner, NEG)])
            return
        if isinstance(g, GAnd):
            for c in g.children:
                self._top(c)
            return
        raise LangError(f"cannot assert {g!r}")

    @staticmethod
    def _flip(pol: int) -> int:
        return -pol  # BOTH (0) stays BOTH

    def _lit(self, g: GLit) -> int:
        v = self.varmap.forward[g.atom.text()]
        return v if g.positive else -v

    def lit_of(self, g: GroundFormula, pol: int) -> int:
        """A literal faithful to g for the given polarity of use."""
        if isinstance(g, GLit):
            return self._lit(g)
        if isinstance(g, GNot):
            return -self.lit_of(g.child, self._flip(pol))
        if isinstance(g, GBool):
            raise LangError("constants should have been folded before translation")
        d = self.defs.get(g)
        if d is None:
            d = self.fresh.tseitin_var()
            self.defs[g] = d
            self.done[g] = set()
        need = {POS, NEG} if pol == BOTH else {pol}
        for direction in sorted(need - self.done[g], reverse=True):
            self.done[g].add(direction)
            self._define(g, d, direction)
        return d

    def _define(self, g: GroundFormula, d: int, direction: int) -> None:
        """Emit defining clauses: direction POS is d -> g, NEG is g -> d."""
        add = self.db.add
        if isinstance(g, GAnd):
            if direction == POS:
                for c in g.children:
                    add([-d, self.lit_of(c, POS)])
            else:
                add([d] + [-self.lit_of(c, NEG) for c in g.children])
        elif isinstance(g, GOr):
            if direction == POS:
                add([-d] + [self.lit_of(c, POS) for c in g.children])
            else:
                for c in g.children:
                    add([d, -self.lit_of(c, NEG)])
        elif isinstance(g, GImpl):
            if direction == POS:
                add([-d, -self.lit_of(g.lhs, NEG), self.lit_of(g.rhs, POS)])
            else:
                add([d, self.lit_of(g.lhs, POS)])
                add([d, -self.lit_of(g.rhs, NEG)])
        elif isinstance(g, GIff):
            la = self.lit_of(g.lhs, BOTH)
            lb = self.lit_of(g.rhs, BOTH)
            if direction == POS:
                # two implications: d -> (a -> b) and d -> (b -> a)
                add([-d, -la, lb])
                add([-d, la, -lb])
            else:
                add([d, la, lb])
                add([d, -la, -lb])
        elif isinstance(g, GCard):
            lits = [self.lit_of(c, BOTH) for c in g.items]
            n = len(lits)
            if direction == POS:
                enc = self._pick_enc(n, g.k)
                for cl in cardinality.encode(g.kind, lits, g.k, enc, self.fresh):
                    add(cl + [-d])
            else:
                parts = [
                    (kind, k)
                    for kind, k in cardinality.complement(g.kind, g.k)
                    if 0 <= k <= n
                ]
                if not parts:  # negation is unsatisfiable: g always holds
                    add([d])
                elif len(parts) == 1:
                    kind, k = parts[0]
                    enc = self._pick_enc(n, k)
                    for cl in cardinality.encode(kind, lits, k, enc, self.fresh):
                        add(cl + [d])
                else:
                    selectors = []
                    for kind, k in parts:
                        e = self.fresh.tseitin_var()
                        selectors.append(e)
                        enc = self._pick_enc(n, k)
                        for cl in cardinality.encode(kind, lits, k, enc, self.fresh):
                            add(cl + [-e])
                    add([d] + selectors)
        else:
            raise LangError(f"cannot define {g!r}")


def tseitin(g: GroundFormula, enc: str | None = None) -> ClauseDb:
    """Equisatisfiable CNF; models project onto user atoms faithfully."""
    return _Tseitin(enc).run(g)


# ---------------------------------------------------------------------------
# DIMACS


def emit_dimacs(db: ClauseDb, comments: bool = True) -> str:
    out: list[str] = []
    if comments:
        for v in db.varmap.user_vars():
            out.append(f"c {db.varmap.name_of(v)} = {v}\n")
    out.append(f"p cnf {db.n_vars} {len(db.clauses)}\n")
    for clause in db.clauses:
        out.append(" ".join(str(l) for l in clause) + " 0\n")
    return "".join(out)


def parse_dimacs(text: str) -> ClauseDb:
    """Inverse of emit_dimacs (atom-name comments are recovered)."""
    varmap = VarMap()
    clauses: list[list[int]] = []
    n_vars = 0
    named: list[tuple[str, int]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c "):
            parts = line[2:].rsplit(" = ", 1)
            if len(parts) == 2 and parts[1].isdigit():
                named.append((parts[0], int(parts[1])))
            continue
        if line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise LangError(f"bad DIMACS problem line: {line!r}")
            n_vars = int(fields[2])
            continue
        lits = [int(tok) for tok in line.split()]
        if not lits or lits[-1] != 0:
            raise LangError(f"DIMACS clause must end with 0: {line!r}")
        clauses.append(lits[:-1])
    named.sort(key=lambda kv: kv[1])
    for name, v in named:
        if v != varmap.add(name):
            raise LangError("non-contiguous atom comments in DIMACS input")
    varmap.n_user = varmap.n_vars
    while varmap.n_vars < n_vars:
        varmap.add(f"_G{varmap.n_vars + 1}")
    return ClauseDb(clauses, n_vars, varmap)
