"""twistc: compiler and satisfiability workbench for an indexed logic language.

Pipeline: source text -> parse -> ground -> CNF (embedded CDCL solver) or
SMT-LIB 2 (external solver adapter) -> model browsing.
"""

__version__ = "0.1.0"

from .lang import (  # noqa: F401
    Atom,
    BoolConst,
    Card,
    Expr,
    Iff,
    Impl,
    Program,
    Scalar,
    SetValue,
    VarAtom,
    free_vars,
)
from .parser import Diagnostic, parse, tokenize  # noqa: F401
from .grounder import GroundAtom, GroundFormula, ground  # noqa: F401
from .cnf import ClauseDb, VarMap, emit_dimacs, tseitin  # noqa: F401
from .sat import Session, SolveResult, count_models, solve  # noqa: F401
from .modelview import ModelView, apply_filter, decode  # noqa: F401
