"""Shared compile pipeline: source text to CNF or SMT script.

The CLI and the HTTP service are thin wrappers over compile_source, so
their behavior on identical input is identical by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import smt
from .cnf import ClauseDb, tseitin
from .grounder import GroundFormula, ground
from .lang import LangError, Program
from .parser import Diagnostic, parse
from .render import latex_program


@dataclass
class Compiled:
    program: Program | None = None
    formula: GroundFormula | None = None
    kind: str = ""  # "sat" | "smt"
    logic: str = ""  # SMT-LIB logic name when kind == "smt"
    db: ClauseDb | None = None
    script: smt.SmtScript | None = None
    latex: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


def compile_source(
    src: str,
    encoding: str | None = None,
    force_smt: bool = False,
) -> Compiled:
    """Parse, ground and lower a program; user errors become diagnostics."""
    out = Compiled()
    if encoding not in (None, "binomial", "seqcounter"):
        out.diagnostics.append(
            Diagnostic(
                "error",
                f"unknown encoding {encoding!r}; use binomial or seqcounter",
                (0, 0),
            )
        )
        return out
    program, diags = parse(src)
    out.diagnostics.extend(diags)
    if program is None:
        return out
    out.program = program
    out.latex = latex_program(program)
    sorts = {name: sort for sort, name in program.numerics}
    try:
        out.formula = ground(program)
        out.logic = smt.classify(out.formula, sorts)
        if out.logic == "sat" and not force_smt:
            out.kind = "sat"
            out.db = tseitin(out.formula, encoding)
        else:
            out.kind = "smt"
            out.script = (
                smt.emit_smtlib_forced(out.formula, sorts)
                if force_smt
                else smt.emit_smtlib(out.formula, sorts)
            )
            out.logic = out.script.logic
    except LangError as err:
        out.diagnostics.append(
            Diagnostic("error", err.message, err.span or (0, 0), err.note)
        )
    return out


def stats(c: Compiled) -> dict[str, int]:
    if c.db is not None:
        return {
            "n_atoms": c.db.varmap.n_user,
            "n_clauses": len(c.db.clauses),
            "n_vars": c.db.n_vars,
        }
    if c.script is not None:
        return {
            "n_atoms": len(c.script.bools),
            "n_clauses": 0,
            "n_vars": len(c.script.bools) + len(c.script.consts),
        }
    return {"n_atoms": 0, "n_clauses": 0, "n_vars": 0}
