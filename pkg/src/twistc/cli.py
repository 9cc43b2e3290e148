"""Command-line front end.

Exit codes: 0 success/SAT, 20 UNSAT, 30 unknown, 1 user error, 2 I/O
failure, 99 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import modelview, smt
from .lang import LangError, Scalar, scalar_text
from .pipeline import Compiled, compile_source
from .render import latex_program
from .sat import DEFAULT_CONFLICT_BUDGET, InternalSolverError, Session, count_models
from .cnf import emit_dimacs

EXIT_SAT = 0
EXIT_USER = 1
EXIT_IO = 2
EXIT_UNSAT = 20
EXIT_UNKNOWN = 30
EXIT_INTERNAL = 99


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems are user errors, not I/O
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USER)


def _build_parser() -> _ArgumentParser:
    p = _ArgumentParser(prog="twistc", description="indexed logic compiler and solver")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("file", help="source file (.tw), or - for stdin")

    sp = sub.add_parser("check", help="parse and ground, report diagnostics")
    add_input(sp)

    sp = sub.add_parser("latex", help="print the LaTeX rendering")
    add_input(sp)

    sp = sub.add_parser("dimacs", help="print DIMACS CNF")
    add_input(sp)
    sp.add_argument("--encoding", choices=["binomial", "seqcounter"], default=None)
    sp.add_argument("--no-comments", action="store_true")

    sp = sub.add_parser("smt2", help="print an SMT-LIB 2 script")
    add_input(sp)
    sp.add_argument("--force", action="store_true", help="emit even without theory atoms")

    sp = sub.add_parser("solve", help="solve and print models")
    add_input(sp)
    sp.add_argument("--limit", type=int, default=1, help="max models to print")
    sp.add_argument("--filter", default="", help="regular expression over atom names")
    pol = sp.add_mutually_exclusive_group()
    pol.add_argument("--true-only", action="store_true")
    pol.add_argument("--false-only", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--encoding", choices=["binomial", "seqcounter"], default=None)
    sp.add_argument("--budget", type=int, default=DEFAULT_CONFLICT_BUDGET)
    sp.add_argument("--sat-cmd", default=None, help="external SAT solver command template")
    sp.add_argument("--smt-cmd", default=None, help="external SMT solver command template")

    sp = sub.add_parser("count", help="count models up to a limit")
    add_input(sp)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--encoding", choices=["binomial", "seqcounter"], default=None)
    return p


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "rb") as f:
        data = f.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as err:
        raise LangError(f"{path} is not valid UTF-8: {err}") from err


def _report(c: Compiled, src: str) -> None:
    for d in c.diagnostics:
        print(d.format(src), file=sys.stderr)


def _compile_or_exit(src: str, **kw) -> Compiled:
    c = compile_source(src, **kw)
    _report(c, src)
    if not c.ok:
        raise SystemExit(EXIT_USER)
    return c


def _polarity(args) -> str:
    if args.true_only:
        return "true-only"
    if args.false_only:
        return "false-only"
    return "all"


def _cmd_solve(args) -> int:
    src = _read_source(args.file)
    c = _compile_or_exit(src, encoding=args.encoding)
    polarity = _polarity(args)
    if c.kind == "smt":
        return _solve_smt(args, c, polarity)

    session = Session(
        c.db, seed=args.seed, conflict_budget=args.budget, external_cmd=args.sat_cmd
    )
    views = []
    res = session.solve()
    status = res.status
    while res.status == "sat" and len(views) < args.limit:
        view = modelview.decode(res.model, c.db)
        view = modelview.apply_filter(view, args.filter, polarity)
        views.append(view)
        if len(views) >= args.limit:
            break
        res = session.next_model()
    if args.json:
        print(json.dumps({"status": status, "models": [modelview.rows_json(v) for v in views], "theory": None}))
    else:
        for i, v in enumerate(views):
            if i:
                print("--")
            table = modelview.render_table(v)
            if table:
                print(table)
    if status == "sat":
        return EXIT_SAT
    if status == "unsat":
        print("unsat", file=sys.stderr)
        return EXIT_UNSAT
    print("unknown (budget exceeded)", file=sys.stderr)
    return EXIT_UNKNOWN


def _solve_smt(args, c: Compiled, polarity: str) -> int:
    cmd = args.smt_cmd or os.environ.get("TWISTC_SMT_CMD")
    if not cmd:
        raise LangError(
            "this program needs an SMT solver; set --smt-cmd or TWISTC_SMT_CMD"
        )
    result = smt.run_external(c.script.text, cmd)
    if result.status == "sat":
        if not smt.verify_smt_model(c.formula, result.values):
            raise InternalSolverError("SMT solver model failed re-checking")
        rows = tuple(
            (name, bool(result.values.get(name, False))) for name in c.script.bools
        )
        view = modelview.ModelView(tuple(sorted(rows, key=lambda r: modelview.natural_key(r[0]))))
        view = modelview.apply_filter(view, args.filter, polarity)
        theory = [
            {"name": name, "value": _scalar_str(result.values.get(name))}
            for name, _sort in c.script.consts
        ]
        if args.json:
            print(json.dumps({"status": "sat", "models": [modelview.rows_json(view)], "theory": theory}))
        else:
            table = modelview.render_table(view)
            if table:
                print(table)
            for t in theory:
                print(f"{t['name']} = {t['value']}")
        return EXIT_SAT
    if args.json:
        print(json.dumps({"status": result.status, "models": [], "theory": None}))
    if result.status == "unsat":
        print("unsat", file=sys.stderr)
        return EXIT_UNSAT
    print("unknown", file=sys.stderr)
    return EXIT_UNKNOWN


def _scalar_str(v) -> str:
    if v is None:
        return "0"
    if isinstance(v, Scalar):
        return scalar_text(v)
    return str(v)


def _dispatch(args) -> int:
    if args.command == "check":
        src = _read_source(args.file)
        _compile_or_exit(src)
        return 0
    if args.command == "latex":
        src = _read_source(args.file)
        c = _compile_or_exit(src)
        print(latex_program(c.program))
        return 0
    if args.command == "dimacs":
        src = _read_source(args.file)
        c = _compile_or_exit(src, encoding=args.encoding)
        if c.kind != "sat":
            raise LangError("program has theory atoms; use the smt2 subcommand")
        sys.stdout.write(emit_dimacs(c.db, comments=not args.no_comments))
        return 0
    if args.command == "smt2":
        src = _read_source(args.file)
        c = _compile_or_exit(src, force_smt=args.force)
        if c.kind != "smt":
            raise LangError("program is purely propositional; pass --force to emit anyway")
        sys.stdout.write(c.script.text)
        return 0
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "count":
        src = _read_source(args.file)
        c = _compile_or_exit(src, encoding=args.encoding)
        if c.kind != "sat":
            raise LangError("count works on propositional programs only")
        print(count_models(c.db, args.limit, seed=args.seed))
        return 0
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except SystemExit as e:
        return int(e.code or 0)
    except KeyboardInterrupt:
        return 130
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except InternalSolverError as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except LangError as err:
        print(f"error: {err.message}", file=sys.stderr)
        if err.note:
            print(f"note: {err.note}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
