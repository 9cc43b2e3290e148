"""Solve a raw DIMACS CNF file with the embedded solver.

Prints SAT-competition style output (`s SATISFIABLE` + `v` lines), which
also makes this module usable as the command template of the external
solver mode:  python -m twistc.dimacs_tool [FILE|-]
"""

from __future__ import annotations

import sys

from .cnf import parse_dimacs
from .lang import LangError
from .sat import solve


def main(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    path = args[0] if args else "-"
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        db = parse_dimacs(text)
    except (OSError, LangError) as err:
        print(f"c error: {err}", file=sys.stderr)
        return 2
    res = solve(db)
    if res.status == "sat":
        print("s SATISFIABLE")
        lits = [v if res.model.values[v] else -v for v in range(1, db.n_vars + 1)]
        for i in range(0, len(lits), 20):
            print("v " + " ".join(str(l) for l in lits[i : i + 20]))
        print("v 0")
        return 10
    if res.status == "unsat":
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 30


if __name__ == "__main__":
    sys.exit(main())
