"""Fake SMT solver used to exercise the external-adapter plumbing.

Modes give canned-but-correct answers for the fixed scripts the tests send:
  trivial  -> unsat   (tests send an unsatisfiable assertion)
  positive -> sat, x = 1
"""

import sys


def main() -> int:
    mode = sys.argv[1] if len(sys.argv) > 1 else "trivial"
    rest = sys.argv[2:]
    if rest:
        with open(rest[0], encoding="utf-8") as f:
            f.read()
    else:
        sys.stdin.read()
    if mode == "positive":
        print("sat")
        print("(model (define-fun x () Int 1))")
    else:
        print("unsat")
    return 0


if __name__ == "__main__":
    sys.exit(main())
