"""Clausal encodings of at-least / at-most / exact cardinality constraints.

Two encodings: `binomial` (one clause per (k+1)-subset, no fresh variables)
and `seqcounter` (sequential unary counter, O(n*k) clauses, fresh register
variables named _S<row>_<level>). Both are model-preserving on the original
literals: a projected assignment satisfies the clauses iff it satisfies the
count bound.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

ENCODINGS = ("binomial", "seqcounter")

# binomial is friendlier to model display (no aux vars); cap its blowup
BINOMIAL_CLAUSE_LIMIT = 500


class SimpleAllocator:
    """Fresh-variable source for standalone use of the encoders."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars

    def counter_row(self, width: int) -> list[int]:
        row = list(range(self.n_vars + 1, self.n_vars + width + 1))
        self.n_vars += width
        return row


def choose_encoding(n: int, k: int) -> str:
    kind_cost = comb(n, k + 1) if 0 <= k + 1 <= n else 0
    return "binomial" if kind_cost <= BINOMIAL_CLAUSE_LIMIT else "seqcounter"


def encode_atmost(lits: list[int], k: int, enc: str, fresh) -> list[list[int]]:
    """Clauses forbidding more than k of `lits` to be true (0 <= k <= n)."""
    n = len(lits)
    if k < 0:
        return [[]]  # unsatisfiable bound; callers fold this away first
    if k >= n:
        return []
    if k == 0:
        return [[-l] for l in lits]
    if enc == "binomial":
        return [[-l for l in subset] for subset in combinations(lits, k + 1)]
    if enc == "seqcounter":
        return _seq_counter_atmost(lits, k, fresh)
    raise ValueError(f"unknown encoding {enc!r}")


def _seq_counter_atmost(lits: list[int], k: int, fresh) -> list[list[int]]:
    # Sinz-style chain: s[i][j] <- "at least j+1 of lits[0..i] are true"
    n = len(lits)
    clauses: list[list[int]] = []
    prev = fresh.counter_row(k)
    clauses.append([-lits[0], prev[0]])
    for j in range(1, k):
        clauses.append([-prev[j]])
    for i in range(1, n - 1):
        cur = fresh.counter_row(k)
        clauses.append([-lits[i], cur[0]])
        clauses.append([-prev[0], cur[0]])
        for j in range(1, k):
            clauses.append([-lits[i], -prev[j - 1], cur[j]])
            clauses.append([-prev[j], cur[j]])
        clauses.append([-lits[i], -prev[k - 1]])
        prev = cur
    clauses.append([-lits[n - 1], -prev[k - 1]])
    return clauses


def encode_atleast(lits: list[int], k: int, enc: str, fresh) -> list[list[int]]:
    """Clauses requiring at least k of `lits` to be true (0 <= k <= n)."""
    if k <= 0:
        return []
    if k > len(lits):
        return [[]]  # unsatisfiable bound; callers fold this away first
    if k == 1:
        return [list(lits)]
    return encode_atmost([-l for l in lits], len(lits) - k, enc, fresh)


def encode_exact(lits: list[int], k: int, enc: str, fresh) -> list[list[int]]:
    """Clauses requiring exactly k of `lits` to be true (0 <= k <= n)."""
    return encode_atleast(lits, k, enc, fresh) + encode_atmost(lits, k, enc, fresh)


def encode(kind: str, lits: list[int], k: int, enc: str, fresh) -> list[list[int]]:
    if kind == "atmost":
        return encode_atmost(lits, k, enc, fresh)
    if kind == "atleast":
        return encode_atleast(lits, k, enc, fresh)
    if kind == "exact":
        return encode_exact(lits, k, enc, fresh)
    raise ValueError(f"unknown cardinality kind {kind!r}")


def complement(kind: str, k: int) -> list[tuple[str, int]]:
    """Cardinality constraints whose disjunction is the negation of (kind, k).

    The negation of `exact k` is a disjunction of two bounds; the others
    negate to a single bound.
    """
    if kind == "atmost":
        return [("atleast", k + 1)]
    if kind == "atleast":
        return [("atmost", k - 1)]
    if kind == "exact":
        return [("atmost", k - 1), ("atleast", k + 1)]
    raise ValueError(f"unknown cardinality kind {kind!r}")
