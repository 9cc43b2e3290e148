"""Embedded CDCL SAT solver and model enumeration.

Standard architecture: two watched literals, 1UIP clause learning with
activity-based decisions (decay 0.95), phase saving, Luby restarts (base 64
conflicts). Every SAT answer is re-checked against the clause database
before being returned; enumeration blocks models on the user-atom
projection, so hidden Tseitin/counter variables never cause duplicates.
"""

from __future__ import annotations

import heapq
import os
import random
import shlex
import subprocess
import tempfile
from dataclasses import dataclass

from .cnf import ClauseDb, emit_dimacs
from .lang import LangError

DEFAULT_CONFLICT_BUDGET = 10_000_000
RESTART_BASE = 64
ACTIVITY_DECAY = 0.95


class InternalSolverError(Exception):
    """A model failed internal verification; indicates a solver defect."""


@dataclass
class Model:
    values: list[bool]  # 1-indexed; values[0] unused

    def truth(self, var: int) -> bool:
        return self.values[var]

    def projected(self, db: ClauseDb) -> dict[str, bool]:
        vm = db.varmap
        return {vm.name_of(v): self.values[v] for v in vm.user_vars()}


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "unknown" | "exhausted"
    model: Model | None = None


def _luby(i: int) -> int:
    k = i.bit_length()
    if i == (1 << k) - 1:
        return 1 << (k - 1)
    return _luby(i - (1 << (k - 1)) + 1)


class Solver:
    """One CDCL instance over a fixed variable range; owns its trail."""

    def __init__(self, n_vars: int, seed: int = 0, conflict_budget: int = DEFAULT_CONFLICT_BUDGET):
        self.nv = n_vars
        self.litval = [0] * (2 * n_vars + 1)  # index lit+nv: 1 true, -1 false
        self.level = [0] * (n_vars + 1)
        self.reason: list[list[int] | None] = [None] * (n_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * n_vars + 1)]
        self.stored: list[list[int]] = []  # original clauses, for verification
        self.activity = [0.0] * (n_vars + 1)
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.saved_phase = [False] * (n_vars + 1)
        self.ok = True
        self.conflicts = 0
        self.budget = conflict_budget
        rng = random.Random(seed)
        for v in range(1, n_vars + 1):
            self.activity[v] = rng.random() * 1e-6  # seed-determined tie-breaking
            heapq.heappush(self.heap, (-self.activity[v], v))

    # -- assignment helpers ------------------------------------------------

    def _value(self, lit: int) -> int:
        return self.litval[lit + self.nv]

    def _enqueue(self, lit: int, reason: list[int] | None) -> bool:
        val = self.litval[lit + self.nv]
        if val:
            return val > 0
        nv = self.nv
        self.litval[lit + nv] = 1
        self.litval[-lit + nv] = -1
        v = abs(lit)
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def decision_level(self) -> int:
        return len(self.trail_lim)

    # -- clauses -------------------------------------------------------------

    def add_clause(self, lits: list[int]) -> None:
        """Add a clause at decision level 0 (between solve calls)."""
        if self.decision_level() != 0:
            self._backtrack(0)
        if not self.ok:
            return
        self.stored.append(list(lits))
        seen: dict[int, None] = {}
        simplified: list[int] = []
        for l in lits:
            if -l in seen:
                return  # tautology
            if l in seen:
                continue
            val = self._value(l)
            if val > 0:
                return  # already satisfied at level 0
            if val < 0:
                continue  # false at level 0, drop literal
            seen[l] = None
            simplified.append(l)
        if not simplified:
            self.ok = False
            return
        if len(simplified) == 1:
            if not self._enqueue(simplified[0], None):
                self.ok = False
            return
        self._attach(simplified)

    def _attach(self, clause: list[int]) -> None:
        nv = self.nv
        self.watches[clause[0] + nv].append(clause)
        self.watches[clause[1] + nv].append(clause)

    # -- propagation ---------------------------------------------------------

    def _propagate(self) -> list[int] | None:
        nv = self.nv
        litval = self.litval
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            wl = watches[false_lit + nv]
            i = j = 0
            n_wl = len(wl)
            while i < n_wl:
                c = wl[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if litval[first + nv] == 1:
                    wl[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    ck = c[k]
                    if litval[ck + nv] != -1:
                        c[1] = ck
                        c[k] = false_lit
                        watches[ck + nv].append(c)
                        found = True
                        break
                if found:
                    continue
                wl[j] = c
                j += 1
                if litval[first + nv] == -1:
                    # conflict: keep remaining watchers, stop propagation
                    while i < n_wl:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    self.qhead = len(trail)
                    return c
                self.litval[first + nv] = 1
                self.litval[-first + nv] = -1
                v = abs(first)
                self.level[v] = len(self.trail_lim)
                self.reason[v] = c
                trail.append(first)
            del wl[j:]
        return None

    # -- conflict analysis -----------------------------------------------------

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nv + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        nv = self.nv
        seen = [False] * (nv + 1)
        learned: list[int] = []
        counter = 0
        reason = conflict
        skip_first = False  # reason clauses carry their enqueued literal first
        idx = len(self.trail) - 1
        cur_level = self.decision_level()
        while True:
            for q in reason[1:] if skip_first else reason:
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] == cur_level:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            pivot = self.trail[idx]
            idx -= 1
            seen[abs(pivot)] = False
            counter -= 1
            if counter == 0:
                break
            reason = self.reason[abs(pivot)] or []
            skip_first = True
        learned.insert(0, -pivot)
        if len(learned) == 1:
            return learned, 0
        # second-highest decision level, with that literal watched second
        max_i = 1
        for i in range(2, len(learned)):
            if self.level[abs(learned[i])] > self.level[abs(learned[max_i])]:
                max_i = i
        learned[1], learned[max_i] = learned[max_i], learned[1]
        return learned, self.level[abs(learned[1])]

    def _backtrack(self, target: int) -> None:
        if self.decision_level() <= target:
            return
        nv = self.nv
        limit = self.trail_lim[target]
        for i in range(len(self.trail) - 1, limit - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            self.saved_phase[v] = lit > 0
            self.litval[lit + nv] = 0
            self.litval[-lit + nv] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[limit:]
        del self.trail_lim[target:]
        self.qhead = len(self.trail)

    def _decide(self) -> int:
        nv = self.nv
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.litval[v + nv] == 0:
                return v if self.saved_phase[v] else -v
        for v in range(1, nv + 1):
            if self.litval[v + nv] == 0:
                return v if self.saved_phase[v] else -v
        return 0

    # -- search -------------------------------------------------------------------

    def solve(self, assumptions: list[int] | None = None) -> SolveResult:
        assumptions = list(assumptions or [])
        if not self.ok:
            return SolveResult("unsat")
        self._backtrack(0)
        if self._propagate() is not None:
            self.ok = False
            return SolveResult("unsat")
        conflicts_left = self.budget
        restart_idx = 1
        restart_limit = RESTART_BASE * _luby(restart_idx)
        conflicts_here = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                conflicts_here += 1
                conflicts_left -= 1
                if self.decision_level() == 0:
                    self.ok = False
                    return SolveResult("unsat")
                learned, blevel = self._analyze(conflict)
                if self.decision_level() <= len(assumptions):
                    # conflict among the assumptions themselves
                    return SolveResult("unsat")
                self._backtrack(max(blevel, 0))
                if len(learned) == 1:
                    if not self._enqueue(learned[0], None):
                        self.ok = False
                        return SolveResult("unsat")
                else:
                    self._attach(learned)
                    self._enqueue(learned[0], learned)
                self.var_inc /= ACTIVITY_DECAY
                if conflicts_left <= 0:
                    return SolveResult("unknown")
                if conflicts_here >= restart_limit:
                    restart_idx += 1
                    restart_limit = RESTART_BASE * _luby(restart_idx)
                    conflicts_here = 0
                    self._backtrack(0)
                continue
            if len(self.trail) == self.nv:
                if any(self._value(a) < 0 for a in assumptions):
                    return SolveResult("unsat")
                return SolveResult("sat", self._extract_model())
            if self.decision_level() < len(assumptions):
                lit = assumptions[self.decision_level()]
                val = self._value(lit)
                if val < 0:
                    return SolveResult("unsat")
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(lit, None)
            else:
                lit = self._decide()
                if lit == 0:
                    if any(self._value(a) < 0 for a in assumptions):
                        return SolveResult("unsat")
                    return SolveResult("sat", self._extract_model())
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, None)

    def _extract_model(self) -> Model:
        nv = self.nv
        values = [False] * (nv + 1)
        for v in range(1, nv + 1):
            values[v] = self.litval[v + nv] > 0
        model = Model(values)
        self._verify(model)
        return model

    def _verify(self, model: Model) -> None:
        for clause in self.stored:
            if not any(model.values[abs(l)] == (l > 0) for l in clause):
                raise InternalSolverError(f"model does not satisfy clause {clause}")


# ---------------------------------------------------------------------------
# Public solving API


def solve(
    db: ClauseDb,
    assumptions: list[int] | None = None,
    seed: int = 0,
    conflict_budget: int = DEFAULT_CONFLICT_BUDGET,
) -> SolveResult:
    s = Solver(db.n_vars, seed=seed, conflict_budget=conflict_budget)
    for c in db.clauses:
        s.add_clause(c)
    return s.solve(assumptions)


class Session:
    """Model enumeration over the user-atom projection ("Next" loop)."""

    def __init__(
        self,
        db: ClauseDb,
        seed: int = 0,
        conflict_budget: int = DEFAULT_CONFLICT_BUDGET,
        external_cmd: str | None = None,
        timeout: float | None = None,
    ):
        self.db = db
        self.exhausted = False
        self.last: Model | None = None
        if external_cmd:
            self._impl: _SessionImpl = _ExternalImpl(db, external_cmd, timeout)
        else:
            self._impl = _EmbeddedImpl(db, seed, conflict_budget)

    def solve(self) -> SolveResult:
        res = self._impl.solve()
        if res.status == "sat":
            self.last = res.model
        else:
            self.exhausted = True
        return res

    def next_model(self) -> SolveResult:
        """Block the previous model's projection and re-solve."""
        if self.exhausted:
            return SolveResult("exhausted")
        if self.last is None:
            raise LangError("next_model called before a SAT result")
        blocking = [
            -v if self.last.values[v] else v for v in self.db.varmap.user_vars()
        ]
        if not blocking:
            self.exhausted = True
            return SolveResult("exhausted")
        self._impl.block(blocking)
        res = self._impl.solve()
        if res.status == "sat":
            self.last = res.model
            return res
        self.exhausted = True
        if res.status == "unsat":
            return SolveResult("exhausted")
        return res


class _SessionImpl:
    def solve(self) -> SolveResult:
        raise NotImplementedError

    def block(self, clause: list[int]) -> None:
        raise NotImplementedError


class _EmbeddedImpl(_SessionImpl):
    def __init__(self, db: ClauseDb, seed: int, conflict_budget: int):
        self.solver = Solver(db.n_vars, seed=seed, conflict_budget=conflict_budget)
        for c in db.clauses:
            self.solver.add_clause(c)

    def solve(self) -> SolveResult:
        return self.solver.solve()

    def block(self, clause: list[int]) -> None:
        self.solver.add_clause(clause)


def count_models(db: ClauseDb, limit: int, seed: int = 0) -> int:
    """Number of distinct projected models, capped at limit (limit >= 1)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    session = Session(db, seed=seed)
    count = 0
    res = session.solve()
    while res.status == "sat":
        count += 1
        if count >= limit:
            break
        res = session.next_model()
    return count


def enumerate_models(db: ClauseDb, limit: int | None = None, seed: int = 0):
    """Yield Models until exhaustion (or limit)."""
    session = Session(db, seed=seed)
    res = session.solve()
    n = 0
    while res.status == "sat":
        yield res.model
        n += 1
        if limit is not None and n >= limit:
            return
        res = session.next_model()


# ---------------------------------------------------------------------------
# External solver adapter (SAT-competition output format)


class ExternalSolverError(LangError):
    pass


def run_external_sat(
    db: ClauseDb,
    extra_clauses: list[list[int]],
    cmd_template: str,
    timeout: float | None = None,
) -> SolveResult:
    """Run an external DIMACS solver via a command template.

    The template is split shell-style; a literal `{file}` argument is
    replaced by the path of a temp file holding the CNF, otherwise the CNF
    is piped to stdin. Output must use `s SATISFIABLE` / `s UNSATISFIABLE`
    and `v` value lines.
    """
    text = emit_dimacs(db, comments=False)
    for clause in extra_clauses:
        text += " ".join(str(l) for l in clause) + " 0\n"
    header = f"p cnf {db.n_vars} {len(db.clauses) + len(extra_clauses)}\n"
    text = header + text.split("\n", 1)[1]

    argv = shlex.split(cmd_template)
    tmp_path = None
    try:
        if any("{file}" in a for a in argv):
            fd, tmp_path = tempfile.mkstemp(suffix=".cnf")
            with os.fdopen(fd, "w") as f:
                f.write(text)
            argv = [a.replace("{file}", tmp_path) for a in argv]
            stdin_data = None
        else:
            stdin_data = text
        try:
            proc = subprocess.run(
                argv,
                input=stdin_data,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired:
            return SolveResult("unknown")
        except OSError as err:
            raise ExternalSolverError(f"cannot run external solver: {err}") from err
        return _parse_sat_output(proc.stdout, db)
    finally:
        if tmp_path is not None:
            os.unlink(tmp_path)


def _parse_sat_output(out: str, db: ClauseDb) -> SolveResult:
    status = None
    lits: list[int] = []
    for line in out.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = "sat"
            elif word == "UNSATISFIABLE":
                status = "unsat"
            else:
                status = "unknown"
        elif line.startswith("v ") or line == "v":
            lits.extend(int(tok) for tok in line[1:].split())
    if status is None:
        raise ExternalSolverError("external solver produced no 's' status line")
    if status != "sat":
        return SolveResult(status)
    values = [False] * (db.n_vars + 1)
    for l in lits:
        if l == 0:
            continue
        v = abs(l)
        if v <= db.n_vars:
            values[v] = l > 0
    model = Model(values)
    for clause in db.clauses:
        if not any(model.values[abs(l)] == (l > 0) for l in clause):
            raise ExternalSolverError(
                f"external solver model does not satisfy clause {clause}"
            )
    return SolveResult("sat", model)


class _ExternalImpl(_SessionImpl):
    """Enumeration by re-invoking the external solver with blocking clauses."""

    def __init__(self, db: ClauseDb, cmd_template: str, timeout: float | None):
        self.db = db
        self.cmd = cmd_template
        self.timeout = timeout
        self.blocking: list[list[int]] = []

    def solve(self) -> SolveResult:
        return run_external_sat(self.db, self.blocking, self.cmd, self.timeout)

    def block(self, clause: list[int]) -> None:
        self.blocking.append(clause)
