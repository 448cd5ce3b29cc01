"""CDCL SAT engine and projected model enumeration.

The solver uses two watched literals, VSIDS decisions with phase saving,
Luby restarts and 1UIP learning. It is incremental: clauses may be added
between calls and learned clauses persist. Internally a literal of variable
``v`` is coded as ``2v`` (positive) or ``2v + 1`` (negative).
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Iterable, Iterator, Sequence

from .formula import Assignment, Cnf, ProjectedFormula, to_dimacs
from .limits import Budget

SAT = "SAT"
UNSAT = "UNSAT"


def _code(lit: int) -> int:
    return lit << 1 if lit > 0 else (-lit << 1) | 1


def _lit(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    restart_base = 100
    var_decay = 0.95

    def __init__(self, num_vars: int = 0, budget: Budget | None = None):
        self.budget = budget
        self.nvars = 0
        self.clauses: list[list[int] | None] = []
        self.learnts: list[int] = []
        self.watches: list[list[int]] = [[], []]
        self.val = [0, 0]
        self.level = [0]
        self.reason = [-1]
        self.activity = [0.0]
        self.phase = [False]
        self.seen = [False]
        self.heap: list[tuple[float, int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.solves = 0
        self.max_learnts = 2000.0
        self._restarts = 0
        self.ensure_vars(num_vars)

    # -- problem construction -------------------------------------------------

    def ensure_vars(self, n: int) -> None:
        for v in range(self.nvars + 1, n + 1):
            self.watches += [[], []]
            self.val += [0, 0]
            self.level.append(0)
            self.reason.append(-1)
            self.activity.append(0.0)
            self.phase.append(False)
            self.seen.append(False)
            heappush(self.heap, (0.0, v))
        self.nvars = max(self.nvars, n)

    def new_var(self) -> int:
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    def add_cnf(self, cnf: Cnf) -> bool:
        self.ensure_vars(cnf.num_vars)
        for c in cnf.clauses:
            if not self.add_clause(c):
                return False
        return True

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause (DIMACS literals) at level 0. Returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        self._cancel_until(0)
        codes: list[int] = []
        val = self.val
        top = 0
        for l in lits:
            c = _code(l)
            top = max(top, c >> 1)
            if top > self.nvars:
                self.ensure_vars(top)
                val = self.val
            if val[c] == 1 or (c ^ 1) in codes:
                return True
            if val[c] == 0 and c not in codes:
                codes.append(c)
        if not codes:
            self.ok = False
            return False
        if len(codes) == 1:
            self._enqueue(codes[0], -1)
            if self._propagate() != -1:
                self.ok = False
            return self.ok
        self._attach(codes)
        return True

    def _attach(self, codes: list[int], learnt: bool = False) -> int:
        ci = len(self.clauses)
        self.clauses.append(codes)
        self.watches[codes[0]].append(ci)
        self.watches[codes[1]].append(ci)
        if learnt:
            self.learnts.append(ci)
        return ci

    # -- core machinery -------------------------------------------------------

    def _enqueue(self, p: int, reason: int) -> None:
        v = p >> 1
        self.val[p] = 1
        self.val[p ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        trail, val, reason, phase = self.trail, self.val, self.reason, self.phase
        activity, heap = self.activity, self.heap
        start = self.trail_lim[lvl]
        for i in range(len(trail) - 1, start - 1, -1):
            p = trail[i]
            v = p >> 1
            val[p] = 0
            val[p ^ 1] = 0
            reason[v] = -1
            phase[v] = not p & 1
            heappush(heap, (-activity[v], v))
        del trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, start)
        if len(heap) > 8 * self.nvars + 64:
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        val, act = self.val, self.activity
        self.heap = [(-act[v], v) for v in range(1, self.nvars + 1) if val[2 * v] == 0]
        heapify(self.heap)

    def _propagate(self) -> int:
        """Unit propagation over the trail. Returns a conflicting clause index or -1."""
        trail, val, watches, clauses = self.trail, self.val, self.watches, self.clauses
        level, reason = self.level, self.reason
        lvl = len(self.trail_lim)
        qhead = self.qhead
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            ws = watches[false_lit]
            n = len(ws)
            i = j = 0
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    q = c[k]
                    if val[q] != -1:
                        c[1] = q
                        c[k] = false_lit
                        watches[q].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return ci
                    v = first >> 1
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[v] = lvl
                    reason[v] = ci
                    trail.append(first)
            del ws[j:]
        self.qhead = qhead
        return -1

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen, level, reason, trail, clauses = self.seen, self.level, self.reason, self.trail, self.clauses
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            c = clauses[confl]
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            confl = reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimisation)
        if len(learnt) > 2:
            keep = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r == -1 or not all(seen[x >> 1] or level[x >> 1] == 0 for x in clauses[r][1:]):
                    keep.append(q)
            for q in learnt[1:]:
                seen[q >> 1] = False
            learnt = keep
        else:
            for q in learnt[1:]:
                seen[q >> 1] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _locked(self, ci: int) -> bool:
        c = self.clauses[ci]
        return self.val[c[0]] == 1 and self.reason[c[0] >> 1] == ci

    def _reduce_db(self) -> None:
        clauses = self.clauses
        order = sorted(self.learnts, key=lambda ci: len(clauses[ci]), reverse=True)
        half = len(order) // 2
        kept = []
        for k, ci in enumerate(order):
            if k < half and len(clauses[ci]) > 2 and not self._locked(ci):
                clauses[ci] = None
            else:
                kept.append(ci)
        self.learnts = kept

    def _pick_branch(self) -> int:
        heap, val, phase = self.heap, self.val, self.phase
        while heap:
            _, v = heappop(heap)
            if val[2 * v] == 0:
                return 2 * v if phase[v] else 2 * v + 1
        return -1

    def _search(self, assumptions: Sequence[int]) -> bool:
        """CDCL loop from the current state. ``assumptions`` are literal codes."""
        budget = self.budget
        trail_lim = self.trail_lim
        conflicts_here = 0
        restart_limit = luby(self._restarts) * self.restart_base
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                conflicts_here += 1
                if not trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt, learnt=True)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.var_decay
                if budget is not None and self.conflicts & 255 == 0:
                    budget.check()
                continue
            if conflicts_here >= restart_limit:
                self._restarts += 1
                conflicts_here = 0
                restart_limit = luby(self._restarts) * self.restart_base
                self._cancel_until(0)
                continue
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts *= 1.1
            nxt = -1
            while len(trail_lim) < len(assumptions):
                p = assumptions[len(trail_lim)]
                if self.val[p] == 1:
                    trail_lim.append(len(self.trail))
                elif self.val[p] == -1:
                    return False
                else:
                    nxt = p
                    break
            if nxt == -1:
                nxt = self._pick_branch()
                if nxt == -1:
                    return True
                self.decisions += 1
            trail_lim.append(len(self.trail))
            self._enqueue(nxt, -1)

    # -- public API -----------------------------------------------------------

    def solve(self, assumptions: Iterable[int] = ()) -> bool:
        """Decide satisfiability under DIMACS ``assumptions``; the model is kept in ``model``."""
        assumps = [_code(l) for l in assumptions]
        top = max((p >> 1 for p in assumps), default=0)
        if top > self.nvars:
            self.ensure_vars(top)
        self._charge()
        self.model = None
        if not self.ok:
            return False
        self._cancel_until(0)
        if not self._search(assumps):
            self._cancel_until(0)
            return False
        self.model = [False] + [self.val[2 * v] == 1 for v in range(1, self.nvars + 1)]
        return True

    def _charge(self) -> None:
        self.solves += 1
        if self.budget is not None:
            self.budget.charge()

    def enumerate(self, projection: Sequence[int], assumptions: Iterable[int] = (),
                  limit: int | None = None) -> Iterator[tuple[bool, ...]]:
        """Yield distinct projections of models, blocking each one as it is found.

        After each model the solver backjumps only as far as the blocking
        clause requires instead of restarting from level 0. The added
        blocking clauses are permanent.
        """
        assumps = [_code(l) for l in assumptions]
        top = max([p >> 1 for p in assumps] + list(projection) + [0])
        if top > self.nvars:
            self.ensure_vars(top)
        if not self.ok:
            self._charge()
            return
        self._cancel_until(0)
        found = 0
        val, level = self.val, self.level
        while limit is None or found < limit:
            self._charge()
            if not self._search(assumps):
                self._cancel_until(0)
                return
            found += 1
            proj = tuple(val[2 * v] == 1 for v in projection)
            yield proj
            if not projection:
                return
            block = [2 * v if not b else 2 * v + 1 for v, b in zip(projection, proj)]
            block.sort(key=lambda p: level[p >> 1], reverse=True)
            hi = level[block[0] >> 1]
            if hi == 0:
                return
            if len(block) == 1:
                self._cancel_until(0)
                self._enqueue(block[0], -1)
                continue
            second = level[block[1] >> 1]
            if second == hi:
                self._cancel_until(hi - 1)
                self._attach(block)
            else:
                self._cancel_until(second)
                ci = self._attach(block)
                self._enqueue(block[0], ci)


@dataclass
class SolveResult:
    status: str
    model: Assignment | None = None

    @property
    def sat(self) -> bool:
        return self.status == SAT


def solve(cnf: Cnf, assumptions: Iterable[int] = (), budget: Budget | None = None) -> SolveResult:
    s = Solver(cnf.num_vars, budget)
    s.add_cnf(cnf)
    if s.solve(assumptions):
        return SolveResult(SAT, {v: s.model[v] for v in range(1, cnf.num_vars + 1)})
    return SolveResult(UNSAT)


@dataclass
class Enumeration:
    models: list[Assignment]
    overflow: bool
    sat_calls: int


def enumerate_projected(pf: ProjectedFormula, limit: int | None = None,
                        assumptions: Iterable[int] = (), budget: Budget | None = None) -> Enumeration:
    """All-SAT projected on ``pf.projection`` via blocking clauses.

    Returns at most ``limit`` models; ``overflow`` is set when more exist.
    """
    s = Solver(pf.cnf.num_vars, budget)
    s.add_cnf(pf.cnf)
    proj = pf.projection
    models = []
    cap = None if limit is None else limit + 1
    for bits in s.enumerate(proj, assumptions, cap):
        models.append(dict(zip(proj, bits)))
    overflow = limit is not None and len(models) > limit
    return Enumeration(models[:limit] if overflow else models, overflow, s.solves)


def count_projected(cnf: Cnf, projection: Sequence[int], assumptions: Iterable[int] = (),
                    limit: int | None = None, budget: Budget | None = None) -> tuple[int, int]:
    """Number of projected models (stopping at ``limit``) and SAT calls used."""
    s = Solver(cnf.num_vars, budget)
    s.add_cnf(cnf)
    n = sum(1 for _ in s.enumerate(projection, assumptions, limit))
    return n, s.solves


class ExternalSolver:
    """Delegate ``solve`` to a DIMACS solver process (exit code 10 = SAT, 20 = UNSAT)."""

    def __init__(self, command: str | Sequence[str], timeout_s: float | None = None):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout_s = timeout_s

    def solve(self, cnf: Cnf, assumptions: Iterable[int] = ()) -> SolveResult:
        cnf = cnf.conjoin([(l,) for l in assumptions], cnf.num_vars)
        proc = subprocess.run(self.command, input=to_dimacs(cnf), capture_output=True,
                              text=True, timeout=self.timeout_s)
        if proc.returncode == 20:
            return SolveResult(UNSAT)
        if proc.returncode != 10:
            raise RuntimeError(f"external solver exited with {proc.returncode}: {proc.stderr.strip()}")
        model = {v: False for v in range(1, cnf.num_vars + 1)}
        for line in proc.stdout.splitlines():
            if line.startswith("v"):
                for tok in line.split()[1:]:
                    l = int(tok)
                    if l:
                        model[abs(l)] = l > 0
        return SolveResult(SAT, model)


def write_solver_output(result: SolveResult) -> tuple[str, int]:
    """Render a result in the SAT-competition output format with its exit code."""
    if not result.sat:
        return "s UNSATISFIABLE\n", 20
    lits = " ".join(str(v if b else -v) for v, b in sorted(result.model.items()))
    return f"s SATISFIABLE\nv {lits} 0\n", 10
