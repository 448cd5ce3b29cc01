"""Projected model counting oracles.

Every counter exposes ``count(pf, epsilon, delta, seed, budget=None)`` and
returns a :class:`CountResult`. Exact results report ``epsilon == delta == 0``
whatever tolerance was requested, so callers can tell how much slack a
returned count actually carries.
"""

from __future__ import annotations

import math
import random
import shlex
import subprocess
from dataclasses import dataclass
from functools import lru_cache
from statistics import median_low
from typing import Protocol, Sequence

from .formula import Cnf, ProjectedFormula, to_dimacs
from .limits import Budget
from .sat import Solver, count_projected
from .transform import DoubledFormula, encode_xor


@dataclass(frozen=True)
class CountResult:
    count: int | float
    epsilon: float = 0.0
    delta: float = 0.0
    calls: int = 0

    @property
    def exact(self) -> bool:
        return self.epsilon == 0 and self.delta == 0


class Counter(Protocol):
    def count(self, pf: ProjectedFormula, epsilon: float, delta: float, seed: int,
              budget: Budget | None = None) -> CountResult: ...


def _check_params(epsilon: float, delta: float) -> None:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def exact_count(pf: ProjectedFormula, assumptions: Sequence[int] = (),
                budget: Budget | None = None) -> CountResult:
    n, calls = count_projected(pf.cnf, pf.projection, assumptions, budget=budget)
    return CountResult(n, 0.0, 0.0, calls)


class ExactCounter:
    """Exact-backed oracle: trivially meets any (epsilon, delta) contract.

    Results are memoised per (formula, assumptions), so repeated queries on
    the same cofactor cost nothing after the first.
    """

    def __init__(self):
        self._cache: dict[tuple[ProjectedFormula, tuple[int, ...]], int] = {}

    def count(self, pf: ProjectedFormula, epsilon: float = 0.0, delta: float = 0.0, seed: int = 0,
              budget: Budget | None = None, assumptions: Sequence[int] = ()) -> CountResult:
        key = (pf, tuple(assumptions))
        hit = self._cache.get(key)
        if hit is not None:
            return CountResult(hit)
        res = exact_count(pf, assumptions, budget)
        self._cache[key] = res.count
        return res


def cell_threshold(epsilon: float) -> int:
    """Cell size below which a hashed cell is counted by enumeration."""
    return 1 + math.ceil(9.84 * (1 + epsilon / (1 + epsilon)) * (1 + 1 / epsilon) ** 2)


@lru_cache(maxsize=None)
def median_rounds(delta: float, p_fail: float = 0.36) -> int:
    """Smallest odd r such that a majority of r rounds fails with probability <= delta.

    Uses the exact binomial tail for per-round failure probability ``p_fail``.
    """
    r = 1
    while True:
        need = r // 2 + 1
        tail = sum(math.comb(r, k) * p_fail**k * (1 - p_fail) ** (r - k) for k in range(need, r + 1))
        if tail <= delta:
            return r
        r += 2


def random_xor(variables: Sequence[int], rng: random.Random) -> tuple[list[int], bool]:
    """Parity constraint over a density-1/2 random subset of ``variables``."""
    return [v for v in variables if rng.getrandbits(1)], bool(rng.getrandbits(1))


def hashed_solver(cnf: Cnf, xors: Sequence[tuple[list[int], bool]], budget: Budget | None) -> Solver:
    clauses: list[tuple[int, ...]] = []
    top = cnf.num_vars + 1
    for vs, parity in xors:
        cl, top = encode_xor(vs, parity, top)
        clauses += cl
    s = Solver(top - 1, budget)
    s.add_cnf(cnf)
    for c in clauses:
        if not s.add_clause(c):
            break
    return s


def cell_models(pf: ProjectedFormula, xors: Sequence[tuple[list[int], bool]], limit: int,
                budget: Budget | None = None) -> tuple[list[tuple[bool, ...]], int]:
    """Projected models in the cell cut out by ``xors`` (at most ``limit``) and SAT calls used."""
    s = hashed_solver(pf.cnf, xors, budget)
    models = list(s.enumerate(pf.projection, limit=limit))
    return models, s.solves


class HashCounter:
    """Approximate projected counter using random XOR hashing.

    Each round partitions the projected solution space with nested random
    parity constraints and finds the fewest constraints leaving a cell
    smaller than the threshold; the round estimate is cell size times
    2^constraints. The median over enough rounds gives the (eps, delta)
    guarantee. Counts below the threshold are enumerated and returned exactly.
    """

    def __init__(self, p_fail: float = 0.36):
        self.p_fail = p_fail

    def count(self, pf: ProjectedFormula, epsilon: float, delta: float, seed: int,
              budget: Budget | None = None) -> CountResult:
        _check_params(epsilon, delta)
        thresh = cell_threshold(epsilon)
        small, calls = count_projected(pf.cnf, pf.projection, limit=thresh, budget=budget)
        if small < thresh:
            return CountResult(small, 0.0, 0.0, calls)
        rng = random.Random(seed)
        proj = pf.projection
        estimates = []
        guess = None
        for _ in range(median_rounds(delta, self.p_fail)):
            xors: list[tuple[list[int], bool]] = []
            sizes: dict[int, int] = {0: small}

            def size(i: int) -> int:
                nonlocal calls
                while len(xors) < i:
                    xors.append(random_xor(proj, rng))
                if i not in sizes:
                    models, used = cell_models(pf, xors[:i], thresh, budget)
                    calls += used
                    sizes[i] = len(models)
                return sizes[i]

            i = self._search(size, thresh, len(proj), guess)
            guess = i
            estimates.append(sizes[i] << i)
        return CountResult(median_low(estimates), epsilon, delta, calls)

    @staticmethod
    def _search(size, thresh: int, nproj: int, guess: int | None) -> int:
        """Smallest i >= 1 with size(i) < thresh; size is non-increasing in i."""
        if guess is not None:
            i = max(1, guess)
            if size(i) < thresh:
                while i > 1 and size(i - 1) < thresh:
                    i -= 1
                return i
            while size(i) >= thresh:
                i += 1
                if i > nproj + 64:
                    raise RuntimeError("hash search did not converge")
            return i
        lo, hi = 0, max(1, nproj)
        while size(hi) >= thresh:
            lo, hi = hi, hi + 16
            if hi > nproj + 64:
                raise RuntimeError("hash search did not converge")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if size(mid) >= thresh:
                lo = mid
            else:
                hi = mid
        return hi


def approx_count(pf: ProjectedFormula, epsilon: float, delta: float, seed: int,
                 budget: Budget | None = None) -> CountResult:
    return HashCounter().count(pf, epsilon, delta, seed, budget)


def count_g(g: DoubledFormula, epsilon_g: float, delta_g: float, seed: int,
            counter: Counter | None = None, budget: Budget | None = None) -> CountResult:
    """Approximate |Sol(G) projected on X|, the number of inputs with two or more outputs."""
    counter = counter or HashCounter()
    return counter.count(g.formula, epsilon_g, delta_g, seed, budget)


class ExternalCounter:
    """Projected counter run as a subprocess.

    The command reads DIMACS with a ``c ind ... 0`` projection line on stdin
    and prints a single number on stdout. ``{epsilon}``, ``{delta}`` and
    ``{seed}`` placeholders in the command are substituted per call.
    """

    def __init__(self, command: str, timeout_s: float | None = None):
        self.command = command
        self.timeout_s = timeout_s

    def count(self, pf: ProjectedFormula, epsilon: float, delta: float, seed: int,
              budget: Budget | None = None) -> CountResult:
        cmd = shlex.split(self.command.format(epsilon=epsilon, delta=delta, seed=seed))
        proc = subprocess.run(cmd, input=to_dimacs(pf.cnf, pf.projection), capture_output=True,
                              text=True, timeout=self.timeout_s)
        if proc.returncode != 0:
            raise RuntimeError(f"external counter exited with {proc.returncode}: {proc.stderr.strip()}")
        if budget is not None:
            budget.charge()
        return CountResult(parse_count_output(proc.stdout), epsilon, delta, 1)


def parse_count_output(text: str) -> int | float:
    """Last numeric token of a counter's stdout."""
    for tok in reversed(text.split()):
        try:
            return int(tok)
        except ValueError:
            try:
                return float(tok)
            except ValueError:
                continue
    raise ValueError(f"no count in counter output: {text!r}")
