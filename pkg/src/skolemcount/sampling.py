"""Sampling oracles over projected model sets.

Every sampler exposes ``sample(pf, epsilon_s, seed, budget=None)`` and
returns a :class:`SampleResult`.
"""

from __future__ import annotations

import math
import random
import shlex
import subprocess
from dataclasses import dataclass
from typing import Protocol

from .counting import ExactCounter, HashCounter, cell_models, random_xor
from .formula import Assignment, ProjectedFormula, to_dimacs
from .limits import Budget


class UnsatisfiableError(ValueError):
    """Sampling was requested from a formula without models."""


@dataclass(frozen=True)
class SampleResult:
    assignment: Assignment
    calls: int = 0


class Sampler(Protocol):
    def sample(self, pf: ProjectedFormula, epsilon_s: float, seed: int,
               budget: Budget | None = None) -> SampleResult: ...


class ExactSampler:
    """Exactly uniform sampler by self-reduction.

    Projection variables are fixed one at a time, each polarity chosen with
    probability proportional to the exact projected count of the matching
    cofactor. Counts are memoised by the shared :class:`ExactCounter`.
    """

    def __init__(self, counter: ExactCounter | None = None):
        self.counter = counter or ExactCounter()

    def sample(self, pf: ProjectedFormula, epsilon_s: float = 0.0, seed: int = 0,
               budget: Budget | None = None) -> SampleResult:
        rng = random.Random(seed)
        res = self.counter.count(pf, budget=budget)
        total, calls = res.count, res.calls
        if total == 0:
            raise UnsatisfiableError("cannot sample from an unsatisfiable formula")
        prefix: list[int] = []
        for v in pf.projection:
            res = self.counter.count(pf, budget=budget, assumptions=prefix + [v])
            calls += res.calls
            if rng.randrange(total) < res.count:
                prefix.append(v)
                total = res.count
            else:
                prefix.append(-v)
                total -= res.count
        return SampleResult({abs(l): l > 0 for l in prefix}, calls)


class HashSampler:
    """Almost-uniform sampler by random XOR cells, in the style of UniGen.

    Small solution sets are enumerated and sampled directly. Otherwise the
    solution count is estimated once per formula, a random hash with about
    log2(count / pivot) parity constraints is drawn, and a uniform element
    of the resulting cell is returned if the cell size falls in
    [lo, hi]; failed cells are retried with fresh hashes.
    """

    def __init__(self, kappa: float = 0.6, max_tries: int = 50):
        self.pivot = math.ceil(4.03 * (1 + 1 / kappa) ** 2)
        self.hi = 1 + math.ceil(1.41 * (1 + kappa) * self.pivot)
        self.lo = math.floor(self.pivot / (1.41 * (1 + kappa)))
        self.max_tries = max_tries
        # per formula: the full model list when small, else a count estimate
        self._cache: dict[ProjectedFormula, list | int] = {}

    def sample(self, pf: ProjectedFormula, epsilon_s: float = 0.16, seed: int = 0,
               budget: Budget | None = None) -> SampleResult:
        rng = random.Random(seed)
        proj = pf.projection
        calls = 0
        entry = self._cache.get(pf)
        if entry is None:
            models, calls = cell_models(pf, [], self.hi + 1, budget)
            if not models:
                raise UnsatisfiableError("cannot sample from an unsatisfiable formula")
            if len(models) <= self.hi:
                entry = models
            else:
                res = HashCounter().count(pf, 0.8, 0.2, rng.getrandbits(32), budget)
                calls += res.calls
                entry = res.count
            self._cache[pf] = entry
        if isinstance(entry, list):
            return SampleResult(dict(zip(proj, rng.choice(entry))), calls)
        est = entry
        q = max(1, round(math.log2(est / self.pivot)))
        for _ in range(self.max_tries):
            xors: list = []
            for i in (q - 1, q, q + 1):
                if i < 1:
                    continue
                while len(xors) < i:
                    xors.append(random_xor(proj, rng))
                models, used = cell_models(pf, xors[:i], self.hi + 1, budget)
                calls += used
                if self.lo <= len(models) <= self.hi:
                    return SampleResult(dict(zip(proj, rng.choice(models))), calls)
        raise RuntimeError(f"no acceptable cell after {self.max_tries} hashes")


class ExternalSampler:
    """Sampler run as a subprocess.

    The command reads DIMACS with a ``c ind ... 0`` line on stdin and prints
    projected models one per line as DIMACS literals (an optional leading
    ``v`` and trailing ``0`` are accepted); the first line is used.
    ``{seed}`` in the command is substituted per call.
    """

    def __init__(self, command: str, timeout_s: float | None = None):
        self.command = command
        self.timeout_s = timeout_s

    def sample(self, pf: ProjectedFormula, epsilon_s: float, seed: int,
               budget: Budget | None = None) -> SampleResult:
        cmd = shlex.split(self.command.format(seed=seed, epsilon=epsilon_s))
        proc = subprocess.run(cmd, input=to_dimacs(pf.cnf, pf.projection), capture_output=True,
                              text=True, timeout=self.timeout_s)
        if proc.returncode != 0:
            raise RuntimeError(f"external sampler exited with {proc.returncode}: {proc.stderr.strip()}")
        if budget is not None:
            budget.charge()
        for line in proc.stdout.splitlines():
            toks = [t for t in line.split() if t != "v"]
            if not toks:
                continue
            lits = [int(t) for t in toks if t != "0"]
            got = {abs(l): l > 0 for l in lits}
            if set(got) != set(pf.projection):
                raise ValueError(f"external sample does not cover the projection: {line!r}")
            return SampleResult(got, 1)
        raise UnsatisfiableError("external sampler returned no model")


def sample(pf: ProjectedFormula, epsilon_s: float, seed: int, budget: Budget | None = None) -> SampleResult:
    """Draw one projected model with the default (exactly uniform) sampler."""
    return ExactSampler().sample(pf, epsilon_s, seed, budget)

