"""Skolem function counting: stopping-rule estimator, approximate and exact counters.

The log of the Skolem count is the sum, over inputs sigma with at least two
consistent outputs, of log |Sol(F & X = sigma)|. The approximate counter
samples such sigma, averages the normalised per-input log counts with the
stopping rule and scales by the number of such inputs.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .counting import Counter, ExactCounter, count_g
from .formula import Specification
from .limits import Budget, ResourceLimitExceeded
from .sampling import ExactSampler, Sampler
from .sat import enumerate_projected
from .transform import build_g, cofactor_formula

EPS_C = 4 * math.sqrt(2) - 1
LN2 = math.log(2)


@dataclass(frozen=True)
class ParamSet:
    eps_f: float
    delta_f: float
    s_threshold: float
    eps_s: float
    delta_c: float
    eps_c: float
    eps_g: float
    delta_g: float


def stopping_threshold(epsilon: float, delta: float) -> float:
    return 4 * math.log(2 / delta) * (1 + epsilon) / epsilon**2


def derive_params(epsilon: float, delta: float, m: int) -> ParamSet:
    """Split the (epsilon, delta) budget across the stopping rule and the oracles."""
    if not 0 < epsilon <= 2:
        raise ValueError(f"epsilon must lie in (0, 2], got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if m < 1:
        raise ValueError(f"need at least one output variable, got m={m}")
    eps_f, delta_f = 0.6 * epsilon, 0.4 * delta
    s = stopping_threshold(eps_f, delta_f)
    return ParamSet(
        eps_f=eps_f,
        delta_f=delta_f,
        s_threshold=s,
        eps_s=0.2 * epsilon,
        delta_c=0.4 * delta / (m * s),
        eps_c=EPS_C,
        eps_g=0.1 * epsilon,
        delta_g=0.1 * delta,
    )


def stopping_rule(epsilon: float, delta: float, draws: Iterable[float]) -> tuple[float, int]:
    """Estimate the mean of i.i.d. [0, 1] draws to within (1 +- epsilon) w.p. > 1 - delta.

    Consumes draws until their sum reaches the threshold s and returns
    (s / t, t). Never terminates on a mean-zero source.
    """
    if not 0 < epsilon <= 2:
        raise ValueError(f"epsilon must lie in (0, 2], got {epsilon}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    s = stopping_threshold(epsilon, delta)
    t, x = 0, 0.0
    it = iter(draws)
    while x < s:
        try:
            z = next(it)
        except StopIteration:
            raise ValueError(f"draw source exhausted after {t} draws (sum {x:.4g} < {s:.4g})") from None
        if not 0.0 <= z <= 1.0:
            raise ValueError(f"draw {t + 1} outside [0, 1]: {z}")
        t += 1
        x += z
    return s / t, t


def log2_int(n: int) -> float:
    """log2 of a positive integer of any size."""
    if n <= 0:
        raise ValueError("log of a non-positive count")
    b = n.bit_length()
    if b <= 1000:
        return math.log2(n)
    shift = b - 64
    return math.log2(n >> shift) + shift


@dataclass(frozen=True)
class LogCount:
    """Logarithm of a Skolem function count in a chosen base, plus the exact count when known."""

    value: float
    base: float = math.e
    exact: int | None = None

    @classmethod
    def from_log2(cls, log2_value: float, base: float = math.e, exact: int | None = None) -> "LogCount":
        return cls(log2_value / math.log2(base), base, exact)

    @property
    def ln(self) -> float:
        return self.value * math.log(self.base)

    @property
    def log2(self) -> float:
        return self.value * math.log2(self.base)


@dataclass
class RunStats:
    t: int = 0
    x: float = 0.0
    sat_calls: int = 0
    count_calls: int = 0
    sample_calls: int = 0
    wall_time: float = 0.0
    aborted: str | None = None
    clamped: int = 0
    g: float | None = None
    s_threshold: float | None = None


@dataclass
class Outcome:
    status: str  # "ok" or "abort"
    log_count: LogCount | None
    stats: RunStats
    params: ParamSet | None = None


def skolemfc(spec: Specification, epsilon: float = 0.8, delta: float = 0.4,
             counter: Counter | None = None, sampler: Sampler | None = None, seed: int = 0,
             budget: Budget | None = None, base: float = math.e) -> Outcome:
    """Approximate log |Skolem(F, Y)| to within a factor (1 +- epsilon) w.p. >= 1 - delta.

    Per-input log counts are normalised to log2(count) / m, which lies in
    [1/m, 1]; approximate counts straying outside are clamped and the
    events recorded in ``stats.clamped``. The abort check uses the largest
    tolerance the counting oracle actually reported for the per-input
    counts, so exact answers carry no counting error. Returns status
    "abort" when that error cannot be bounded by a tenth of the estimate.
    """
    p = derive_params(epsilon, delta, spec.m)
    counter = counter or ExactCounter()
    sampler = sampler or ExactSampler()
    stats = RunStats(s_threshold=p.s_threshold)
    start = time.perf_counter()
    rng = random.Random(seed)
    m = spec.m
    try:
        g_formula = build_g(spec)
        # counting G first doubles as the emptiness test for S2
        gres = count_g(g_formula, p.eps_g, p.delta_g, rng.getrandbits(63), counter, budget)
        stats.count_calls += 1
        stats.sat_calls += gres.calls
        stats.g = gres.count
        if gres.count == 0:
            stats.wall_time = time.perf_counter() - start
            return Outcome("ok", LogCount(0.0, base, 1), stats, p)

        eps_used = 0.0

        def draws():
            nonlocal eps_used
            while True:
                if budget is not None:
                    budget.check()
                smp = sampler.sample(g_formula.formula, p.eps_s, rng.getrandbits(63), budget)
                stats.sample_calls += 1
                stats.sat_calls += smp.calls
                res = counter.count(cofactor_formula(spec, smp.assignment), p.eps_c, p.delta_c,
                                    rng.getrandbits(63), budget)
                stats.count_calls += 1
                stats.sat_calls += res.calls
                eps_used = max(eps_used, res.epsilon)
                c = log2_int(int(res.count)) / m if res.count >= 2 else 0.0
                if not 1 / m <= c <= 1:
                    c = min(max(c, 1 / m), 1.0)
                    stats.clamped += 1
                stats.t += 1
                stats.x += c
                yield c

        mean, t = stopping_rule(p.eps_f, p.delta_f, draws())
        est = mean * m * gres.count
        stats.wall_time = time.perf_counter() - start
        if gres.count * math.log2(1 + eps_used) > 0.1 * est:
            stats.aborted = "counting-oracle error exceeds a tenth of the estimate"
            return Outcome("abort", None, stats, p)
        return Outcome("ok", LogCount.from_log2(est, base), stats, p)
    except ResourceLimitExceeded as exc:
        stats.wall_time = time.perf_counter() - start
        stats.aborted = exc.reason
        exc.stats = stats
        raise


def baseline(spec: Specification, max_models: int | None = None, budget: Budget | None = None,
             base: float = math.e) -> Outcome:
    """Exact log Skolem count: enumerate S2 and sum exact per-input log counts."""
    stats = RunStats()
    start = time.perf_counter()
    counter = ExactCounter()
    try:
        g_formula = build_g(spec)
        enum = enumerate_projected(g_formula.formula, limit=max_models, budget=budget)
        stats.sat_calls += enum.sat_calls
        if enum.overflow:
            raise ResourceLimitExceeded(f"enumeration cap of {max_models} inputs", stats.sat_calls)
        total = 1
        logs = []
        for sigma in enum.models:
            res = counter.count(cofactor_formula(spec, sigma), budget=budget)
            stats.count_calls += 1
            stats.sat_calls += res.calls
            total *= res.count
            logs.append(log2_int(res.count))
        stats.t = len(enum.models)
        stats.wall_time = time.perf_counter() - start
        return Outcome("ok", LogCount.from_log2(math.fsum(logs), base, total), stats)
    except ResourceLimitExceeded as exc:
        stats.wall_time = time.perf_counter() - start
        stats.aborted = exc.reason
        exc.stats = stats
        raise


def output_counts(spec: Specification, chunk: int = 1 << 20) -> np.ndarray:
    """|Sol_sigma| for every input assignment, by truth-table evaluation.

    Entry k corresponds to the sigma that reads k over ``spec.inputs``
    (least significant first).
    """
    n, m = spec.n, spec.m
    if n > 20 or n + m > 26:
        raise ValueError(f"brute force guard: n={n}, m={m} too large")
    pos = {v: i for i, v in enumerate(spec.inputs + spec.outputs)}
    free = spec.cnf.variables() - set(pos)
    if free:
        raise ValueError(f"variables outside the partition: {sorted(free)}")
    counts = np.zeros(1 << n, dtype=np.int64)
    total = 1 << (n + m)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for clause in spec.cnf.clauses:
            sat = np.zeros(idx.shape, dtype=bool)
            for l in clause:
                bit = (idx >> pos[abs(l)]) & 1
                sat |= bit.astype(bool) if l > 0 else ~bit.astype(bool)
            ok &= sat
        counts += np.bincount(idx[ok] & ((1 << n) - 1), minlength=1 << n)
    return counts


def brute_force_skolem_count(spec: Specification) -> int:
    """Product over all input assignments of the number of admissible outputs (1 if none)."""
    total = 1
    for c in output_counts(spec).tolist():
        if c > 1:
            total *= c
    return total
