import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skolemcount.counting import CountResult, ExactCounter
from skolemcount.estimator import (EPS_C, LogCount, baseline, brute_force_skolem_count, derive_params, log2_int,
                                   output_counts, skolemfc, stopping_rule, stopping_threshold)
from skolemcount.formula import Cnf, Specification
from skolemcount.instances import or_spec, unsat_spec, xor_spec
from skolemcount.limits import Budget, ResourceLimitExceeded

from conftest import oracle_output_counts, oracle_skolem_count, specs

LN288 = math.log(288)


class FixedCounter(ExactCounter):
    """Exact on the doubled formula, a fixed answer with a fixed tolerance on cofactors."""

    def __init__(self, value, epsilon):
        super().__init__()
        self.value, self.epsilon = value, epsilon

    def count(self, pf, epsilon=0.0, delta=0.0, seed=0, budget=None, assumptions=()):
        if len(pf.projection) == 5:
            return super().count(pf, budget=budget)
        return CountResult(self.value, self.epsilon, delta, 1)


def test_derive_params():
    p = derive_params(0.8, 0.4, 10)
    assert p.eps_f == pytest.approx(0.48)
    assert p.delta_f == pytest.approx(0.16)
    assert p.s_threshold == pytest.approx(64.8977, abs=1e-3)
    assert p.eps_s == pytest.approx(0.16)
    assert p.delta_c == pytest.approx(2.4654e-4, rel=1e-3)
    assert p.eps_c == pytest.approx(4.65685, abs=1e-4)
    assert p.eps_g == pytest.approx(0.08)
    assert p.delta_g == pytest.approx(0.04)


@pytest.mark.parametrize("eps, delta, m", [(0, 0.4, 1), (2.5, 0.4, 1), (0.8, 0, 1), (0.8, 1, 1), (0.8, 0.4, 0)])
def test_derive_params_rejects(eps, delta, m):
    with pytest.raises(ValueError):
        derive_params(eps, delta, m)


def test_stopping_rule_constant_sources():
    s = stopping_threshold(0.5, 0.2)
    assert stopping_rule(0.5, 0.2, iter(lambda: 1.0, None)) == (s / math.ceil(s), math.ceil(s))
    est, t = stopping_rule(0.5, 0.2, iter(lambda: 0.5, None))
    assert t == math.ceil(2 * s)
    assert est == pytest.approx(0.5, rel=0.02)


def test_stopping_rule_errors():
    with pytest.raises(ValueError, match="outside"):
        stopping_rule(0.5, 0.2, [1.5])
    with pytest.raises(ValueError, match="exhausted"):
        stopping_rule(0.5, 0.2, [0.0] * 10)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.sampled_from([(0.5, 0.2), (0.8, 0.4), (0.3, 0.1)]), st.integers(0, 2**32))
def test_stopping_rule_draw_count_bound(mu, params, seed):
    # sum hits s after at most ceil(s / min draw) draws; here draws are >= mu/2
    rng = random.Random(seed)
    eps, delta = params
    draws = (mu / 2 + rng.random() * mu / 2 for _ in iter(int, 1))
    _, t = stopping_rule(eps, delta, draws)
    assert t <= math.ceil(stopping_threshold(eps, delta) / (mu / 2))


def test_log2_int_large():
    assert log2_int(1) == 0
    assert log2_int(2**5000) == pytest.approx(5000)
    assert log2_int(3 * 2**3000) == pytest.approx(3000 + math.log2(3))
    with pytest.raises(ValueError):
        log2_int(0)


def test_logcount_bases():
    lc = LogCount.from_log2(8.0)
    assert lc.ln == pytest.approx(8 * math.log(2))
    assert lc.log2 == pytest.approx(8.0)
    assert LogCount(3.0, 2).ln == pytest.approx(3 * math.log(2))


def test_brute_force_factorization(fact):
    assert brute_force_skolem_count(fact) == 288
    counts = output_counts(fact)
    assert {k: int(c) for k, c in enumerate(counts) if c >= 2} == {12: 2, 16: 2, 18: 2, 20: 2, 24: 3, 28: 2, 30: 3}


@settings(max_examples=150, deadline=None)
@given(specs())
def test_brute_force_matches_oracle(spec):
    assert brute_force_skolem_count(spec) == oracle_skolem_count(spec)
    got = output_counts(spec).tolist()
    want = oracle_output_counts(spec)
    for sigma, c in want.items():
        assert got[sum(b << i for i, b in enumerate(sigma))] == c


def test_baseline_factorization(fact):
    out = baseline(fact)
    assert out.status == "ok"
    assert out.log_count.exact == 288
    assert out.log_count.ln == pytest.approx(LN288, abs=1e-12)
    assert out.stats.count_calls == 7


def test_baseline_cap(fact):
    with pytest.raises(ResourceLimitExceeded) as info:
        baseline(fact, max_models=5)
    assert info.value.stats.sat_calls > 0


@pytest.mark.parametrize("spec", [unsat_spec(), xor_spec()])
def test_zero_log_count(spec):
    for out in (skolemfc(spec, seed=1), baseline(spec)):
        assert out.status == "ok" and out.log_count.ln == 0 and out.log_count.exact == 1
    assert skolemfc(spec, seed=1).stats.count_calls == 1


def test_or_spec():
    out = skolemfc(or_spec(), seed=2)
    assert abs(out.log_count.ln - math.log(2)) <= 0.8 * math.log(2)


def test_skolemfc_factorization(fact):
    out = skolemfc(fact, 0.8, 0.4, seed=1)
    assert out.status == "ok"
    assert abs(out.log_count.ln - LN288) <= 0.8 * LN288
    st_ = out.stats
    assert st_.t <= math.ceil(fact.m * out.params.s_threshold)
    assert st_.count_calls == st_.t + 1
    assert st_.sample_calls == st_.t
    assert st_.clamped == 0


def test_skolemfc_is_deterministic(fact):
    a, b = skolemfc(fact, seed=9), skolemfc(fact, seed=9)
    assert a.log_count == b.log_count and a.stats.t == b.stats.t


def test_log_base_two(fact):
    out = skolemfc(fact, seed=3, base=2)
    assert out.log_count.value == pytest.approx(out.log_count.log2)


def test_abort_when_counting_error_dominates(fact):
    out = skolemfc(fact, seed=1, counter=FixedCounter(2, EPS_C))
    assert out.status == "abort" and out.log_count is None
    assert out.stats.aborted


@pytest.mark.parametrize("value", [1, 2**40])
def test_out_of_range_counts_are_clamped(fact, value):
    out = skolemfc(fact, seed=1, counter=FixedCounter(value, 0.0))
    assert out.status == "ok"
    assert out.stats.clamped == out.stats.t


def test_budget_exhaustion_carries_stats(fact):
    with pytest.raises(ResourceLimitExceeded) as info:
        skolemfc(fact, seed=1, budget=Budget(max_sat_calls=20))
    assert info.value.stats is not None


def test_rejects_empty_output_set():
    spec = Specification(Cnf(1, ((1,),)), (1,), ())
    with pytest.raises(ValueError):
        skolemfc(spec)
