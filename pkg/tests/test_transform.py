import pytest
from hypothesis import given, settings

from skolemcount.formula import Cnf, assignment_to_int
from skolemcount.sat import enumerate_projected
from skolemcount.transform import (DIFF_CLAUSES_PER_OUTPUT, build_g, cofactor, cofactor_formula,
                                   encode_xor, fresh_rename, xor_clauses)

from conftest import oracle_output_counts, oracle_projected_models, specs


def test_fresh_rename_is_contiguous():
    cnf = Cnf(4, ((1, -3), (3, 4)))
    renamed, mapping = fresh_rename(cnf, [4, 3])
    assert mapping == {3: 5, 4: 6}
    assert renamed.num_vars == 6
    assert renamed.clauses == ((1, -5), (5, 6))


def test_g_size(fact):
    g = build_g(fact)
    m = fact.m
    assert len(g.aux) == m
    assert g.formula.cnf.num_vars == fact.cnf.num_vars + 2 * m
    extra = len(g.formula.cnf.clauses) - 2 * len(fact.cnf.clauses)
    assert extra == DIFF_CLAUSES_PER_OUTPUT * m + 1
    assert g.formula.projection == fact.inputs


def test_factorization_g_projection(fact):
    g = build_g(fact)
    got = {assignment_to_int(a, fact.inputs) for a in enumerate_projected(g.formula).models}
    assert got == {12, 16, 18, 20, 24, 28, 30}


@settings(max_examples=150, deadline=None)
@given(specs())
def test_g_projects_to_inputs_with_two_outputs(spec):
    g = build_g(spec)
    got = {tuple(a[v] for v in spec.inputs) for a in enumerate_projected(g.formula).models}
    want = {s for s, c in oracle_output_counts(spec).items() if c >= 2}
    assert got == want


def test_cofactor_counts(fact):
    def count(x):
        sigma = {v: bool(x >> i & 1) for i, v in enumerate(fact.inputs)}
        return len(enumerate_projected(cofactor_formula(fact, sigma)).models)
    assert count(30) == 3
    assert count(16) == 2
    assert count(7) == 0


def test_cofactor_needs_total_sigma(fact):
    with pytest.raises(ValueError):
        cofactor(fact, {1: True})


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("parity", [False, True])
def test_direct_xor_clauses(k, parity):
    vs = list(range(1, k + 1))
    models = oracle_projected_models(xor_clauses(vs, parity), k, vs)
    assert models == {m for m in oracle_projected_models([], k, vs) if sum(m) % 2 == parity}


@pytest.mark.parametrize("k", [0, 1, 3, 4, 5, 9])
@pytest.mark.parametrize("parity", [False, True])
def test_chained_xor_projects_to_parity(k, parity):
    vs = list(range(1, k + 1))
    clauses, top = encode_xor(vs, parity, k + 1)
    models = oracle_projected_models(clauses, top - 1, vs)
    assert models == {m for m in oracle_projected_models([], k, vs) if sum(m) % 2 == parity}
