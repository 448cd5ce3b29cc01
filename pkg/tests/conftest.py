"""Shared fixtures and an independent pure-Python brute-force oracle."""

import itertools
import math
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from skolemcount.formula import Cnf, Specification
from skolemcount.instances import factorization_spec

PYTHON_M = f"{sys.executable} -m skolemcount"


def satisfies(clauses, assignment):
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def oracle_output_counts(spec):
    """{sigma (as tuple over inputs): |Sol_sigma|} by plain enumeration."""
    counts = {}
    for xs in itertools.product((False, True), repeat=spec.n):
        a = dict(zip(spec.inputs, xs))
        k = 0
        for ys in itertools.product((False, True), repeat=spec.m):
            a.update(zip(spec.outputs, ys))
            k += satisfies(spec.cnf.clauses, a)
        counts[xs] = k
    return counts


def oracle_skolem_count(spec):
    return math.prod(c for c in oracle_output_counts(spec).values() if c >= 2)


def oracle_projected_models(clauses, num_vars, projection):
    seen = set()
    for bits in itertools.product((False, True), repeat=num_vars):
        a = dict(zip(range(1, num_vars + 1), bits))
        if satisfies(clauses, a):
            seen.add(tuple(a[v] for v in projection))
    return seen


@st.composite
def specs(draw, max_total=8, max_clauses=12):
    """Random specifications with 0..4 inputs, 1..4 outputs and clauses of width 1..3."""
    n = draw(st.integers(0, min(4, max_total - 1)))
    m = draw(st.integers(1, min(4, max_total - n)))
    total = n + m
    var = st.integers(1, total)
    lit = st.tuples(var, st.booleans()).map(lambda p: p[0] if p[1] else -p[0])
    clause = st.lists(lit, min_size=1, max_size=3).map(lambda ls: tuple(dict.fromkeys(ls)))
    clause = clause.filter(lambda c: not any(-l in c for l in c))
    clauses = draw(st.lists(clause, max_size=max_clauses))
    return Specification(Cnf(total, tuple(clauses)), tuple(range(1, n + 1)), tuple(range(n + 1, total + 1)))


@pytest.fixture(scope="session")
def fact():
    return factorization_spec(5)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = Path(tmp_path) / name
        p.write_text(text)
        return p
    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
