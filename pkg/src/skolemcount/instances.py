"""Small hand-built and random specifications used by tests, scripts and the harness."""

from __future__ import annotations

import random

from .formula import Cnf, Specification
from .transform import xor_clauses


def _eq_clause(variables: list[int], value: int) -> tuple[int, ...]:
    """Clause that is false exactly when ``variables`` (LSB first) spell ``value``."""
    return tuple(-v if value >> i & 1 else v for i, v in enumerate(variables))


def factorization_spec(bits: int = 5) -> Specification:
    """X = Y0 * Y1 with 2 <= Y0 <= Y1 over ``bits``-bit unsigned integers, no overflow.

    Variables: X = 1..bits, Y0 = bits+1..2*bits, Y1 = 2*bits+1..3*bits,
    each least significant bit first.
    """
    xs = list(range(1, bits + 1))
    y0 = list(range(bits + 1, 2 * bits + 1))
    y1 = list(range(2 * bits + 1, 3 * bits + 1))
    top = 1 << bits
    clauses: list[tuple[int, ...]] = []
    for a in range(top):
        if a < 2 or a * a >= top:
            clauses.append(_eq_clause(y0, a))
            continue
        for b in range(top):
            pair = _eq_clause(y0, a) + _eq_clause(y1, b)
            if b < a or a * b >= top:
                clauses.append(pair)
            else:
                prod = a * b
                clauses += [pair + ((x if prod >> i & 1 else -x),) for i, x in enumerate(xs)]
    return Specification(Cnf(3 * bits, tuple(clauses)), tuple(xs), tuple(y0 + y1))


def xor_spec() -> Specification:
    """y = x1 xor x2: exactly one Skolem function."""
    return Specification(Cnf(3, tuple(xor_clauses([1, 2, 3], False))), (1, 2), (3,))


def unsat_spec() -> Specification:
    return Specification(Cnf(2, ((2,), (-2,), (1, 2))), (1,), (2,))


def or_spec() -> Specification:
    """(x1 or y2): two output choices at x1 = 1, one at x1 = 0."""
    return Specification(Cnf(2, ((1, 2),)), (1,), (2,))


def random_spec(rng: random.Random, n: int, m: int, num_clauses: int, width: int = 3) -> Specification:
    """Random ``width``-CNF over inputs 1..n and outputs n+1..n+m."""
    total = n + m
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, total + 1), min(width, total))
        clauses.append(tuple(v if rng.getrandbits(1) else -v for v in vs))
    return Specification(Cnf(total, tuple(clauses)), tuple(range(1, n + 1)), tuple(range(n + 1, total + 1)))


def sparse_spec(n: int = 14) -> Specification:
    """Many inputs, few output choices each: |S2| grows like 2^n while |Sol_sigma| <= 4.

    Outputs y1, y2. Each input triple that is all false forces one output
    bit on; (not y1 or not y2 or x1 or xn) forbids both in a corner.
    """
    y1, y2 = n + 1, n + 2
    clauses = [(3 * i + 1, 3 * i + 2, 3 * i + 3, y1 if i % 2 == 0 else y2) for i in range(n // 3)]
    clauses.append((-y1, -y2, 1, n))
    return Specification(Cnf(n + 2, tuple(clauses)), tuple(range(1, n + 1)), (y1, y2))
