"""Formula constructions: the doubled formula G(X, Y, Y') and input cofactors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import Cnf, ProjectedFormula, Specification, to_dimacs


@dataclass(frozen=True)
class DoubledFormula:
    """F(X,Y) & F(X,Y') & (Y != Y'), projected on X.

    ``y_map`` sends each output to its fresh copy; ``aux`` holds the
    difference bits d_i <-> (y_i xor y'_i).
    """

    formula: ProjectedFormula
    y_map: dict[int, int]
    aux: tuple[int, ...]

    def to_dimacs(self) -> str:
        return to_dimacs(self.formula.cnf, self.formula.projection)


def fresh_rename(cnf: Cnf, variables: Iterable[int]) -> tuple[Cnf, dict[int, int]]:
    """Copy ``cnf`` with each of ``variables`` replaced by a fresh variable above num_vars."""
    mapping = {v: cnf.num_vars + i for i, v in enumerate(sorted(set(variables)), 1)}
    if not mapping:
        return cnf, {}
    clauses = tuple(
        tuple((mapping.get(l, l) if l > 0 else -mapping.get(-l, -l)) for l in c) for c in cnf.clauses
    )
    return Cnf(cnf.num_vars + len(mapping), clauses), mapping


def xor_diff_clauses(d: int, a: int, b: int) -> list[tuple[int, ...]]:
    """Clauses for d <-> (a xor b)."""
    return [(-d, a, b), (-d, -a, -b), (d, -a, b), (d, a, -b)]


# clauses added per output bit by the disequality encoding, plus one wide OR
DIFF_CLAUSES_PER_OUTPUT = 4


def build_g(spec: Specification) -> DoubledFormula:
    renamed, y_map = fresh_rename(spec.cnf, spec.outputs)
    top = renamed.num_vars
    aux = tuple(range(top + 1, top + 1 + spec.m))
    extra: list[tuple[int, ...]] = []
    for d, y in zip(aux, spec.outputs):
        extra += xor_diff_clauses(d, y, y_map[y])
    extra.append(aux)
    cnf = Cnf(top + spec.m, spec.cnf.clauses + renamed.clauses + tuple(extra))
    return DoubledFormula(ProjectedFormula(cnf, spec.inputs), y_map, aux)


def cofactor(spec: Specification, sigma: Mapping[int, bool]) -> Cnf:
    """F & (X = sigma) as a CNF with one unit clause per input."""
    missing = [x for x in spec.inputs if x not in sigma]
    if missing:
        raise ValueError(f"sigma is not total over the inputs; missing {missing}")
    units = tuple((x if sigma[x] else -x,) for x in spec.inputs)
    return Cnf(spec.cnf.num_vars, spec.cnf.clauses + units)


def cofactor_formula(spec: Specification, sigma: Mapping[int, bool]) -> ProjectedFormula:
    return ProjectedFormula(cofactor(spec, sigma), spec.outputs)


def xor_clauses(lits: list[int], parity: bool) -> list[tuple[int, ...]]:
    """Direct CNF of lits[0] xor ... xor lits[-1] = parity (2^(k-1) clauses)."""
    k = len(lits)
    out = []
    for mask in range(1 << k):
        # forbid each assignment with the wrong parity; bit set = literal true
        if bin(mask).count("1") % 2 != parity:
            out.append(tuple(-l if mask >> i & 1 else l for i, l in enumerate(lits)))
    return out


def encode_xor(variables: list[int], parity: bool, next_var: int, cut: int = 4) -> tuple[list[tuple[int, ...]], int]:
    """Tseitin chain for an XOR constraint, cut into links of at most ``cut`` literals.

    Returns the clauses and the next unused variable index.
    """
    if not variables:
        return ([()] if parity else []), next_var
    clauses: list[tuple[int, ...]] = []
    rest = list(variables)
    while len(rest) > cut:
        head, rest = rest[: cut - 1], rest[cut - 1:]
        t = next_var
        next_var += 1
        # t <-> xor(head)  ==  xor(head + [t]) = 0
        clauses += xor_clauses(head + [t], False)
        rest.append(t)
    clauses += xor_clauses(rest, parity)
    return clauses, next_var
