"""CNF specifications with an input/output partition, plus (Q)DIMACS I/O.

Literals are DIMACS-style signed integers throughout: ``v`` is the positive
literal of variable ``v`` and ``-v`` its negation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

log = logging.getLogger(__name__)

Clause = tuple[int, ...]
Assignment = dict[int, bool]


class FormatError(ValueError):
    """Raised when an input file or a Specification is malformed."""


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[Clause, ...]

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "Cnf":
        cl = tuple(tuple(c) for c in clauses)
        if num_vars is None:
            num_vars = max((abs(l) for c in cl for l in c), default=0)
        return cls(num_vars, cl)

    def __hash__(self):
        # oracles memoise on formulas; clause tuples are large, so hash once
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.num_vars, self.clauses))
            object.__setattr__(self, "_hash", h)
        return h

    def variables(self) -> set[int]:
        return {abs(l) for c in self.clauses for l in c}

    def conjoin(self, extra: Iterable[Iterable[int]], num_vars: int | None = None) -> "Cnf":
        extra = tuple(tuple(c) for c in extra)
        if num_vars is None:
            num_vars = max([self.num_vars] + [abs(l) for c in extra for l in c])
        return Cnf(num_vars, self.clauses + extra)

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class ProjectedFormula:
    cnf: Cnf
    projection: tuple[int, ...]

    def __post_init__(self):
        bad = [v for v in self.projection if not 1 <= v <= self.cnf.num_vars]
        if bad:
            raise FormatError(f"projection variables outside formula: {bad}")


@dataclass(frozen=True)
class Specification:
    """A relation F(X, Y) between inputs X and outputs Y."""

    cnf: Cnf
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(sorted(self.inputs)))
        object.__setattr__(self, "outputs", tuple(sorted(self.outputs)))

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def m(self) -> int:
        return len(self.outputs)


def validate(spec: Specification) -> list[str]:
    """Return one diagnostic string per violated invariant (empty if well formed)."""
    diags = []
    inputs, outputs = set(spec.inputs), set(spec.outputs)
    if not outputs:
        diags.append("empty output set")
    if inputs & outputs:
        diags.append(f"inputs and outputs overlap: {sorted(inputs & outputs)}")
    if len(inputs) != len(spec.inputs) or len(outputs) != len(spec.outputs):
        diags.append("duplicate variable in partition")
    if any(v < 1 for v in inputs | outputs):
        diags.append("variable index < 1")
    if any(v > spec.cnf.num_vars for v in inputs | outputs):
        diags.append("partition variable out of range")
    out_of_range = False
    for i, clause in enumerate(spec.cnf.clauses):
        if any(l == 0 or abs(l) > spec.cnf.num_vars for l in clause):
            out_of_range = True
        if len(set(clause)) != len(clause):
            diags.append(f"duplicate literal in clause {i}")
        if any(-l in clause for l in clause):
            diags.append(f"tautological clause {i}")
    if out_of_range:
        diags.append("literal out of range")
    unassigned = spec.cnf.variables() - inputs - outputs
    if unassigned:
        diags.append(f"variables not in inputs or outputs: {sorted(unassigned)}")
    return diags


def _clean_clause(clause: list[int], lineno: int) -> Clause | None:
    """Drop duplicate literals; return None for tautologies."""
    seen = dict.fromkeys(clause)
    if any(-l in seen for l in seen):
        log.warning("dropping tautological clause near line %d: %s", lineno, clause)
        return None
    return tuple(seen)


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


def _zero_terminated(tokens: list[str], lineno: int) -> list[int]:
    vals = _ints(tokens, lineno)
    if not vals or vals[-1] != 0 or 0 in vals[:-1]:
        raise FormatError(f"line {lineno}: list must be terminated by a single 0")
    return vals[:-1]


def _parse_header(tokens: list[str], lineno: int) -> tuple[int, int]:
    if len(tokens) != 4 or tokens[1] != "cnf":
        raise FormatError(f"line {lineno}: malformed header")
    try:
        nv, nc = int(tokens[2]), int(tokens[3])
    except ValueError:
        raise FormatError(f"line {lineno}: malformed header") from None
    if nv < 0 or nc < 0:
        raise FormatError(f"line {lineno}: malformed header")
    return nv, nc


def _read_clauses(body: list[tuple[int, list[str]]], num_vars: int, declared: int) -> tuple[Clause, ...]:
    clauses: list[Clause] = []
    current: list[int] = []
    lineno = 0
    for lineno, tokens in body:
        for lit in _ints(tokens, lineno):
            if lit == 0:
                cleaned = _clean_clause(current, lineno)
                if cleaned is not None:
                    clauses.append(cleaned)
                current = []
                continue
            if abs(lit) > num_vars:
                raise FormatError(f"line {lineno}: literal out of range: {lit}")
            current.append(lit)
    if current:
        raise FormatError(f"line {lineno}: last clause is not 0-terminated")
    if len(clauses) != declared:
        log.debug("header declares %d clauses, read %d", declared, len(clauses))
    return tuple(clauses)


def _check(spec: Specification) -> Specification:
    diags = validate(spec)
    if diags:
        raise FormatError("; ".join(diags))
    return spec


def parse_qdimacs(text: str) -> Specification:
    """Parse a 2QBF in QDIMACS form: universals become inputs, existentials outputs.

    Free variables are treated as inputs. Prefixes other than ``a* e*`` or
    ``e*`` are rejected.
    """
    header = None
    blocks: list[tuple[str, list[int]]] = []
    body: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if header is not None:
                raise FormatError(f"line {lineno}: malformed header (duplicate problem line)")
            header = _parse_header(tokens, lineno)
        elif tokens[0] in ("a", "e"):
            if header is None:
                raise FormatError(f"line {lineno}: malformed header (quantifier before problem line)")
            if body:
                raise FormatError(f"line {lineno}: quantifier line outside the prefix")
            vs = _zero_terminated(tokens[1:], lineno)
            if blocks and blocks[-1][0] == tokens[0]:
                blocks[-1][1].extend(vs)
            else:
                blocks.append((tokens[0], list(vs)))
        else:
            if header is None:
                raise FormatError(f"line {lineno}: malformed header (clause before problem line)")
            body.append((lineno, tokens))
    if header is None:
        raise FormatError("malformed header (missing problem line)")
    num_vars, declared = header

    kinds = [k for k, _ in blocks]
    if kinds not in ([], ["e"], ["a", "e"], ["a"]):
        raise FormatError(f"unsupported quantifier prefix {''.join(kinds)}: expected one a-block then one e-block")
    quantified: dict[int, str] = {}
    for kind, vs in blocks:
        for v in vs:
            if v < 1 or v > num_vars:
                raise FormatError(f"literal out of range in quantifier block: {v}")
            if v in quantified:
                raise FormatError(f"variable quantified twice: {v}")
            quantified[v] = kind
    clauses = _read_clauses(body, num_vars, declared)
    cnf = Cnf(num_vars, clauses)
    outputs = {v for v, k in quantified.items() if k == "e"}
    inputs = {v for v, k in quantified.items() if k == "a"}
    inputs |= cnf.variables() - outputs - inputs
    return _check(Specification(cnf, tuple(inputs), tuple(outputs)))


def parse_dimacs_annotated(text: str) -> Specification:
    """Parse DIMACS whose partition is declared by ``c x ... 0`` / ``c y ... 0`` comments."""
    header = None
    decl: dict[str, list[int]] = {"x": [], "y": []}
    body: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "c":
            if len(tokens) > 1 and tokens[1] in decl:
                decl[tokens[1]].extend(_zero_terminated(tokens[2:], lineno))
            continue
        if tokens[0] == "p":
            if header is not None:
                raise FormatError(f"line {lineno}: malformed header (duplicate problem line)")
            header = _parse_header(tokens, lineno)
        else:
            if header is None:
                raise FormatError(f"line {lineno}: malformed header (clause before problem line)")
            body.append((lineno, tokens))
    if header is None:
        raise FormatError("malformed header (missing problem line)")
    num_vars, declared = header
    xs, ys = set(decl["x"]), set(decl["y"])
    if len(xs) != len(decl["x"]) or len(ys) != len(decl["y"]) or xs & ys:
        raise FormatError(f"overlapping declarations: {sorted(xs & ys) or 'repeated variable'}")
    for v in xs | ys:
        if v < 1 or v > num_vars:
            raise FormatError(f"literal out of range in declaration: {v}")
    cnf = Cnf(num_vars, _read_clauses(body, num_vars, declared))
    undeclared = cnf.variables() - xs - ys
    if undeclared:
        raise FormatError(f"undeclared variable: {sorted(undeclared)}")
    return _check(Specification(cnf, tuple(xs), tuple(ys)))


def parse_spec(text: str) -> Specification:
    """Dispatch on content: QDIMACS if a quantifier line is present, else annotated DIMACS."""
    for line in text.splitlines():
        tokens = line.split()
        if tokens and tokens[0] in ("a", "e"):
            return parse_qdimacs(text)
        if len(tokens) > 1 and tokens[0] == "c" and tokens[1] in ("x", "y"):
            return parse_dimacs_annotated(text)
    return parse_qdimacs(text)


def load_spec(path) -> Specification:
    with open(path) as fh:
        return parse_spec(fh.read())


def _clause_lines(cnf: Cnf) -> list[str]:
    return [" ".join(map(str, c)) + " 0" for c in cnf.clauses]


def to_qdimacs(spec: Specification) -> str:
    lines = [f"p cnf {spec.cnf.num_vars} {len(spec.cnf.clauses)}"]
    if spec.inputs:
        lines.append("a " + " ".join(map(str, spec.inputs)) + " 0")
    lines.append("e " + " ".join(map(str, spec.outputs)) + " 0")
    lines += _clause_lines(spec.cnf)
    return "\n".join(lines) + "\n"


def to_dimacs_annotated(spec: Specification) -> str:
    lines = [
        "c x " + " ".join(map(str, spec.inputs)) + (" 0" if spec.inputs else "0"),
        "c y " + " ".join(map(str, spec.outputs)) + " 0",
        f"p cnf {spec.cnf.num_vars} {len(spec.cnf.clauses)}",
    ]
    lines += _clause_lines(spec.cnf)
    return "\n".join(lines) + "\n"


def to_dimacs(cnf: Cnf, projection: Iterable[int] | None = None) -> str:
    """Plain DIMACS; a projection set is emitted as a ``c ind ... 0`` line."""
    lines = []
    if projection is not None:
        lines.append("c ind " + " ".join(str(v) for v in projection) + " 0")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines += _clause_lines(cnf)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[Cnf, tuple[int, ...] | None]:
    """Parse plain DIMACS, returning the CNF and the ``c ind`` projection if any."""
    header = None
    ind: list[int] | None = None
    body: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "c":
            if len(tokens) > 1 and tokens[1] == "ind":
                ind = (ind or []) + _zero_terminated(tokens[2:], lineno)
            continue
        if tokens[0] == "p":
            header = _parse_header(tokens, lineno)
        else:
            if header is None:
                raise FormatError(f"line {lineno}: malformed header (clause before problem line)")
            body.append((lineno, tokens))
    if header is None:
        raise FormatError("malformed header (missing problem line)")
    num_vars, declared = header
    cnf = Cnf(num_vars, _read_clauses(body, num_vars, declared))
    return cnf, (tuple(ind) if ind is not None else None)


def assignment_to_int(assignment: Mapping[int, bool], variables: Iterable[int]) -> int:
    """Read ``variables`` (least significant first) as an unsigned integer."""
    return sum(1 << i for i, v in enumerate(variables) if assignment[v])


def int_to_assignment(value: int, variables: Iterable[int]) -> Assignment:
    return {v: bool(value >> i & 1) for i, v in enumerate(variables)}
