"""CNF formulas, DIMACS I/O and the classical reference solvers.

Literals use the DIMACS convention: a nonzero signed integer whose absolute
value is the 1-based variable index and whose sign is the polarity.
Assignments are 0-based bit sequences where bit ``i`` holds variable ``i + 1``.
When assignments are enumerated as integers, bit 0 is the most significant bit,
so integer order equals lexicographic order of the bit sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_BRUTE_FORCE_VARS = 24
_CHUNK_BITS = 20


class CnfError(ValueError):
    """Base class for CNF construction and parsing errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedHeader(CnfError):
    pass


class ClauseCountMismatch(CnfError):
    pass


class VariableOutOfRange(CnfError):
    pass


class TautologyClause(CnfError):
    pass


class LengthMismatch(CnfError):
    pass


class TooManyVariables(CnfError):
    pass


def normalize_clause(literals: Iterable[int], line: int | None = None) -> tuple[int, ...]:
    """Drop repeated literals (keeping first occurrence) and reject tautologies."""
    out: list[int] = []
    seen: set[int] = set()
    for lit in literals:
        lit = int(lit)
        if lit == 0:
            raise VariableOutOfRange("literal 0 is not a variable", line)
        if -lit in seen:
            raise TautologyClause(f"clause contains both {abs(lit)} and -{abs(lit)}", line)
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    if not out:
        raise CnfError("empty clause", line)
    return tuple(out)


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise CnfError(f"num_vars must be >= 1, got {self.num_vars}")
        clauses = tuple(normalize_clause(c) for c in self.clauses)
        for c in clauses:
            for lit in c:
                if abs(lit) > self.num_vars:
                    raise VariableOutOfRange(f"variable {abs(lit)} exceeds num_vars={self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def with_clause(self, clause: Sequence[int]) -> "Cnf":
        return Cnf(self.num_vars, self.clauses + (tuple(clause),))


@dataclass(frozen=True)
class SolveResult:
    status: str  # "SAT" or "UNSAT"
    witness: tuple[int, ...] | None = None
    solution_count: int | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "SAT"


def parse_dimacs(text: str) -> Cnf:
    """Parse DIMACS CNF text. Clauses may span lines; CRLF is accepted."""
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    current_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise MalformedHeader("duplicate problem line", lineno)
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise MalformedHeader(f"expected 'p cnf <vars> <clauses>', got {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise MalformedHeader(f"non-integer counts in {line!r}", lineno) from None
            if n < 1 or m < 0:
                raise MalformedHeader(f"invalid counts n={n} m={m}", lineno)
            header = (n, m)
            continue
        if header is None:
            raise MalformedHeader("clause data before problem line", lineno)
        if line.startswith("%"):
            break
        n, m = header
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise CnfError(f"bad literal token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise CnfError("empty clause", lineno)
                clauses.append(normalize_clause(current, current_line))
                current, current_line = [], None
                continue
            if abs(lit) > n:
                raise VariableOutOfRange(f"variable {abs(lit)} exceeds n={n}", lineno)
            if current_line is None:
                current_line = lineno
            current.append(lit)
    if header is None:
        raise MalformedHeader("missing problem line")
    if current:
        raise ClauseCountMismatch("last clause is not terminated by 0", current_line)
    n, m = header
    if len(clauses) != m:
        raise ClauseCountMismatch(f"header declares {m} clauses, found {len(clauses)}")
    return Cnf(n, tuple(clauses))


def emit_dimacs(cnf: Cnf, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.num_vars} {cnf.num_clauses}")
    lines.extend(" ".join(str(lit) for lit in c) + " 0" for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def evaluate(cnf: Cnf, x: Sequence[int]) -> bool:
    if len(x) != cnf.num_vars:
        raise LengthMismatch(f"assignment has {len(x)} bits, formula has {cnf.num_vars} variables")
    return all(any((x[abs(l) - 1] == 1) == (l > 0) for l in c) for c in cnf.clauses)


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def str_to_bits(s: str) -> tuple[int, ...]:
    return tuple(int(ch) for ch in s)


def _mask_chunk(cnf: Cnf, start: int, stop: int) -> np.ndarray:
    n = cnf.num_vars
    idx = np.arange(start, stop, dtype=np.int64)
    bit_cache: dict[int, np.ndarray] = {}

    def bit(var: int) -> np.ndarray:
        if var not in bit_cache:
            bit_cache[var] = ((idx >> (n - var)) & 1).astype(bool)
        return bit_cache[var]

    sat = np.ones(stop - start, dtype=bool)
    for c in cnf.clauses:
        clause_sat = np.zeros(stop - start, dtype=bool)
        for lit in c:
            b = bit(abs(lit))
            clause_sat |= b if lit > 0 else ~b
        sat &= clause_sat
    return sat


def satisfying_mask(cnf: Cnf) -> np.ndarray:
    """Boolean array of length 2**n; entry ``i`` is F evaluated at ``index_to_bits(i)``."""
    size = 1 << cnf.num_vars
    chunk = 1 << _CHUNK_BITS
    if size <= chunk:
        return _mask_chunk(cnf, 0, size)
    return np.concatenate([_mask_chunk(cnf, s, min(s + chunk, size)) for s in range(0, size, chunk)])


def brute_force(cnf: Cnf) -> SolveResult:
    """Exact model count by enumeration; witness is the lexicographically smallest model."""
    if cnf.num_vars > MAX_BRUTE_FORCE_VARS:
        raise TooManyVariables(
            f"brute force limited to {MAX_BRUTE_FORCE_VARS} variables, got {cnf.num_vars}"
        )
    mask = satisfying_mask(cnf)
    count = int(mask.sum())
    if count == 0:
        return SolveResult("UNSAT", None, 0)
    first = int(np.argmax(mask))
    return SolveResult("SAT", index_to_bits(first, cnf.num_vars), count)


def all_solutions(cnf: Cnf) -> list[tuple[int, ...]]:
    """Every model in lexicographic order (brute force, same variable guard)."""
    if cnf.num_vars > MAX_BRUTE_FORCE_VARS:
        raise TooManyVariables(f"enumeration limited to {MAX_BRUTE_FORCE_VARS} variables")
    return [index_to_bits(int(i), cnf.num_vars) for i in np.flatnonzero(satisfying_mask(cnf))]


def dpll_solve(cnf: Cnf) -> SolveResult:
    """DPLL with unit propagation and pure-literal elimination, no learning.

    Branches on the lowest-numbered unassigned variable, trying True first.
    """
    assignment: dict[int, bool] = {}
    result = _dpll([list(c) for c in cnf.clauses], assignment)
    if result is None:
        return SolveResult("UNSAT")
    # variables eliminated by simplification are unconstrained; pin them to 0
    witness = tuple(int(result.get(v, False)) for v in range(1, cnf.num_vars + 1))
    assert evaluate(cnf, witness)
    return SolveResult("SAT", witness)


def _assign(clauses: list[list[int]], lit: int) -> list[list[int]] | None:
    """Simplify under ``lit`` = True. Returns None on an empty clause."""
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = [l for l in c if l != -lit]
            if not c:
                return None
        out.append(c)
    return out


def _dpll(clauses: list[list[int]], assignment: dict[int, bool]) -> dict[int, bool] | None:
    assignment = dict(assignment)
    while True:
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is not None:
            assignment[abs(unit)] = unit > 0
            clauses = _assign(clauses, unit)
            if clauses is None:
                return None
            continue
        lits = {l for c in clauses for l in c}
        pure = next((l for l in sorted(lits, key=abs) if -l not in lits), None)
        if pure is not None:
            assignment[abs(pure)] = pure > 0
            clauses = _assign(clauses, pure)
            continue
        break
    if not clauses:
        return assignment
    var = min(abs(l) for c in clauses for l in c)
    for lit in (var, -var):
        reduced = _assign(clauses, lit)
        if reduced is None:
            continue
        found = _dpll(reduced, {**assignment, var: lit > 0})
        if found is not None:
            return found
    return None


def random_kcnf(rng: np.random.Generator, num_vars: int, num_clauses: int, k: int = 3) -> Cnf:
    """Uniform random k-CNF with distinct variables per clause (fuzzing helper)."""
    k = min(k, num_vars)
    clauses = []
    for _ in range(num_clauses):
        vars_ = rng.choice(num_vars, size=k, replace=False) + 1
        signs = rng.choice([-1, 1], size=k)
        clauses.append(tuple(int(v * s) for v, s in zip(vars_, signs)))
    return Cnf(num_vars, tuple(clauses))
