"""Two-trace BIT-leakage CNF generator.

Two executions A and B of a toy XOR cipher share the plaintext and run under
keys ``key_A`` and ``key_B``. Each unrolled step computes::

    state_t = state_{t-1} xor key xor (plaintext if t == 1 else 0),   state_0 = 0

The observation is bit 0 of the final state. The property mode relates the
two observations; ``keys_must_differ`` conjoins key_A != key_B.

Variable layout (1-based): key_A bits, key_B bits, then per step the state_A
and state_B bits, then padding. Padding variables are pinned to 0 by unit
clauses, and optional padding clauses ``(-z or lit)`` are implied by those
units, so padding never changes the model count.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .cnf import MAX_BRUTE_FORCE_VARS, Cnf, all_solutions, bits_to_str, emit_dimacs

ROLES = ("key_A", "key_B", "state_A", "state_B", "aux")


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class LeakageSpec:
    state_bits: int = 1
    unroll_T: int = 1
    property_mode: str = "notequal"
    keys_must_differ: bool = False
    plaintext: int = 1
    padding_vars: int = 0
    padding_clauses: int = 0

    def __post_init__(self):
        if self.state_bits < 1 or self.unroll_T < 1:
            raise InfeasibleSpec("state_bits and unroll_T must be >= 1")
        if self.property_mode not in ("equal", "notequal"):
            raise InfeasibleSpec(f"unknown property mode {self.property_mode!r}")
        if self.plaintext not in (0, 1):
            raise InfeasibleSpec("plaintext must be 0 or 1")
        if self.padding_vars < 0 or self.padding_clauses < 0:
            raise InfeasibleSpec("padding counts must be >= 0")
        if self.padding_clauses and not self.padding_vars:
            raise InfeasibleSpec("padding clauses need at least one padding variable")

    @property
    def core_vars(self) -> int:
        diff = self.state_bits if (self.keys_must_differ and self.state_bits > 1) else 0
        return 2 * self.state_bits * (1 + self.unroll_T) + diff

    @property
    def num_vars(self) -> int:
        return self.core_vars + self.padding_vars


@dataclass(frozen=True)
class LeakageInstance:
    cnf: Cnf
    spec: LeakageSpec
    var_roles: dict[int, str]
    expected_K: int
    expected_witnesses: tuple[tuple[int, ...], ...] = field(default=())
    name: str = ""

    def metadata(self) -> dict:
        return {
            "name": self.name,
            "spec": asdict(self.spec),
            "num_vars": self.cnf.num_vars,
            "num_clauses": self.cnf.num_clauses,
            "width": self.cnf.num_vars + self.cnf.num_clauses + 1,
            "var_roles": {str(v): r for v, r in sorted(self.var_roles.items())},
            "expected_K": self.expected_K,
            "expected_witnesses": [bits_to_str(w) for w in self.expected_witnesses],
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n"

    def dimacs(self) -> str:
        comments = [f"leakage instance {self.name}".rstrip(), f"expected_K {self.expected_K}"]
        return emit_dimacs(self.cnf, comments)


def _xor2(z: int, a: int, const: int) -> list[tuple[int, ...]]:
    """z <-> a xor const."""
    if const:
        return [(z, a), (-z, -a)]
    return [(-z, a), (z, -a)]


def _xor3(z: int, a: int, b: int) -> list[tuple[int, ...]]:
    """z <-> a xor b."""
    return [(-z, a, b), (-z, -a, -b), (z, -a, b), (z, a, -b)]


def _equal(a: int, b: int) -> list[tuple[int, ...]]:
    return [(-a, b), (a, -b)]


def _differ(a: int, b: int) -> list[tuple[int, ...]]:
    return [(a, b), (-a, -b)]


def encode(spec: LeakageSpec, name: str = "") -> LeakageInstance:
    n = spec.num_vars
    if n > MAX_BRUTE_FORCE_VARS:
        raise InfeasibleSpec(f"instance needs {n} variables, limit is {MAX_BRUTE_FORCE_VARS}")
    b = spec.state_bits
    roles: dict[int, str] = {}
    next_var = 1

    def alloc(count: int, role: str) -> list[int]:
        nonlocal next_var
        vs = list(range(next_var, next_var + count))
        for v in vs:
            roles[v] = role
        next_var += count
        return vs

    key = {"A": alloc(b, "key_A"), "B": alloc(b, "key_B")}
    states: dict[str, list[list[int]]] = {"A": [], "B": []}
    for _ in range(spec.unroll_T):
        states["A"].append(alloc(b, "state_A"))
        states["B"].append(alloc(b, "state_B"))
    key_diff = alloc(b, "aux") if (spec.keys_must_differ and b > 1) else []
    padding = alloc(spec.padding_vars, "aux")

    clauses: list[tuple[int, ...]] = []
    for trace in ("A", "B"):
        for t, cur in enumerate(states[trace]):
            for i in range(b):
                if t == 0:
                    clauses += _xor2(cur[i], key[trace][i], spec.plaintext)
                else:
                    clauses += _xor3(cur[i], states[trace][t - 1][i], key[trace][i])

    leak_a, leak_b = states["A"][-1][0], states["B"][-1][0]
    clauses += _differ(leak_a, leak_b) if spec.property_mode == "notequal" else _equal(leak_a, leak_b)

    if spec.keys_must_differ:
        if b == 1:
            clauses += _differ(key["A"][0], key["B"][0])
        else:
            for d, ka, kb in zip(key_diff, key["A"], key["B"]):
                clauses += _xor3(d, ka, kb)
            clauses.append(tuple(key_diff))

    for z in padding:
        clauses.append((-z,))
    core_lits = [lit for v in range(1, spec.core_vars + 1) for lit in (v, -v)]
    limit = len(padding) * len(core_lits)
    if spec.padding_clauses > limit:
        raise InfeasibleSpec(f"at most {limit} padding clauses possible, asked for {spec.padding_clauses}")
    # round-robin over padding variables so each carries a similar share
    for i in range(spec.padding_clauses):
        z = padding[i % len(padding)]
        clauses.append((-z, core_lits[i // len(padding)]))

    cnf = Cnf(n, tuple(clauses))
    witnesses = tuple(all_solutions(cnf))
    return LeakageInstance(cnf, spec, roles, len(witnesses), witnesses, name)


# (mode, keys_must_differ, n, m) per row of the benchmark table
BENCHMARK_CASES = {
    1: ("notequal", False, 5, 11),
    2: ("equal", False, 6, 14),
    3: ("notequal", True, 7, 19),
    4: ("equal", True, 5, 9),
}
CASE_NAMES = {1: "case1", 2: "case2", 3: "case3", 4: "unsat"}


def benchmark_spec(case: int) -> LeakageSpec:
    mode, differ, n, m = BENCHMARK_CASES[case]
    base = LeakageSpec(property_mode=mode, keys_must_differ=differ, plaintext=1)
    pad = n - base.core_vars
    probe = encode(base)
    extra = m - probe.cnf.num_clauses - pad
    return LeakageSpec(
        property_mode=mode, keys_must_differ=differ, plaintext=1, padding_vars=pad, padding_clauses=extra
    )


def benchmark_instances() -> list[LeakageInstance]:
    """The four benchmark rows: three K=2 cases and the K=0 control, sized (n, m) as tabulated."""
    return [encode(benchmark_spec(c), CASE_NAMES[c]) for c in sorted(BENCHMARK_CASES)]
