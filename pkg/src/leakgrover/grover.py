"""Phase oracles from CNF, the diffuser, fixed-r Grover runs and the BBHT loop.

Register layout for gate-level oracles: search qubits ``[0, n)``, one clause
ancilla per clause at ``[n, n + m)`` and the flag qubit at ``n + m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cnf import Cnf, bits_to_str, evaluate, index_to_bits, satisfying_mask
from .statevector import (
    MAX_QUBITS,
    Circuit,
    Gate,
    IndexOutOfRange,
    NoiseModel,
    StateVector,
    TooManyQubits,
    counts_from_outcomes,
    histogram_records,
    init_uniform,
    mcx,
    mcz,
    merge_counts,
    probabilities,
    product_state,
    sample_outcomes,
)

GROWTH = Fraction(8, 7)
ENCODINGS = ("violation_bits", "satisfaction_bits")


class InvalidK(ValueError):
    pass


class DirectOracle:
    """Multiplies the amplitude of every search basis state x by (-1)^F(x).

    Works on registers wider than ``n``; the search register must be the
    leading ``n`` qubits and trailing qubits are left alone.
    """

    def __init__(self, cnf: Cnf):
        self.cnf = cnf
        self.num_vars = cnf.num_vars
        self.marked = satisfying_mask(cnf)
        self.signs = np.where(self.marked, -1.0, 1.0)

    def __call__(self, sv: StateVector) -> StateVector:
        if sv.num_qubits < self.num_vars:
            raise IndexOutOfRange("state is narrower than the search register")
        view = sv.amplitudes.reshape(1 << self.num_vars, -1)
        view *= self.signs[:, None]
        return sv


def build_direct_oracle(cnf: Cnf) -> DirectOracle:
    if cnf.num_vars > MAX_QUBITS:
        raise TooManyQubits(f"{cnf.num_vars} search qubits exceeds ceiling {MAX_QUBITS}")
    return DirectOracle(cnf)


@dataclass
class OracleCircuit:
    circuit: Circuit
    num_vars: int
    num_clauses: int
    encoding: str

    @property
    def search_qubits(self) -> list[int]:
        return list(range(self.num_vars))

    @property
    def clause_ancillas(self) -> list[int]:
        return list(range(self.num_vars, self.num_vars + self.num_clauses))

    @property
    def flag_qubit(self) -> int:
        return self.num_vars + self.num_clauses

    @property
    def width(self) -> int:
        return self.circuit.num_qubits

    def __call__(self, sv: StateVector) -> StateVector:
        return self.circuit.run(sv)


def _violation_detector(clause: Sequence[int], ancilla: int) -> Gate:
    # active exactly when every literal is false: x_p = 0 for positive, x_p = 1 for negated
    controls = tuple(abs(l) - 1 for l in clause)
    polarity = tuple(0 if l > 0 else 1 for l in clause)
    return mcx(controls, ancilla, polarity)


def build_gate_oracle(cnf: Cnf, encoding: str = "violation_bits") -> OracleCircuit:
    """Compute-phase-uncompute oracle with one ancilla per clause and a flag qubit.

    ``violation_bits``: c_j = 1 iff clause j is violated, flag = NOR of all c_j.
    ``satisfaction_bits``: c_j = 1 iff clause j is satisfied, flag = AND of all c_j.
    """
    if encoding not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}")
    n, m = cnf.num_vars, cnf.num_clauses
    width = n + m + 1
    if width > MAX_QUBITS:
        raise TooManyQubits(f"oracle needs {width} qubits (n={n}, m={m}), ceiling is {MAX_QUBITS}")
    flag = n + m
    ancillas = list(range(n, n + m))

    compute: list[Gate] = []
    for j, clause in enumerate(cnf.clauses):
        compute.append(_violation_detector(clause, ancillas[j]))
        if encoding == "satisfaction_bits":
            compute.append(Gate("X", ancillas[j]))
    if encoding == "violation_bits":
        flag_gate = mcx(ancillas, flag, (0,) * m)
    else:
        flag_gate = mcx(ancillas, flag, (1,) * m)

    circuit = Circuit(width)
    circuit.extend(compute)
    circuit.append(flag_gate)
    circuit.append(Gate("Z", flag))
    circuit.append(flag_gate)
    circuit.extend(reversed(compute))
    return OracleCircuit(circuit, n, m, encoding)


def _search_view(sv: StateVector, search_qubits: Sequence[int]) -> tuple[np.ndarray, list[int] | None]:
    q = sv.num_qubits
    search = list(search_qubits)
    for i in search:
        if not 0 <= i < q:
            raise IndexOutOfRange(f"qubit {i} outside register of {q}")
    if search == list(range(len(search))):
        return sv.amplitudes.reshape(1 << len(search), -1), None
    rest = [i for i in range(q) if i not in search]
    perm = search + rest
    return sv.tensor().transpose(perm).reshape(1 << len(search), -1), perm


def apply_diffuser(sv: StateVector, search_qubits: Sequence[int]) -> StateVector:
    """Reflect about the uniform superposition of ``search_qubits``: 2|s><s| - I."""
    view, perm = _search_view(sv, search_qubits)
    reflected = 2 * view.mean(axis=0, keepdims=True) - view
    if perm is None:
        view[...] = reflected
    else:
        q = sv.num_qubits
        back = np.argsort(perm)
        sv.amplitudes[...] = reflected.reshape((2,) * q).transpose(back).reshape(-1)
    return sv


def diffuser_circuit(num_qubits: int, search_qubits: Sequence[int]) -> Circuit:
    """Gate-level H X MCZ X H diffuser; equals the exact reflection times a global phase of -1."""
    search = list(search_qubits)
    c = Circuit(num_qubits)
    c.extend(Gate("H", q) for q in search)
    c.extend(Gate("X", q) for q in search)
    if len(search) == 1:
        c.append(Gate("Z", search[0]))
    else:
        c.append(mcz(search[:-1], search[-1]))
    c.extend(Gate("X", q) for q in search)
    c.extend(Gate("H", q) for q in search)
    return c


def grover_step_circuit(cnf: Cnf, encoding: str = "violation_bits") -> Circuit:
    """One full Grover step (oracle then diffuser) as a gate list, for width/depth reporting."""
    oracle = build_gate_oracle(cnf, encoding)
    step = Circuit(oracle.width, list(oracle.circuit.gates))
    step.extend(diffuser_circuit(oracle.width, oracle.search_qubits).gates)
    return step


def optimal_iterations(n: int, K: int) -> int:
    N = 1 << n
    if not 1 <= K <= N:
        raise InvalidK(f"K must lie in [1, {N}], got {K}")
    theta = math.asin(math.sqrt(K / N))
    return math.floor(math.pi / (4 * theta))


def success_probability(n: int, K: int, r: int) -> float:
    if K < 0:
        raise InvalidK("K must be >= 0")
    if K == 0:
        return 0.0
    theta = math.asin(math.sqrt(K / (1 << n)))
    return math.sin((2 * r + 1) * theta) ** 2


@dataclass
class GroverConfig:
    r: int = 1
    shots: int = 2000
    seed: int = 0
    use_gate_level: bool = False
    noise: NoiseModel | None = None
    encoding: str = "violation_bits"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


class GroverSimulator:
    """Caches the search-register distribution after r Grover steps for one CNF."""

    def __init__(self, cnf: Cnf, use_gate_level: bool = False, encoding: str = "violation_bits"):
        self.cnf = cnf
        self.n = cnf.num_vars
        self.use_gate_level = use_gate_level
        if use_gate_level:
            self.oracle = build_gate_oracle(cnf, encoding)
        else:
            self.oracle = build_direct_oracle(cnf)
        self._cache: dict[int, np.ndarray] = {}

    def state(self, r: int) -> StateVector:
        if self.use_gate_level:
            sv = product_state(init_uniform(self.n).amplitudes, self.cnf.num_clauses + 1)
        else:
            sv = init_uniform(self.n)
        search = list(range(self.n))
        for _ in range(r):
            self.oracle(sv)
            apply_diffuser(sv, search)
        return sv

    def search_probabilities(self, r: int) -> np.ndarray:
        if r not in self._cache:
            self._cache[r] = probabilities(self.state(r), list(range(self.n)))
        return self._cache[r]

    def marked_mass(self, r: int) -> float:
        mask = satisfying_mask(self.cnf)
        return float(self.search_probabilities(r)[mask].sum())


@dataclass
class GroverResult:
    counts: dict[str, int]
    probabilities: np.ndarray
    marked_probability: float
    shots: list[int] = field(default_factory=list, repr=False)


def grover_run(cnf: Cnf, config: GroverConfig, sim: GroverSimulator | None = None) -> GroverResult:
    """Prepare |s>, apply (D U_F)^r, and sample ``config.shots`` measurements of the search register."""
    sim = sim or GroverSimulator(cnf, config.use_gate_level, config.encoding)
    probs = sim.search_probabilities(config.r)
    rng = np.random.default_rng(config.seed)
    outcomes = sample_outcomes(probs, config.shots, rng, config.noise)
    counts = counts_from_outcomes(outcomes, cnf.num_vars)
    marked = float(probs[satisfying_mask(cnf)].sum())
    return GroverResult(counts, probs, marked, outcomes.tolist())


def ceil_sqrt(N: int) -> int:
    s = math.isqrt(N)
    return s if s * s == N else s + 1


def default_budget(n: int, growth: Fraction = GROWTH) -> int:
    sqrt_n = math.sqrt(1 << n)
    return 3 * math.ceil(math.log(sqrt_n) / math.log(growth)) + 10


@dataclass
class Trial:
    k: float
    r_sampled: int
    measured: tuple[int, ...]
    classical_check: bool
    counts: dict[str, int] = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "r_sampled": self.r_sampled,
            "measured": bits_to_str(self.measured),
            "classical_check": self.classical_check,
        }


@dataclass
class BbhtReport:
    trials: list[Trial]
    verdict: str  # "SAT" or "BudgetExhausted"
    witness: tuple[int, ...] | None
    num_vars: int
    shots_per_trial: int

    @property
    def tries(self) -> int:
        return len(self.trials)

    @property
    def histogram(self) -> dict[str, int]:
        return merge_counts(t.counts for t in self.trials)

    @property
    def final_counts(self) -> dict[str, int]:
        return dict(self.trials[-1].counts) if self.trials else {}

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": bits_to_str(self.witness) if self.witness is not None else None,
            "tries": self.tries,
            "num_vars": self.num_vars,
            "shots_per_trial": self.shots_per_trial,
            "trials": [t.to_dict() for t in self.trials],
            "histogram": histogram_records(self.histogram),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _candidate(outcomes: np.ndarray, size: int) -> int:
    """Most frequent outcome; ties go to the one measured first."""
    counts = np.bincount(outcomes, minlength=size)
    top = counts == counts.max()
    return int(outcomes[top[outcomes]][0])


def bbht_solve(
    cnf: Cnf,
    shots_per_trial: int = 2000,
    seed: int = 0,
    budget_trials: int | None = None,
    use_gate_level: bool = False,
    noise: NoiseModel | None = None,
    encoding: str = "violation_bits",
    growth: Fraction = GROWTH,
    sim: GroverSimulator | None = None,
) -> BbhtReport:
    """Randomised-iteration Grover search for an unknown number of solutions.

    Each trial samples r uniformly from {0, ..., ceil(k) - 1}, measures the
    search register ``shots_per_trial`` times and proposes the most frequent
    bitstring, which is accepted only if it satisfies the CNF classically.
    k grows by ``growth`` up to ceil(sqrt(N)); the loop stops once k exceeds
    sqrt(N) or the trial budget is spent. Trial i draws from its own stream
    seeded by (seed, i).
    """
    n = cnf.num_vars
    N = 1 << n
    budget = default_budget(n, growth) if budget_trials is None else budget_trials
    if budget < 1:
        raise ValueError("budget_trials must be >= 1")
    sim = sim or GroverSimulator(cnf, use_gate_level, encoding)
    cap = ceil_sqrt(N)
    k = Fraction(1)
    trials: list[Trial] = []
    for i in range(budget):
        rng = np.random.default_rng([seed, i])
        r = int(rng.integers(math.ceil(k)))
        outcomes = sample_outcomes(sim.search_probabilities(r), shots_per_trial, rng, noise)
        x = index_to_bits(_candidate(outcomes, N), n)
        ok = evaluate(cnf, x)
        trials.append(Trial(float(k), r, x, ok, counts_from_outcomes(outcomes, n)))
        if ok:
            return BbhtReport(trials, "SAT", x, n, shots_per_trial)
        k = min(growth * k, Fraction(cap))
        if k * k > N:
            break
    return BbhtReport(trials, "BudgetExhausted", None, n, shots_per_trial)
