"""Dense statevector simulation for the Grover circuits.

Qubit 0 is the most significant bit of an amplitude index and the leftmost
character of a bitstring, matching the assignment order used for CNFs.
Gates act in place on the amplitude array.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_QUBITS = 28
GATE_KINDS = ("H", "X", "Z", "CZ", "MCX", "MCZ")


class TooManyQubits(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}")

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def tensor(self) -> np.ndarray:
        """View of the amplitudes with one length-2 axis per qubit."""
        return self.amplitudes.reshape((2,) * self.num_qubits)


def _check_width(n: int) -> None:
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > MAX_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the simulator ceiling of {MAX_QUBITS}")


def init_uniform(n: int) -> StateVector:
    _check_width(n)
    size = 1 << n
    return StateVector(n, np.full(size, 1 / math.sqrt(size), dtype=np.complex128))


def basis_state(n: int, index: int) -> StateVector:
    _check_width(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


def product_state(search_amplitudes: np.ndarray, num_ancillas: int) -> StateVector:
    """Search-register state tensored with |0...0> on ``num_ancillas`` trailing qubits."""
    search_amplitudes = np.asarray(search_amplitudes, dtype=np.complex128)
    n = int(search_amplitudes.size).bit_length() - 1
    _check_width(n + num_ancillas)
    amps = np.zeros((search_amplitudes.size, 1 << num_ancillas), dtype=np.complex128)
    amps[:, 0] = search_amplitudes
    return StateVector(n + num_ancillas, amps.reshape(-1))


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    polarity: tuple[int, ...] = ()  # 1 = control on |1>, 0 = control on |0>

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(self.controls))
        pol = tuple(self.polarity) if self.polarity else (1,) * len(self.controls)
        object.__setattr__(self, "polarity", pol)
        if len(pol) != len(self.controls):
            raise ValueError("polarity must match controls")
        if self.target in self.controls:
            raise ValueError("target cannot also be a control")
        if len(set(self.controls)) != len(self.controls):
            raise ValueError("repeated control qubit")
        if self.kind in ("H", "X", "Z") and self.controls:
            raise ValueError(f"{self.kind} takes no controls")
        if self.kind == "CZ" and len(self.controls) != 1:
            raise ValueError("CZ takes exactly one control")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)


def mcx(controls: Sequence[int], target: int, polarity: Sequence[int] = ()) -> Gate:
    return Gate("MCX", target, tuple(controls), tuple(polarity))


def mcz(controls: Sequence[int], target: int, polarity: Sequence[int] = ()) -> Gate:
    return Gate("MCZ", target, tuple(controls), tuple(polarity))


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def append(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexOutOfRange(f"qubit {q} outside register of {self.num_qubits}")
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    @property
    def depth(self) -> int:
        """Greedy layer count; each gate lands one layer after the latest gate on any of its qubits."""
        level = [0] * self.num_qubits
        depth = 0
        for g in self.gates:
            layer = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = layer
            depth = max(depth, layer)
        return depth

    def inverse(self) -> "Circuit":
        # every supported gate is self-inverse
        return Circuit(self.num_qubits, list(reversed(self.gates)))

    def run(self, sv: StateVector) -> StateVector:
        if sv.num_qubits != self.num_qubits:
            raise ValueError(f"circuit has {self.num_qubits} qubits, state has {sv.num_qubits}")
        for g in self.gates:
            apply_gate(sv, g)
        return sv


def _slices(q: int, gate: Gate) -> tuple[list, list]:
    idx: list = [slice(None)] * q
    for c, p in zip(gate.controls, gate.polarity):
        idx[c] = p
    idx0, idx1 = list(idx), list(idx)
    idx0[gate.target] = 0
    idx1[gate.target] = 1
    return idx0, idx1


BLOCK = 1 << 15  # amplitudes per cache-sized chunk


def _blocks(view: np.ndarray) -> Iterable[tuple]:
    """Index tuples splitting a (2,)*d view along its leading axes into chunks of about BLOCK."""
    k = max(0, view.ndim - (BLOCK.bit_length() - 1))
    return itertools.product((0, 1), repeat=k)


def _swap(a: np.ndarray, b: np.ndarray) -> None:
    # chunked so the temporary stays in cache; a and b have identical shapes
    tmp = None
    for blk in _blocks(a):
        x, y = a[(*blk, ...)], b[(*blk, ...)]
        if tmp is None:
            tmp = np.empty_like(x)
        np.copyto(tmp, x)
        np.copyto(x, y)
        np.copyto(y, tmp)


def _hadamard(a: np.ndarray, b: np.ndarray) -> None:
    h = 1 / math.sqrt(2)
    for blk in _blocks(a):
        x, y = a[(*blk, ...)], b[(*blk, ...)]
        tmp = x.copy()
        x += y
        x *= h
        tmp -= y
        tmp *= h
        np.copyto(y, tmp)


def apply_gate(sv: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` to ``sv`` in place and return it."""
    q = sv.num_qubits
    for i in gate.qubits:
        if not 0 <= i < q:
            raise IndexOutOfRange(f"qubit {i} outside register of {q}")
    psi = sv.tensor()
    i0, i1 = _slices(q, gate)
    # the trailing Ellipsis keeps fully indexed selections as writable 0-d views
    a, b = psi[(*i0, ...)], psi[(*i1, ...)]
    if gate.kind == "H":
        _hadamard(a, b)
    elif gate.kind in ("X", "MCX"):
        _swap(a, b)
    else:  # Z, CZ, MCZ
        b *= -1
    return sv


def probabilities(sv: StateVector, subset: Sequence[int] | None = None) -> np.ndarray:
    """Marginal distribution over ``subset``; entry ``i`` is the bitstring of ``i`` with subset[0] leftmost."""
    q = sv.num_qubits
    subset = list(range(q)) if subset is None else list(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    for i in subset:
        if not 0 <= i < q:
            raise IndexOutOfRange(f"qubit {i} outside register of {q}")
    p = np.abs(sv.amplitudes) ** 2
    if subset == list(range(q)):
        return p
    rest = [i for i in range(q) if i not in subset]
    p = p.reshape((2,) * q).transpose(subset + rest)
    return p.reshape(1 << len(subset), -1).sum(axis=1)


def as_distribution(probs: np.ndarray) -> dict[str, float]:
    k = int(probs.size).bit_length() - 1
    return {format(i, f"0{k}b"): float(p) for i, p in enumerate(probs)}


@dataclass(frozen=True)
class NoiseModel:
    readout_flip_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.readout_flip_prob < 0.5:
            raise ValueError("readout_flip_prob must lie in [0, 0.5)")


def sample_outcomes(
    probs: np.ndarray,
    shots: int,
    rng: np.random.Generator,
    noise: NoiseModel | None = None,
) -> np.ndarray:
    """Draw ``shots`` outcome indices from ``probs``, then apply readout bit flips."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    p = p / p.sum()
    outcomes = rng.choice(p.size, size=shots, p=p)
    if noise is not None and noise.readout_flip_prob > 0:
        k = int(p.size).bit_length() - 1
        flips = rng.random((shots, k)) < noise.readout_flip_prob
        weights = 1 << np.arange(k - 1, -1, -1)
        outcomes = outcomes ^ (flips.astype(np.int64) @ weights)
    return outcomes


def counts_from_outcomes(outcomes: np.ndarray, width: int) -> dict[str, int]:
    values, counts = np.unique(outcomes, return_counts=True)
    return {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, counts)}


def sample(
    sv: StateVector,
    subset: Sequence[int] | None,
    shots: int,
    seed: int | Sequence[int] | np.random.Generator,
    noise: NoiseModel | None = None,
) -> dict[str, int]:
    """Seeded shot histogram over ``subset``, keyed by bitstring in sorted order."""
    probs = probabilities(sv, subset)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    width = int(probs.size).bit_length() - 1
    return counts_from_outcomes(sample_outcomes(probs, shots, rng, noise), width)


def merge_counts(histograms: Iterable[Mapping[str, int]]) -> dict[str, int]:
    total: dict[str, int] = {}
    for h in histograms:
        for k, v in h.items():
            total[k] = total.get(k, 0) + int(v)
    return dict(sorted(total.items()))


def histogram_to_csv(counts: Mapping[str, int]) -> str:
    shots = sum(counts.values())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bitstring", "count", "probability"])
    for bits in sorted(counts):
        writer.writerow([bits, counts[bits], repr(counts[bits] / shots)])
    return buf.getvalue()


def histogram_from_csv(text: str) -> dict[str, int]:
    rows = csv.DictReader(io.StringIO(text))
    return {row["bitstring"]: int(row["count"]) for row in rows}


def histogram_records(counts: Mapping[str, int]) -> list[dict]:
    shots = sum(counts.values())
    return [
        {"bitstring": b, "count": counts[b], "probability": counts[b] / shots} for b in sorted(counts)
    ]


def histogram_to_json(counts: Mapping[str, int]) -> str:
    return json.dumps(histogram_records(counts), indent=2) + "\n"
