"""Statistical UNSAT evidence from an aggregated measurement histogram.

A flat histogram is consistent with there being no marked states. The check
combines Pearson's chi-square test against the uniform distribution with a
Hoeffding bound on the largest observed frequency. Passing both is evidence,
not proof, of unsatisfiability.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Mapping

DEFAULT_DELTA = 0.01
CHI2_QUANTILE = 0.99


class ZeroShots(ValueError):
    pass


class InvalidDelta(ValueError):
    pass


def _cells(counts: Mapping[str, int], N: int) -> list[int]:
    width = N.bit_length() - 1
    cells = [0] * N
    for bits, c in counts.items():
        if len(bits) != width:
            raise ValueError(f"bitstring {bits!r} does not have {width} bits")
        cells[int(bits, 2)] += int(c)
    return cells


def chi_square_uniform(counts: Mapping[str, int], S: int, N: int) -> tuple[float, int]:
    """Pearson statistic of ``counts`` against S/N expected per cell; absent bitstrings count as 0."""
    if S <= 0:
        raise ZeroShots("no shots to test")
    if S < 10 * N:
        warnings.warn(f"S={S} is below 10*N={10 * N}; the chi-square approximation is rough", stacklevel=2)
    expected = S / N
    stat = sum((o - expected) ** 2 for o in _cells(counts, N)) / expected
    return stat, N - 1


def chi2_quantile(dof: int, q: float = CHI2_QUANTILE) -> float:
    """Wilson-Hilferty approximation to the chi-square quantile."""
    z = NormalDist().inv_cdf(q)
    a = 2.0 / (9.0 * dof)
    return dof * (1.0 - a + z * math.sqrt(a)) ** 3


def hoeffding_radius(S: int, delta: float) -> float:
    if not 0.0 < delta <= 1.0:
        raise InvalidDelta(f"delta must lie in (0, 1], got {delta}")
    if S < 1:
        raise ZeroShots("S must be >= 1")
    return math.sqrt(math.log(1.0 / delta) / (2.0 * S))


@dataclass
class HistogramReport:
    n: int
    total_shots: int
    counts: dict[str, int]
    chi2_stat: float
    chi2_dof: int
    chi2_threshold: float
    p_max: float
    epsilon: float
    delta: float
    verdict: str  # "ConsistentWithUnsat" or "SpikeDetected"

    @property
    def spike_threshold(self) -> float:
        return 1.0 / (1 << self.n) + self.epsilon

    @property
    def uniformity_rejected(self) -> bool:
        return self.chi2_stat > self.chi2_threshold

    def verdict_line(self) -> str:
        conf = 1.0 - self.delta
        if self.verdict == "ConsistentWithUnsat":
            return (
                f"consistent with UNSAT at confidence {conf:.2f} (statistical evidence, not proof): "
                f"p_max={self.p_max:.4f} <= 1/N+eps={self.spike_threshold:.4f}, "
                f"chi2={self.chi2_stat:.2f} <= {self.chi2_threshold:.2f} (dof {self.chi2_dof})"
            )
        return (
            f"spike detected: p_max={self.p_max:.4f} vs 1/N+eps={self.spike_threshold:.4f}, "
            f"chi2={self.chi2_stat:.2f} vs {self.chi2_threshold:.2f} (dof {self.chi2_dof})"
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counts"] = dict(sorted(self.counts.items()))
        d["spike_threshold"] = self.spike_threshold
        d["verdict_line"] = self.verdict_line()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def certify(counts: Mapping[str, int], S: int, N: int, delta: float = DEFAULT_DELTA) -> HistogramReport:
    if sum(counts.values()) != S:
        raise ValueError(f"counts sum to {sum(counts.values())}, expected S={S}")
    stat, dof = chi_square_uniform(counts, S, N)
    eps = hoeffding_radius(S, delta)
    p_max = max(counts.values()) / S
    threshold = chi2_quantile(dof)
    flat = p_max <= 1.0 / N + eps and stat <= threshold
    return HistogramReport(
        n=N.bit_length() - 1,
        total_shots=S,
        counts=dict(counts),
        chi2_stat=stat,
        chi2_dof=dof,
        chi2_threshold=threshold,
        p_max=p_max,
        epsilon=eps,
        delta=delta,
        verdict="ConsistentWithUnsat" if flat else "SpikeDetected",
    )
