"""Closed-form logical resource projections and classical/quantum crossover points."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

LOG_SPACE_THRESHOLD = 60
REFERENCE_N_EFF = (16, 32, 64, 80, 128)
DENSITY = 8


class NoRoot(ValueError):
    pass


@dataclass(frozen=True)
class ResidualInstance:
    n_eff: int
    m: int
    K: int = 1

    def __post_init__(self):
        if self.n_eff < 1 or self.m < 1 or self.K < 1:
            raise ValueError("n_eff, m and K must be positive")

    @property
    def rho(self) -> float:
        return self.m / self.n_eff


@dataclass(frozen=True)
class ResourceEstimate:
    n_eff: int
    m: int
    q_log: int
    R_Q: float
    C_Q: int
    T_Q: float
    alpha_min: float
    log2_R_Q: float
    log2_T_Q: float


def toffoli_count(n_eff: int, m: int) -> int:
    """Serial Toffoli-class gates per Grover step: clause compute/uncompute 4m,
    global AND compute/uncompute 2(m-1), diffuser multi-control 2n-3."""
    return 4 * m + 2 * (m - 1) + (2 * n_eff - 3)


def _pow2(x: float) -> float:
    return 2.0**x if x < 1024 else math.inf


def estimate(inst: ResidualInstance) -> ResourceEstimate:
    n, m, K = inst.n_eff, inst.m, inst.K
    c_q = toffoli_count(n, m)
    if n > LOG_SPACE_THRESHOLD:
        log2_r = math.log2(math.pi / 4) + 0.5 * (n - math.log2(K))
        r_q = _pow2(log2_r)
    else:
        r_q = math.pi / 4 * math.sqrt(2**n / K)
        log2_r = math.log2(r_q)
    log2_t = log2_r + math.log2(c_q)
    t_q = r_q * c_q if math.isfinite(r_q) else _pow2(log2_t)
    return ResourceEstimate(
        n_eff=n,
        m=m,
        q_log=n + m + 1,
        R_Q=r_q,
        C_Q=c_q,
        T_Q=t_q,
        alpha_min=log2_t / n,
        log2_R_Q=log2_r,
        log2_T_Q=log2_t,
    )


def crossover_density(rho: float, lo: float = 1.0, hi: float = 200.0, tol: float = 1e-6) -> float:
    """Larger root of 2**(n/2) = rho * n, by bisection on [lo, hi]."""
    if rho <= 0:
        raise ValueError("rho must be positive")

    def gap(n: float) -> float:
        return 2 ** (n / 2) - rho * n

    # gap is convex with its minimum at n0; the larger root lies to the right of n0
    n0 = 2 * math.log2(2 * rho / math.log(2))
    a = max(lo, n0)
    if gap(a) > 0 or gap(hi) < 0:
        raise NoRoot(f"no crossover in [{lo}, {hi}] for rho={rho}")
    b = hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if gap(mid) > 0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def crossover_fixed_m(m: int) -> float:
    """n* solving 2**n = m * 2**(n/2)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return 2 * math.log2(m)


def density_costs(n: float, rho: float, K: int = 1) -> tuple[float, float]:
    """(classical 2**n, density-aware quantum rho*n*2**(n/2)/sqrt(K)) cost pair."""
    return 2.0**n, rho * n * 2 ** (n / 2) / math.sqrt(K)


def reference_rows() -> list[ResidualInstance]:
    return [ResidualInstance(n, DENSITY * n) for n in REFERENCE_N_EFF]


COLUMNS = ("n_eff", "m", "q_log", "R_Q", "C_Q", "R_Q*C_Q", "alpha_min")


def _sci(x: float) -> str:
    return f"{x:.2e}"


def table_cells(rows: list[ResidualInstance]) -> list[list[str]]:
    out = []
    for row in rows:
        e = estimate(row)
        out.append(
            [str(e.n_eff), str(e.m), str(e.q_log), _sci(e.R_Q), str(e.C_Q), _sci(e.T_Q), f"{e.alpha_min:.2f}"]
        )
    return out


def emit_table(rows: list[ResidualInstance], fmt: str = "text") -> str:
    cells = table_cells(rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(cells)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(COLUMNS)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(COLUMNS, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"
