"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from leakgrover.certify import certify, hoeffding_radius
from leakgrover.cli import derive_seed
from leakgrover.cnf import Cnf, brute_force, dpll_solve, evaluate, random_kcnf
from leakgrover.encoder import benchmark_instances
from leakgrover.grover import (
    ENCODINGS,
    GroverSimulator,
    bbht_solve,
    build_direct_oracle,
    build_gate_oracle,
    optimal_iterations,
    success_probability,
)
from leakgrover.resources import crossover_density, crossover_fixed_m, reference_rows, table_cells
from leakgrover.statevector import NoiseModel, basis_state, merge_counts


@pytest.fixture(scope="module")
def benchmarks():
    return benchmark_instances()


def report(idx, ok, detail, elapsed, limit, capsys):
    ok = ok and elapsed < limit
    line = f"ACCEPTANCE {idx} {'PASS' if ok else 'FAIL'}: {detail} [{elapsed:.2f}s < {limit}s]"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    return ok


def test_1_resource_table(capsys):
    t0 = time.perf_counter()
    expected = [
        ["16", "128", "145", "2.01e+02", "795", "1.60e+05", "1.08"],
        ["32", "256", "289", "5.15e+04", "1595", "8.21e+07", "0.82"],
        ["64", "512", "577", "3.37e+09", "3195", "1.08e+13", "0.68"],
        ["80", "640", "721", "8.64e+11", "3995", "3.45e+15", "0.65"],
        ["128", "1024", "1153", "1.45e+19", "6395", "9.27e+22", "0.60"],
    ]
    got = table_cells(reference_rows())
    ok = got == expected
    assert report(1, ok, f"resource table {sum(a == b for a, b in zip(got, expected))}/5 rows match",
                  time.perf_counter() - t0, 1, capsys)


def test_2_crossovers(capsys):
    t0 = time.perf_counter()
    a, b = crossover_density(20), crossover_fixed_m(200)
    ok = abs(a - 16.8) <= 0.1 and abs(b - 15.29) <= 0.01
    assert report(2, ok, f"crossover_density(20)={a:.4f}, crossover_fixed_m(200)={b:.4f}",
                  time.perf_counter() - t0, 1, capsys)


def test_3_iteration_law(capsys):
    t0 = time.perf_counter()
    rstar = [optimal_iterations(n, 2) for n in (5, 6, 7)]
    worst = 0.0
    checked = 0
    rng = np.random.default_rng(0)
    for n in range(1, 11):
        for K in (1, 2, 4):
            if K > 1 << n:
                continue
            sim = GroverSimulator(Cnf(n, ()))
            marked = rng.choice(1 << n, size=K, replace=False)
            sim.oracle.signs = np.ones(1 << n)
            sim.oracle.signs[marked] = -1
            for r in range(2 * optimal_iterations(n, K) + 1):
                mass = float(sim.search_probabilities(r)[marked].sum())
                worst = max(worst, abs(mass - success_probability(n, K, r)))
                checked += 1
    ok = rstar == [3, 4, 6] and worst < 1e-9
    assert report(3, ok, f"r*={rstar}, max |mass - sin^2| = {worst:.1e} over {checked} (n,K,r)",
                  time.perf_counter() - t0, 30, capsys)


def oracle_error(cnf, encoding):
    """Worst deviation of the gate oracle from the direct sign on every search basis state."""
    gate = build_gate_oracle(cnf, encoding)
    signs = build_direct_oracle(cnf).signs
    extra = cnf.num_clauses + 1
    sv = basis_state(gate.width, 0)
    amps = sv.amplitudes
    worst = 0.0
    for x in range(1 << cnf.num_vars):
        idx = x << extra
        amps.fill(0)
        amps[idx] = 1
        gate(sv)
        # expected output is signs[x] at idx and zero everywhere else, ancillas included
        head = abs(amps[idx] - signs[x])
        amps[idx] = 0
        worst = max(worst, float(head), float(np.abs(amps).max()))
    return worst, gate.width


@pytest.mark.slow
def test_4_oracle_equivalence(benchmarks, capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    cnfs = [benchmarks[0].cnf, benchmarks[1].cnf]
    for _ in range(50):
        n = int(rng.integers(1, 7))
        cnfs.append(random_kcnf(rng, n, int(rng.integers(0, 15)), k=min(3, n)))
    worst = 0.0
    widths_ok = True
    for cnf in cnfs:
        for enc in ENCODINGS:
            err, width = oracle_error(cnf, enc)
            worst = max(worst, err)
            widths_ok &= width == cnf.num_vars + cnf.num_clauses + 1
    case_widths = [build_gate_oracle(b.cnf).width for b in benchmarks[:2]]
    ok = worst < 1e-9 and widths_ok and case_widths == [17, 21]
    assert report(4, ok, f"{len(cnfs)} CNFs x {len(ENCODINGS)} encodings, max err {worst:.1e}, "
                         f"widths {case_widths}", time.perf_counter() - t0, 300, capsys)


def test_5_witness_agreement(benchmarks, capsys):
    t0 = time.perf_counter()
    bad = []
    mean_tries = []
    successes = []
    for inst in benchmarks:
        cnf = inst.cnf
        sim = GroverSimulator(cnf)
        reps = [bbht_solve(cnf, seed=s, sim=sim) for s in range(100)]
        truth = brute_force(cnf).is_sat
        for rep in reps:
            if rep.verdict == "SAT" and not evaluate(cnf, rep.witness):
                bad.append((inst.name, "invalid witness"))
            if not truth and rep.verdict == "SAT":
                bad.append((inst.name, "false SAT"))
        if truth:
            successes.append(sum(r.verdict == "SAT" for r in reps))
            mean_tries.append(float(np.mean([r.tries for r in reps])))
    rng = np.random.default_rng(5)
    fuzz_sat = 0
    for i in range(200):
        n = int(rng.integers(3, 11))
        cnf = random_kcnf(rng, n, int(rng.integers(1, 7 * n)))
        bf, dp = brute_force(cnf), dpll_solve(cnf)
        rep = bbht_solve(cnf, seed=i)
        fuzz_sat += bf.is_sat
        if rep.verdict == "SAT" and not evaluate(cnf, rep.witness):
            bad.append((i, "invalid witness"))
        if (rep.verdict == "SAT") != bf.is_sat or bf.status != dp.status:
            bad.append((i, "status mismatch"))
    ok = not bad and all(s >= 99 for s in successes) and all(1 <= m <= 4 for m in mean_tries)
    detail = (f"successes {successes}/100, mean tries {[round(m, 2) for m in mean_tries]}, "
              f"200 fuzz ({fuzz_sat} SAT), disagreements {len(bad)}")
    assert report(5, ok, detail, time.perf_counter() - t0, 600, capsys)


def test_6_unsat_certification(benchmarks, capsys):
    t0 = time.perf_counter()
    inst = benchmarks[3]
    cnf = inst.cnf
    sim = GroverSimulator(cnf)
    eps = hoeffding_radius(20000, 0.01)
    verdicts, stats = [], []
    for seed in range(100):
        runs = [bbht_solve(cnf, seed=derive_seed(seed, 4, i), sim=sim) for i in range(10)]
        hist = merge_counts(r.final_counts for r in runs)
        rep = certify(hist, sum(hist.values()), 32, 0.01)
        assert rep.total_shots == 20000
        verdicts.append(rep.verdict == "ConsistentWithUnsat")
        stats.append(rep.chi2_stat)
    rate = sum(verdicts) / len(verdicts)
    mean_chi2 = float(np.mean(stats))
    ok = (
        (cnf.num_vars, cnf.num_clauses, inst.expected_K) == (5, 9, 0)
        and round(eps, 5) == 0.01073
        and abs(1 / 32 + eps - 0.0420) < 5e-5
        and rate >= 0.98
        and abs(mean_chi2 - 31) <= 3
    )
    detail = (f"eps={eps:.5f}, 1/N+eps={1 / 32 + eps:.4f}, consistent in {rate:.0%} of 100 runs, "
              f"mean chi2={mean_chi2:.2f}")
    assert report(6, ok, detail, time.perf_counter() - t0, 300, capsys)


def test_7_noise_robustness(benchmarks, capsys):
    t0 = time.perf_counter()
    cnf = benchmarks[0].cnf
    sim = GroverSimulator(cnf)
    noise = NoiseModel(0.05)
    false_sat = 0
    sat = 0
    for seed in range(200):
        rep = bbht_solve(cnf, seed=seed, noise=noise, sim=sim)
        if rep.verdict == "SAT":
            sat += 1
            false_sat += not evaluate(cnf, rep.witness)
        # every trial that was rejected really failed the classical check
        for t in rep.trials:
            false_sat += t.classical_check != evaluate(cnf, t.measured)
    unsat = benchmarks[3].cnf
    unsat_sim = GroverSimulator(unsat)
    for seed in range(50):
        false_sat += bbht_solve(unsat, seed=seed, noise=noise, sim=unsat_sim).verdict == "SAT"
    ok = false_sat == 0
    assert report(7, ok, f"flip 0.05: {sat}/200 Case-1 runs SAT, {false_sat} false SAT",
                  time.perf_counter() - t0, 120, capsys)
