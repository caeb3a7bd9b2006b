"""Command-line entry point.

Exit codes: 0 success, 2 invalid flags, 3 I/O failure, 4 BBHT budget
exhausted without a witness, 5 instance too wide for the simulator.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .certify import DEFAULT_DELTA, certify
from .cnf import CnfError, Cnf, all_solutions, bits_to_str, brute_force, dpll_solve, parse_dimacs
from .encoder import CASE_NAMES, InfeasibleSpec, LeakageSpec, benchmark_spec, encode, benchmark_instances
from .grover import GroverSimulator, bbht_solve, grover_step_circuit
from .resources import (
    REFERENCE_N_EFF,
    ResidualInstance,
    crossover_density,
    crossover_fixed_m,
    emit_table,
    reference_rows,
)
from .statevector import NoiseModel, TooManyQubits, histogram_from_csv, histogram_to_csv, merge_counts

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_BUDGET = 4
EXIT_TOO_WIDE = 5


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    out: Path
    seed: int = 0
    shots: int = 2000
    repeats: int = 10
    delta: float = DEFAULT_DELTA
    budget: int | None = None
    gate_level: bool = False
    noise_flip: float = 0.0

    @property
    def noise(self) -> NoiseModel | None:
        return NoiseModel(self.noise_flip) if self.noise_flip > 0 else None


def derive_seed(seed: int, *keys: int) -> int:
    """Independent child seed for one component of a run."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="ascii", newline="\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc}") from exc


def _spec_from_args(args) -> tuple[LeakageSpec, str]:
    if args.case is not None:
        return benchmark_spec(args.case), CASE_NAMES[args.case]
    if args.mode is None:
        raise UsageError("give --case N or --mode {equal,notequal}")
    spec = LeakageSpec(
        state_bits=args.state_bits,
        unroll_T=args.unroll,
        property_mode=args.mode,
        keys_must_differ=args.keys_differ,
        plaintext=args.plaintext,
        padding_vars=args.pad,
        padding_clauses=args.pad_clauses,
    )
    name = f"{args.mode}{'_keysdiffer' if args.keys_differ else ''}_p{args.plaintext}_n{spec.num_vars}"
    return spec, name


def _load_cnf(args) -> tuple[Cnf, str]:
    if getattr(args, "input", None):
        return parse_dimacs(_read(args.input)), Path(args.input).stem
    if getattr(args, "case", None) is not None or getattr(args, "mode", None) is not None:
        spec, name = _spec_from_args(args)
        return encode(spec, name).cnf, name
    raise UsageError("give --input FILE.cnf, --case N or --mode")


def cmd_generate(args) -> int:
    spec, name = _spec_from_args(args)
    inst = encode(spec, name)
    out = Path(args.out)
    _write(out / f"{name}.cnf", inst.dimacs())
    _write(out / f"{name}.json", inst.metadata_json())
    print(f"{name}: n={inst.cnf.num_vars} m={inst.cnf.num_clauses} expected_K={inst.expected_K}")
    return EXIT_OK


def cmd_solve_classical(args) -> int:
    cnf, name = _load_cnf(args)
    dp = dpll_solve(cnf)
    report = {"name": name, "num_vars": cnf.num_vars, "num_clauses": cnf.num_clauses, "dpll_status": dp.status}
    report["dpll_witness"] = bits_to_str(dp.witness) if dp.witness else None
    if cnf.num_vars <= 24:
        bf = brute_force(cnf)
        report["brute_force_status"] = bf.status
        report["solution_count"] = bf.solution_count
        report["solutions"] = [bits_to_str(w) for w in all_solutions(cnf)]
    _write(Path(args.out) / f"{name}.classical.json", json.dumps(report, indent=2) + "\n")
    print(f"{name}: {dp.status}" + (f" witness={report['dpll_witness']}" if dp.witness else ""))
    return EXIT_OK


def cmd_solve_quantum(args) -> int:
    cnf, name = _load_cnf(args)
    noise = NoiseModel(args.noise_flip) if args.noise_flip > 0 else None
    report = bbht_solve(
        cnf,
        shots_per_trial=args.shots,
        seed=args.seed,
        budget_trials=args.budget,
        use_gate_level=args.gate_level,
        noise=noise,
    )
    out = Path(args.out)
    _write(out / f"{name}.bbht.json", report.to_json())
    _write(out / f"{name}.histogram.csv", histogram_to_csv(report.histogram))
    if report.verdict == "SAT":
        print(f"{name}: SAT witness={bits_to_str(report.witness)} tries={report.tries}")
        return EXIT_OK
    print(f"{name}: BudgetExhausted after {report.tries} tries (no witness)")
    return EXIT_BUDGET


def cmd_certify(args) -> int:
    counts = histogram_from_csv(_read(args.input))
    if not counts:
        raise UsageError("histogram is empty")
    n = len(next(iter(counts)))
    rep = certify(counts, sum(counts.values()), 1 << n, args.delta)
    stem = Path(args.input).stem
    _write(Path(args.out) / f"{stem}.certify.json", rep.to_json())
    print(rep.verdict_line())
    return EXIT_OK


def cmd_resources(args) -> int:
    if args.n_eff:
        rows = [ResidualInstance(n, args.density * n, args.K) for n in args.n_eff]
    else:
        rows = reference_rows()
    text = emit_table(rows, "text")
    if args.out:
        _write(Path(args.out) / "resources.txt", text)
        _write(Path(args.out) / "resources.csv", emit_table(rows, "csv"))
    print(text, end="")
    if args.crossover_rho is not None:
        print(f"crossover (rho={args.crossover_rho}): n* = {crossover_density(args.crossover_rho):.4f}")
    if args.crossover_m is not None:
        print(f"crossover (m={args.crossover_m}): n* = {crossover_fixed_m(args.crossover_m):.4f}")
    return EXIT_OK


def reproduce(config: RunConfig) -> dict:
    """Desk-scale rerun of the benchmark histograms, UNSAT statistics and resource table."""
    out = config.out
    summary: dict = {"seed": config.seed, "shots": config.shots, "repeats": config.repeats, "cases": []}
    for case_idx, inst in enumerate(benchmark_instances(), start=1):
        cnf = inst.cnf
        sim = GroverSimulator(cnf, config.gate_level)
        runs = [
            bbht_solve(
                cnf,
                shots_per_trial=config.shots,
                seed=derive_seed(config.seed, case_idx, i),
                budget_trials=config.budget,
                noise=config.noise,
                sim=sim,
            )
            for i in range(config.repeats)
        ]
        # the shots of the deciding trial of each run, summed across runs
        hist = merge_counts(r.final_counts for r in runs)
        _write(out / f"{inst.name}.cnf", inst.dimacs())
        _write(out / f"{inst.name}.histogram.csv", histogram_to_csv(hist))
        S = sum(hist.values())
        cert = certify(hist, S, 1 << cnf.num_vars, config.delta)
        _write(out / f"{inst.name}.certify.json", cert.to_json())
        truth = {bits_to_str(w) for w in inst.expected_witnesses}
        spikes = sorted(b for b, c in hist.items() if c / S > cert.spike_threshold)
        returned = sorted({bits_to_str(r.witness) for r in runs if r.witness is not None})
        dp = dpll_solve(cnf)
        step = grover_step_circuit(cnf)
        summary["cases"].append(
            {
                "name": inst.name,
                "n": cnf.num_vars,
                "m": cnf.num_clauses,
                "width": step.num_qubits,
                "depth_per_step": step.depth,
                "expected_K": inst.expected_K,
                "bruteforce_solutions": sorted(truth),
                "dpll_status": dp.status,
                "dpll_witness": bits_to_str(dp.witness) if dp.witness else None,
                "quantum_witnesses": returned,
                "spike_bitstrings": spikes,
                "sat_runs": sum(r.verdict == "SAT" for r in runs),
                "mean_tries": float(np.mean([r.tries for r in runs])),
                "witnesses_verified": set(returned) <= truth,
                "spikes_match_solutions": set(spikes) == truth,
                "status_agrees_with_dpll": (len(returned) > 0) == dp.is_sat,
                "certify_verdict": cert.verdict,
            }
        )
    rows = reference_rows()
    _write(out / "resources.txt", emit_table(rows, "text"))
    _write(out / "resources.csv", emit_table(rows, "csv"))
    summary["crossover"] = {"rho_20": crossover_density(20), "m_200": crossover_fixed_m(200)}
    _write(out / "summary.json", json.dumps(summary, indent=2) + "\n")
    return summary


def cmd_reproduce(args) -> int:
    config = RunConfig(
        "reproduce",
        Path(args.out),
        seed=args.seed,
        shots=args.shots,
        repeats=args.repeats,
        delta=args.delta,
        budget=args.budget,
        gate_level=args.gate_level,
        noise_flip=args.noise_flip,
    )
    summary = reproduce(config)
    for c in summary["cases"]:
        print(
            f"{c['name']}: n={c['n']} m={c['m']} width={c['width']} K={c['expected_K']} "
            f"sat_runs={c['sat_runs']}/{config.repeats} mean_tries={c['mean_tries']:.2f} "
            f"witnesses={','.join(c['quantum_witnesses']) or '-'} certify={c['certify_verdict']}"
        )
    print(emit_table(reference_rows()), end="")
    return EXIT_OK


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", type=int, choices=sorted(CASE_NAMES), help="benchmark row 1-3, 4 = UNSAT control")
    p.add_argument("--mode", choices=("equal", "notequal"))
    p.add_argument("--keys-differ", action="store_true")
    p.add_argument("--plaintext", type=int, choices=(0, 1), default=1)
    p.add_argument("--pad", type=int, default=0, help="padding variables pinned to 0")
    p.add_argument("--pad-clauses", type=int, default=0, help="extra clauses implied by the padding units")
    p.add_argument("--state-bits", type=int, default=1)
    p.add_argument("--unroll", type=int, default=1)


def _add_quantum_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="BBHT trial budget")
    p.add_argument("--gate-level", action="store_true", help="simulate the ancilla oracle circuit")
    p.add_argument("--noise-flip", type=float, default=0.0, help="readout flip probability per bit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leakgrover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a leakage CNF and its metadata sidecar")
    _add_instance_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve-classical", help="DPLL and brute-force reference solve")
    p.add_argument("--input")
    _add_instance_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_solve_classical)

    p = sub.add_parser("solve-quantum", help="simulated Grover/BBHT search")
    p.add_argument("--input")
    _add_instance_flags(p)
    _add_quantum_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_solve_quantum)

    p = sub.add_parser("certify", help="UNSAT evidence from a histogram CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("resources", help="projected logical resource table")
    p.add_argument("--n-eff", type=int, nargs="*", default=None, help=f"default {REFERENCE_N_EFF}")
    p.add_argument("--density", type=int, default=8, help="clauses per residual variable")
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--crossover-rho", type=float, default=None)
    p.add_argument("--crossover-m", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("reproduce", help="rerun all benchmark cases and the resource table")
    _add_quantum_flags(p)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--out", default="reproduce_out")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InfeasibleSpec) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooManyQubits as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_WIDE
    except CnfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
