"""Grover/BBHT search for two-trace side-channel leakage witnesses in CNF form."""

from .certify import HistogramReport, certify, chi_square_uniform, hoeffding_radius
from .cnf import Cnf, SolveResult, brute_force, dpll_solve, emit_dimacs, evaluate, parse_dimacs
from .encoder import LeakageInstance, LeakageSpec, encode, benchmark_instances
from .grover import (
    BbhtReport,
    GroverConfig,
    apply_diffuser,
    bbht_solve,
    build_direct_oracle,
    build_gate_oracle,
    grover_run,
    optimal_iterations,
    success_probability,
)
from .resources import ResidualInstance, crossover_density, crossover_fixed_m, emit_table, estimate

__version__ = "0.1.0"
