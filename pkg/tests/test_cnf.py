import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakgrover.cnf import (
    ClauseCountMismatch,
    Cnf,
    LengthMismatch,
    MalformedHeader,
    TautologyClause,
    TooManyVariables,
    VariableOutOfRange,
    all_solutions,
    brute_force,
    dpll_solve,
    emit_dimacs,
    evaluate,
    parse_dimacs,
    random_kcnf,
    satisfying_mask,
)


def enumerate_models(cnf):
    """Reference model enumeration with itertools, independent of the numpy mask."""
    return [
        bits for bits in itertools.product((0, 1), repeat=cnf.num_vars)
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in cnf.clauses)
    ]


@st.composite
def cnfs(draw, max_vars=8, max_clauses=12):
    n = draw(st.integers(1, max_vars))
    m = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(m):
        vars_ = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(n, 4), unique=True))
        clauses.append(tuple(v * draw(st.sampled_from((-1, 1))) for v in vars_))
    return Cnf(n, tuple(clauses))


def test_parse_two_clauses():
    cnf = parse_dimacs("p cnf 2 2\n1 -2 0\n-1 2 0\n")
    assert cnf == Cnf(2, ((1, -2), (-1, 2)))


def test_parse_unit():
    assert parse_dimacs("p cnf 1 1\n1 0\n") == Cnf(1, ((1,),))


def test_parse_comments_crlf_and_multiline_clause():
    text = "c hello\r\np cnf 3 2\r\n1 2\r\n3 0 -1 0\r\n"
    assert parse_dimacs(text) == Cnf(3, ((1, 2, 3), (-1,)))


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("p cnf 2 1\n3 0\n", VariableOutOfRange, 2),
        ("p dnf 2 1\n1 0\n", MalformedHeader, 1),
        ("1 0\n", MalformedHeader, 1),
        ("p cnf 2 2\n1 0\n", ClauseCountMismatch, None),
        ("p cnf 2 1\nc x\n1 -1 0\n", TautologyClause, 3),
        ("p cnf 2 1\n1 2\n", ClauseCountMismatch, 2),
    ],
)
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_dimacs(text)
    assert info.value.line == line


def test_emit_examples():
    assert emit_dimacs(Cnf(1, ((1,),))) == "p cnf 1 1\n1 0\n"
    assert emit_dimacs(Cnf(2, ())) == "p cnf 2 0\n"


@given(cnfs())
def test_round_trip(cnf):
    assert parse_dimacs(emit_dimacs(cnf)) == cnf


def test_tautology_rejected_at_construction():
    with pytest.raises(TautologyClause):
        Cnf(2, ((1, -1),))


def test_duplicate_literals_normalized():
    assert Cnf(2, ((1, 1, 2),)).clauses == ((1, 2),)


def test_evaluate_examples():
    assert evaluate(Cnf(2, ((1, -2), (-1, 2))), [1, 1])
    assert not evaluate(Cnf(1, ((1,), (-1,))), [0])
    with pytest.raises(LengthMismatch):
        evaluate(Cnf(2, ((1,),)), [1])


def test_brute_force_or_clause():
    # enumerate 00, 01, 10, 11 by hand: only 00 fails
    res = brute_force(Cnf(2, ((1, 2),)))
    assert res.status == "SAT" and res.solution_count == 3 and res.witness == (0, 1)


def test_brute_force_unsat():
    res = brute_force(Cnf(1, ((1,), (-1,))))
    assert res.status == "UNSAT" and res.solution_count == 0 and res.witness is None


def test_brute_force_guard():
    with pytest.raises(TooManyVariables):
        brute_force(Cnf(25, ((1,),)))


@given(cnfs())
def test_mask_matches_reference_enumeration(cnf):
    models = enumerate_models(cnf)
    assert all_solutions(cnf) == models
    res = brute_force(cnf)
    assert res.solution_count == len(models)
    if models:
        assert res.witness == models[0]


def test_mask_chunking_agrees_with_direct():
    # force the chunked path by crossing the 2**20 boundary
    rng = np.random.default_rng(3)
    cnf = random_kcnf(rng, 21, 40)
    mask = satisfying_mask(cnf)
    assert mask.size == 1 << 21
    for idx in rng.integers(0, 1 << 21, size=200):
        bits = [(int(idx) >> (20 - i)) & 1 for i in range(21)]
        assert mask[idx] == evaluate(cnf, bits)


@settings(max_examples=200)
@given(cnfs(max_vars=12, max_clauses=30))
def test_dpll_agrees_with_brute_force(cnf):
    bf, dp = brute_force(cnf), dpll_solve(cnf)
    assert dp.status == bf.status
    assert dp.solution_count is None
    if dp.is_sat:
        assert evaluate(cnf, dp.witness)


def test_dpll_on_fuzzed_3cnf():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(3, 13))
        cnf = random_kcnf(rng, n, int(rng.integers(1, 6 * n)))
        assert dpll_solve(cnf).status == brute_force(cnf).status


@given(cnfs(), st.lists(st.integers(-8, 8).filter(bool), min_size=1, max_size=3, unique_by=abs))
def test_adding_clause_never_increases_count(cnf, clause):
    clause = tuple(l for l in clause if abs(l) <= cnf.num_vars)
    if not clause:
        return
    assert brute_force(cnf.with_clause(clause)).solution_count <= brute_force(cnf).solution_count


@given(cnfs())
def test_evaluate_partitions_assignment_space(cnf):
    true = sum(evaluate(cnf, b) for b in itertools.product((0, 1), repeat=cnf.num_vars))
    false = sum(not evaluate(cnf, b) for b in itertools.product((0, 1), repeat=cnf.num_vars))
    assert true + false == 2 ** cnf.num_vars
