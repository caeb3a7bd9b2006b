import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leakgrover.resources import (
    COLUMNS,
    NoRoot,
    ResidualInstance,
    crossover_density,
    crossover_fixed_m,
    density_costs,
    emit_table,
    estimate,
    reference_rows,
    table_cells,
    toffoli_count,
)

# transcribed from the published projected-resource table
REFERENCE_TABLE = [
    ["16", "128", "145", "2.01e+02", "795", "1.60e+05", "1.08"],
    ["32", "256", "289", "5.15e+04", "1595", "8.21e+07", "0.82"],
    ["64", "512", "577", "3.37e+09", "3195", "1.08e+13", "0.68"],
    ["80", "640", "721", "8.64e+11", "3995", "3.45e+15", "0.65"],
    ["128", "1024", "1153", "1.45e+19", "6395", "9.27e+22", "0.60"],
]


def test_reference_table_cells():
    assert table_cells(reference_rows()) == REFERENCE_TABLE


def test_row_16_by_hand():
    e = estimate(ResidualInstance(16, 128))
    assert e.q_log == 16 + 128 + 1
    assert e.C_Q == 6 * 128 + 2 * 16 - 5
    assert e.R_Q == pytest.approx(math.pi / 4 * 256)
    assert e.T_Q == pytest.approx(e.R_Q * e.C_Q)
    assert e.alpha_min == pytest.approx(math.log2(e.T_Q) / 16)


def test_row_128_values():
    e = estimate(ResidualInstance(128, 1024))
    assert e.R_Q == pytest.approx(1.45e19, rel=5e-3)
    assert e.C_Q == 6395
    assert e.T_Q == pytest.approx(9.27e22, rel=5e-3)


def test_emit_table_formats():
    text = emit_table(reference_rows())
    lines = text.splitlines()
    assert lines[0].split() == list(COLUMNS) and len(lines) == 6
    csv_text = emit_table(reference_rows(), "csv")
    assert csv_text.splitlines()[1] == ",".join(REFERENCE_TABLE[0])
    with pytest.raises(ValueError):
        emit_table(reference_rows(), "html")


def test_empty_table_is_header_only():
    assert emit_table([]).splitlines() == ["  ".join(COLUMNS)]
    assert emit_table([], "csv") == ",".join(COLUMNS) + "\n"


def test_residual_instance_validation():
    with pytest.raises(ValueError):
        ResidualInstance(0, 5)
    assert ResidualInstance(10, 80).rho == 8


def test_crossover_values():
    assert crossover_density(20) == pytest.approx(16.8, abs=0.1)
    assert crossover_fixed_m(200) == pytest.approx(15.288, abs=1e-3)
    assert crossover_fixed_m(1) == 0
    assert crossover_fixed_m(1024) == 20


def test_crossover_density_rho_one_larger_root():
    # 2**(n/2) = n has roots exactly 2 and 4
    assert crossover_density(1) == pytest.approx(4.0, abs=1e-5)


def test_crossover_no_root():
    with pytest.raises(NoRoot):
        crossover_density(1e9, hi=50)


@given(st.floats(1.0, 500))
def test_crossover_consistency(rho):
    n = crossover_density(rho)
    assert abs(2 ** (n / 2) - rho * n) / (rho * n) < 1e-6
    # past the crossover the density-aware quantum cost wins, just before it loses
    classical, quantum = density_costs(n + 0.5, rho)
    assert quantum < classical
    classical, quantum = density_costs(n - 0.5, rho)
    assert quantum > classical


def test_small_rho_has_no_crossover():
    # 2**(n/2) - rho*n stays positive when rho < e*ln2/2
    with pytest.raises(NoRoot):
        crossover_density(0.5)


@given(st.integers(1, 500), st.integers(2, 5000))
def test_toffoli_affine(n, m):
    assert toffoli_count(n, m) - toffoli_count(n, m - 1) == 6


@given(st.integers(1, 50))
def test_alpha_decreases_toward_half(rho):
    prev = math.inf
    for n in range(8, 400, 8):
        a = estimate(ResidualInstance(n, rho * n)).alpha_min
        assert 0.5 < a < prev
        prev = a


@given(st.integers(1, 1000), st.integers(1, 5000), st.integers(0, 20))
def test_log_space_agrees_with_direct(n, m, logk):
    K = min(2**logk, 2**n)
    e = estimate(ResidualInstance(n, m, K))
    direct = math.pi / 4 * math.sqrt(2.0**n / K) * toffoli_count(n, m) if n < 1000 else None
    if direct is not None and math.isfinite(direct):
        assert e.T_Q == pytest.approx(direct, rel=1e-9)
    assert 2.0 ** e.log2_T_Q == pytest.approx(e.T_Q, rel=1e-9) if e.log2_T_Q < 1000 else math.isinf(e.T_Q)
