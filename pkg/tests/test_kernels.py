import numpy as np
import pytest

from isoclass import _accel, kernels
from isoclass.arith import FiniteField

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _tables(q):
    F = FiniteField.of_order(q)
    nsol = kernels.quadratic_solution_table(F.add_table, F.mul_table)
    return F, (F.p, F.add_table, F.mul_table, F.neg_table, nsol)


@needs_numba
@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 25])
def test_point_count_flavours_agree(q):
    F, tabs = _tables(q)
    rng = np.random.default_rng(q)
    eqs = rng.integers(0, q, size=(500, 5))
    assert np.array_equal(kernels.point_counts_numba(eqs, *tabs), kernels.point_counts_numpy(eqs, *tabs))


@needs_numba
@pytest.mark.parametrize("ell, n", [(2, 1), (2, 6), (2, 14), (3, 4), (3, 9), (5, 3), (7, 2), (97, 2)])
def test_valuation_histogram_flavours_agree(ell, n):
    # the numba kernel walks the Hensel tree, the numpy one enumerates every alpha
    rng = np.random.default_rng(ell * n)
    targets = [(0, 0), (1, 2), (3, ell), (-5, 7 * ell**2), (ell + 1, 4), (2 * ell**3, ell**6)]
    targets += [tuple(int(x) for x in rng.integers(0, ell**n, 2)) for _ in range(20)]
    for a, d in targets:
        h1 = kernels.valuation_histogram_numba(ell, n, a, d)
        h2 = kernels.valuation_histogram_numpy(ell, n, a, d)
        assert np.array_equal(h1, h2)
        assert h1.sum() == ell**n


def test_quadratic_solution_table_rows_sum_to_q():
    for q in (2, 4, 7, 9):
        F, (_, add, mul, _, nsol) = _tables(q)
        assert (nsol.sum(axis=1) == q).all()


def test_env_flag_switches_dispatch(monkeypatch):
    monkeypatch.setenv(_accel.ENV_FLAG, "1")
    assert not _accel.numba_enabled()
    monkeypatch.setenv(_accel.ENV_FLAG, "0")
    assert _accel.numba_enabled() == _accel.HAVE_NUMBA
    monkeypatch.delenv(_accel.ENV_FLAG)
    assert _accel.numba_enabled() == _accel.HAVE_NUMBA


def test_modulus_guard():
    with pytest.raises(ValueError):
        kernels.valuation_histogram_numpy(2, 40, 1, 1)


@needs_numba
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--repeat", "1"])
    out = capsys.readouterr().out
    assert "valuation_histogram 97^3" in out and "speed-up" in out
