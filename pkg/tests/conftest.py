import importlib

import pytest

from isoclass import densities

# the package re-exports the census() function under the module's name
census_mod = importlib.import_module("isoclass.census")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


@pytest.fixture
def numpy_kernels(monkeypatch):
    """Force the pure-numpy kernels and start from cold caches."""
    monkeypatch.setenv("ISOCLASS_DISABLE_NUMBA", "1")
    census_mod._census.cache_clear()
    densities.nu_ell.cache_clear()
    yield
    census_mod._census.cache_clear()
    densities.nu_ell.cache_clear()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
