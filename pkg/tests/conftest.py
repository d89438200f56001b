import pytest

from hallkit.regression import setup

ACCEPTANCE: dict[int, bool] = {}


@pytest.fixture(scope="session")
def algebra():
    """Memoized ``(spec, category, HallAlgebra)`` keyed by (name, q, bound)."""
    cache = {}

    def get(name, q=2, bound=None):
        key = (name, q, bound)
        if key not in cache:
            cache[key] = setup(name, q, bound)
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ACCEPTANCE[n] else 'FAIL'}")
