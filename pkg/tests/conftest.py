import sys
from pathlib import Path

import pytest

from tgroups.primes import PrimeRange, default_cache_path

sys.path.insert(0, str(Path(__file__).parent))

BIG_LIMIT = 700_000_000


@pytest.fixture(scope="session")
def small_sieve():
    return PrimeRange(10 ** 7)


@pytest.fixture(scope="session")
def mid_sieve():
    return PrimeRange(2 * 10 ** 8, cache_path=default_cache_path(2 * 10 ** 8))


@pytest.fixture(scope="session")
def big_sieve():
    """Sieve to 7e8, cached on disk (TGROUPS_CACHE_DIR or ~/.cache/tgroups)."""
    return PrimeRange(BIG_LIMIT, cache_path=default_cache_path(BIG_LIMIT))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.VERDICTS):
            terminalreporter.write_line(line)
