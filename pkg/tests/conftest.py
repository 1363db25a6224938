import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def listing1_text() -> str:
    return (DATA / "listing1_t3.ttl").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def library():
    from swemls.datasets import default_library

    return default_library()


@pytest.fixture
def kg():
    from swemls.datasets import mini_kg

    return mini_kg()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("primary acceptance criteria")
    for number in sorted(RESULTS):
        ok, elapsed, text = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {text}")
