import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hmtune import HybridMemoryConfig  # noqa: E402
from hmtune.trace import parse_synthetic_spec  # noqa: E402

# Desk-scale cost model shared by the suite-level tests: swaps and period
# starts are cheaper than the defaults because synthetic traces give each
# page tens of accesses per phase rather than thousands.
SUITE_CONFIG = HybridMemoryConfig(
    fast_bandwidth_bytes_per_s=51.2e9,
    per_migration_delay_ns=300.0,
    per_period_overhead_ns=2000.0,
)

STRIDED_FIXTURE = "strided:1000x40"


@pytest.fixture(scope="session")
def suite_config():
    return SUITE_CONFIG


@pytest.fixture(scope="session")
def strided_trace():
    return parse_synthetic_spec(STRIDED_FIXTURE)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def report_criterion():
    """Record one pass/fail line; the lines are echoed at the end of the run."""
    def record(number, passed, text):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
