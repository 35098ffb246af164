import os

import pytest
from hypothesis import settings

from steinlab.domain4 import BUILTIN_N
from steinlab.intcore import IntMatrix

settings.register_profile("steinlab", deadline=None, max_examples=60)
settings.register_profile("stress", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("STEINLAB_HYPOTHESIS_PROFILE", "steinlab"))


@pytest.fixture
def fib():
    return IntMatrix(((1, 1), (1, 0)))


@pytest.fixture
def builtin_n():
    return BUILTIN_N


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is not None and call.when == "call":
        item.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    rows = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call":
                continue
            for key, val in rep.user_properties:
                if key == "criterion":
                    rows.append((val[0], "PASS" if status == "passed" else "FAIL", val[1]))
    if rows:
        terminalreporter.section("acceptance criteria")
        for n, verdict, text in sorted(rows):
            terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {text}")
