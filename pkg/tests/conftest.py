import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from optclean.model import OptionQuote, OptionType  # noqa: E402


@pytest.fixture
def fixtures_dir():
    return HERE / "fixtures"


def make_quote(id, kind="call", strike=100.0, days=30, price=5.0, oi=10):
    return OptionQuote(id, OptionType(kind), float(strike), days, float(price), oi)


@pytest.fixture
def quote():
    return make_quote


_acceptance: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label = report.user_properties and dict(report.user_properties).get("criterion")
        if label:
            _acceptance.append((label, report.outcome.upper()))


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker and not any(k == "criterion" for k, _ in item.user_properties):
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _acceptance:
        status = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
