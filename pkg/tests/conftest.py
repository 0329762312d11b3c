import pytest

from octlab.exactnum import QQ, GF
from octlab.octonion import check_table


@pytest.fixture(scope="session", autouse=True)
def octonion_table_is_consistent():
    """Every other test depends on the multiplication table, so validate it first."""
    for field in (QQ, GF(7)):
        failures = check_table(field)
        if failures:
            pytest.exit(f"octonion table inconsistent over {field}: {failures[:5]}", returncode=1)


_CRITERIA: list = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is not None:
        _CRITERIA.append((crit, "PASS" if report.passed else "FAIL"))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", f"{mark.args[0]:>2}. {mark.args[1]}"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit, verdict in sorted(_CRITERIA, key=lambda cv: int(cv[0].split(".")[0])):
        terminalreporter.write_line(f"{verdict}  criterion {crit}")
