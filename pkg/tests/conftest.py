import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_acceptance: dict[int, tuple[str, str]] = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    if call.when == "call" or failed:
        prev = _acceptance.get(number, (title, "PASS"))[1]
        status = "FAIL" if failed or prev == "FAIL" else "PASS"
        _acceptance[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
