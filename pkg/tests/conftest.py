import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

_ACCEPTANCE: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    k = marker.args[0]
    detail = dict(item.user_properties).get("detail", "")
    verdict = "PASS" if call.excinfo is None else "FAIL"
    line = f"ACCEPTANCE {k} {verdict} {detail}".rstrip()
    _ACCEPTANCE[k] = line
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
