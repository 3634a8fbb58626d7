"""Collects outcomes of tests marked ``criterion`` and prints one line per criterion."""

from collections import defaultdict

_results = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _titles[number] = title
    _results[number].append((item.name, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        checks = _results[number]
        failed = [name for name, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number:2d} {status}  {_titles[number]} ({len(checks) - len(failed)}/{len(checks)} checks)"
        if failed:
            line += "  failed: " + ", ".join(failed)
        tr.write_line(line)
