import re
from collections import OrderedDict

_CRITERION = re.compile(r"test_acceptance\.py::test_(A\d+)_(\w+)")
_results: "OrderedDict[str, list]" = OrderedDict()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _results.setdefault(m.group(1), []).append((m.group(2), report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: int(k[1:])):
        outcomes = _results[key]
        ok = all(o == "passed" for _, o in outcomes)
        names = ", ".join(n for n, _ in outcomes)
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'} ({names})")
