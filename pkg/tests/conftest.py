import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome == "failed":
        worst = dict(report.user_properties).get("worst")
        prev = _results.get(int(m.group(1)))
        if prev is None or prev[1] == "PASS":
            _results[int(m.group(1))] = (m.group(2), "PASS" if report.passed else "FAIL", worst)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        name, status, worst = _results[num]
        extra = "" if worst is None else f"  (worst {worst!r})"
        terminalreporter.write_line(f"criterion {num:2d} {status}  {name.replace('_', ' ')}{extra}")
