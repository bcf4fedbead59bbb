import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    prev = _RESULTS.get((n, item.name))
    if prev is None or rep.failed:
        _RESULTS[(n, item.name)] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (n, name), (title, ok, detail) in sorted(_RESULTS.items()):
        line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title} ({name})"
        if detail:
            line += f": {detail}"
        tr.write_line(line)
