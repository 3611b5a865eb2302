import pytest

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    _, outcomes = _criteria.setdefault(number, (title, []))
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        outcomes.append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  #{number:<2} {title}")
