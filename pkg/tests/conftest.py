import pytest

from oracles import all_pairs_bfs

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def bfs12():
    return all_pairs_bfs(12)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        status = "PASS" if ok else ("INFO" if ok is None else "FAIL")
        terminalreporter.write_line(f"[{status}] {name}: {detail}")
