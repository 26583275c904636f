import pytest

from recforge.seqcore import named_spec, spec_from_e

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []

CORPUS_E = [
    (0, -1, 1),  # perrin
    (1, -1),  # lucas
    (2, -1),
    (1, -1, 0, -1, 0, 0, 4),
    (1, -2),
    (2, -2),
    (0, 2, -2),
    (1, -2, 1),
    (3,),
    (-2,),
    (5, -3, 2, -1),
    (-4, 0, 0, 0, 1),
]


@pytest.fixture(scope="session")
def perrin():
    return named_spec("perrin")


@pytest.fixture(scope="session")
def pell():
    return named_spec("pell")


@pytest.fixture(scope="session")
def dbz():
    return named_spec("dbz")


@pytest.fixture(scope="session")
def corpus():
    return [spec_from_e(e) for e in CORPUS_E]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
