import pytest

from mkdbp.core import Task, TaskSet

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture
def table1_tasks():
    return (Task("tau1", 4, 1, 4, 2, 4), Task("tau2", 10, 8, 10, 3, 4))


@pytest.fixture
def table1(table1_tasks):
    return TaskSet.build(table1_tasks)


@pytest.fixture
def table2_k3():
    return TaskSet.build(
        (Task("tau1", 3, 2, 3, 1, 3), Task("tau2", 3, 2, 3, 1, 3)), tiebreak="index"
    )


@pytest.fixture
def table2_printed():
    return TaskSet.build(
        (Task("tau1", 3, 2, 3, 1, 3), Task("tau2", 3, 2, 3, 1, 4)), tiebreak="index"
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line("%s %s" % (ACCEPTANCE_RESULTS[name], name))
