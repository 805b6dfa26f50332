import itertools

import pytest
from hypothesis import strategies as st

from semdep.formula import FALSE, TRUE, And, Not, Or, Var

NAMES = ["a", "b", "c", "d", "x_1", "Y2", "(Y1,Y3,Y2)", "TRUE", 'q"t']


def py_eval(f, v):
    """Independent evaluator: compile the tree to a Python expression."""

    def emit(node):
        if node == TRUE:
            return "True"
        if node == FALSE:
            return "False"
        if isinstance(node, Var):
            return f"v[{node.name!r}]"
        if isinstance(node, Not):
            return f"(not {emit(node.child)})"
        if isinstance(node, And):
            return "(" + " and ".join(map(emit, node.children)) + ")" if node.children else "True"
        return "(" + " or ".join(map(emit, node.children)) + ")" if node.children else "False"

    return bool(eval(emit(f), {"v": v}))


def fixpoints(system):
    """All acceptable valuations, by enumeration with the independent evaluator."""
    names = system.variables
    found = []
    for bits in itertools.product((False, True), repeat=len(names)):
        v = dict(zip(names, bits))
        if all(py_eval(system.d[s], v) == v[s] for s in system.denoted):
            found.append(v)
    return found


def formulas(names=("a", "b", "c", "d"), max_leaves=12, printable=False):
    """Formula trees; ``printable`` excludes empty and singleton junctions."""
    leaves = st.sampled_from([Var(n) for n in names]) | st.sampled_from([TRUE, FALSE])
    lo = 2 if printable else 0

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=lo, max_size=4).map(And),
            st.lists(children, min_size=lo, max_size=4).map(Or),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _RESULTS.get(number, (title, "PASS"))
        status = "PASS" if report.outcome == "passed" and prev[1] == "PASS" else "FAIL"
        _RESULTS[number] = (prev[0], status)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
