import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ptower.audit import default_spec, load_fixture  # noqa: E402
from ptower.pga import immediate_descendants  # noqa: E402
from ptower.search import run_search  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def g5a():
    return load_fixture("g5a.pcp")


@pytest.fixture(scope="session")
def g5b():
    return load_fixture("g5b.pcp")


@pytest.fixture(scope="session")
def g1():
    return load_fixture("g1.pcp")


@pytest.fixture(scope="session")
def g2():
    return load_fixture("g2.pcp")


@pytest.fixture(scope="session")
def c3():
    return load_fixture("c3.pcp")


@pytest.fixture(scope="session")
def spec():
    return default_spec()


@pytest.fixture(scope="session")
def report(spec):
    """The audited search for the [3,3] target (every rule on every node)."""
    return run_search(spec, audit=True)


@pytest.fixture(scope="session")
def chain(g5a):
    """Class-c quotients G_1..G_5 of the first final presentation."""
    out = []
    for c in range(1, 6):
        m = sum(1 for w in g5a.weights if w <= c)
        out.append(g5a.truncate(m))
    return out


@pytest.fixture(scope="session")
def small_groups(g1):
    """One presentation per 2-generator 3-group of order <= 3^5 (from the descendant tree)."""
    out = [g1]
    frontier = [g1]
    while frontier:
        nxt = []
        for G in frontier:
            if G.order * 3 > 3 ** 5:
                continue
            for D in immediate_descendants(G):
                if D.order <= 3 ** 5:
                    out.append(D)
                    nxt.append(D)
        frontier = nxt
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
