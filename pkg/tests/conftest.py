import random

import pytest
from hypothesis import strategies as st

from gridlag.corpus import load_grid, read_text
from gridlag.grid import GridDiagram


def random_grid(n, rng):
    while True:
        xs = rng.sample(range(n), n)
        os_ = rng.sample(range(n), n)
        if all(a != b for a, b in zip(xs, os_)):
            return GridDiagram.from_zero_based(xs, os_)


@st.composite
def grids(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    xs = draw(st.permutations(range(n)))
    os_ = draw(st.permutations(range(n)))
    # on a shared square fall back to O = X shifted by a nonzero amount
    shift = draw(st.integers(1, n - 1))
    if any(a == b for a, b in zip(xs, os_)):
        os_ = [(xs[c] + shift) % n for c in range(n)]
    return GridDiagram.from_zero_based(xs, os_)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def unknot():
    return load_grid("unknot_2x2")


@pytest.fixture
def corpus_text():
    return read_text


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(k, title): acceptance criterion k")


def pytest_runtest_logreport(report):
    mark = getattr(report, "acceptance", None)
    if mark is None:
        return
    k, title = mark
    if report.when == "call" or report.outcome != "passed":
        prev = _ACCEPTANCE.get(k, (title, "PASS"))[1]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        if report.outcome == "skipped":
            status = "SKIP"
        _ACCEPTANCE[k] = (title, status)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        report.acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {title}")
