import itertools
import random
from pathlib import Path

import pytest

from surfcount.counting import load_lw
from surfcount.triangulation import Triangulation, TriangulationError, invert, load_triangulation

DATA = Path(__file__).parent / "data"
FIGURE_EIGHT = "cPcbbbiht"
K13N585 = "nvLAAvAPQkcdfgfhkmjlmklmwcadtfaaoaedrg"
LW_FIXTURES = sorted(p.name for p in DATA.glob("*.lw"))

PERMS = list(itertools.permutations(range(4)))


def random_triangulation(rng: random.Random, size: int) -> Triangulation:
    """All faces glued in random pairs with random permutations; may be invalid."""
    while True:
        faces = [(t, f) for t in range(size) for f in range(4)]
        rng.shuffle(faces)
        table = [[None] * 4 for _ in range(size)]
        for (t, f), (u, g) in zip(faces[::2], faces[1::2]):
            p = rng.choice([q for q in PERMS if q[f] == g])
            table[t][f] = (u, p)
            table[u][g] = (t, invert(p))
        try:
            return Triangulation(size, tuple(tuple(r) for r in table))
        except TriangulationError:
            continue


@pytest.fixture(scope="session")
def fig8():
    return load_triangulation(FIGURE_EIGHT)


@pytest.fixture(scope="session")
def k13():
    return load_triangulation(K13N585)


@pytest.fixture(scope="session")
def lw_k13():
    return load_lw(DATA / "k13n585.lw")


@pytest.fixture(scope="session")
def lw_gcd():
    return load_lw(DATA / "edge_gcd.lw")


@pytest.fixture(scope="session")
def lw_disjoint():
    return load_lw(DATA / "edge_disjoint.lw")


# ---------------------------------------------------------------------------
# acceptance criteria report: one line per criterion at the end of the run

CRITERIA: dict[int, tuple[str, list[str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when == "teardown" and report.passed:
        return
    number, title = mark.args
    _, states = CRITERIA.setdefault(number, (title, []))
    if report.when == "call" or report.failed or report.skipped:
        states.append("skipped" if report.skipped else "passed" if report.passed else "failed")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, states = CRITERIA[number]
        ok = states and all(s == "passed" for s in states)
        verdict = "PASS" if ok else "FAIL" if "failed" in states else "SKIP"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
