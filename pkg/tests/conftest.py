import math

import pytest

from fqtorus.rootfind import real_roots
from fqtorus.suites import example1_poly, example2_poly
from fqtorus.torus_core import CompactificationMap
from fqtorus.torus_curve import kappa_hat_table, trace_components
from fqtorus.trigpoly import pullback

SQRT2 = math.sqrt(2)


@pytest.fixture(scope="session")
def map_sqrt2():
    return CompactificationMap.from_tan(SQRT2)


@pytest.fixture(scope="session")
def map_inv_sqrt2():
    return CompactificationMap.from_tan(1 / SQRT2)


@pytest.fixture(scope="session")
def ex1():
    """Example 1 at tan(theta) = sqrt 2: polynomial, map, roots on [-500, 500], components, table."""
    P = example1_poly()
    cmap = CompactificationMap.from_tan(SQRT2)
    pts = real_roots(pullback(P, cmap), -500, 500)
    comps = trace_components(P, cmap)
    return {"P": P, "map": cmap, "pts": pts, "comps": comps,
            "table": kappa_hat_table(comps, cmap, 5)}


@pytest.fixture(scope="session")
def ex2():
    """Example 2 with delta = 1/2 at tan(theta) = 1/sqrt 2."""
    P = example2_poly(0.5)
    cmap = CompactificationMap.from_tan(1 / SQRT2)
    pts = real_roots(pullback(P, cmap), -500, 500)
    comps = trace_components(P, cmap)
    return {"P": P, "map": cmap, "pts": pts, "comps": comps,
            "table": kappa_hat_table(comps, cmap, 5)}


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
