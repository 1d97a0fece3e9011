from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from zetascope.lattice import SparsePolynomial

settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repro")

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"
GOLDEN = Path(__file__).resolve().parent / "golden"
CANONICAL = ("x2", "x3", "cusp", "x2_y4", "w1")


def poly(n, terms):
    """Shorthand: poly(2, {(4, 0): 1, (2, 2): 1})."""
    return SparsePolynomial(n, {e: Fraction(c) for e, c in terms.items()})


@pytest.fixture
def w1():
    return poly(2, {(4, 0): 1, (2, 2): 1, (0, 6): 1})


@pytest.fixture
def cusp():
    return poly(2, {(3, 0): 1, (0, 2): -1})


@pytest.fixture
def x2y4():
    return poly(2, {(2, 0): 1, (0, 4): 1})


def load_problem(name):
    from zetascope.pipeline import ProblemSpec

    return ProblemSpec.from_text((PROBLEMS / f"{name}.json").read_text(encoding="utf-8"))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
