import functools
from pathlib import Path

import pytest

from hpsys import AlgebraicCurve, GermSpec, GermTuple, germ_of_expression
from hpsys.polynomial import load_curve_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

POLE1 = GermSpec(pole_order=1, leading=1)

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def curve(name: str) -> AlgebraicCurve:
    return load_curve_file(FIXTURES / f"{name}.json")[0]


@functools.lru_cache(maxsize=None)
def power_germs(name: str, order: int = 100) -> GermTuple:
    """[f, ..., f^m] for f = 1/w on the branch w ~ z."""
    c = curve(name)
    f = germ_of_expression(c, POLE1, "1/w", order)
    return GermTuple.power_tuple(f, c.m)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sqrt_curve():
    return curve("sqrt")


@pytest.fixture(scope="session")
def cubic_curve():
    return curve("cubic")


def load_fixture(name: str):
    return load_curve_file(FIXTURES / f"{name}.json")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
