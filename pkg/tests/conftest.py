import math

import pytest
from hypothesis import strategies as st

from curveswarm.embedding import CurveFamily, CurveSpec

SQ2 = math.sqrt(2.0) / 2.0

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
angles = st.floats(min_value=-4 * math.pi, max_value=4 * math.pi, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite)


@st.composite
def unit_quaternions(draw):
    q = draw(st.tuples(finite, finite, finite, finite).filter(lambda c: sum(x * x for x in c) > 1e-3))
    n = math.sqrt(sum(x * x for x in q))
    return tuple(x / n for x in q)


@pytest.fixture(params=[CurveFamily.CIRCLE, CurveFamily.GERONO, CurveFamily.DUMBBELL], ids=lambda f: f.value)
def any_spec(request):
    return CurveSpec(request.param, 1.5)


@pytest.fixture
def dumbbell():
    return CurveSpec(CurveFamily.DUMBBELL, 1.5)


@pytest.fixture
def circle():
    return CurveSpec(CurveFamily.CIRCLE, 1.5)


# acceptance lines are echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
