import numpy as np
import pytest
from hypothesis import strategies as st

from bevdep.extremal import AngularCoefficients, eta_to_beta
from bevdep.prior import draw_eta


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_eta(k, rng):
    return AngularCoefficients(draw_eta(k, rng.random(k).tolist()))


@st.composite
def angular_coefficients(draw, k_min=3, k_max=20):
    k = draw(st.integers(k_min, k_max))
    u = draw(st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=k, max_size=k))
    return AngularCoefficients(draw_eta(k, u))


@st.composite
def pickands_coefficients(draw, k_min=3, k_max=20):
    return eta_to_beta(draw(angular_coefficients(k_min, k_max)))


ACCEPTANCE_RESULTS = {}


def record(number, ok, detail):
    ACCEPTANCE_RESULTS[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
