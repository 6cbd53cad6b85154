import math

import numpy as np
import pytest
from hypothesis import strategies as st

from xtele.channels import XState, make_pure_channel, make_x_state
from xtele.qmath import PureState2

REF = (0.3, 0.15, 0.05, 0.5, 0.35, 0.0)


@pytest.fixture
def ref_x():
    return make_x_state(*REF)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def x_states(draw, strict=False, min_r11=1e-3):
    """Valid canonical X-states, built so validity holds by construction.

    Populations are exactly zero or at least 1e-6: in between, sqrt of a
    round-off-level eigenvalue makes any concurrence route ill-conditioned.
    """
    w = [draw(st.just(0.0) | st.floats(1e-6, 1.0)) for _ in range(4)]
    w[0] = max(w[0], min_r11)
    w[3] = max(w[3], min_r11)
    total = sum(w)
    r11, r22, r33, r44 = (v / total for v in w)
    if r11 > r44:
        r11, r44 = r44, r11
    if strict and not r11 * r44 > r22 * r33:
        r22, r33 = r22 * 1e-3, r33 * 1e-3
        total = r11 + r22 + r33 + r44
        r11, r22, r33, r44 = (v / total for v in (r11, r22, r33, r44))
    u = draw(st.floats(0.0, 1.0))
    v = draw(st.floats(0.0, 1.0))
    return XState(r11, r22, r33, r44, u * math.sqrt(r11 * r44), v * math.sqrt(r22 * r33), strict=strict)


@st.composite
def pure_states(draw):
    t = draw(st.floats(0.0, 1.0))
    phi = draw(st.floats(0.0, 2 * math.pi))
    g = draw(st.floats(0.0, 2 * math.pi))
    return PureState2.from_angles(t, phi, g)


@st.composite
def pure_channels(draw, min_alpha=0.0):
    return make_pure_channel(draw(st.floats(min_alpha, 1 / math.sqrt(2))))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
