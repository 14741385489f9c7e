"""Shared hypothesis strategies."""

import math

from hypothesis import strategies as st

from acmzi.model import InterferometerConfig, LossConfig

unit = st.floats(0.0, 1.0)
angle = st.floats(0.0, 2 * math.pi)
gain_sq = st.floats(1.0, 12.0)


@st.composite
def configs(draw, standard_phases=True):
    th1, th2 = (0.0, math.pi) if standard_phases else (draw(angle), draw(angle))
    return InterferometerConfig.from_gains(
        n_c=draw(st.floats(1.0, 3000.0)), g1_sq=draw(gain_sq), g2_sq=draw(gain_sq),
        theta1=th1, theta2=th2, bs_t=draw(st.floats(0.05, 0.95)))


@st.composite
def losses(draw):
    return LossConfig(draw(unit), draw(unit), draw(unit), draw(unit))
