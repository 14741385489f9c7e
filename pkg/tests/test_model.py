import math

import numpy as np
import pytest
from hypothesis import given, settings

from acmzi.errors import InvalidConfigError, InvalidLossError
from acmzi.model import (LOSSLESS, InterferometerConfig, LossConfig, coefficient_arrays,
                         coefficients_lossless, coefficients_lossy)

from strategies import angle, configs, losses


def test_defaults_are_balanced_fig2_point():
    cfg = InterferometerConfig()
    assert cfg.n_c == 1000 and cfg.g1_gain ** 2 == pytest.approx(5)
    assert cfg.gain_ratio == 1.0 and cfg.alpha == pytest.approx(math.sqrt(1000))


@pytest.mark.parametrize("kwargs", [
    dict(g1_gain=2.0, g1_small=2.0),
    dict(g2_gain=0.5, g2_small=0.0),
    dict(bs_t=0.6, bs_r=0.6),
    dict(n_c=-1.0),
    dict(n_c=float("nan")),
])
def test_invalid_config_rejected(kwargs):
    with pytest.raises(InvalidConfigError):
        InterferometerConfig(**kwargs)


@pytest.mark.parametrize("eta", [-0.1, 1.2, float("nan")])
def test_invalid_loss_rejected(eta):
    with pytest.raises(InvalidLossError):
        LossConfig(eta_c=eta)


def test_with_g2_keeps_gain_relation():
    c = InterferometerConfig().with_g2(9.0)
    assert c.g2_gain ** 2 - c.g2_small ** 2 == pytest.approx(1.0)
    assert c.balanced().g2_gain == c.g1_gain


def test_g1_zero_squeezing_reduces_to_plain_mzi():
    c = InterferometerConfig.from_gains(g1_sq=1.0, g2_sq=1.0)
    co = coefficients_lossless(c, 0.3)
    # no squeezing: a2 = a0, b3 is the MZI output of the c port only
    assert co.t[0] == pytest.approx(1.0)
    assert np.abs(co.t[1:]).max() == pytest.approx(0.0)


def test_lossless_entries_vanish_in_lossy_form():
    cfg = InterferometerConfig.from_gains(g2_sq=20.0)
    a = coefficients_lossless(cfg, 2.0)
    b = coefficients_lossy(cfg, LOSSLESS, 2.0)
    np.testing.assert_allclose(b.t, a.t, atol=1e-13)
    np.testing.assert_allclose(b.m, a.m, atol=1e-13)
    assert np.all(b.t[3:] == 0) and np.all(b.m[3:] == 0)


@settings(max_examples=60, deadline=None)
@given(configs(standard_phases=False), losses(), angle)
def test_commutators_are_one(cfg, loss, phi):
    c = coefficients_lossy(cfg, loss, phi)
    assert c.commutator_a2() == pytest.approx(1.0, abs=1e-9)
    assert c.commutator_b3() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(configs(standard_phases=False), losses())
def test_coefficients_are_2pi_periodic(cfg, loss):
    t0, m0 = coefficient_arrays(cfg, loss, 0.7)
    t1, m1 = coefficient_arrays(cfg, loss, 0.7 + 2 * math.pi)
    np.testing.assert_allclose(t0, t1, atol=1e-12)
    np.testing.assert_allclose(m0, m1, atol=1e-12)


def test_coefficient_arrays_broadcast_shape():
    t, m = coefficient_arrays(InterferometerConfig(), LossConfig(0.9, 0.8, 0.7, 0.6),
                              np.zeros((3, 4)))
    assert t.shape == m.shape == (7, 3, 4)


def test_lossy_requires_loss_config():
    with pytest.raises(InvalidLossError):
        coefficients_lossy(InterferometerConfig(), (1, 1, 1, 1), 0.0)
