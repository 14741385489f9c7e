import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acmzi import metrology as mt
from acmzi.errors import (NonpositiveFisherError, NoValidGainError, UnsupportedPhaseConfigError,
                          ZeroPhotonsError, ZeroSlopeError)
from acmzi.metrology import Scheme
from acmzi.model import LOSSLESS, InterferometerConfig, LossConfig

from strategies import angle, configs, losses

FIG2 = InterferometerConfig()


def test_sql_is_independent_of_pa2_and_loss():
    s = mt.sql(FIG2)
    assert s == pytest.approx(1 / math.sqrt(1004))
    assert mt.sql(FIG2.with_g2(7.0), LossConfig(0.3, 0.2, 0.1, 0.0)) == s
    assert mt.sql(FIG2, policy="coherent_only") == pytest.approx(1 / math.sqrt(1000))


def test_sql_errors():
    with pytest.raises(ZeroPhotonsError):
        mt.sql(InterferometerConfig.from_gains(n_c=0, g1_sq=1))
    with pytest.raises(ValueError):
        mt.sql(FIG2, policy="nope")


def test_qcrb_requires_positive_fisher():
    with pytest.raises(NonpositiveFisherError):
        mt.qcrb(0.0)


def test_qfi_vacuum_term():
    cfg = InterferometerConfig.from_gains(n_c=0, g1_sq=5)
    assert mt.qfi_phase_averaged(cfg) == pytest.approx(4 * (4 * 0.25 * 5 + 4 * 0.25))


def test_fisher_report_ordering():
    r = mt.fisher_report(FIG2)
    assert r.f_pure > r.f_averaged and r.qcrb == pytest.approx(1 / math.sqrt(9024))


def test_closed_forms_refuse_other_pa_phases():
    cfg = InterferometerConfig.from_gains(theta1=0.3)
    with pytest.raises(UnsupportedPhaseConfigError):
        mt.hd_variance(cfg, LOSSLESS, 1.0)
    # the engine path still works
    assert math.isfinite(mt.engine_sensitivity(cfg, LOSSLESS, 3.0).delta_phi)


def test_homodyne_zero_slope_raises_in_report():
    with pytest.raises(ZeroSlopeError):
        mt.hd_sensitivity(FIG2, LOSSLESS, math.pi / 2)
    assert mt.delta_phi(FIG2, LOSSLESS, math.pi / 2, Scheme.HOMODYNE) == math.inf


def test_intensity_zero_slope_at_pi():
    assert mt.delta_phi(FIG2, LOSSLESS, math.pi, Scheme.INTENSITY) == math.inf


def test_balanced_homodyne_optimum():
    assert mt.hd_optimum_lossless(FIG2) == pytest.approx(1 / math.sqrt(5000), rel=1e-14)


def test_optimal_gain_lossless():
    ratio, G2 = mt.hd_optimal_gain(FIG2)
    assert ratio == pytest.approx(4 * math.sqrt(5) / 9)
    assert G2 ** 2 == pytest.approx(81)


def test_no_valid_gain_when_pa1_is_lossy():
    # heavy loss before PA2's idler port pushes the optimal g2/G2 above 1
    with pytest.raises(NoValidGainError):
        mt.hd_optimal_gain(FIG2, LossConfig(eta_a=0.1))


def test_intensity_lossless_limit_terms():
    I, _, K, _ = mt.id_lossless_terms(FIG2, math.pi)
    assert mt.id_balanced_limit(FIG2) == pytest.approx(math.sqrt(K / I))
    # the limit sits below the homodyne optimum and above the QCRB
    assert mt.qcrb(9024) < mt.id_balanced_limit(FIG2) < mt.hd_optimum_lossless(FIG2)


@settings(max_examples=40, deadline=None)
@given(configs(), st.floats(0.05, 2 * math.pi - 0.05))
def test_lossless_forms_agree_with_general_forms(cfg, phi):
    for scheme, f in ((Scheme.HOMODYNE, mt.hd_delta_phi_lossless),
                      (Scheme.INTENSITY, mt.id_delta_phi_lossless)):
        a = float(mt.delta_phi(cfg, LOSSLESS, phi, scheme))
        b = float(f(cfg, phi))
        if math.isfinite(a) and a < 1e6:
            assert b == pytest.approx(a, rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(configs(), losses(), angle)
def test_slope_and_variance_match_engine(cfg, loss, phi):
    for scheme in Scheme:
        amp = abs(mt.slope_amplitude(cfg, loss, scheme))
        s_e = mt.engine_slope(cfg, loss, phi, scheme)
        mean_e, var_e = mt.engine_observable(cfg, loss, phi, scheme)
        # absolute floor covers slopes that vanish identically
        tol = 1e-6 * amp + 1e-9 * max(1.0, abs(mean_e))
        assert abs(float(mt.slope(cfg, loss, phi, scheme)) - s_e) <= tol
        assert float(mt.variance(cfg, loss, phi, scheme)) == pytest.approx(var_e, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(configs(), losses())
def test_sensitivity_never_beats_qcrb_lossless(cfg, loss):
    q = mt.qcrb(mt.qfi_phase_averaged(cfg))
    phi = np.linspace(0.01, 2 * math.pi - 0.01, 301)
    for scheme in Scheme:
        d = mt.delta_phi(cfg, LOSSLESS, phi, scheme)
        assert np.min(d) >= q * (1 - 1e-9)


def test_vectorized_delta_phi_shape():
    d = mt.delta_phi(FIG2, LOSSLESS, np.linspace(2.8, 3.5, 11), Scheme.INTENSITY)
    assert d.shape == (11,)
