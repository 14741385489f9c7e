import math

import numpy as np
import pytest

from acmzi import fock
from acmzi import gaussian as ge
from acmzi import metrology as mt
from acmzi.errors import TruncationOverflowError, UnnormalizedStateError
from acmzi.model import InterferometerConfig

SMALL = InterferometerConfig.from_gains(n_c=1.0, g1_sq=1.25)


def _probe(cfg, cutoff=14, **kw):
    return fock.prepare_probe(cfg.alpha, cfg.g1_gain, cfg.g1_small, cfg.theta1, cfg.bs_t,
                              cfg.bs_r, cutoff=cutoff, **kw)


def test_vacuum_stays_vacuum():
    st = fock.prepare_probe(0.0, 1.0, 0.0, 0.0, 0.5, 0.5, cutoff=6)
    assert abs(st.amplitudes[0, 0, 0]) == pytest.approx(1.0)


def test_coherent_split():
    st = fock.prepare_probe(1.0, 1.0, 0.0, 0.0, 0.5, 0.5, cutoff=14)
    assert st.mean_photons(2) == pytest.approx(0.5, abs=1e-8)
    assert st.mean_photons(1) == pytest.approx(0.5, abs=1e-8)


def test_coherent_qfi_is_four_mu():
    st = fock.prepare_probe(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, cutoff=14)
    assert fock.qfi_of_state(st) == pytest.approx(4.0, abs=1e-6)


def test_fock_state_has_no_qfi():
    assert fock.qfi_of_state(fock.DenseState.basis(0, 0, 3, 6)) == 0.0


def test_unnormalized_state_rejected():
    st = fock.DenseState(4, 2 * fock.DenseState.basis(0, 0, 1, 4).amplitudes)
    with pytest.raises(UnnormalizedStateError):
        fock.qfi_of_state(st)


def test_truncation_guards():
    with pytest.raises(TruncationOverflowError):
        fock.prepare_probe(3.0, 1.0, 0.0, 0.0, 0.5, 0.5, cutoff=14)
    with pytest.raises(TruncationOverflowError):
        fock.qfi_phase_averaged_oracle(0.0, math.sqrt(5), 2.0, 0.5, 0.5, cutoff=12)


def test_moments_match_gaussian_engine():
    st = _probe(SMALL)
    net = ge.build_probe_network(SMALL)
    mom = ge.propagate_moments(net, ge.acmzi_input(SMALL, net.n_modes))
    for dense_mode, mode in ((0, ge.MODE_A), (2, ge.MODE_C), (1, ge.MODE_D)):
        mean, var = ge.observable_stats(mom, ge.PhotonNumber((mode,)))
        assert st.mean_photons(dense_mode) == pytest.approx(mean, abs=1e-6)
        assert st.photon_variance(dense_mode) == pytest.approx(var, abs=1e-6)


def test_qfi_converges_with_cutoff():
    ref = mt.qfi_pure(SMALL)
    res = [abs(fock.qfi_of_state(_probe(SMALL, c, leakage_tol=1e-4)) - ref) for c in (10, 14, 18)]
    assert res[0] > res[1] > res[2]
    assert res[1] < 1e-5


def test_phase_averaged_oracle_examples():
    assert fock.qfi_phase_averaged_oracle(1.0, 1.0, 0.0, 0.5, 0.5, cutoff=16) == pytest.approx(1.0, abs=1e-6)
    vac = fock.qfi_phase_averaged_oracle(0.0, SMALL.g1_gain, SMALL.g1_small, 0.5, 0.5, cutoff=14)
    assert vac == pytest.approx(0.25 * (4 * 0.25 * 1.25 + 4 * 0.25), rel=1e-6)
    full = fock.qfi_phase_averaged_oracle(1.0, SMALL.g1_gain, SMALL.g1_small, 0.5, 0.5, cutoff=20)
    assert full == pytest.approx(mt.qfi_phase_averaged(SMALL), rel=1e-4)


def test_norm_preserved():
    assert _probe(SMALL).norm == pytest.approx(1.0, abs=1e-10)
    assert np.isclose(fock.DenseState.basis(1, 2, 3, 5).norm, 1.0)
