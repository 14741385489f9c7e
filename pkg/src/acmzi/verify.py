"""Residual suites comparing closed forms with the Gaussian network and Fock oracles.

Each suite returns ``Residual`` rows; a row passes when its value is at or
below its tolerance.  The CLI ``verify`` command and the test-suite both
run these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from . import gaussian as ge
from . import metrology as mt
from .model import (InterferometerConfig, LossConfig, coefficient_arrays,
                    coefficients_lossless, coefficients_lossy)
from .metrology import Scheme

COEFF_TOL = 1e-12
COMMUTATOR_TOL = 1e-10
SLOPE_RTOL = 1e-6
VARIANCE_RTOL = 1e-8
QFI_ENGINE_RTOL = 1e-10
QFI_FOCK_TOL = 1e-5
QFI_AVG_FOCK_TOL = 1e-4
LIMIT_TOL = 1e-12


@dataclass(frozen=True)
class Residual:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def random_config(rng: np.random.Generator, standard_phases=False) -> InterferometerConfig:
    g1_sq, g2_sq = rng.uniform(1.0, 10.0, size=2)
    th1, th2 = (0.0, math.pi) if standard_phases else rng.uniform(0, 2 * math.pi, size=2)
    return InterferometerConfig.from_gains(n_c=rng.uniform(0.0, 2000.0), g1_sq=g1_sq, g2_sq=g2_sq,
                                           theta1=th1, theta2=th2, bs_t=rng.uniform(0.05, 0.95))


def random_loss(rng: np.random.Generator) -> LossConfig:
    return LossConfig(*rng.uniform(0.0, 1.0, size=4))


def sample_points(n: int, seed: int, standard_phases=False, lossless_share=0.1):
    """``n`` reproducible (cfg, loss, phi) triples; a share of them lossless."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        cfg = random_config(rng, standard_phases)
        loss = LossConfig() if rng.random() < lossless_share else random_loss(rng)
        out.append((cfg, loss, float(rng.uniform(0, 2 * math.pi))))
    return out


# ---------------------------------------------------------------------------
# suites

def coefficient_suite(n=200, seed=0):
    """Network rows against the closed-form coefficients, plus commutators."""
    err = comm = 0.0
    for cfg, loss, phi in sample_points(n, seed):
        tn, mn = ge.network_coefficients(ge.build_acmzi_network(cfg, loss, phi))
        c = coefficients_lossless(cfg, phi) if loss.is_lossless else coefficients_lossy(cfg, loss, phi)
        err = max(err, np.max(np.abs(tn - c.t)), np.max(np.abs(mn - c.m)))
        comm = max(comm, abs(c.commutator_a2() - 1), abs(c.commutator_b3() - 1))
    return [Residual("coefficients_abs", float(err), COEFF_TOL),
            Residual("commutators_abs", float(comm), COMMUTATOR_TOL)]


def slope_variance_suite(n=200, seed=1):
    """Closed-form slopes/variances against engine finite differences/moments.

    Slope residuals are relative to the slope's sinusoid amplitude so points
    near a zero of the slope are not penalized for absolute round-off.
    """
    res = {(s, k): 0.0 for s in Scheme for k in ("slope", "variance")}
    for cfg, loss, phi in sample_points(n, seed, standard_phases=True):
        for scheme in Scheme:
            s = float(mt.slope(cfg, loss, phi, scheme))
            v = float(mt.variance(cfg, loss, phi, scheme))
            amp = abs(mt.slope_amplitude(cfg, loss, scheme))
            s_e = mt.engine_slope(cfg, loss, phi, scheme)
            v_e = mt.engine_observable(cfg, loss, phi, scheme)[1]
            if amp > 0:
                res[scheme, "slope"] = max(res[scheme, "slope"], abs(s - s_e) / amp)
            res[scheme, "variance"] = max(res[scheme, "variance"], abs(v - v_e) / abs(v_e))
    return [Residual(f"{s.value}_{k}_rel", float(v), SLOPE_RTOL if k == "slope" else VARIANCE_RTOL)
            for (s, k), v in res.items()]


def qfi_suite():
    """QFI closed forms against engine moments and the dense Fock oracle."""
    out = []
    cfg = InterferometerConfig()
    net = ge.build_probe_network(cfg)
    mom = ge.propagate_moments(net, ge.acmzi_input(cfg, net.n_modes))
    var_c = ge.observable_stats(mom, ge.PhotonNumber((ge.MODE_C,)))[1]
    f = mt.qfi_pure(cfg)
    out.append(Residual("qfi_pure_engine_rel", abs(4 * var_c - f) / f, QFI_ENGINE_RTOL))

    small = InterferometerConfig.from_gains(n_c=1.0, g1_sq=1.25)
    st = fock.prepare_probe(small.alpha, small.g1_gain, small.g1_small, small.theta1,
                            small.bs_t, small.bs_r, cutoff=14)
    out.append(Residual("qfi_pure_fock_abs", abs(fock.qfi_of_state(st) - mt.qfi_pure(small)),
                        QFI_FOCK_TOL))
    fa = fock.qfi_phase_averaged_oracle(small.n_c, small.g1_gain, small.g1_small,
                                        small.bs_t, small.bs_r, cutoff=20)
    ref = mt.qfi_phase_averaged(small)
    out.append(Residual("qfi_averaged_fock_rel", abs(fa - ref) / ref, QFI_AVG_FOCK_TOL))
    return out


def lossless_limit_suite(n=50, seed=2):
    """General-loss optimal gain ratio at unit transmission against the lossless form."""
    rng = np.random.default_rng(seed)
    err = 0.0
    for g1_sq in rng.uniform(1.0, 20.0, size=n):
        cfg = InterferometerConfig.from_gains(g1_sq=g1_sq)
        err = max(err, abs(mt.hd_optimal_gain_ratio(cfg, LossConfig())
                           - mt.hd_optimal_gain_ratio_lossless(cfg)))
    return [Residual("optimal_gain_lossless_abs", float(err), LIMIT_TOL)]


def broadcast_suite(n=64, seed=3):
    """Vectorized coefficients against scalar evaluation."""
    rng = np.random.default_rng(seed)
    cfg, loss = random_config(rng), random_loss(rng)
    phis = rng.uniform(0, 2 * math.pi, size=n)
    t, m = coefficient_arrays(cfg, loss, phis)
    err = max(max(np.max(np.abs(t[:, k] - c.t)), np.max(np.abs(m[:, k] - c.m)))
              for k, c in enumerate(coefficients_lossy(cfg, loss, p) for p in phis))
    return [Residual("coefficients_broadcast_abs", float(err), COEFF_TOL)]


def run_all(n_points=200, seed=0, tolerance_scale=1.0):
    """Every suite; ``tolerance_scale`` multiplies all tolerances."""
    rows = (coefficient_suite(n_points, seed) + slope_variance_suite(n_points, seed + 1)
            + qfi_suite() + lossless_limit_suite(seed=seed + 2) + broadcast_suite(seed=seed + 3))
    return [Residual(r.name, r.value, r.tolerance * tolerance_scale) for r in rows]
