"""Fisher-information bounds and detection sensitivities of the ACMZI.

Homodyne detection (HD) reads the quadrature Y = i(b3^+ - b3); intensity
detection (ID) reads n32 = a2^+ a2 + b3^+ b3.  The closed-form slopes and
variances assume theta1 = 0 and theta2 = pi; other PA phases go through
:func:`engine_sensitivity`, which evaluates the same observables on the
Gaussian network.

Slope/variance functions broadcast over ``phi``.  Sensitivities follow from
error propagation, delta_phi = sqrt(variance) / |slope|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import gaussian as ge
from .errors import (NoValidGainError, NonpositiveFisherError,
                     UnsupportedPhaseConfigError, ZeroPhotonsError, ZeroSlopeError)
from .model import (ANNIHILATION_IDX, CREATION_IDX, InterferometerConfig, LossConfig,
                    coefficient_arrays)

LOSSLESS = LossConfig()
# |slope| below this fraction of its sinusoid amplitude counts as zero
SLOPE_ZERO_RTOL = 1e-13


class Scheme(str, Enum):
    HOMODYNE = "homodyne"
    INTENSITY = "intensity"


@dataclass(frozen=True)
class SensitivityReport:
    scheme: Scheme
    phi: float
    delta_phi: float
    slope: float
    variance: float
    beats_sql: bool
    sql_value: float
    qcrb_value: float


@dataclass(frozen=True)
class FisherReport:
    f_pure: float
    f_averaged: float
    qcrb: float


# ---------------------------------------------------------------------------
# Bounds

def qfi_pure(cfg: InterferometerConfig) -> float:
    """QFI of the pure probe state for a phase on the c arm."""
    T, R = cfg.bs_t, cfg.bs_r
    G1sq, g1sq = cfg.g1_gain ** 2, cfg.g1_small ** 2
    return cfg.n_c * (4 * T * T + 4 * T * R * (G1sq + g1sq)) + g1sq * (4 * R * R * G1sq + 4 * T * R)


def qfi_phase_averaged(cfg: InterferometerConfig) -> float:
    """QFI after averaging a common phase over all inputs (no external reference)."""
    T, R = cfg.bs_t, cfg.bs_r
    G1sq, g1sq = cfg.g1_gain ** 2, cfg.g1_small ** 2
    return 4 * cfg.n_c * T * R * (G1sq + g1sq) + g1sq * (4 * R * R * G1sq + 4 * T * R)


def qcrb(f: float) -> float:
    if not f > 0:
        raise NonpositiveFisherError(f"Fisher information must be positive, got {f}")
    return 1.0 / math.sqrt(f)


def fisher_report(cfg: InterferometerConfig) -> FisherReport:
    fa = qfi_phase_averaged(cfg)
    return FisherReport(f_pure=qfi_pure(cfg), f_averaged=fa, qcrb=qcrb(fa))


def photons_inside(cfg: InterferometerConfig) -> float:
    """Mean photon number in the two MZI arms right after BS1 (engine moments)."""
    net = ge.build_probe_network(cfg)
    mom = ge.propagate_moments(net, ge.acmzi_input(cfg, net.n_modes))
    return float(mom.photon_matrix[ge.MODE_C, ge.MODE_C].real
                 + mom.photon_matrix[ge.MODE_D, ge.MODE_D].real)


SQL_POLICIES = ("photons_inside", "coherent_only")


def sql(cfg: InterferometerConfig, loss: LossConfig | None = None,
        policy: str = "photons_inside") -> float:
    """Shot-noise phase scale 1/sqrt(N).

    ``photons_inside`` counts N_c + g1^2 photons in the arms before any internal
    loss, so the value depends on neither PA2 nor the transmission rates;
    ``coherent_only`` uses N_c alone.  ``loss`` is accepted for symmetry with
    the sensitivity functions.
    """
    if policy == "photons_inside":
        n = photons_inside(cfg)
    elif policy == "coherent_only":
        n = cfg.n_c
    else:
        raise ValueError(f"unknown SQL policy {policy!r}; choose from {SQL_POLICIES}")
    if n <= 0:
        raise ZeroPhotonsError("no photons inside the interferometer")
    return 1.0 / math.sqrt(n)


# ---------------------------------------------------------------------------
# Detection formulas

def _require_standard_phases(cfg):
    t1 = math.remainder(cfg.theta1, 2 * math.pi)
    t2 = math.remainder(cfg.theta2 - math.pi, 2 * math.pi)
    if abs(t1) > 1e-12 or abs(t2) > 1e-12:
        raise UnsupportedPhaseConfigError(
            "closed forms need theta1 = 0, theta2 = pi; use engine_sensitivity instead")


def hd_slope_amplitude(cfg, loss=LOSSLESS) -> float:
    return (2 * cfg.alpha * math.sqrt(cfg.bs_t * cfg.bs_r) * cfg.g2_gain
            * math.sqrt(loss.eta_b * loss.eta_c))


def hd_slope(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS, phi=0.0):
    """d<Y>/dphi."""
    _require_standard_phases(cfg)
    return hd_slope_amplitude(cfg, loss) * np.cos(phi)


def hd_variance(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS, phi=0.0):
    """Quadrature noise <Delta^2 Y> on b3."""
    _require_standard_phases(cfg)
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R = cfg.bs_t, cfg.bs_r
    ea, eb, ec, ed = loss.as_tuple()
    return (2 * ea * G1 ** 2 * g2 ** 2
            + 2 * T ** 2 * G2 ** 2 * g1 ** 2 * eb * ed
            + 2 * R ** 2 * G2 ** 2 * g1 ** 2 * eb * ec
            + 4 * (G1 * math.sqrt(ea) * g2 - T * G2 * g1 * math.sqrt(eb * ed))
            * (R * G2 * g1 * math.sqrt(eb * ec)) * np.cos(phi)
            + 2 * g2 ** 2 * (1 - ea)
            - 4 * T * G1 * G2 * g1 * g2 * math.sqrt(eb * ed * ea)
            + 1.0)


def id_slope_amplitude(cfg, loss=LOSSLESS) -> float:
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R = cfg.bs_t, cfg.bs_r
    ea, eb, ec, ed = loss.as_tuple()
    return (2 * T * R * eb * math.sqrt(ed * ec) * (G2 ** 2 + g2 ** 2) * (cfg.n_c - g1 ** 2)
            + 4 * R * G2 * G1 * g2 * g1 * math.sqrt(ea * eb * ec))


def id_slope(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS, phi=0.0):
    """d<n32>/dphi.

    The sign is that of the true derivative, which is negative for
    0 < phi < pi with the phase convention of the coefficient set.
    """
    _require_standard_phases(cfg)
    return -id_slope_amplitude(cfg, loss) * np.sin(phi)


def _h_products(t, m):
    """H_i H_j^* = T_i T_j^* + M_i M_j^*, indexed [i, j, ...]."""
    return t[:, None] * np.conj(t[None, :]) + m[:, None] * np.conj(m[None, :])


def id_variance(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS, phi=0.0):
    """Photon-number noise <Delta^2 n32> from the coefficient products.

    With ann = {a0, va} (annihilators in a2) and cre the remaining inputs,

        Var = N_c [sum_{j in cre} |H_3 H_j^*|^2 + sum_{i in ann} |H_i H_3^*|^2]
              + sum_{i in ann, j in cre} |H_i H_j^*|^2.

    Valid for any PA phases.
    """
    t, m = coefficient_arrays(cfg, loss, phi)
    h2 = np.abs(_h_products(t, m)) ** 2
    ann, cre = list(ANNIHILATION_IDX), list(CREATION_IDX)
    coherent = h2[2, cre].sum(axis=0) + h2[ann, 2].sum(axis=0)
    vacuum = h2[np.ix_(ann, cre)].sum(axis=(0, 1))
    return cfg.n_c * coherent + vacuum


def slope(cfg, loss, phi, scheme):
    return hd_slope(cfg, loss, phi) if Scheme(scheme) is Scheme.HOMODYNE else id_slope(cfg, loss, phi)


def variance(cfg, loss, phi, scheme):
    return (hd_variance(cfg, loss, phi) if Scheme(scheme) is Scheme.HOMODYNE
            else id_variance(cfg, loss, phi))


def slope_amplitude(cfg, loss, scheme):
    return (hd_slope_amplitude(cfg, loss) if Scheme(scheme) is Scheme.HOMODYNE
            else id_slope_amplitude(cfg, loss))


def delta_phi(cfg: InterferometerConfig, loss: LossConfig, phi, scheme) -> np.ndarray:
    """Vectorized sensitivity; ``inf`` marks divergent points (vanishing slope)."""
    s = np.asarray(slope(cfg, loss, phi, scheme), dtype=float)
    v = np.asarray(variance(cfg, loss, phi, scheme), dtype=float)
    amp = abs(slope_amplitude(cfg, loss, scheme))
    out = np.full(np.broadcast(s, v).shape, np.inf)
    ok = np.abs(s) > SLOPE_ZERO_RTOL * amp
    np.divide(np.sqrt(np.maximum(v, 0.0)), np.abs(s), out=out, where=ok)
    return out


def _report(cfg, loss, phi, scheme, sql_policy="photons_inside") -> SensitivityReport:
    phi = float(phi)
    s = float(slope(cfg, loss, phi, scheme))
    v = float(variance(cfg, loss, phi, scheme))
    if abs(s) <= SLOPE_ZERO_RTOL * abs(slope_amplitude(cfg, loss, scheme)):
        raise ZeroSlopeError(f"{Scheme(scheme).value} slope vanishes at phi={phi}")
    d = math.sqrt(v) / abs(s)
    sq = sql(cfg, loss, sql_policy)
    return SensitivityReport(scheme=Scheme(scheme), phi=phi, delta_phi=d, slope=s,
                             variance=v, beats_sql=d < sq, sql_value=sq,
                             qcrb_value=qcrb(qfi_phase_averaged(cfg)))


def hd_sensitivity(cfg, loss=LOSSLESS, phi=math.pi, sql_policy="photons_inside") -> SensitivityReport:
    return _report(cfg, loss, phi, Scheme.HOMODYNE, sql_policy)


def id_sensitivity(cfg, loss=LOSSLESS, phi=math.pi - 0.1, sql_policy="photons_inside") -> SensitivityReport:
    return _report(cfg, loss, phi, Scheme.INTENSITY, sql_policy)


# ---------------------------------------------------------------------------
# Lossless closed forms

def hd_lossless_terms(cfg: InterferometerConfig):
    """(A, B, D) with Delta^2 phi = (A + B cos phi) / (D cos^2 phi)."""
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R = cfg.bs_t, cfg.bs_r
    A = (G2 ** 2 * g1 ** 2 * T ** 2 + R ** 2 * G2 ** 2 * g1 ** 2 + G1 ** 2 * g2 ** 2
         - 2 * G1 * G2 * g1 * g2 * T + 0.5)
    B = 2 * G2 * g1 * R * (G1 * g2 - G2 * g1 * T)
    D = 2 * cfg.n_c * G2 ** 2 * T * R
    return A, B, D


def hd_delta_phi_lossless(cfg: InterferometerConfig, phi):
    _require_standard_phases(cfg)
    A, B, D = hd_lossless_terms(cfg)
    c = np.cos(phi)
    return np.sqrt((A + B * c) / (D * c * c))


def hd_optimum_lossless(cfg: InterferometerConfig) -> float:
    """Delta phi at phi = pi: sqrt([2 (G2 g1 - G1 g2)^2 + 1] / (4 N_c G2^2 T R)).

    Reduces to 1 / sqrt(4 T R G^2 N_c) when G1 = G2.
    """
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    num = 2 * (G2 * g1 - G1 * g2) ** 2 + 1
    return math.sqrt(num / (4 * cfg.n_c * G2 ** 2 * cfg.bs_t * cfg.bs_r))


def id_lossless_terms(cfg: InterferometerConfig, phi):
    """(I, J, K, L) of the lossless ID sensitivity; only J depends on phi."""
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R, nc = cfg.bs_t, cfg.bs_r, cfg.n_c
    s1 = G1 ** 2 + g1 ** 2
    s2 = G2 ** 2 + g2 ** 2
    c = np.cos(phi)
    I = (2 * T * R * s2 * (nc - g1 ** 2) + 4 * G1 * G2 * g1 * g2 * R) ** 2
    J = G1 * g1 * s2 * (2 * T * R - 2 + 2 * T * R * c) + 2 * G2 * g2 * s1 * (T - R * c)
    K = ((2 * G2 * G1 * g2 - g1 * s2) ** 2 * T * R * (nc + 1)
         + (s2 * G1 - 2 * G2 * g2 * g1) ** 2 * T * R * nc
         + 4 * G2 ** 2 * g2 ** 2 * R ** 2)
    L = ((2 * G2 * G1 * g2 - g1 * s2 * (T - R)) ** 2 * T * R * (nc + 1)
         + (s2 * G1 * (T - R) - 2 * G2 * g1 * g2) ** 2 * T * R * nc
         + 4 * T ** 2 * R ** 2 * s2 ** 2 * nc)
    return I, J, K, L


def id_delta_phi_lossless(cfg: InterferometerConfig, phi):
    _require_standard_phases(cfg)
    I, J, K, L = id_lossless_terms(cfg, phi)
    c, s = np.cos(phi), np.sin(phi)
    return np.sqrt(K / I + (J ** 2 + L * (c + 1) ** 2) / (I * s * s))


def id_balanced_limit(cfg: InterferometerConfig) -> float:
    """Delta phi as phi -> pi for G1 = G2, lossless: sqrt(K / I)."""
    I, _, K, _ = id_lossless_terms(cfg.balanced(), math.pi)
    return math.sqrt(K / I)


# ---------------------------------------------------------------------------
# Optimal recombination gain

def hd_optimal_gain_ratio(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS) -> float:
    """(g2/G2)_opt for homodyne detection at phi = pi."""
    G1, g1 = cfg.g1_gain, cfg.g1_small
    T, R = cfg.bs_t, cfg.bs_r
    ea, eb, ec, ed = loss.as_tuple()
    den = ea * G1 ** 2 + (1 - ea) - 0.5
    if den <= 0:
        raise NoValidGainError("optimal-gain denominator is not positive")
    return G1 * g1 * math.sqrt(ea * eb) * (T * math.sqrt(ed) + R * math.sqrt(ec)) / den


def hd_optimal_gain_ratio_lossless(cfg: InterferometerConfig) -> float:
    G1, g1 = cfg.g1_gain, cfg.g1_small
    return 2 * G1 * g1 / (2 * G1 ** 2 - 1)


def hd_optimal_gain(cfg: InterferometerConfig, loss: LossConfig = LOSSLESS):
    """Return ``(g2/G2, G2)``; raises NoValidGainError when the ratio is >= 1."""
    ratio = hd_optimal_gain_ratio(cfg, loss)
    if not 0 <= ratio < 1:
        raise NoValidGainError(f"optimal g2/G2 = {ratio:.6g} is not below 1")
    return ratio, 1.0 / math.sqrt(1.0 - ratio * ratio)


# ---------------------------------------------------------------------------
# Generic path on the Gaussian network

def engine_observable(cfg, loss, phi, scheme):
    """(mean, variance) of the detected observable from network moments."""
    net = ge.build_acmzi_network(cfg, loss, phi)
    mom = ge.propagate_moments(net, ge.acmzi_input(cfg, net.n_modes))
    if Scheme(scheme) is Scheme.HOMODYNE:
        obs = ge.Quadrature(ge.MODE_B)
    else:
        obs = ge.PhotonNumber((ge.MODE_A, ge.MODE_B))
    return ge.observable_stats(mom, obs)


def engine_slope(cfg, loss, phi, scheme, h=1e-5) -> float:
    """Central finite difference of the observable mean."""
    hi = engine_observable(cfg, loss, phi + h, scheme)[0]
    lo = engine_observable(cfg, loss, phi - h, scheme)[0]
    return (hi - lo) / (2 * h)


def engine_sensitivity(cfg, loss=LOSSLESS, phi=math.pi, scheme=Scheme.HOMODYNE,
                       h=1e-5, sql_policy="photons_inside") -> SensitivityReport:
    """Error-propagation sensitivity for arbitrary PA phases."""
    s = engine_slope(cfg, loss, phi, scheme, h)
    v = engine_observable(cfg, loss, phi, scheme)[1]
    if s == 0.0:
        raise ZeroSlopeError(f"engine slope vanishes at phi={phi}")
    d = math.sqrt(v) / abs(s)
    sq = sql(cfg, loss, sql_policy)
    return SensitivityReport(scheme=Scheme(scheme), phi=float(phi), delta_phi=d, slope=s,
                             variance=v, beats_sql=d < sq, sql_value=sq,
                             qcrb_value=qcrb(qfi_phase_averaged(cfg)))
