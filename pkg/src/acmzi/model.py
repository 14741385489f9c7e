"""Device parameters and closed-form input-output coefficients of the ACMZI.

The two detected output modes are written as

    a2 = T1 a0 + T2 b0^+ + T3 c0^+ + T4 va + T5 vb^+ + T6 vc^+ + T7 vd^+
    b3 = M1* a0^+ + M2* b0 + M3* c0 + M4* va^+ + M5* vb + M6* vc + M7* vd

where a0, b0 are the PA1 inputs, c0 carries the coherent pump and va..vd are
the vacuum ancillas of the four loss channels.  ``CoefficientSet.m`` stores
M1..M7 themselves, i.e. the complex conjugates of the operator coefficients
of b3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfigError, InvalidLossError

GAIN_TOL = 1e-12
SPLIT_TOL = 1e-12

# Inputs appearing as annihilators in a2 (and as creators in b3), by index.
ANNIHILATION_IDX = (0, 3)
# Inputs appearing as creators in a2 (and as annihilators in b3).
CREATION_IDX = (1, 2, 4, 5, 6)


@dataclass(frozen=True)
class InterferometerConfig:
    """Static parameters of the interferometer.

    ``g1_gain``/``g1_small`` are the PA1 gains G1, g1 with G1^2 - g1^2 = 1,
    likewise for PA2.  ``bs_t``/``bs_r`` are the power transmissivity and
    reflectivity shared by both beam splitters.
    """

    n_c: float = 1000.0
    g1_gain: float = math.sqrt(5.0)
    g1_small: float = 2.0
    g2_gain: float = math.sqrt(5.0)
    g2_small: float = 2.0
    theta1: float = 0.0
    theta2: float = math.pi
    bs_t: float = 0.5
    bs_r: float = 0.5

    def __post_init__(self):
        if not np.isfinite(self.n_c) or self.n_c < 0:
            raise InvalidConfigError(f"n_c must be finite and >= 0, got {self.n_c}")
        for name, big, small in (("PA1", self.g1_gain, self.g1_small),
                                 ("PA2", self.g2_gain, self.g2_small)):
            if big < 1 or small < 0:
                raise InvalidConfigError(f"{name} gains must satisfy G >= 1, g >= 0")
            if abs(big * big - small * small - 1.0) > GAIN_TOL * max(1.0, big * big):
                raise InvalidConfigError(
                    f"{name} gains violate G^2 - g^2 = 1: G={big!r}, g={small!r}")
        if not (0.0 <= self.bs_t <= 1.0 and 0.0 <= self.bs_r <= 1.0):
            raise InvalidConfigError("T and R must lie in [0, 1]")
        if abs(self.bs_t + self.bs_r - 1.0) > SPLIT_TOL:
            raise InvalidConfigError(f"T + R must equal 1, got {self.bs_t + self.bs_r}")

    @classmethod
    def from_gains(cls, n_c=1000.0, g1_sq=5.0, g2_sq=None, theta1=0.0,
                   theta2=math.pi, bs_t=0.5):
        """Build a config from squared large gains G1^2, G2^2 (G2^2 defaults to G1^2)."""
        if g2_sq is None:
            g2_sq = g1_sq
        if g1_sq < 1 or g2_sq < 1:
            raise InvalidConfigError("squared gains must be >= 1")
        return cls(n_c=float(n_c),
                   g1_gain=math.sqrt(g1_sq), g1_small=math.sqrt(g1_sq - 1.0),
                   g2_gain=math.sqrt(g2_sq), g2_small=math.sqrt(g2_sq - 1.0),
                   theta1=float(theta1), theta2=float(theta2),
                   bs_t=float(bs_t), bs_r=1.0 - float(bs_t))

    @property
    def alpha(self) -> float:
        """Coherent amplitude, taken real and non-negative."""
        return math.sqrt(self.n_c)

    @property
    def gain_ratio(self) -> float:
        return self.g2_gain / self.g1_gain

    def with_g2(self, g2_gain: float) -> "InterferometerConfig":
        """Copy with PA2 large gain replaced (g2 follows from G2^2 - g2^2 = 1)."""
        if g2_gain < 1:
            raise InvalidConfigError(f"G2 must be >= 1, got {g2_gain}")
        return replace(self, g2_gain=float(g2_gain),
                        g2_small=math.sqrt(max(g2_gain * g2_gain - 1.0, 0.0)))

    def balanced(self) -> "InterferometerConfig":
        return replace(self, g2_gain=self.g1_gain, g2_small=self.g1_small)


@dataclass(frozen=True)
class LossConfig:
    """Power transmission rates of the four fictitious loss beam splitters.

    ``eta_a``/``eta_b`` act outside the MZI (on the PA1 idler and on the MZI
    output feeding PA2), ``eta_c``/``eta_d`` on the two internal arms.
    """

    eta_a: float = 1.0
    eta_b: float = 1.0
    eta_c: float = 1.0
    eta_d: float = 1.0

    def __post_init__(self):
        for name in ("eta_a", "eta_b", "eta_c", "eta_d"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidLossError(f"{name} must lie in [0, 1], got {v}")

    @property
    def is_lossless(self) -> bool:
        return self.eta_a == self.eta_b == self.eta_c == self.eta_d == 1.0

    def as_tuple(self):
        return (self.eta_a, self.eta_b, self.eta_c, self.eta_d)


LOSSLESS = LossConfig()


@dataclass(frozen=True)
class CoefficientSet:
    t: np.ndarray
    m: np.ndarray
    phi: float = field(default=0.0)

    def commutator_a2(self) -> float:
        """|T1|^2 - |T2|^2 - |T3|^2 + |T4|^2 - |T5|^2 - |T6|^2 - |T7|^2."""
        w = np.abs(self.t) ** 2
        return float(w[list(ANNIHILATION_IDX)].sum() - w[list(CREATION_IDX)].sum())

    def commutator_b3(self) -> float:
        w = np.abs(self.m) ** 2
        return float(w[list(CREATION_IDX)].sum() - w[list(ANNIHILATION_IDX)].sum())


def coefficient_arrays(cfg: InterferometerConfig, loss: LossConfig, phi):
    """Return ``(t, m)`` with shape ``(7,) + shape(phi)``; broadcasts over ``phi``."""
    phi = np.asarray(phi, dtype=float)
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R = cfg.bs_t, cfg.bs_r
    sa, sb, sc, sd = (math.sqrt(e) for e in loss.as_tuple())
    e1 = np.exp(1j * cfg.theta1)
    e2 = np.exp(1j * cfg.theta2)
    em = np.exp(-1j * phi)
    ep = np.exp(1j * phi)
    # b1 -> b2' amplitude of the lossy MZI and its conjugate
    mzi_c = sb * (T * sd - R * sc * em)
    mzi = sb * (T * sd - R * sc * ep)
    zeros = np.zeros_like(em)

    t = np.stack(np.broadcast_arrays(
        G1 * G2 * sa + g1 * g2 * e2 / e1 * mzi_c,
        G2 * g1 * sa * e1 + G1 * g2 * e2 * mzi_c,
        math.sqrt(T * R) * g2 * e2 * (sb * sd + sb * sc * em),
        G2 * math.sqrt(1 - loss.eta_a) + zeros,
        g2 * math.sqrt(1 - loss.eta_b) * e2 + zeros,
        math.sqrt(R) * g2 * math.sqrt(loss.eta_b * (1 - loss.eta_c)) * e2 + zeros,
        math.sqrt(T) * g2 * math.sqrt(loss.eta_b * (1 - loss.eta_d)) * e2 + zeros,
    ))
    # operator coefficients of b3 (the M_i^*), conjugated on return
    m_star = np.stack(np.broadcast_arrays(
        G1 * g2 * sa * e2 + G2 * g1 * e1 * mzi,
        g1 * g2 * sa * e2 / e1 + G2 * G1 * mzi,
        G2 * math.sqrt(T * R) * sb * (sc * ep + sd),
        g2 * math.sqrt(1 - loss.eta_a) * e2 + zeros,
        G2 * math.sqrt(1 - loss.eta_b) + zeros,
        math.sqrt(R) * G2 * math.sqrt(loss.eta_b * (1 - loss.eta_c)) + zeros,
        math.sqrt(T) * G2 * math.sqrt(loss.eta_b * (1 - loss.eta_d)) + zeros,
    ))
    return t, np.conj(m_star)


def coefficients_lossy(cfg: InterferometerConfig, loss: LossConfig, phi: float) -> CoefficientSet:
    """All fourteen coefficients of a2 and b3 with photon loss."""
    if not isinstance(loss, LossConfig):
        raise InvalidLossError("loss must be a LossConfig")
    t, m = coefficient_arrays(cfg, loss, float(phi))
    return CoefficientSet(t=t, m=m, phi=float(phi))


def coefficients_lossless(cfg: InterferometerConfig, phi: float) -> CoefficientSet:
    """Lossless coefficients; entries 4..7 are exactly zero."""
    G1, g1, G2, g2 = cfg.g1_gain, cfg.g1_small, cfg.g2_gain, cfg.g2_small
    T, R = cfg.bs_t, cfg.bs_r
    e1, e2 = np.exp(1j * cfg.theta1), np.exp(1j * cfg.theta2)
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    t = np.zeros(7, dtype=complex)
    m = np.zeros(7, dtype=complex)
    t[0] = G2 * G1 + g1 * g2 * e2 / e1 * (T - R * em)
    t[1] = G2 * g1 * e1 + G1 * g2 * e2 * (T - R * em)
    t[2] = math.sqrt(T * R) * g2 * e2 * (1 + em)
    m[0] = np.conj(G1 * g2 * e2 + G2 * g1 * e1 * (T - R * ep))
    m[1] = np.conj(g1 * g2 * e2 / e1 + G2 * G1 * (T - R * ep))
    m[2] = np.conj(math.sqrt(T * R) * G2 * (1 + ep))
    return CoefficientSet(t=t, m=m, phi=float(phi))
