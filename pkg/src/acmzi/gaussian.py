"""Bogoliubov-transform engine for networks of passive and active Gaussian elements.

A transform acts on the vector of annihilation operators as

    a_out = A a_in + B a_in^+

Elements are composed left to right in the order light meets them.  Loss
channels append a fresh vacuum ancilla, so a transform may have more modes
than the element that precedes it; ``compose`` pads the smaller transform
with identity on the trailing ancilla modes.

Moments are exact for coherent (or vacuum) inputs: no sampling, no cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (DimensionMismatchError, InvalidGainError, InvalidLossError,
                     InvalidSplitError, UnknownObservableError)
from .model import InterferometerConfig, LossConfig

# Mode layout of the ACMZI network.
MODE_A, MODE_B, MODE_C, MODE_D = 0, 1, 2, 3
ANCILLA_A, ANCILLA_B, ANCILLA_C, ANCILLA_D = 4, 5, 6, 7


@dataclass(frozen=True)
class BogoliubovTransform:
    a_block: np.ndarray
    b_block: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.a_block.shape[0]

    def extended(self, n: int) -> "BogoliubovTransform":
        """Embed into ``n`` modes, acting as identity on the appended ones."""
        k = self.n_modes
        if n < k:
            raise DimensionMismatchError(f"cannot shrink a {k}-mode transform to {n}")
        if n == k:
            return self
        a = np.eye(n, dtype=complex)
        b = np.zeros((n, n), dtype=complex)
        a[:k, :k] = self.a_block
        b[:k, :k] = self.b_block
        return BogoliubovTransform(a, b)

    def commutator_residual(self) -> float:
        """Max deviation from A A^+ - B B^+ = I and A B^T = (A B^T)^T."""
        a, b = self.a_block, self.b_block
        r1 = a @ a.conj().T - b @ b.conj().T - np.eye(self.n_modes)
        ab = a @ b.T
        return float(max(np.abs(r1).max(), np.abs(ab - ab.T).max()))

    def row(self, mode: int):
        return self.a_block[mode], self.b_block[mode]


def identity(n: int) -> BogoliubovTransform:
    if n < 1:
        raise DimensionMismatchError("need at least one mode")
    return BogoliubovTransform(np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex))


def _check_pair(i, j, n):
    if i == j:
        raise DimensionMismatchError("two-mode element needs distinct modes")
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionMismatchError(f"modes {i}, {j} outside 0..{n - 1}")


def two_mode_squeezer(G: float, g: float, theta: float, i: int, j: int, n: int) -> BogoliubovTransform:
    """Parametric amplifier: a_i -> G a_i + g e^{i theta} a_j^+ and symmetrically for j.

    A negative ``g`` is accepted so that the inverse element (G, -g) is expressible.
    """
    if abs(G * G - g * g - 1.0) > 1e-12 * max(1.0, G * G):
        raise InvalidGainError(f"G^2 - g^2 must equal 1, got G={G}, g={g}")
    _check_pair(i, j, n)
    t = identity(n)
    a, b = t.a_block.copy(), t.b_block.copy()
    a[i, i] = a[j, j] = G
    b[i, j] = b[j, i] = g * np.exp(1j * theta)
    return BogoliubovTransform(a, b)


def beam_splitter(T: float, R: float, i: int, j: int, n: int) -> BogoliubovTransform:
    """Real rotation: a_i -> sqrt(T) a_i + sqrt(R) a_j, a_j -> -sqrt(R) a_i + sqrt(T) a_j.

    This sign choice, with the mirror routing in :func:`build_acmzi_network`,
    reproduces the closed-form ACMZI coefficients exactly.
    """
    if T < 0 or R < 0 or abs(T + R - 1.0) > 1e-12:
        raise InvalidSplitError(f"need T, R >= 0 and T + R = 1, got T={T}, R={R}")
    _check_pair(i, j, n)
    a = np.eye(n, dtype=complex)
    st, sr = math.sqrt(T), math.sqrt(R)
    a[i, i], a[i, j] = st, sr
    a[j, i], a[j, j] = -sr, st
    return BogoliubovTransform(a, np.zeros((n, n), dtype=complex))


def mirror_swap(i: int, j: int, n: int) -> BogoliubovTransform:
    """Route mode i into slot j and vice versa (pure relabelling)."""
    _check_pair(i, j, n)
    a = np.eye(n, dtype=complex)
    a[[i, j]] = a[[j, i]]
    return BogoliubovTransform(a, np.zeros((n, n), dtype=complex))


def phase_shifter(phi: float, i: int, n: int) -> BogoliubovTransform:
    if not 0 <= i < n:
        raise DimensionMismatchError(f"mode {i} outside 0..{n - 1}")
    a = np.eye(n, dtype=complex)
    a[i, i] = np.exp(1j * phi)
    return BogoliubovTransform(a, np.zeros((n, n), dtype=complex))


def loss_channel(eta: float, i: int, n: int | None = None) -> BogoliubovTransform:
    """Attenuate mode ``i`` by mixing it with a new vacuum ancilla (appended last).

    The result has ``n + 1`` modes; ``n`` defaults to ``i + 1``.
    """
    if not 0.0 <= eta <= 1.0:
        raise InvalidLossError(f"transmission must lie in [0, 1], got {eta}")
    if n is None:
        n = i + 1
    return beam_splitter(eta, 1.0 - eta, i, n, n + 1)


def compose(first: BogoliubovTransform, second: BogoliubovTransform) -> BogoliubovTransform:
    """Apply ``first`` and then ``second``."""
    if first.n_modes > second.n_modes:
        raise DimensionMismatchError(
            f"second element has {second.n_modes} modes, first has {first.n_modes}")
    first = first.extended(second.n_modes)
    a1, b1, a2, b2 = first.a_block, first.b_block, second.a_block, second.b_block
    a = a2 @ a1 + b2 @ b1.conj()
    b = a2 @ b1 + b2 @ a1.conj()
    return BogoliubovTransform(a, b)


def chain(*elements: BogoliubovTransform) -> BogoliubovTransform:
    out = elements[0]
    for el in elements[1:]:
        out = compose(out, el)
    return out


def build_acmzi_network(cfg: InterferometerConfig, loss: LossConfig | None = None,
                        phi: float = 0.0) -> BogoliubovTransform:
    """Full ACMZI as one transform.

    Modes: 0 = a line, 1 = b line (PA1 signal, later the MZI output feeding
    PA2), 2 = c arm (coherent input, carries the phase), 3 = d arm.  With any
    loss present, ancillas 4..7 are attached to the a, b, c, d loss channels.
    Outputs a2 and b3 live in modes 0 and 1.
    """
    loss = loss or LossConfig()
    n = 4 if loss.is_lossless else 8
    T, R = cfg.bs_t, cfg.bs_r
    steps = [
        two_mode_squeezer(cfg.g1_gain, cfg.g1_small, cfg.theta1, MODE_A, MODE_B, n),
        mirror_swap(MODE_B, MODE_D, n),
        beam_splitter(T, R, MODE_D, MODE_C, n),
    ]
    if n == 8:
        steps.append(beam_splitter(loss.eta_d, 1 - loss.eta_d, MODE_D, ANCILLA_D, n))
    steps.append(phase_shifter(phi, MODE_C, n))
    if n == 8:
        steps.append(beam_splitter(loss.eta_c, 1 - loss.eta_c, MODE_C, ANCILLA_C, n))
    steps += [
        beam_splitter(T, R, MODE_D, MODE_C, n),
        mirror_swap(MODE_D, MODE_B, n),
    ]
    if n == 8:
        steps.append(beam_splitter(loss.eta_a, 1 - loss.eta_a, MODE_A, ANCILLA_A, n))
        steps.append(beam_splitter(loss.eta_b, 1 - loss.eta_b, MODE_B, ANCILLA_B, n))
    steps.append(two_mode_squeezer(cfg.g2_gain, cfg.g2_small, cfg.theta2, MODE_A, MODE_B, n))
    return chain(*steps)


def build_probe_network(cfg: InterferometerConfig) -> BogoliubovTransform:
    """PA1 followed by BS1: the state inside the MZI before the phase shift."""
    n = 4
    return chain(
        two_mode_squeezer(cfg.g1_gain, cfg.g1_small, cfg.theta1, MODE_A, MODE_B, n),
        mirror_swap(MODE_B, MODE_D, n),
        beam_splitter(cfg.bs_t, cfg.bs_r, MODE_D, MODE_C, n),
    )


def acmzi_input(cfg: InterferometerConfig, n_modes: int) -> "InputSpec":
    amps = np.zeros(n_modes, dtype=complex)
    amps[MODE_C] = cfg.alpha
    return InputSpec(amps)


def network_coefficients(t: BogoliubovTransform):
    """Read (T1..T7, M1..M7) off the a2/b3 rows of an ACMZI network.

    Input order matches :mod:`acmzi.model`: a0, b0, c0, va, vb, vc, vd.  For
    a lossless (4-mode) network entries 4..7 are zero.
    """
    inputs = [MODE_A, MODE_B, MODE_C, ANCILLA_A, ANCILLA_B, ANCILLA_C, ANCILLA_D]
    a_row, b_row = t.row(MODE_A)
    a3, b3 = t.row(MODE_B)
    tc = np.zeros(7, dtype=complex)
    mc = np.zeros(7, dtype=complex)
    for k, mode in enumerate(inputs):
        if mode >= t.n_modes:
            continue
        # a0 and va enter a2 as annihilators; the rest as creators
        if k in (0, 3):
            tc[k] = a_row[mode]
            mc[k] = np.conj(b3[mode])
        else:
            tc[k] = b_row[mode]
            mc[k] = np.conj(a3[mode])
    return tc, mc


@dataclass(frozen=True)
class InputSpec:
    coherent_amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coherent_amplitudes",
                           np.asarray(self.coherent_amplitudes, dtype=complex))


@dataclass(frozen=True)
class MomentSet:
    """Raw moments: mean <a_i>, photon_matrix <a_i^+ a_j>, anomalous_matrix <a_i a_j>."""

    mean: np.ndarray
    photon_matrix: np.ndarray
    anomalous_matrix: np.ndarray

    def centered(self):
        m = self.mean
        n = self.photon_matrix - np.outer(m.conj(), m)
        s = self.anomalous_matrix - np.outer(m, m)
        return n, s


def propagate_moments(t: BogoliubovTransform, inp: InputSpec) -> MomentSet:
    alpha = inp.coherent_amplitudes
    if alpha.shape != (t.n_modes,):
        raise DimensionMismatchError(
            f"input has {alpha.shape[0]} modes, transform has {t.n_modes}")
    a, b = t.a_block, t.b_block
    mean = a @ alpha + b @ alpha.conj()
    # coherent inputs have vacuum fluctuations: <d d^+> = I, all else zero
    n_c = b.conj() @ b.T
    s_c = a @ b.T
    return MomentSet(mean=mean,
                     photon_matrix=n_c + np.outer(mean.conj(), mean),
                     anomalous_matrix=s_c + np.outer(mean, mean))


@dataclass(frozen=True)
class Quadrature:
    """X_angle = a e^{-i angle} + a^+ e^{i angle}; angle = pi/2 gives Y = i(a^+ - a)."""

    mode: int
    angle: float = math.pi / 2


@dataclass(frozen=True)
class PhotonNumber:
    """Total photon number over ``modes``."""

    modes: Sequence[int]


ObservableSpec = Union[Quadrature, PhotonNumber]


def observable_stats(m: MomentSet, obs: ObservableSpec):
    """Exact (mean, variance) of a quadrature or a photon-number sum."""
    n_modes = m.mean.shape[0]
    nc, sc = m.centered()
    if isinstance(obs, Quadrature):
        k = obs.mode
        if not 0 <= k < n_modes:
            raise DimensionMismatchError(f"mode {k} outside 0..{n_modes - 1}")
        ph = np.exp(-1j * obs.angle)
        mean = 2.0 * (m.mean[k] * ph).real
        var = 2.0 * (sc[k, k] * ph * ph).real + 2.0 * nc[k, k].real + 1.0
        return float(mean), float(var)
    if isinstance(obs, PhotonNumber):
        idx = list(obs.modes)
        if any(not 0 <= k < n_modes for k in idx):
            raise DimensionMismatchError(f"modes {idx} outside 0..{n_modes - 1}")
        mu = m.mean[idx]
        n = nc[np.ix_(idx, idx)]
        s = sc[np.ix_(idx, idx)]
        # <d_i d_j^+> = <d_j^+ d_i> + delta_ij = n^T + I
        dd_dag = n.T + np.eye(len(idx))
        mean = float(np.trace(m.photon_matrix[np.ix_(idx, idx)]).real)
        # Wick: Cov(n_i, n_j) = <d_i+ d_j+><d_i d_j> + <d_i+ d_j><d_i d_j+> + displacement terms
        quad = (s.conj() * s).sum() + (n * dd_dag).sum()
        lin = (np.outer(mu.conj(), mu.conj()) * s).sum() \
            + (np.outer(mu.conj(), mu) * dd_dag).sum() \
            + (np.outer(mu, mu.conj()) * n).sum() \
            + (np.outer(mu, mu) * s.conj()).sum()
        return mean, float((quad + lin).real)
    raise UnknownObservableError(f"unsupported observable {obs!r}")
