"""Dense three-mode Fock-space simulator for checking the QFI formulas.

Modes are (a, b, c): a and b enter PA1, c carries the pump.  PA1 and BS1
are applied as matrix exponentials of their generators on the truncated
two-mode subspaces they act on.  After BS1 mode c is the arm holding the
phase shift and mode b the other arm.

Only meant for small photon numbers; cost grows as cutoff**3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import poisson

from .errors import TruncationOverflowError, UnnormalizedStateError

DEFAULT_CUTOFF = 14
LEAKAGE_TOL = 1e-8
NORM_TOL = 1e-10


def _ladder(d: int) -> np.ndarray:
    """Truncated annihilation operator on d levels."""
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


@dataclass(frozen=True)
class DenseState:
    cutoff: int
    amplitudes: np.ndarray      # shape (cutoff+1,)*3, axes (a, b, c)

    @classmethod
    def basis(cls, n_a: int, n_b: int, n_c: int, cutoff: int = DEFAULT_CUTOFF) -> "DenseState":
        amp = np.zeros((cutoff + 1,) * 3, dtype=complex)
        amp[n_a, n_b, n_c] = 1.0
        return cls(cutoff, amp)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def leakage(self) -> float:
        """Population on the top Fock level of any mode."""
        p = np.abs(self.amplitudes) ** 2
        top = self.cutoff
        edge = p[top].sum() + p[:, top].sum() + p[:, :, top].sum()
        return float(edge / max(p.sum(), 1e-300))

    def populations(self, mode: int) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        axes = tuple(k for k in range(3) if k != mode)
        return p.sum(axis=axes)

    def mean_photons(self, mode: int) -> float:
        p = self.populations(mode)
        return float(np.dot(np.arange(p.size), p))

    def photon_variance(self, mode: int) -> float:
        p = self.populations(mode)
        n = np.arange(p.size)
        mean = np.dot(n, p)
        return float(np.dot(n * n, p) - mean * mean)


def squeezer_unitary(g: float, theta: float, d: int) -> np.ndarray:
    """exp(r (e^{i theta} a^+ b^+ - h.c.)) with sinh r = g, on d x d levels."""
    r = math.asinh(g)
    a = _ladder(d)
    eye = np.eye(d)
    ab = np.kron(a, eye) @ np.kron(eye, a)
    gen = r * (np.exp(1j * theta) * ab.conj().T - np.exp(-1j * theta) * ab)
    return expm(gen)


def splitter_unitary(T: float, d: int) -> np.ndarray:
    """exp(t (b^+ c - c^+ b)), cos t = sqrt(T): b -> sqrt(T) b + sqrt(R) c."""
    t = math.acos(math.sqrt(T))
    a = _ladder(d)
    eye = np.eye(d)
    b, c = np.kron(a, eye), np.kron(eye, a)
    gen = t * (b.conj().T @ c - c.conj().T @ b)
    return expm(gen)


def _apply(u: np.ndarray, amp: np.ndarray, axes: tuple[int, int]) -> np.ndarray:
    d = amp.shape[0]
    moved = np.moveaxis(amp, axes, (0, 1))
    flat = moved.reshape(d * d, -1)
    out = (u @ flat).reshape(moved.shape)
    return np.moveaxis(out, (0, 1), axes)


def _probe_unitaries(g1, theta1, T, cutoff):
    d = cutoff + 1
    u_pa = squeezer_unitary(g1, theta1, d) if g1 != 0.0 else None
    u_bs = splitter_unitary(T, d) if T != 1.0 else None
    return u_pa, u_bs


def _evolve(amp, unitaries, cutoff, leakage_tol=LEAKAGE_TOL):
    u_pa, u_bs = unitaries
    if u_pa is not None:
        amp = _apply(u_pa, amp, (0, 1))
    if u_bs is not None:
        amp = _apply(u_bs, amp, (1, 2))
    state = DenseState(cutoff, amp)
    leak = state.leakage()
    if leak > leakage_tol:
        raise TruncationOverflowError(
            f"population {leak:.2e} at the cutoff {cutoff}; raise the cutoff")
    return state


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    mag = np.exp(-abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - logfact / 2) if alpha != 0 \
        else (n == 0).astype(float)
    return mag * np.exp(1j * n * np.angle(alpha))


def prepare_probe(alpha: complex, G1: float, g1: float, theta1: float, T: float, R: float,
                  cutoff: int = DEFAULT_CUTOFF, leakage_tol: float = LEAKAGE_TOL) -> DenseState:
    """|psi_1> = BS1 PA1 |0>_a |0>_b |alpha>_c on the truncated space.

    ``G1`` only documents the gain pair; the squeezer is set by ``g1``.
    Raises TruncationOverflowError when more than ``leakage_tol`` of the
    population sits beyond or on the cutoff.
    """
    if abs(alpha) ** 2 > cutoff / 4:
        raise TruncationOverflowError(f"|alpha|^2 = {abs(alpha) ** 2} exceeds cutoff/4")
    if abs(T + R - 1) > 1e-12:
        raise ValueError("T + R must equal 1")
    c = coherent_amplitudes(alpha, cutoff)
    tail = 1.0 - float(np.sum(np.abs(c) ** 2))
    if tail > leakage_tol:
        raise TruncationOverflowError(f"coherent tail {tail:.2e} beyond cutoff")
    c = c / np.linalg.norm(c)
    amp = np.zeros((cutoff + 1,) * 3, dtype=complex)
    amp[0, 0, :] = c
    return _evolve(amp, _probe_unitaries(g1, theta1, T, cutoff), cutoff, leakage_tol)


def prepare_fock_probe(n: int, G1: float, g1: float, T: float,
                       cutoff: int = DEFAULT_CUTOFF, leakage_tol: float = LEAKAGE_TOL,
                       _unitaries=None) -> DenseState:
    """BS1 PA1 |0, 0, n>."""
    if n > cutoff:
        raise TruncationOverflowError(f"Fock input {n} above cutoff {cutoff}")
    u = _unitaries or _probe_unitaries(g1, 0.0, T, cutoff)
    return _evolve(DenseState.basis(0, 0, n, cutoff).amplitudes, u, cutoff, leakage_tol)


def qfi_of_state(state: DenseState) -> float:
    """4 Var(n_c): QFI of a pure state for a phase generated by the c-arm number."""
    if abs(state.norm - 1.0) > NORM_TOL:
        raise UnnormalizedStateError(f"state norm {state.norm}")
    return 4.0 * state.photon_variance(2)


def qfi_phase_averaged_oracle(n_c_mean: float, G1: float, g1: float, T: float, R: float,
                              cutoff: int = DEFAULT_CUTOFF, n_max: int | None = None) -> float:
    """Poisson-weighted sum of Fock-input QFIs, sum_n P_n 4 Var(n_c)[B |0, 0, n>]."""
    if abs(T + R - 1) > 1e-12:
        raise ValueError("T + R must equal 1")
    dist = poisson(n_c_mean) if n_c_mean > 0 else None
    if n_max is None:
        n_max = 0 if dist is None else int(dist.isf(LEAKAGE_TOL)) + 1
    tail = 0.0 if dist is None else float(dist.sf(n_max))
    if tail > LEAKAGE_TOL:
        raise TruncationOverflowError(f"Poisson tail {tail:.2e} beyond n_max={n_max}")
    if n_max > cutoff:
        raise TruncationOverflowError(f"n_max={n_max} above cutoff {cutoff}")
    u = _probe_unitaries(g1, 0.0, T, cutoff)
    total = leak = 0.0
    for n in range(n_max + 1):
        p = 1.0 if dist is None else float(dist.pmf(n))
        if p == 0.0:
            continue
        # leakage is bounded on the Poisson-weighted mixture, not per component
        st = prepare_fock_probe(n, G1, g1, T, cutoff, leakage_tol=math.inf, _unitaries=u)
        leak += p * st.leakage()
        total += p * qfi_of_state(st)
    if leak > LEAKAGE_TOL:
        raise TruncationOverflowError(
            f"mixture population {leak:.2e} at the cutoff {cutoff}; raise the cutoff")
    return total
