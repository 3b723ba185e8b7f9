"""Gamma matrices (chiral basis), momentum-space spinors and photon polarisations.

The spinor for momentum k and mass m is

    u_k = ( sqrt(w - k.sigma) xi ,  sqrt(w + k.sigma) xi ),   xi = (1, 0),

with the principal (non-negative) square root of each 2x2 block. In the chiral
basis this gives u^dagger u = 2w and ubar gamma^mu u = 2 k^mu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

I2 = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_Z2 = np.zeros((2, 2), dtype=complex)

GAMMA = np.array(
    [np.block([[_Z2, I2], [I2, _Z2]])]
    + [np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI]
)
GAMMA0 = GAMMA[0]
# gamma^0 gamma^mu, the sandwich used by every bilinear
G0G = np.einsum("ab,mbc->mac", GAMMA0, GAMMA)

XI = np.array([1.0, 0.0], dtype=complex)

# sign s in v1 x v2 = s * k_hat for the pair returned by polarization_vectors
POLARIZATION_HANDEDNESS = 1


@dataclass(frozen=True)
class DiracSpinor:
    components: np.ndarray
    momentum: np.ndarray
    mass: float

    @property
    def energy(self) -> float:
        return math.sqrt(self.mass ** 2 + float(self.momentum @ self.momentum))

    def bar(self) -> np.ndarray:
        return self.components.conj() @ GAMMA0


@dataclass(frozen=True)
class PolarizationPair:
    v1: np.ndarray
    v2: np.ndarray
    wavevector: np.ndarray


def pauli_dot(a) -> np.ndarray:
    """a . sigma for a real or complex 3-vector."""
    return np.einsum("i,iab->ab", np.asarray(a), PAULI)


def _psd_sqrt_from_pauli(a0: float, a, tol: float) -> np.ndarray:
    """sqrt(a0 I + a.sigma) from its closed-form eigen-decomposition."""
    a = np.asarray(a, dtype=float)
    r = float(np.linalg.norm(a))
    hi, lo = a0 + r, a0 - r
    if lo < -tol:
        raise DomainError(f"matrix has negative eigenvalue {lo:.3e}")
    if r == 0.0:
        return math.sqrt(max(a0, 0.0)) * I2
    n_sigma = pauli_dot(a / r)
    p_hi = 0.5 * (I2 + n_sigma)
    p_lo = 0.5 * (I2 - n_sigma)
    return math.sqrt(hi) * p_hi + math.sqrt(max(lo, 0.0)) * p_lo


def sqrt_hermitian_2x2(M, tol: float = 1e-12) -> np.ndarray:
    """Principal square root of a Hermitian positive-semidefinite 2x2 matrix.

    M is split as a0 I + a.sigma; its eigenvalues are a0 +/- |a| with
    projectors (I +/- a_hat.sigma)/2, so no iteration is involved.
    """
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {M.shape}")
    if np.max(np.abs(M - M.conj().T)) > tol:
        raise DomainError("matrix is not Hermitian")
    a0 = 0.5 * (M[0, 0] + M[1, 1]).real
    a = np.array([M[0, 1].real, -M[0, 1].imag, 0.5 * (M[0, 0] - M[1, 1]).real])
    return _psd_sqrt_from_pauli(a0, a, tol)


def build_spinor(momentum, mass: float) -> DiracSpinor:
    if not mass > 0:
        raise DomainError(f"spinor mass must be positive, got {mass}")
    k = np.array(momentum, dtype=float).reshape(3)
    w = math.sqrt(mass * mass + float(k @ k))
    # both blocks share eigenvalues w -/+ |k|; w - |k| is formed as m^2/(w + |k|)
    kn = float(np.linalg.norm(k))
    if kn == 0.0:
        upper = lower = math.sqrt(w) * I2
    else:
        n_sigma = pauli_dot(k / kn)
        p_plus = 0.5 * (I2 + n_sigma)
        p_minus = 0.5 * (I2 - n_sigma)
        small = math.sqrt(mass * mass / (w + kn))
        large = math.sqrt(w + kn)
        upper = small * p_plus + large * p_minus  # sqrt(w - k.sigma)
        lower = large * p_plus + small * p_minus  # sqrt(w + k.sigma)
    comps = np.concatenate((upper @ XI, lower @ XI))
    comps.setflags(write=False)
    k.setflags(write=False)
    return DiracSpinor(comps, k, float(mass))


def bilinear(u_out: DiracSpinor, mu: int, u_in: DiracSpinor) -> complex:
    """ubar_out gamma^mu u_in."""
    if not 0 <= mu <= 3:
        raise DomainError(f"Lorentz index must be 0..3, got {mu}")
    return complex(u_out.components.conj() @ G0G[mu] @ u_in.components)


def current(u_out: DiracSpinor, u_in: DiracSpinor) -> np.ndarray:
    """All four bilinears ubar_out gamma^mu u_in as a complex array."""
    return np.einsum("a,mab,b->m", u_out.components.conj(), G0G, u_in.components)


def polarization_vectors(k) -> PolarizationPair:
    """The two transverse unit vectors of a photon with wavevector k.

    v1 = (k2, -k1, 0)/rho and v2 = (k1 k3, k2 k3, -rho^2)/(rho |k|) with
    rho = sqrt(k1^2 + k2^2). On the z-axis (rho = 0) the limit k1 -> 0+ is
    used: v1 = (0, -1, 0), v2 = (sign k3, 0, 0).
    """
    k = np.array(k, dtype=float).reshape(3)
    kn = float(np.linalg.norm(k))
    if kn == 0.0:
        raise DomainError("polarisation undefined for k = 0")
    rho = math.hypot(k[0], k[1])
    if rho == 0.0:
        v1 = np.array([0.0, -1.0, 0.0])
        v2 = np.array([math.copysign(1.0, k[2]), 0.0, 0.0])
    else:
        v1 = np.array([k[1], -k[0], 0.0]) / rho
        v2 = np.array([k[0] * k[2], k[1] * k[2], -rho * rho]) / (rho * kn)
    return PolarizationPair(v1, v2, k)


def anticommutator(mu: int, nu: int) -> np.ndarray:
    return GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
