"""Second-order (one-photon exchange) amplitude for two distinguishable electrons.

Only the direct diagram is kept; the overall (2 pi)^4 delta^4 factor is
treated as a precondition (four-momentum conservation) and never evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirac import build_spinor, current
from .errors import DomainError, SingularityError
from .kinematics import FourVector, on_shell

# sqrt(4 pi / 137.036)
DEFAULT_COUPLING = 0.302822


@dataclass(frozen=True)
class ScatteringConfig:
    """Momenta for p + k -> p' + k'; each is a 3-vector, put on shell for ``mass``."""

    p: np.ndarray
    p_out: np.ndarray
    k: np.ndarray
    k_out: np.ndarray
    coupling: float = DEFAULT_COUPLING
    mass: float = 1.0
    conservation_tol: float = 1e-10

    def __post_init__(self):
        for name in ("p", "p_out", "k", "k_out"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if not self.coupling > 0:
            raise DomainError(f"coupling must be positive, got {self.coupling}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        mismatch = self.four("p") + self.four("k") - self.four("p_out") - self.four("k_out")
        worst = float(np.max(np.abs(mismatch.as_array())))
        if worst > self.conservation_tol:
            raise DomainError(f"four-momentum not conserved (mismatch {worst:.3e})")

    def four(self, name: str) -> FourVector:
        return on_shell(self.mass, getattr(self, name))

    def swapped(self) -> "ScatteringConfig":
        """Same process with the two vertices relabelled (p <-> k, p' <-> k')."""
        return ScatteringConfig(self.k, self.k_out, self.p, self.p_out,
                                self.coupling, self.mass, self.conservation_tol)


@dataclass(frozen=True)
class Amplitude:
    value: complex
    photon_virtuality: float
    # electric (gamma^0 gamma^0) and magnetic (gamma^i gamma^i) pieces of value
    parts: tuple = field(default=(0j, 0j), compare=False)


def photon_virtuality(config: ScatteringConfig) -> float:
    """q^2 = (w_p - w_p')^2 - |p - p'|^2 of the exchanged photon."""
    dw = config.four("p").t - config.four("p_out").t
    q = config.p - config.p_out
    q2 = float(q @ q)
    if q2 == 0.0:
        raise SingularityError("forward kinematics p = p' sit on the photon pole")
    return dw * dw - q2


def sigma(config: ScatteringConfig) -> Amplitude:
    """Feynman-gauge amplitude i e^2/q^2 (J_p^0 J_k^0 - J_p^i J_k^i).

    J_p = ubar_{p'} gamma u_p and J_k = ubar_{k'} gamma u_k.
    """
    q2 = photon_virtuality(config)
    m = config.mass
    jp = current(build_spinor(config.p_out, m), build_spinor(config.p, m))
    jk = current(build_spinor(config.k_out, m), build_spinor(config.k, m))
    pref = 1j * config.coupling ** 2 / q2
    electric = pref * jp[0] * jk[0]
    magnetic = -pref * np.dot(jp[1:], jk[1:])
    return Amplitude(complex(electric + magnetic), q2, (complex(electric), complex(magnetic)))


def sigma_nonrelativistic(config: ScatteringConfig) -> Amplitude:
    """Static Coulomb limit -4 i m^2 e^2 / |p - p'|^2."""
    q = config.p - config.p_out
    q2 = float(q @ q)
    if q2 == 0.0:
        raise SingularityError("forward kinematics p = p' sit on the photon pole")
    value = -4j * config.mass ** 2 * config.coupling ** 2 / q2
    return Amplitude(complex(value), -q2, (complex(value), 0j))


def com_config(p_mag: float, angle: float, coupling=DEFAULT_COUPLING, mass=1.0) -> ScatteringConfig:
    """Centre-of-momentum elastic kinematics: p along z, p' rotated by ``angle`` in x-z."""
    p = np.array([0.0, 0.0, p_mag])
    p_out = p_mag * np.array([math.sin(angle), 0.0, math.cos(angle)])
    return ScatteringConfig(p, p_out, -p, -p_out, coupling, mass)
