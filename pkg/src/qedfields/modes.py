"""Fourier modes of a static field component, their boosts, and free photon modes.

A mode (w, k, a) contributes  i [a e^{i(k.x - w t)} - a* e^{-i(k.x - w t)}]
= -2 Im(a e^{i(k.x - w t)}), a real quantity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dirac import polarization_vectors
from .errors import DomainError
from .grid import read_rows, write_rows
from .kinematics import BoostParameters, boost_arrays

STATIC_TOL = 1e-12
MODE_HEADER = ("omega", "kx", "ky", "kz", "re_amp", "im_amp")


@dataclass(frozen=True)
class ModeComponent:
    omega: float
    k: tuple
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "k", tuple(float(c) for c in np.asarray(self.k).reshape(3)))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def is_static(self) -> bool:
        return abs(self.omega) <= STATIC_TOL


@dataclass(frozen=True)
class FreeFieldMode:
    """Transverse photon mode with w = |k| and polarisation index 1 or 2."""

    k: tuple
    polarization: int
    amplitude: complex

    def __post_init__(self):
        k = tuple(float(c) for c in np.asarray(self.k).reshape(3))
        if not np.linalg.norm(k) > 0:
            raise DomainError("free-field mode needs |k| > 0")
        if self.polarization not in (1, 2):
            raise DomainError(f"polarisation index must be 1 or 2, got {self.polarization}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def omega(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def direction(self) -> np.ndarray:
        pair = polarization_vectors(self.k)
        return pair.v1 if self.polarization == 1 else pair.v2


def _mode_arrays(modes):
    w = np.array([m.omega for m in modes], dtype=float)
    k = np.array([m.k for m in modes], dtype=float).reshape(-1, 3)
    a = np.array([m.amplitude for m in modes], dtype=complex)
    return w, k, a


def sample_field(modes, x, t=0.0):
    """Field value at point(s) ``x`` (shape (3,) or (n, 3)) and time(s) ``t``."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    t = np.broadcast_to(np.asarray(t, dtype=float), (len(pts),))
    if len(modes) == 0:
        out = np.zeros(len(pts))
    else:
        w, k, a = _mode_arrays(modes)
        phase = pts @ k.T - t[:, None] * w[None, :]
        out = -2.0 * np.imag(a[None, :] * np.exp(1j * phase)).sum(axis=1)
    return float(out[0]) if single else out


def sample_static_field(modes, x, t=0.0):
    """As :func:`sample_field`, but every mode must have w = 0."""
    for m in modes:
        if not m.is_static:
            raise DomainError(f"mode with omega={m.omega:.3e} in a static mode set")
    return sample_field(modes, x, t)


def boost_mode_set(modes, v) -> list:
    """Boost every (w, k) along the boost axis; amplitudes are unchanged."""
    params = v if isinstance(v, BoostParameters) else BoostParameters(v)
    if len(modes) == 0:
        return []
    w, k, a = _mode_arrays(modes)
    w2, k2 = boost_arrays(params, w, k)
    return [ModeComponent(wi, ki, ai) for wi, ki, ai in zip(w2, k2, a)]


def boost_events(v, t, x):
    """Boost event coordinates; same transformation as for (w, k)."""
    params = v if isinstance(v, BoostParameters) else BoostParameters(v)
    return boost_arrays(params, t, x)


def phase_velocity(mode) -> float:
    """w / |k|."""
    kn = float(np.linalg.norm(mode.k))
    if kn == 0.0:
        raise DomainError("phase velocity undefined for k = 0")
    return mode.omega / kn


def check_time_varying(modes) -> bool:
    return any(not m.is_static for m in modes)


def femf_mode_fields(mode: FreeFieldMode, x, t=0.0):
    """Real E and B of one photon mode plus its conjugate.

    E carries weight sqrt(w/2) along v^lambda, B carries 1/sqrt(2w) along
    k x v^lambda; both share the amplitude, so |B| = |E|.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    t = np.broadcast_to(np.asarray(t, dtype=float), (len(pts),))
    w = mode.omega
    k = np.asarray(mode.k)
    v = mode.direction
    s = -2.0 * np.imag(mode.amplitude * np.exp(1j * (pts @ k - w * t)))
    E = math.sqrt(w / 2.0) * s[:, None] * v[None, :]
    B = s[:, None] * np.cross(k, v)[None, :] / math.sqrt(2.0 * w)
    return (E[0], B[0]) if single else (E, B)


def femf_maxwell_residuals(mode: FreeFieldMode, points, t: float, h: float):
    """Centred-difference residuals of curl E + dB/dt and curl B - dE/dt.

    Returns the max norm of each residual over ``points``; both are O(h^2).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def jac(fn_index):
        J = np.empty((len(pts), 3, 3))  # J[n, component, axis]
        for ax in range(3):
            dx = np.zeros(3)
            dx[ax] = h
            fp = femf_mode_fields(mode, pts + dx, t)[fn_index]
            fm = femf_mode_fields(mode, pts - dx, t)[fn_index]
            J[:, :, ax] = (fp - fm) / (2 * h)
        return J

    def curl(J):
        return np.stack([J[:, 2, 1] - J[:, 1, 2], J[:, 0, 2] - J[:, 2, 0], J[:, 1, 0] - J[:, 0, 1]],
                        axis=1)

    Ep, Bp = femf_mode_fields(mode, pts, t + h)
    Em, Bm = femf_mode_fields(mode, pts, t - h)
    faraday = curl(jac(0)) + (Bp - Bm) / (2 * h)
    ampere = curl(jac(1)) - (Ep - Em) / (2 * h)
    return float(np.abs(faraday).max()), float(np.abs(ampere).max())


def write_modes_csv(path, modes) -> None:
    rows = [(m.omega, *m.k, m.amplitude.real, m.amplitude.imag) for m in modes]
    write_rows(path, MODE_HEADER, np.array(rows, dtype=float).reshape(-1, 6))


def read_modes_csv(path) -> list:
    header, data = read_rows(path)
    if tuple(header) != MODE_HEADER:
        raise DomainError(f"unexpected mode CSV header {header}")
    return [ModeComponent(r[0], r[1:4], complex(r[4], r[5])) for r in data]
