"""Four-vectors, the (+,-,-,-) metric and axis-aligned Lorentz boosts.

Natural units (hbar = c = 1) throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DomainError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_AXES = {"x": 0, "y": 1, "z": 2}


def _vec3(v) -> np.ndarray:
    a = np.array(v, dtype=float).reshape(3)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FourVector:
    """Contravariant components ``(t, x, y, z)``."""

    t: float
    spatial: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "spatial", _vec3(self.spatial))

    @classmethod
    def from_array(cls, a) -> "FourVector":
        a = np.asarray(a, dtype=float)
        return cls(a[0], a[1:4])

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.t], self.spatial))

    def norm2(self) -> float:
        return minkowski_dot(self, self)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.spatial + other.spatial)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.spatial - other.spatial)


@dataclass(frozen=True)
class BoostParameters:
    """Boost with speed ``velocity`` along one coordinate axis (default z)."""

    velocity: float
    axis: int = 2

    def __post_init__(self):
        v = float(self.velocity)
        if not math.isfinite(v) or abs(v) >= 1.0:
            raise DomainError(f"boost speed must satisfy |v| < 1, got {v}")
        axis = _AXES.get(self.axis, self.axis) if isinstance(self.axis, str) else self.axis
        if axis not in (0, 1, 2):
            raise DomainError(f"boost axis must be 0, 1 or 2, got {self.axis!r}")
        object.__setattr__(self, "velocity", v)
        object.__setattr__(self, "axis", int(axis))

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.velocity) * (1.0 + self.velocity))

    def inverse(self) -> "BoostParameters":
        return BoostParameters(-self.velocity, self.axis)

    def matrix(self) -> np.ndarray:
        """4x4 matrix acting on contravariant components."""
        g, v, i = self.gamma, self.velocity, self.axis + 1
        L = np.eye(4)
        L[0, 0] = L[i, i] = g
        L[0, i] = L[i, 0] = g * v
        return L


def on_shell(mass: float, momentum) -> FourVector:
    """Four-momentum ``(sqrt(m^2 + |k|^2), k)``."""
    if mass < 0:
        raise DomainError(f"mass must be non-negative, got {mass}")
    k = _vec3(momentum)
    return FourVector(math.sqrt(mass * mass + float(k @ k)), k)


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    return a.t * b.t - float(a.spatial @ b.spatial)


def boost_arrays(params: BoostParameters, t, spatial):
    """Vectorised boost of ``t`` (shape ``(n,)``) and ``spatial`` (shape ``(n, 3)``).

    Uses t' = gamma (t + v x_axis), x_axis' = gamma (x_axis + v t).
    """
    t = np.asarray(t, dtype=float)
    spatial = np.array(spatial, dtype=float)
    g, v, i = params.gamma, params.velocity, params.axis
    along = spatial[..., i].copy()
    spatial[..., i] = g * (along + v * t)
    return g * (t + v * along), spatial


def boost(params: BoostParameters, vector: FourVector) -> FourVector:
    t, x = boost_arrays(params, vector.t, vector.spatial)
    return FourVector(float(t), x)


def boost_z(v, vector: FourVector) -> FourVector:
    """Boost along z; ``v`` may be a bare speed or a :class:`BoostParameters`."""
    params = v if isinstance(v, BoostParameters) else BoostParameters(v, 2)
    if params.axis != 2:
        raise DomainError("boost_z needs a z-axis boost")
    return boost(params, vector)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Proper 3x3 rotation by ``angle`` (radians) about ``axis``."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0:
        raise DomainError("rotation axis must be non-zero")
    return Rotation.from_rotvec(axis / n * angle).as_matrix()


def rotate(R: np.ndarray, vector: FourVector) -> FourVector:
    return FourVector(vector.t, R @ vector.spatial)
