"""Aharonov-Bohm double slit: solenoid models, path phases and fringe patterns.

Electrons are treated eikonally: each of the two paths source -> slit -> screen
point carries the phase |k| * length - e * int A.dx, and the screen intensity
is |exp(i theta_1) + exp(i theta_2)|^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .amplitudes import DEFAULT_COUPLING
from .emergent import (ChargeSource, SourceEnsemble, circle_points, disk_quadrature,
                       field_arrays, potential_array)
from .errors import DomainError
from .grid import write_rows


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("direction must be non-zero")
    return v / n


@dataclass(frozen=True)
class Path:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 2:
            raise DomainError("a path needs at least two 3-d vertices")
        if not np.all(np.isfinite(v)):
            raise DomainError("path vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def polyline(cls, *points) -> "Path":
        return cls(np.array(points, dtype=float))

    @classmethod
    def circle(cls, center, radius: float, n_vertices: int = 64, normal=(0, 0, 1)) -> "Path":
        """Closed polygon (last vertex repeats the first), counter-clockwise about ``normal``."""
        pts, _ = circle_points(center, normal, radius, n_vertices)
        return cls(np.vstack([pts, pts[:1]]))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1).sum())

    @property
    def is_closed(self) -> bool:
        return bool(np.allclose(self.vertices[0], self.vertices[-1]))

    def subdivided(self, max_length: float) -> "Path":
        """Same polyline with extra vertices so no segment exceeds ``max_length``."""
        v = self.vertices
        out = [v[:1]]
        for a, b in zip(v[:-1], v[1:]):
            n = max(1, int(math.ceil(np.linalg.norm(b - a) / max_length)))
            s = np.arange(1, n + 1)[:, None] / n
            out.append(a + s * (b - a))
        return Path(np.vstack(out))

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1])

    def then(self, other: "Path") -> "Path":
        return Path(np.vstack([self.vertices, other.vertices[1:]]))


@dataclass(frozen=True)
class IdealSolenoid:
    """Infinitely long solenoid; outside radius R the potential is (flux/2 pi) phi_hat/rho."""

    flux: float
    radius: float = 0.1
    axis_point: tuple = (0.0, 0.0, 0.0)
    axis_direction: tuple = (0.0, 0.0, 1.0)
    variant = "ideal_infinite"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"solenoid radius must be positive, got {self.radius}")
        object.__setattr__(self, "axis_point", tuple(np.asarray(self.axis_point, float).reshape(3)))
        object.__setattr__(self, "axis_direction", tuple(_unit(self.axis_direction)))

    def _perp(self, points):
        a = np.asarray(self.axis_direction)
        d = np.atleast_2d(points) - np.asarray(self.axis_point)
        return d - np.outer(d @ a, a), a

    def vector_potential(self, points) -> np.ndarray:
        rho_vec, a = self._perp(points)
        rho2 = np.einsum("nc,nc->n", rho_vec, rho_vec)
        if np.any(rho2 < self.radius ** 2):
            raise DomainError("ideal solenoid potential is only defined outside its radius")
        return self.flux / (2.0 * math.pi) * np.cross(a, rho_vec) / rho2[:, None]

    def magnetic_field(self, points) -> np.ndarray:
        rho_vec, a = self._perp(points)
        inside = np.einsum("nc,nc->n", rho_vec, rho_vec) < self.radius ** 2
        B = np.zeros_like(rho_vec)
        B[inside] = self.flux / (math.pi * self.radius ** 2) * a
        return B

    def segment_clearance(self, a, b):
        """Smallest distance from the axis to each straight segment a -> b."""
        pa, _ = self._perp(a)
        pb, _ = self._perp(b)
        d = pb - pa
        dd = np.einsum("nc,nc->n", d, d)
        t = np.where(dd > 0, -np.einsum("nc,nc->n", pa, d) / np.where(dd > 0, dd, 1.0), 0.0)
        t = np.clip(t, 0.0, 1.0)
        out = np.linalg.norm(pa + t[:, None] * d, axis=1)
        return float(out[0]) if np.ndim(a) == 1 else out

    def segment_integral(self, a, b):
        """Exact int A.dx along a -> b: flux times swept azimuth / 2 pi."""
        pa, ax = self._perp(a)
        pb, _ = self._perp(b)
        ang = np.arctan2(np.cross(pa, pb) @ ax, np.einsum("nc,nc->n", pa, pb))
        out = self.flux * ang / (2.0 * math.pi)
        return float(out[0]) if np.ndim(a) == 1 else out


class SourceArraySolenoid:
    """Finite solenoid made of stacked rings of electrons with tangential momenta.

    The current direction of each electron is J/(2w) = k/w. Electrons move
    counter-clockwise about +z, so for the negative charge the conventional
    current is clockwise and the enclosed flux is negative.
    """

    variant = "source_array"

    def __init__(self, n_rings: int = 16, per_ring: int = 32, radius: float = 1.0,
                 pitch: float = 0.25, speed: float = 0.5, mass: float = 1.0,
                 coupling: float = DEFAULT_COUPLING, center=(0.0, 0.0, 0.0)):
        if n_rings < 1 or per_ring < 3:
            raise DomainError("need at least one ring of three sources")
        if not radius > 0 or not pitch > 0:
            raise DomainError("ring radius and pitch must be positive")
        self.n_rings, self.per_ring = int(n_rings), int(per_ring)
        self.radius, self.pitch, self.speed = float(radius), float(pitch), float(speed)
        self.center = np.asarray(center, dtype=float).reshape(3)
        t = 2.0 * math.pi * np.arange(per_ring) / per_ring
        zs = (np.arange(n_rings) - 0.5 * (n_rings - 1)) * pitch
        sources = []
        for z in zs:
            for ti in t:
                pos = self.center + np.array([radius * math.cos(ti), radius * math.sin(ti), z])
                k = speed * np.array([-math.sin(ti), math.cos(ti), 0.0])
                sources.append(ChargeSource(k, pos, mass, coupling))
        self.ensemble = SourceEnsemble(sources)
        self.axis_point = tuple(self.center)
        self.axis_direction = (0.0, 0.0, 1.0)

    @property
    def half_length(self) -> float:
        return 0.5 * (self.n_rings - 1) * self.pitch

    def vector_potential(self, points) -> np.ndarray:
        return potential_array(self.ensemble, np.atleast_2d(points))[:, 1:]

    def magnetic_field(self, points) -> np.ndarray:
        return field_arrays(self.ensemble, np.atleast_2d(points))[1]

    def flux_through_disk(self, radius: float, z: float = 0.0, n_radial: int = 8,
                          n_angular: int | None = None, panels: int = 20) -> float:
        """int B.dS over the disk of ``radius`` centred on the axis at height z."""
        if n_angular is None:
            n_angular = 8 * self.per_ring
        c = self.center + np.array([0.0, 0.0, z])
        pts, dS = disk_quadrature(c, (0, 0, 1), radius, n_radial, n_angular, panels=panels)
        return float(np.einsum("nc,nc->", self.magnetic_field(pts), dS))


def _segment_integrals(model, a: np.ndarray, b: np.ndarray, steps: int | None) -> np.ndarray:
    """int A.dx along each straight segment a[i] -> b[i]."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if isinstance(model, IdealSolenoid):
        if np.any(model.segment_clearance(a, b) <= model.radius):
            raise DomainError("path enters the ideal solenoid")
        if steps is None:
            return model.segment_integral(a, b)
    elif steps is None:
        raise DomainError("exact segment integrals exist only for the ideal solenoid")
    n = int(steps)
    if n < 1:
        raise DomainError("steps_per_segment must be positive")
    s = (np.arange(n) + 0.5) / n
    seg = b - a
    pts = (a[:, None, :] + s[None, :, None] * seg[:, None, :]).reshape(-1, 3)
    A = model.vector_potential(pts).reshape(len(seg), n, 3)
    return np.einsum("snc,sc->s", A, seg) / n


def line_integral_A(model, path: Path, steps_per_segment: int | None = 64) -> float:
    """int A.dx along a polyline.

    Composite midpoint rule with ``steps_per_segment`` nodes per segment. For
    the ideal solenoid ``steps_per_segment=None`` uses the exact swept-angle
    formula instead.
    """
    v = path.vertices
    return float(_segment_integrals(model, v[:-1], v[1:], steps_per_segment).sum())


def path_phase(model, path: Path, coupling: float = DEFAULT_COUPLING,
               steps_per_segment: int | None = 64) -> float:
    """Raw (unwrapped) phase -e int A.dx picked up along ``path``."""
    if model is None:
        return 0.0
    return -coupling * line_integral_A(model, path, steps_per_segment)


def wrap_phase(phase):
    """Reduce to (-pi, pi]."""
    w = np.mod(np.asarray(phase, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    w = np.where(w == -math.pi, math.pi, w)
    return float(w) if np.ndim(w) == 0 else w


@dataclass(frozen=True)
class DoubleSlitGeometry:
    """Electrons from ``source`` through two slits onto the screen plane x = screen_x.

    Screen points are (screen_x, y, screen_z) for y in ``screen_y``.
    """

    slit1: tuple = (0.0, 0.5, 0.0)
    slit2: tuple = (0.0, -0.5, 0.0)
    source: tuple = (-10.0, 0.0, 0.0)
    screen_x: float = 1000.0
    screen_y: np.ndarray = field(default_factory=lambda: np.linspace(-80.0, 80.0, 4001))
    wavevector: tuple = (100.0, 0.0, 0.0)
    screen_z: float = 0.0

    def __post_init__(self):
        for name in ("slit1", "slit2", "source", "wavevector"):
            object.__setattr__(self, name, tuple(np.asarray(getattr(self, name), float).reshape(3)))
        y = np.array(self.screen_y, dtype=float).ravel()
        y.setflags(write=False)
        object.__setattr__(self, "screen_y", y)
        s1, s2 = np.array(self.slit1), np.array(self.slit2)
        if np.allclose(s1, s2):
            raise DomainError("slits must be distinct")
        if self.wavenumber <= 0:
            raise DomainError("electron wavevector must be non-zero")
        if not (self.screen_x > max(s1[0], s2[0]) > self.source[0]):
            raise DomainError("need source < slit plane < screen along x")
        if y.size < 3:
            raise DomainError("need at least three screen samples")

    @property
    def wavenumber(self) -> float:
        return float(np.linalg.norm(self.wavevector))

    @property
    def slit_separation(self) -> float:
        return float(np.linalg.norm(np.subtract(self.slit1, self.slit2)))

    @property
    def screen_distance(self) -> float:
        return float(self.screen_x - 0.5 * (self.slit1[0] + self.slit2[0]))

    def fringe_spacing(self) -> float:
        """Small-angle fringe period 2 pi L / (|k| d)."""
        return 2.0 * math.pi * self.screen_distance / (self.wavenumber * self.slit_separation)

    def screen_point(self, y: float) -> np.ndarray:
        return np.array([self.screen_x, y, self.screen_z])

    def paths(self, y: float):
        """The two source -> slit -> screen polylines ending at screen height y."""
        p = self.screen_point(y)
        return (Path.polyline(self.source, self.slit1, p),
                Path.polyline(self.source, self.slit2, p))


@dataclass
class InterferencePattern:
    y: np.ndarray
    intensity: np.ndarray
    phase1: np.ndarray
    phase2: np.ndarray

    def to_csv(self, path) -> None:
        write_rows(path, ("y", "intensity"), np.column_stack([self.y, self.intensity]))

    def phases_to_csv(self, path) -> None:
        write_rows(path, ("y", "phase1", "phase2"),
                   np.column_stack([self.y, self.phase1, self.phase2]))

    def rows(self):
        return list(zip(self.y.tolist(), self.intensity.tolist()))


def interference_pattern(geometry: DoubleSlitGeometry, model=None,
                         coupling: float = DEFAULT_COUPLING,
                         steps_per_segment: int | None = None) -> InterferencePattern:
    """Two-path intensity on the screen.

    ``steps_per_segment=None`` means exact segment integrals for the ideal
    solenoid and 256 midpoint steps for any other model.
    """
    if steps_per_segment is None and model is not None and not isinstance(model, IdealSolenoid):
        steps_per_segment = 256
    k = geometry.wavenumber
    src = np.array(geometry.source)
    screen = np.column_stack([np.full(geometry.screen_y.size, geometry.screen_x),
                              geometry.screen_y,
                              np.full(geometry.screen_y.size, geometry.screen_z)])
    phases = []
    for slit in (np.array(geometry.slit1), np.array(geometry.slit2)):
        theta = k * (np.linalg.norm(slit - src) + np.linalg.norm(screen - slit, axis=1))
        if model is not None:
            first = _segment_integrals(model, src[None], slit[None], steps_per_segment)[0]
            second = _segment_integrals(model, np.broadcast_to(slit, screen.shape), screen,
                                        steps_per_segment)
            theta = theta - coupling * (first + second)
        phases.append(theta)
    th1, th2 = phases
    intensity = np.abs(np.exp(1j * th1) + np.exp(1j * th2)) ** 2
    return InterferencePattern(geometry.screen_y.copy(), intensity, th1, th2)


def locate_maximum(y: np.ndarray, intensity: np.ndarray, near: float = 0.0) -> float:
    """Sub-sample position of the local intensity maximum closest to ``near``.

    A parabola through the three samples around each discrete local maximum
    gives the refined position.
    """
    I = np.asarray(intensity)
    idx = np.where((I[1:-1] >= I[:-2]) & (I[1:-1] > I[2:]))[0] + 1
    if idx.size == 0:
        raise DomainError("pattern has no interior maximum")
    refined = []
    for i in idx:
        a, b, c = I[i - 1], I[i], I[i + 1]
        denom = a - 2 * b + c
        off = 0.0 if denom == 0 else 0.5 * (a - c) / denom
        refined.append(y[i] + off * (y[i + 1] - y[i - 1]) / 2.0)
    refined = np.array(refined)
    return float(refined[np.argmin(np.abs(refined - near))])


def fringe_shift(geometry: DoubleSlitGeometry, model, coupling: float = DEFAULT_COUPLING,
                 reference=None) -> float:
    """Displacement of the central maximum, in units of the fringe spacing."""
    if reference is None:
        reference = interference_pattern(geometry, None, coupling)
    shifted = interference_pattern(geometry, model, coupling)
    y0 = locate_maximum(reference.y, reference.intensity, 0.0)
    y1 = locate_maximum(shifted.y, shifted.intensity, y0)
    return (y1 - y0) / geometry.fringe_spacing()
