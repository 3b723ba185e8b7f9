"""Uniform Cartesian lattices and their CSV serialisation."""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError

FLOAT_FMT = "%.12e"
THREADS_ENV = "QEDFIELDS_THREADS"


def thread_count() -> int:
    try:
        n = int(os.environ.get(THREADS_ENV, "1"))
    except ValueError:
        n = 1
    return max(n, 1)


def map_points(func, points: np.ndarray, chunk: int = 65536, width: int = 1) -> np.ndarray:
    """Apply a vectorised ``func`` to ``points`` of shape (n, 3) in chunks.

    ``width`` is the number of sources each point interacts with; chunks are
    shrunk so a chunk never holds more than ~2^20 point-source pairs. Each
    chunk owns its output slice, so the result does not depend on the number
    of worker threads.
    """
    points = np.asarray(points, dtype=float)
    chunk = max(64, min(chunk, (1 << 20) // max(width, 1)))
    n = len(points)
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    workers = thread_count()
    if workers == 1 or len(bounds) <= 1:
        parts = [func(points[a:b]) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: func(points[ab[0]:ab[1]]), bounds))
    return np.concatenate(parts, axis=0) if parts else func(points)


@dataclass(frozen=True)
class GridSpec:
    origin: tuple
    spacing: float
    dims: tuple

    def __post_init__(self):
        origin = tuple(float(v) for v in np.asarray(self.origin, dtype=float).reshape(3))
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise DomainError(f"grid dims must be three positive integers, got {self.dims}")
        if not self.spacing > 0:
            raise DomainError(f"grid spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", float(self.spacing))

    @classmethod
    def cube(cls, half_width: float, spacing: float, center=(0.0, 0.0, 0.0)) -> "GridSpec":
        n = int(round(2 * half_width / spacing)) + 1
        c = np.asarray(center, dtype=float)
        return cls(tuple(c - half_width), spacing, (n, n, n))

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def axes(self):
        return [self.origin[i] + self.spacing * np.arange(self.dims[i]) for i in range(3)]

    def nodes(self) -> np.ndarray:
        """Node coordinates with shape ``dims + (3,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def padded(self, layers: int = 1) -> "GridSpec":
        o = np.asarray(self.origin) - layers * self.spacing
        return GridSpec(tuple(o), self.spacing, tuple(d + 2 * layers for d in self.dims))

    def refined(self) -> "GridSpec":
        """Same extent, half the spacing (every coarse node is kept)."""
        return GridSpec(self.origin, self.spacing / 2, tuple(2 * d - 1 for d in self.dims))


@dataclass
class GridField:
    grid: GridSpec
    names: tuple
    values: np.ndarray  # shape grid.dims + (len(names),)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.names = tuple(self.names)
        self.values = np.asarray(self.values)
        expected = self.grid.dims + (len(self.names),)
        if self.values.shape != expected:
            raise DomainError(f"samples have shape {self.values.shape}, expected {expected}")

    def component(self, name: str) -> np.ndarray:
        return self.values[..., self.names.index(name)]

    def to_csv(self, path) -> None:
        nodes = self.grid.nodes().reshape(-1, 3)
        data = np.hstack([nodes, self.values.reshape(-1, len(self.names))])
        with open(path, "w", newline="") as fh:
            fh.write(",".join(("x", "y", "z") + self.names) + "\n")
            np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",")

    @classmethod
    def from_csv(cls, path, grid: GridSpec) -> "GridField":
        with open(path, newline="") as fh:
            header = next(csv.reader(fh))
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        names = tuple(header[3:])
        return cls(grid, names, data[:, 3:].reshape(grid.dims + (len(names),)))


def write_rows(path, header, rows) -> None:
    """CSV with a header line and every value in the fixed float format."""
    rows = np.asarray(rows, dtype=float)
    with open(Path(path), "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        if rows.size:
            np.savetxt(fh, rows.reshape(len(rows), -1), fmt=FLOAT_FMT, delimiter=",")


def read_rows(path):
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
        body = fh.read().strip()
    if not body:
        return header, np.empty((0, len(header)))
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
