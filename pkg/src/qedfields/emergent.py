"""Classical potentials, currents and E/B fields built from localised electrons.

Each source j contributes through its forward bilinear J_j = ubar_k gamma^mu u_k
(= 2 k^mu for the implemented spin state):

    A^mu(x) = sum_j -e J_j^mu / (8 pi w_j |x - x_j|)
    E(x)    = sum_j -e (x - x_j) / (4 pi |x - x_j|^3)
    B(x)    = sum_j -e (J_j x (x - x_j)) / (8 pi w_j |x - x_j|^3)

The momentum-space integral behind the 1/(4 pi r) kernel is available
separately as :func:`potential_fourier_oracle` and is never used on the
evaluation path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .amplitudes import DEFAULT_COUPLING
from .dirac import build_spinor, current
from .errors import DomainError, PrecisionError, ResolutionError, SingularityError
from .grid import GridField, GridSpec, map_points

FOUR_PI = 4.0 * math.pi
# distance below which a field point counts as sitting on a source
SINGULAR_RADIUS = 1e-12


@dataclass(frozen=True)
class ChargeSource:
    momentum: np.ndarray
    center: np.ndarray
    mass: float = 1.0
    coupling: float = DEFAULT_COUPLING

    def __post_init__(self):
        for name in ("momentum", "center"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if not self.mass > 0:
            raise DomainError(f"source mass must be positive, got {self.mass}")
        if not self.coupling > 0:
            raise DomainError(f"coupling must be positive, got {self.coupling}")
        u = build_spinor(self.momentum, self.mass)
        J = current(u, u).real
        J.setflags(write=False)
        object.__setattr__(self, "_bilinear", J)

    @property
    def energy(self) -> float:
        return math.sqrt(self.mass ** 2 + float(self.momentum @ self.momentum))

    @property
    def bilinear(self) -> np.ndarray:
        """ubar gamma^mu u for this source (real four-vector)."""
        return self._bilinear

    @property
    def charge_weights(self) -> np.ndarray:
        """-e J^mu / (2 w): multiplies 1/(4 pi r) in A^mu and delta(x - x_j) in j^mu."""
        return -self.coupling * self._bilinear / (2.0 * self.energy)


class SourceEnsemble:
    """Ordered, immutable list of localised electrons with distinct centres."""

    def __init__(self, sources):
        self.sources = tuple(sources)
        if not self.sources:
            raise DomainError("SourceEnsemble needs at least one source")
        centers = np.array([s.center for s in self.sources])
        _, first = np.unique(centers, axis=0, return_index=True)
        if len(first) != len(self.sources):
            raise DomainError("SourceEnsemble sources must have pairwise-distinct centres")
        centers.setflags(write=False)
        self.centers = centers
        w = np.array([s.charge_weights for s in self.sources])
        w.setflags(write=False)
        self.weights = w
        self.energies = np.array([s.energy for s in self.sources])

    def __len__(self):
        return len(self.sources)

    def __iter__(self):
        return iter(self.sources)

    def __add__(self, other: "SourceEnsemble") -> "SourceEnsemble":
        return SourceEnsemble(self.sources + other.sources)

    @classmethod
    def single(cls, momentum=(0, 0, 0), center=(0, 0, 0), mass=1.0, coupling=DEFAULT_COUPLING):
        return cls([ChargeSource(momentum, center, mass, coupling)])


@dataclass(frozen=True)
class FourPotentialSample:
    phi: float
    A: np.ndarray
    at: np.ndarray


def _displacements(ensemble: SourceEnsemble, points: np.ndarray, singular: str):
    d = points[:, None, :] - ensemble.centers[None, :, :]
    r = np.linalg.norm(d, axis=-1)
    hit = r < SINGULAR_RADIUS
    if hit.any():
        if singular == "raise":
            raise SingularityError("field point coincides with a source centre")
        r = np.where(hit, np.nan, r)
    return d, r


def potential_array(ensemble: SourceEnsemble, points, singular: str = "raise") -> np.ndarray:
    """(phi, Ax, Ay, Az) at ``points`` of shape (n, 3); returns shape (n, 4).

    ``singular="nan"`` marks points on a source centre with NaN instead of raising.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def kernel(p):
        _, r = _displacements(ensemble, p, singular)
        return (1.0 / (FOUR_PI * r)) @ ensemble.weights

    return map_points(kernel, points, width=len(ensemble))


def potential_closed_form(ensemble: SourceEnsemble, x) -> FourPotentialSample:
    x = np.asarray(x, dtype=float).reshape(3)
    a = potential_array(ensemble, x[None, :])[0]
    return FourPotentialSample(float(a[0]), a[1:].copy(), x)


def field_arrays(ensemble: SourceEnsemble, points, singular: str = "raise"):
    """E and B at ``points`` (n, 3); each returned with shape (n, 3)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    e = np.array([s.coupling for s in ensemble.sources])
    bil = np.array([s.bilinear[1:] for s in ensemble.sources])
    bcoef = -e / (8.0 * math.pi * ensemble.energies)

    def kernel(p):
        d, r = _displacements(ensemble, p, singular)
        inv3 = 1.0 / r ** 3
        E = np.einsum("nj,j,njc->nc", inv3, -e / FOUR_PI, d)
        B = np.einsum("nj,j,njc->nc", inv3, bcoef, np.cross(bil[None, :, :], d))
        return np.concatenate((E, B), axis=1)

    out = map_points(kernel, points, width=len(ensemble))
    return out[:, :3], out[:, 3:]


def eb_fields(ensemble: SourceEnsemble, x):
    """(E, B) at a single point."""
    E, B = field_arrays(ensemble, np.asarray(x, dtype=float).reshape(1, 3))
    return E[0], B[0]


# --------------------------------------------------------------------------
# momentum-space oracle

def regulated_kernel_error(cutoff: float, r: float) -> float:
    """Relative shortfall of the e^{-q/cutoff} regulated 1/(4 pi r) kernel.

    The regulated radial integral equals (2/pi) arctan(cutoff r) times the
    exact one, so the shortfall is (2/pi) arctan(1/(cutoff r)).
    """
    return 2.0 / math.pi * math.atan(1.0 / (cutoff * r))


def coulomb_kernel_quadrature(r: float, cutoff: float, resolution: int = 8,
                              tail: float = 40.0) -> float:
    """int d^3q/(2 pi)^3 e^{i q.x}/|q|^2 for |x| = r, with a soft radial cutoff.

    The solid-angle average of the plane wave is sin(qr)/(qr); the remaining
    radial integral (1/(2 pi^2 r)) int sin(qr)/q e^{-q/cutoff} dq is done with
    Gauss-Legendre panels of width pi/r, ``resolution`` nodes each, out to
    ``tail * cutoff``.
    """
    if resolution < 2:
        raise ResolutionError("quadrature_resolution must be at least 2")
    nodes, wts = np.polynomial.legendre.leggauss(int(resolution))
    panel = math.pi / r
    n_panels = int(math.ceil(tail * cutoff / panel))
    left = panel * np.arange(n_panels)
    q = (left[:, None] + 0.5 * panel * (nodes[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * panel * wts, n_panels)
    # sin(qr)/q written via sinc to stay finite at q -> 0
    integrand = r * np.sinc(q * r / math.pi) * np.exp(-q / cutoff)
    return float(integrand @ w) / (2.0 * math.pi ** 2 * r)


def potential_fourier_oracle(source: ChargeSource, x, cutoff: float,
                             quadrature_resolution: int = 8,
                             rtol: float | None = None) -> FourPotentialSample:
    """Potential of one source from direct momentum-space quadrature.

    Raises :class:`PrecisionError` when cutoff*|x - x_j| < 20 or when the
    regulator shortfall exceeds ``rtol``; the exception carries the estimate.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    r = float(np.linalg.norm(x - source.center))
    if r < SINGULAR_RADIUS:
        raise SingularityError("field point coincides with the source centre")
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    estimate = regulated_kernel_error(cutoff, r)
    if cutoff * r < 20.0:
        raise PrecisionError(
            f"cutoff*r = {cutoff * r:.3g} < 20 does not resolve the integrand "
            f"(estimated relative error {estimate:.3e})", achieved=estimate)
    if rtol is not None and estimate > rtol:
        raise PrecisionError(
            f"estimated relative error {estimate:.3e} exceeds rtol {rtol:.3e}", achieved=estimate)
    kernel = coulomb_kernel_quadrature(r, cutoff, quadrature_resolution)
    a = source.charge_weights * kernel
    return FourPotentialSample(float(a[0]), a[1:].copy(), x)


# --------------------------------------------------------------------------
# regularised currents on a lattice

def _smeared_kernel_derivs(r: np.ndarray, width: float):
    """psi'(r)/r and psi''(r) for psi = erf(r/(sqrt2 w))/(4 pi r).

    psi is the Coulomb kernel convolved with a normalised Gaussian of
    standard deviation ``width``; small r uses the Taylor series.
    """
    a = math.sqrt(2.0) * width
    s = r / a
    c = 2.0 / (math.sqrt(math.pi) * FOUR_PI * a)
    small = s < 1e-2
    ss = np.where(small, 1.0, s)
    f = erf(ss)
    fp = 2.0 / math.sqrt(math.pi) * np.exp(-ss * ss)  # d erf / ds
    # psi = f/(4 pi a s); derivatives in s then rescaled by 1/a
    d1_over_s = (fp * ss - f) / (FOUR_PI * a * ss ** 3) / a ** 2
    d2 = (-2.0 * ss * fp * ss ** 2 - 2.0 * (fp * ss - f)) / (FOUR_PI * a * ss ** 3) / a ** 2
    s2 = s * s
    d1_series = c / a ** 2 * (-2.0 / 3.0 + 0.4 * s2 - s2 * s2 / 7.0)
    d2_series = c / a ** 2 * (-2.0 / 3.0 + 1.2 * s2 - 5.0 * s2 * s2 / 7.0)
    return np.where(small, d1_series, d1_over_s), np.where(small, d2_series, d2)


def _gaussian(r2: np.ndarray, width: float) -> np.ndarray:
    return np.exp(-0.5 * r2 / width ** 2) / (2.0 * math.pi * width ** 2) ** 1.5


def current_array(ensemble: SourceEnsemble, points, width: float,
                  transverse: bool = True) -> np.ndarray:
    """Regularised four-current (j0, jx, jy, jz) at ``points`` (n, 3).

    Point sources become Gaussian bumps of standard deviation ``width``. With
    ``transverse`` the spatial part keeps only its divergence-free (transverse)
    Fourier component: j_T = c g + Hess(psi) c for the bump g and the smeared
    Coulomb kernel psi.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    W = ensemble.weights

    def kernel(p):
        d = p[:, None, :] - ensemble.centers[None, :, :]
        r2 = np.einsum("njc,njc->nj", d, d)
        g = _gaussian(r2, width)
        out = np.empty((len(p), 4))
        out[:, 0] = g @ W[:, 0]
        out[:, 1:] = g @ W[:, 1:]
        if transverse:
            r = np.sqrt(r2)
            d1_over_r, d2 = _smeared_kernel_derivs(r, width)
            safe_r2 = np.where(r2 > 0, r2, 1.0)
            dc = np.einsum("njc,jc->nj", d, W[:, 1:])
            # Hess psi . c = (psi'/r) c + (psi'' - psi'/r) (d.c) d / r^2
            radial = np.where(r2 > 0, (d2 - d1_over_r) * dc / safe_r2, 0.0)
            out[:, 1:] += d1_over_r @ W[:, 1:] + np.einsum("nj,njc->nc", radial, d)
        return out

    return map_points(kernel, points, width=len(ensemble))


def _check_width(grid: GridSpec, width):
    if width is None:
        width = 2.0 * grid.spacing
    if width < 2.0 * grid.spacing * (1 - 1e-12):
        raise ResolutionError(
            f"bump width {width:.3g} is below twice the grid spacing {grid.spacing:.3g}")
    return float(width)


def current_density(ensemble: SourceEnsemble, grid: GridSpec, width: float | None = None,
                    transverse: bool = True) -> GridField:
    width = _check_width(grid, width)
    vals = current_array(ensemble, grid.nodes().reshape(-1, 3), width, transverse)
    return GridField(grid, ("j0", "jx", "jy", "jz"), vals.reshape(grid.dims + (4,)),
                     {"width": width, "transverse": transverse})


def potential_grid(ensemble: SourceEnsemble, grid: GridSpec) -> GridField:
    """Closed-form (phi, A) on every node; nodes on a source centre hold NaN."""
    vals = potential_array(ensemble, grid.nodes().reshape(-1, 3), singular="nan")
    return GridField(grid, ("phi", "Ax", "Ay", "Az"), vals.reshape(grid.dims + (4,)))


def field_grid(ensemble: SourceEnsemble, grid: GridSpec) -> GridField:
    pts = grid.nodes().reshape(-1, 3)
    pot = potential_array(ensemble, pts, singular="nan")
    E, B = field_arrays(ensemble, pts, singular="nan")
    vals = np.hstack([pot, E, B]).reshape(grid.dims + (10,))
    return GridField(grid, ("phi", "Ax", "Ay", "Az", "Ex", "Ey", "Ez", "Bx", "By", "Bz"), vals)


# --------------------------------------------------------------------------
# finite-difference checks

def _second_diff(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centred second derivative on the interior of a 1-node padded array."""
    sl = [slice(1, -1)] * 3
    lo, hi = list(sl), list(sl)
    lo[axis], hi[axis] = slice(0, -2), slice(2, None)
    return (f[tuple(hi)] - 2.0 * f[tuple(sl)] + f[tuple(lo)]) / h ** 2


def _mixed_diff(f: np.ndarray, a: int, b: int, h: float) -> np.ndarray:
    """Centred d^2 f / dx_a dx_b (a != b) on the interior of a padded array."""
    def shifted(sa, sb):
        s = [slice(1, -1)] * 3
        s[a] = slice(1 + sa, f.shape[a] - 1 + sa)
        s[b] = slice(1 + sb, f.shape[b] - 1 + sb)
        return f[tuple(s)]
    return (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h)


def laplacian_minus_graddiv(A: np.ndarray, h: float) -> np.ndarray:
    """Discrete Lap A^mu - grad(div A) for a padded (nx+2, ny+2, nz+2, 4) array.

    The gradient-of-divergence term only has spatial components, so the
    mu = 0 entry is the plain Laplacian of phi.
    """
    out = np.empty(tuple(n - 2 for n in A.shape[:3]) + (4,))
    for mu in range(4):
        out[..., mu] = sum(_second_diff(A[..., mu], ax, h) for ax in range(3))
    for i in range(3):
        graddiv = 0.0
        for j in range(3):
            comp = A[..., 1 + j]
            graddiv = graddiv + (_second_diff(comp, i, h) if i == j else _mixed_diff(comp, i, j, h))
        out[..., 1 + i] -= graddiv
    return out


def min_source_distance(ensemble: SourceEnsemble, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return map_points(lambda p: np.linalg.norm(p[:, None, :] - ensemble.centers[None], axis=-1)
                      .min(axis=1)[:, None], pts, width=len(ensemble))[:, 0]


def maxwell_residual(ensemble: SourceEnsemble, grid: GridSpec, width: float | None = None,
                     exclusion: float | None = None) -> GridField:
    """Per-node residual of  Lap A^mu - grad(div A) = -j^mu  for the static ensemble.

    Nodes closer than ``exclusion`` (default 3h) to a source hold NaN.
    ``metadata["resolution_warning"]`` is set when the nearest kept node lies
    within 10h of a source.
    """
    h = grid.spacing
    width = _check_width(grid, width)
    exclusion = 3.0 * h if exclusion is None else float(exclusion)
    padded = grid.padded(1)
    A = potential_array(ensemble, padded.nodes().reshape(-1, 3), singular="nan")
    lhs = laplacian_minus_graddiv(A.reshape(padded.dims + (4,)), h)
    pts = grid.nodes().reshape(-1, 3)
    j = current_array(ensemble, pts, width).reshape(grid.dims + (4,))
    res = lhs + j
    dist = min_source_distance(ensemble, pts).reshape(grid.dims)
    keep = dist >= exclusion
    res[~keep] = np.nan
    kept = dist[keep]
    nearest = float(kept.min()) if kept.size else float("nan")
    meta = {
        "width": width,
        "exclusion": exclusion,
        "nearest_node": nearest,
        "resolution_warning": bool(kept.size == 0 or h > 0.1 * nearest),
        "max_abs": [float(np.nanmax(np.abs(res[..., m]))) if kept.size else float("nan")
                    for m in range(4)],
    }
    return GridField(grid, ("res0", "res1", "res2", "res3"), res, meta)


def residual_convergence(ensemble: SourceEnsemble, grid: GridSpec, r_min: float,
                         width: float | None = None):
    """Max |residual| on ``grid`` and on its halved-spacing refinement.

    Both maxima are taken over nodes at least ``r_min`` from every source, so
    the compared region is the same physical set. Returns
    (coarse_max, fine_max, ratio) with one max per component; a component
    that vanishes identically on both grids gets a NaN ratio.
    """
    out = []
    for g in (grid, grid.refined()):
        w = None if width is None else max(width, 2.0 * g.spacing)
        field = maxwell_residual(ensemble, g, width=w, exclusion=r_min)
        out.append(np.array(field.metadata["max_abs"]))
    coarse, fine = out
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = coarse / fine
    return coarse, fine, ratio


# --------------------------------------------------------------------------
# flux / circulation quadratures

def gauss_flux(ensemble: SourceEnsemble, center, radius: float, n_theta: int = 200,
               n_phi: int = 400) -> float:
    """Midpoint-rule flux of E through a sphere."""
    c = np.asarray(center, dtype=float).reshape(3)
    th = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    ph = (np.arange(n_phi) + 0.5) * 2.0 * math.pi / n_phi
    T, P = np.meshgrid(th, ph, indexing="ij")
    n = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)
    dA = (radius ** 2 * np.sin(T) * (math.pi / n_theta) * (2.0 * math.pi / n_phi)).ravel()
    E, _ = field_arrays(ensemble, c + radius * n)
    return float(np.einsum("nc,nc,n->", E, n, dA))


def _frame(normal):
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    t = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, t)
    e1 /= np.linalg.norm(e1)
    return n, e1, np.cross(n, e1)


def circle_points(center, normal, radius: float, n: int):
    """Points and tangent vectors (|t| = 2 pi R / n) of a right-handed circle."""
    nrm, e1, e2 = _frame(normal)
    t = 2.0 * math.pi * np.arange(n) / n
    c = np.asarray(center, dtype=float)
    pts = c + radius * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    tang = radius * (-np.sin(t)[:, None] * e1 + np.cos(t)[:, None] * e2) * (2.0 * math.pi / n)
    return pts, tang


def disk_quadrature(center, normal, radius: float, n_radial: int, n_angular: int,
                    inner: float = 0.0, panels: int = 1):
    """Nodes and vector area weights n dA for a flat disk (or annulus).

    Radial Gauss-Legendre on ``panels`` equal panels, uniform angle.
    """
    nrm, e1, e2 = _frame(normal)
    x, w = np.polynomial.legendre.leggauss(n_radial)
    edges = np.linspace(inner, radius, panels + 1)
    rho = np.concatenate([0.5 * (b - a) * (x + 1) + a for a, b in zip(edges[:-1], edges[1:])])
    wr = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    t = 2.0 * math.pi * (np.arange(n_angular) + 0.5) / n_angular
    R, T = np.meshgrid(rho, t, indexing="ij")
    pts = (np.asarray(center, dtype=float)
           + R[..., None] * (np.cos(T)[..., None] * e1 + np.sin(T)[..., None] * e2)).reshape(-1, 3)
    area = (R * wr[:, None] * (2.0 * math.pi / n_angular)).ravel()
    return pts, area[:, None] * nrm


def ampere_check(ensemble: SourceEnsemble, center, normal, radius: float, width: float,
                 n_loop: int = 2048, n_radial: int = 64, n_angular: int = 256, panels: int = 8):
    """Circulation of B around a circle and flux of the regularised j through its disk.

    Returns ``(circulation, enclosed_current)``. The two agree when the loop
    keeps several ``width`` away from every source.
    """
    pts, tang = circle_points(center, normal, radius, n_loop)
    _, B = field_arrays(ensemble, pts)
    circulation = float(np.einsum("nc,nc->", B, tang))
    nodes, dS = disk_quadrature(center, normal, radius, n_radial, n_angular, panels=panels)
    j = current_array(ensemble, nodes, width)
    enclosed = float(np.einsum("nc,nc->", j[:, 1:], dS))
    return circulation, enclosed
