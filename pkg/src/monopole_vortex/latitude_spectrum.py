"""Latitude eigenproblem for one winding sector.

With ``psi = exp(i m_N phi) Theta / sqrt(2 pi)`` on the north patch and
``exp(-i m_S phi) Theta / sqrt(2 pi)`` on the south patch, Theta(z), z = cos(theta),
solves

    -d/dz (1 - z^2) dTheta/dz + [F^2 / (1 - z^2) + r0^2 W] Theta = lam Theta

on (-1, 1).  It is discretized in conservation form on a cell-centred grid, so
the flux weight vanishes at the two outermost half-points and no boundary
condition is imposed explicitly.

Near the poles Theta ~ (1 - z)^{|m_N|/2} (1 + z)^{|m_S|/2}.  The default
("pole-fitted") stencil builds that factor into the flux and potential
coefficients, which keeps the scheme second order for odd pole windings.  The
plain stencil (``pole_fitted=False``) is kept for comparison; it is only first
order when a pole winding equals 1.  Both produce a symmetric tridiagonal
matrix acting directly on nodal values of Theta.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from . import tridiag
from .errors import ConvergenceError, DomainError, SectorMismatchError
from .gauge_field import GaugeProfile, ModesLike, as_profile

log = logging.getLogger(__name__)

__all__ = [
    "Sector",
    "LatitudeGrid",
    "LatitudeOperator",
    "LatitudeMode",
    "sector_make",
    "f_cap_profile",
    "assemble",
    "eigen_lowest",
    "eigenvalues_lowest",
    "solve_sector",
    "ground_energy",
    "legendre_reference",
    "DEGENERACY_RTOL",
    "is_degenerate",
]

DEGENERACY_RTOL = 1e-8
_EPS = np.finfo(float).eps
_MAX_BISECT = 400
_MAX_INVERSE = 8


@dataclass(frozen=True)
class Sector:
    """Winding pair (m_N, m_S) with m_N + m_S = cn."""

    m_N: int
    m_S: int
    cn: int

    def __post_init__(self):
        if self.m_N + self.m_S != self.cn:
            raise SectorMismatchError(
                f"m_N + m_S = {self.m_N + self.m_S} != CN = {self.cn}")

    def mirror(self) -> "Sector":
        return Sector(self.m_S, self.m_N, self.cn)

    def pole_exponents(self) -> Tuple[float, float]:
        """Leading powers (a, b) of (1 - z) and (1 + z) in Theta."""
        return abs(self.m_N) / 2.0, abs(self.m_S) / 2.0

    def as_tuple(self):
        return (self.m_N, self.m_S)


def sector_make(cn: int, m_N: int) -> Sector:
    return Sector(int(m_N), int(cn) - int(m_N), int(cn))


@dataclass(frozen=True)
class LatitudeGrid:
    """Uniform cell-centred grid on [-1, 1] with an even number of cells.

    Node and half-point coordinates are mirrored explicitly so the grid is
    exactly symmetric under z -> -z in floating point.
    """

    n_cells: int

    def __post_init__(self):
        n = self.n_cells
        if isinstance(n, bool) or int(n) != n or n < 4 or n % 2:
            raise ValueError(f"n_cells must be an even integer >= 4, got {n!r}")

    @property
    def h(self) -> float:
        return 2.0 / self.n_cells

    @cached_property
    def nodes(self) -> np.ndarray:
        n = self.n_cells
        left = -1.0 + (np.arange(n // 2) + 0.5) * self.h
        z = np.concatenate([left, -left[::-1]])
        z.setflags(write=False)
        return z

    @cached_property
    def half_points(self) -> np.ndarray:
        n = self.n_cells
        left = -1.0 + np.arange(n // 2) * self.h
        z = np.concatenate([left, [0.0], -left[::-1]])
        z.setflags(write=False)
        return z


def check_sector(modes: ModesLike, sector: Sector) -> GaugeProfile:
    prof = as_profile(modes)
    if sector.cn != prof.chern:
        raise SectorMismatchError(
            f"sector {sector.as_tuple()} has CN={sector.cn} but the gauge has CN={prof.chern}; "
            "F would jump at the equator")
    return prof


def f_cap_profile(modes: ModesLike, sector: Sector, z):
    """Effective azimuthal charge F(z): f - f(0) - m_N north, m_S - f + f(0) south."""
    prof = check_sector(modes, sector)
    zz = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(zz) | (np.abs(zz) > 1.0)):
        raise DomainError("z must lie in [-1, 1]")
    out = _f_cap(prof, sector, zz)
    return float(out) if out.ndim == 0 else out


def _f_cap(prof: GaugeProfile, sector: Sector, z: np.ndarray) -> np.ndarray:
    shift = prof.shift_z(z)
    return np.where(z >= 0.0, shift - sector.m_N, sector.m_S - shift)


def _pole_factor(z, a, b):
    z = np.asarray(z, dtype=float)
    return (1.0 - z) ** a * (1.0 + z) ** b


@dataclass(frozen=True, eq=False)
class LatitudeOperator:
    """Symmetric tridiagonal discretization of the latitude operator.

    ``diagonal``/``offdiagonal`` are the matrix acting on nodal Theta values.
    ``flux`` (length n+1, zero at both ends), ``weights`` and ``potential``
    record the conservation-form pieces: in the variable g = Theta / weights
    the operator is ``-(flux g')' + weights**2 * potential * g``.
    """

    grid: LatitudeGrid
    sector: Sector
    profile: GaugeProfile
    diagonal: np.ndarray
    offdiagonal: np.ndarray
    flux: np.ndarray
    weights: np.ndarray
    potential: np.ndarray
    pole_fitted: bool = True

    @property
    def size(self) -> int:
        return self.diagonal.shape[0]

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        off = np.abs(self.offdiagonal)
        radius = np.abs(self.diagonal).copy()
        radius[:-1] += off
        radius[1:] += off
        return float(radius.max())

    def gershgorin(self) -> Tuple[float, float]:
        off = np.abs(self.offdiagonal)
        r = np.zeros_like(self.diagonal)
        r[:-1] += off
        r[1:] += off
        return float(np.min(self.diagonal - r)), float(np.max(self.diagonal + r))

    def derivative_part(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flux-difference matrix (diag, off) in the g variable; rows sum to zero."""
        h2 = self.grid.h**2
        return (self.flux[:-1] + self.flux[1:]) / h2, -self.flux[1:-1] / h2

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diagonal * v
        out[:-1] += self.offdiagonal * v[1:]
        out[1:] += self.offdiagonal * v[:-1]
        return out


def assemble(modes: ModesLike, sector: Sector, grid: LatitudeGrid,
             pole_fitted: bool = True) -> LatitudeOperator:
    """Assemble the latitude operator for ``sector`` on ``grid``."""
    prof = check_sector(modes, sector)
    z = grid.nodes
    zh = grid.half_points
    h2 = grid.h**2
    one_m = 1.0 - z * z
    F = _f_cap(prof, sector, z)
    W = prof.w_z(z)

    p_half = 1.0 - zh * zh
    p_half[0] = p_half[-1] = 0.0

    if not pole_fitted:
        diag = (p_half[:-1] + p_half[1:]) / h2 + F * F / one_m + W
        off = -p_half[1:-1] / h2
        weights = np.ones_like(z)
        return LatitudeOperator(grid, sector, prof, diag, off, p_half, weights,
                                F * F / one_m + W, pole_fitted=False)

    a, b = sector.pole_exponents()
    weights = _pole_factor(z, a, b)
    flux = p_half * _pole_factor(zh, a, b) ** 2
    flux[0] = flux[-1] = 0.0

    # (w(z_half) / w(z_i))**2, evaluated as ratios to avoid under/overflow near poles
    def ratio2(zh_, zi):
        return ((1.0 - zh_) / (1.0 - zi)) ** (2 * a) * ((1.0 + zh_) / (1.0 + zi)) ** (2 * b)

    left = p_half[:-1] * ratio2(zh[:-1], z)
    right = p_half[1:] * ratio2(zh[1:], z)
    left[0] = 0.0
    right[-1] = 0.0

    s = b * (1.0 - z) - a * (1.0 + z)
    potential = (F * F - s * s) / one_m + (a + b) + W

    diag = (left + right) / h2 + potential
    zl, zr, zm = z[:-1], z[1:], zh[1:-1]
    cross = (((1.0 - zm) ** 2 / ((1.0 - zl) * (1.0 - zr))) ** a
             * ((1.0 + zm) ** 2 / ((1.0 + zl) * (1.0 + zr))) ** b)
    off = -p_half[1:-1] * cross / h2
    return LatitudeOperator(grid, sector, prof, diag, off, flux, weights, potential)


@dataclass(frozen=True, eq=False)
class LatitudeMode:
    """Eigenpair of the latitude operator, normalized so that sum(Theta^2) h = 1.

    Calling the mode evaluates Theta off-grid: the pole factor is divided out,
    the smooth remainder is interpolated by a local cubic through the four
    nearest nodes, and the factor is multiplied back in.
    """

    lam: float
    theta_values: np.ndarray
    sector: Sector
    grid: LatitudeGrid
    profile: GaugeProfile = field(repr=False, default=None)

    @cached_property
    def _smooth(self) -> np.ndarray:
        a, b = self.sector.pole_exponents()
        return self.theta_values / _pole_factor(self.grid.nodes, a, b)

    def __call__(self, z):
        zz = np.asarray(z, dtype=float)
        if np.any(~np.isfinite(zz) | (np.abs(zz) > 1.0)):
            raise DomainError("z must lie in [-1, 1]")
        n, h = self.grid.n_cells, self.grid.h
        nodes = self.grid.nodes
        j0 = np.clip(np.floor((zz + 1.0) / h - 0.5).astype(int) - 1, 0, n - 4)
        t = (zz - nodes[j0]) / h
        g = self._smooth
        val = (-(t - 1) * (t - 2) * (t - 3) / 6.0 * g[j0]
               + t * (t - 2) * (t - 3) / 2.0 * g[j0 + 1]
               - t * (t - 1) * (t - 3) / 2.0 * g[j0 + 2]
               + t * (t - 1) * (t - 2) / 6.0 * g[j0 + 3])
        a, b = self.sector.pole_exponents()
        out = val * _pole_factor(zz, a, b)
        return float(out) if out.ndim == 0 else out

    def norm(self) -> float:
        return float(np.sum(self.theta_values**2) * self.grid.h)

    def expectation_z(self) -> float:
        return float(np.sum(self.grid.nodes * self.theta_values**2) * self.grid.h)

    def interior_sign_changes(self) -> int:
        v = self.theta_values
        scale = np.max(np.abs(v))
        s = np.sign(np.where(np.abs(v) > 1e-12 * scale, v, 0.0))
        s = s[s != 0]
        return int(np.count_nonzero(s[1:] != s[:-1]))


def _start_vector(n: int, j: int) -> np.ndarray:
    i = np.arange(n)
    return 1.0 + 0.5 * np.cos(0.6180339887498949 * (i + 1) * (j + 1))


def eigenvalues_lowest(op: LatitudeOperator, k: int, tol: float = 1e-12) -> np.ndarray:
    """The ``k`` algebraically smallest eigenvalues by Sturm-sequence bisection."""
    n = op.size
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    d = np.ascontiguousarray(op.diagonal, dtype=float)
    e2 = np.ascontiguousarray(op.offdiagonal**2, dtype=float)
    lo, hi = op.gershgorin()
    spread = max(1.0, abs(lo), abs(hi))
    lo -= 2 * _EPS * spread * n
    hi += 2 * _EPS * spread * n
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))
    out = np.empty(k)
    floor = lo
    for j in range(k):
        val, its = tridiag.bisect_eigenvalue(d, e2, j, floor, hi, tol, pivmin, _MAX_BISECT)
        if its >= _MAX_BISECT:
            raise ConvergenceError(f"bisection for eigenvalue {j} did not converge",
                                   index=j, iterations=its)
        out[j] = val
        floor = max(floor, val - max(tol, 8 * _EPS * abs(val)))
    return out


def eigen_lowest(op: LatitudeOperator, k: int, tol: float = 1e-12) -> List[LatitudeMode]:
    """Lowest ``k`` eigenpairs: bisection for values, inverse iteration for vectors.

    Vectors are orthogonalized within clusters of close eigenvalues, normalized
    to ``sum(Theta^2) h = 1`` and signed positive at their largest entry.
    """
    lams = eigenvalues_lowest(op, k, tol)
    d = np.ascontiguousarray(op.diagonal, dtype=float)
    e = np.ascontiguousarray(op.offdiagonal, dtype=float)
    n = op.size
    tnorm = op.norm_bound()
    pivfloor = _EPS * max(tnorm, 1.0)
    resid_tol = 100.0 * _EPS * max(tnorm, 1.0) * math.sqrt(n)
    vecs: List[np.ndarray] = []
    modes = []
    for j, lam in enumerate(lams):
        cluster = [vecs[i] for i in range(j)
                   if abs(lams[i] - lam) <= 1e-3 * max(1.0, abs(lam))]
        v = _start_vector(n, j)
        v /= np.linalg.norm(v)
        resid = math.inf
        for it in range(1, _MAX_INVERSE + 1):
            v = tridiag.inverse_iterate(d, e, float(lam), v, pivfloor)
            for u in cluster:
                v = v - np.dot(u, v) * u
            v /= np.linalg.norm(v)
            resid = float(np.linalg.norm(op.matvec(v) - lam * v))
            if it >= 2 and resid <= resid_tol:
                break
        else:
            raise ConvergenceError(
                f"inverse iteration for eigenvalue {j} stalled at residual {resid:.3e}",
                index=j, iterations=_MAX_INVERSE, residual=resid)
        vecs.append(v)
        theta = v / math.sqrt(op.grid.h)
        if theta[np.argmax(np.abs(theta))] < 0:
            theta = -theta
        theta.setflags(write=False)
        modes.append(LatitudeMode(float(lam), theta, op.sector, op.grid, op.profile))
    return modes


def solve_sector(modes: ModesLike, sector: Sector, grid: LatitudeGrid, k: int = 1,
                 tol: float = 1e-12) -> List[LatitudeMode]:
    return eigen_lowest(assemble(modes, sector, grid), k, tol)


def ground_energy(modes: ModesLike, sector: Sector, grid: LatitudeGrid,
                  tol: float = 1e-12) -> float:
    return float(eigenvalues_lowest(assemble(modes, sector, grid), 1, tol)[0])


def legendre_reference(l: int, m: int) -> int:
    """l(l+1), the gauge-free spectrum; requires l >= |m|."""
    if l < abs(m):
        raise ValueError(f"need l >= |m|, got l={l}, m={m}")
    return l * (l + 1)


def is_degenerate(lam_a: float, lam_b: float, rtol: Optional[float] = None) -> bool:
    rtol = DEGENERACY_RTOL if rtol is None else rtol
    return abs(lam_a - lam_b) <= rtol * max(1.0, abs(lam_a))
