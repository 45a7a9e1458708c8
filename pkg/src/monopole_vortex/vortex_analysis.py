"""Sphere wavefunctions built from latitude modes, their zeros and winding numbers.

A sector state is ``exp(i m_N phi) Theta / sqrt(2 pi)`` in the north gauge and
``exp(-i m_S phi) Theta / sqrt(2 pi)`` in the south gauge; the two differ by
``exp(i CN phi)``.  For CN = 1 the degenerate ground pair (1, 0) / (0, 1) spans
a Bloch sphere of superpositions, each with a single vortex whose position is
fixed by (chi, alpha).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import AmbiguousWindingError, MonopoleError, RootBracketError
from .gauge_field import ModesLike, as_profile
from .latitude_spectrum import (LatitudeGrid, LatitudeMode, Sector, is_degenerate,
                                sector_make, solve_sector)

log = logging.getLogger(__name__)

__all__ = [
    "BlochPoint",
    "VortexRecord",
    "SphereWavefunction",
    "sector_state",
    "ground_pair",
    "superpose",
    "psi_evaluate",
    "bloch_to_vortex",
    "vortex_to_bloch",
    "ratio_is_monotone",
    "find_zeros",
    "winding_number",
    "winding_with_residual",
    "total_winding",
    "ZERO_RTOL",
    "REFINED_RTOL",
    "WINDING_RESIDUAL_MAX",
]

ZERO_RTOL = 1e-3
REFINED_RTOL = 1e-6
WINDING_RESIDUAL_MAX = 0.15
_CANDIDATE_RTOL = 0.1
_TWO_PI = 2.0 * math.pi
_INV_SQRT_2PI = 1.0 / math.sqrt(_TWO_PI)


@dataclass(frozen=True)
class BlochPoint:
    chi: float
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.chi <= math.pi):
            raise ValueError(f"chi must lie in [0, pi], got {self.chi!r}")
        object.__setattr__(self, "alpha", float(self.alpha) % _TWO_PI)


@dataclass(frozen=True)
class VortexRecord:
    """A zero of psi with non-zero phase winding.

    ``phi`` is 0 by convention when ``at_pole`` is set.  ``winding_residual``
    is the distance of the raw phase sum / 2 pi from the reported integer.
    """

    theta: float
    phi: float
    winding: int
    residual_modulus: float
    at_pole: bool = False
    winding_residual: float = 0.0

    def unit_vector(self) -> np.ndarray:
        return _unit(self.theta, self.phi)


@dataclass(frozen=True, eq=False)
class SphereWavefunction:
    """Pure sector state, or the Bloch superposition of a mirrored degenerate pair."""

    mode_N: LatitudeMode
    mode_S: Optional[LatitudeMode] = None
    bloch: Optional[BlochPoint] = None

    def __post_init__(self):
        if self.bloch is None:
            return
        if self.mode_S is None:
            raise ValueError("a Bloch superposition needs both mode_N and mode_S")
        if self.mode_S.sector != self.mode_N.sector.mirror():
            raise ValueError(
                f"mode_S sector {self.mode_S.sector.as_tuple()} is not the mirror of "
                f"{self.mode_N.sector.as_tuple()}")
        if self.mode_S.grid != self.mode_N.grid:
            raise ValueError("superposed modes must share one grid")
        if not is_degenerate(self.mode_N.lam, self.mode_S.lam):
            raise ValueError("superposed modes are not degenerate")

    @property
    def cn(self) -> int:
        return self.mode_N.sector.cn

    def components(self) -> List[Tuple[complex, LatitudeMode]]:
        if self.bloch is None:
            return [(1.0 + 0j, self.mode_N)]
        half = 0.5 * self.bloch.chi
        return [(complex(math.cos(half)), self.mode_N),
                (complex(math.sin(half) * np.exp(1j * self.bloch.alpha)), self.mode_S)]

    def evaluate(self, theta, phi, gauge: Optional[str] = None):
        """psi(theta, phi); ``gauge`` forces "north" or "south" everywhere."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        theta, phi = np.broadcast_arrays(theta, phi)
        z = np.clip(np.cos(theta), -1.0, 1.0)
        if gauge is None:
            north = theta <= 0.5 * math.pi
        elif gauge in ("north", "south"):
            north = np.full(theta.shape, gauge == "north")
        else:
            raise ValueError(f"gauge must be 'north', 'south' or None, got {gauge!r}")
        out = np.zeros(theta.shape, dtype=complex)
        for coef, mode in self.components():
            m = np.where(north, mode.sector.m_N, -mode.sector.m_S)
            out += coef * np.exp(1j * m * phi) * np.asarray(mode(z))
        out *= _INV_SQRT_2PI
        return complex(out) if out.ndim == 0 else out

    def norm_squared(self) -> float:
        return float(sum(abs(c) ** 2 * m.norm() for c, m in self.components()))


def sector_state(modes: ModesLike, sector: Sector, grid: LatitudeGrid) -> SphereWavefunction:
    """Ground state of ``sector`` wrapped as a sphere wavefunction."""
    return SphereWavefunction(solve_sector(modes, sector, grid, 1)[0])


def ground_pair(modes: ModesLike, grid: LatitudeGrid) -> Tuple[LatitudeMode, LatitudeMode]:
    """Ground modes of sectors (1, 0) and (0, 1); requires CN = 1."""
    prof = as_profile(modes)
    if prof.chern != 1:
        raise ValueError(f"the Bloch pair is defined for CN = 1 only, got CN = {prof.chern}")
    mode_n = solve_sector(prof, sector_make(1, 1), grid, 1)[0]
    mode_s = solve_sector(prof, sector_make(1, 0), grid, 1)[0]
    return mode_n, mode_s


def superpose(mode_N: LatitudeMode, mode_S: LatitudeMode, chi: float, alpha: float) -> SphereWavefunction:
    """psi_N cos(chi/2) + psi_S exp(i alpha) sin(chi/2)."""
    return SphereWavefunction(mode_N, mode_S, BlochPoint(chi, alpha))


def psi_evaluate(state: SphereWavefunction, theta, phi, patch: Optional[str] = None):
    """Evaluate psi; ``patch`` selects the one-sided limit at the equator."""
    th = np.asarray(theta, dtype=float)
    if np.any((th < 0) | (th > math.pi)):
        raise ValueError("theta must lie in [0, pi]")
    return state.evaluate(theta, phi, gauge=patch)


# -- Bloch sphere <-> vortex location ---------------------------------------


def _require_cn1_pair(state: SphereWavefunction):
    if state.bloch is None:
        raise ValueError("state is not a Bloch superposition")
    if state.cn != 1 or state.mode_N.sector.as_tuple() != (1, 0):
        raise ValueError("the Bloch-vortex map is defined for the CN = 1 pair (1,0)/(0,1) only")


def bloch_to_vortex(state: SphereWavefunction) -> VortexRecord:
    """Vortex of a CN = 1 superposition: phi = alpha - pi, tan(chi/2) = Theta_N(z)/Theta_N(-z)."""
    _require_cn1_pair(state)
    chi, alpha = state.bloch.chi, state.bloch.alpha
    mode = state.mode_N
    c, s = math.cos(0.5 * chi), math.sin(0.5 * chi)

    def gap(z):
        return s * mode(-z) - c * mode(z)

    g_top, g_bottom = gap(1.0), gap(-1.0)
    if g_top == 0.0:
        z = 1.0
    elif g_bottom == 0.0:
        z = -1.0
    elif g_top > 0.0 > g_bottom:
        z = brentq(gap, -1.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    else:
        raise RootBracketError(
            f"no sign change for chi={chi}: gap(1)={g_top:.3e}, gap(-1)={g_bottom:.3e}")
    at_pole = abs(z) == 1.0
    theta = math.acos(z)
    phi = 0.0 if at_pole else (alpha - math.pi) % _TWO_PI
    modulus = abs(state.evaluate(theta, phi))
    return VortexRecord(theta, phi, 1, float(modulus), at_pole)


def vortex_to_bloch(mode_N: LatitudeMode, theta: float, phi: float) -> BlochPoint:
    """Inverse map: chi = 2 atan(Theta_N(theta)/Theta_N(pi - theta)), alpha = phi + pi."""
    if mode_N.sector.as_tuple() != (1, 0) or mode_N.sector.cn != 1:
        raise ValueError("vortex_to_bloch needs the (1, 0) ground mode of a CN = 1 gauge")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    z = math.cos(theta)
    chi = 2.0 * math.atan2(mode_N(z), mode_N(-z))
    return BlochPoint(min(max(chi, 0.0), math.pi), (phi + math.pi) % _TWO_PI)


def ratio_is_monotone(mode_N: LatitudeMode) -> bool:
    """Is Theta_N(theta)/Theta_N(pi - theta) strictly increasing on the grid nodes?"""
    v = mode_N.theta_values
    # nodes are mirrored exactly, so Theta_N(-z_i) is the reversed array
    ratio = v / v[::-1]
    return bool(np.all(np.diff(ratio) < 0.0))


# -- winding numbers ----------------------------------------------------------


def _unit(theta, phi):
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def _tangent_frame(theta, phi):
    e_theta = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi),
                        -math.sin(theta)])
    e_phi = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return _unit(theta, phi), e_theta, e_phi


def _to_angles(points):
    points = points / np.linalg.norm(points, axis=0)
    theta = np.arccos(np.clip(points[2], -1.0, 1.0))
    phi = np.arctan2(points[1], points[0]) % _TWO_PI
    return theta, phi


def winding_with_residual(state: SphereWavefunction, center: Tuple[float, float],
                          loop_radius: float, n_samples: int = 256) -> Tuple[int, float]:
    """Winding of psi around a small circle and the pre-rounding residual.

    The circle is traversed counter-clockwise seen from outside the sphere.
    Phases are taken in the gauge of the patch containing ``center``, which
    is smooth everywhere except at the opposite pole.
    """
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    if not 0.0 < loop_radius < 0.5 * math.pi:
        raise ValueError("loop_radius must lie in (0, pi/2)")
    theta0, phi0 = center
    c, e1, e2 = _tangent_frame(theta0, phi0)
    t = np.arange(n_samples) * (_TWO_PI / n_samples)
    pts = (math.cos(loop_radius) * c[:, None]
           + math.sin(loop_radius) * (np.cos(t) * e1[:, None] + np.sin(t) * e2[:, None]))
    theta, phi = _to_angles(pts)
    gauge = "north" if theta0 <= 0.5 * math.pi else "south"
    psi = state.evaluate(theta, phi, gauge=gauge)
    mod = np.abs(psi)
    if mod.min() <= 1e-12 * max(mod.max(), 1e-300):
        raise AmbiguousWindingError("loop passes through a zero of psi")
    steps = np.angle(np.roll(psi, -1) / psi)
    if np.max(np.abs(steps)) > 0.5 * math.pi:
        raise AmbiguousWindingError(
            f"phase step {np.max(np.abs(steps)):.3f} rad too large; increase n_samples")
    raw = float(np.sum(steps)) / _TWO_PI
    winding = int(round(raw))
    residual = abs(raw - winding)
    if residual > WINDING_RESIDUAL_MAX:
        raise AmbiguousWindingError(f"phase sum {raw:.4f} is not close to an integer")
    return winding, residual


def winding_number(state: SphereWavefunction, center: Tuple[float, float],
                   loop_radius: float, n_samples: int = 256) -> int:
    return winding_with_residual(state, center, loop_radius, n_samples)[0]


# -- zero search --------------------------------------------------------------


def _arc(u, v):
    return math.acos(min(1.0, max(-1.0, float(np.dot(u, v)))))


def _refine(state: SphereWavefunction, theta, phi, step):
    c, e1, e2 = _tangent_frame(theta, phi)

    def modulus2(x):
        p = c + x[0] * e1 + x[1] * e2
        th, ph = _to_angles(p[:, None])
        return abs(state.evaluate(th[0], ph[0])) ** 2

    simplex = np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
    res = minimize(modulus2, np.zeros(2), method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-13, "fatol": 1e-32,
                            "maxiter": 2000, "maxfev": 4000})
    p = c + res.x[0] * e1 + res.x[1] * e2
    th, ph = _to_angles(p[:, None])
    return float(th[0]), float(ph[0]), math.sqrt(max(res.fun, 0.0))


def find_zeros(state: SphereWavefunction, resolution: int = 256) -> List[VortexRecord]:
    """Locate the vortices of ``state`` by grid scan, local refinement and winding.

    The scan covers theta_j = j pi / resolution (both poles included) and
    phi_k = 2 pi k / resolution.  Grid local minima of |psi| below 0.1 max|psi|
    are refined by a Nelder-Mead search in the tangent plane; a refined point
    counts as a zero when |psi| <= 1e-3 max|psi| and its winding is non-zero.
    Poles where |psi| <= 1e-6 max|psi| are taken as zeros without refinement.
    """
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    res = int(resolution)
    cell = math.pi / res
    theta = np.arange(1, res) * cell
    phi = np.arange(res) * (2.0 * cell)
    grid = np.abs(state.evaluate(theta[:, None], phi[None, :]))
    pole_n = abs(state.evaluate(0.0, 0.0))
    pole_s = abs(state.evaluate(math.pi, 0.0))
    scale = max(float(grid.max()), pole_n, pole_s)

    candidates = []
    for pole_theta, value in ((0.0, pole_n), (math.pi, pole_s)):
        if value <= REFINED_RTOL * scale:
            candidates.append((value, pole_theta, 0.0, True))

    padded = np.vstack([np.full((1, res), pole_n), grid, np.full((1, res), pole_s)])
    is_min = np.ones_like(grid, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = np.roll(padded, -dj, axis=1)[1 + di:res + di]
            is_min &= grid <= shifted
    is_min &= grid <= _CANDIDATE_RTOL * scale
    for j, k in zip(*np.nonzero(is_min)):
        candidates.append((float(grid[j, k]), float(theta[j]), float(phi[k]), False))
    # pole minima that are not exact zeros still get refined
    for pole_theta, value, row in ((0.0, pole_n, grid[0]), (math.pi, pole_s, grid[-1])):
        if REFINED_RTOL * scale < value <= _CANDIDATE_RTOL * scale and value <= row.min():
            candidates.append((value, pole_theta, 0.0, False))

    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    seeds = []
    for cand in candidates:
        u = _unit(cand[1], cand[2])
        if all(_arc(u, _unit(s[1], s[2])) > 3 * cell for s in seeds):
            seeds.append(cand)

    records: List[VortexRecord] = []
    loop = 3 * cell
    for value, th, ph, exact_pole in seeds:
        if exact_pole:
            th_r, ph_r, mod = th, 0.0, value
        else:
            th_r, ph_r, mod = _refine(state, th, ph, 0.5 * cell)
            if mod > ZERO_RTOL * scale:
                continue
        at_pole = exact_pole or th_r < 1e-12 or th_r > math.pi - 1e-12
        if at_pole:
            th_r, ph_r = (0.0 if th_r < 0.5 * math.pi else math.pi), 0.0
        u = _unit(th_r, ph_r)
        if any(_arc(u, r.unit_vector()) <= 2 * cell for r in records):
            continue
        winding, wres = winding_with_residual(state, (th_r, ph_r), loop, 256)
        if winding == 0:
            log.debug("zero at (%.6f, %.6f) has no winding; skipped", th_r, ph_r)
            continue
        records.append(VortexRecord(th_r, ph_r, winding, float(mod), at_pole, wres))

    if not records and state.cn != 0:
        raise MonopoleError(f"no vortex found for CN = {state.cn}; resolution too coarse?")
    records.sort(key=lambda r: (r.theta, r.phi))
    return records


def total_winding(state: SphereWavefunction, resolution: int = 256) -> int:
    return int(sum(r.winding for r in find_zeros(state, resolution)))
