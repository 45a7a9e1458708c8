"""Two-patch U(1) gauge field on the sphere built from a pair of Laguerre modes.

Everything here is a closed-form function of the polar angle.  The profile

    f(theta) = [l1 + l2 s^(2D)] / [1 + s^(2D)],   s = sin(theta), D = l2 - l1

fixes the north-patch connection ``A_N = [f(theta) - f(0)] dphi`` and the
south-patch connection ``A_S = -[f(theta) - f(0)] dphi``.  The scalar
potential W is returned in units of ``1/r0**2``.

Functions accept either a :class:`LaserModePair` or a :class:`GaugeProfile`;
``GaugeProfile.disabled()`` switches the gauge off (f = 0, W = 0), which turns
the latitude equation into the ordinary associated Legendre equation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError

__all__ = [
    "LaserModePair",
    "GaugeProfile",
    "HemisphereTag",
    "GAUGE_OFF",
    "as_profile",
    "f_profile",
    "f_derivative",
    "beta_gamma_from_lasers",
    "gauge_a_phi",
    "scalar_w",
    "scalar_w_from_definition",
    "chern_analytic",
    "chern_quadrature",
    "equator_jump",
]

_GL_PANEL_NODES = 8


@dataclass(frozen=True)
class LaserModePair:
    """Azimuthal Laguerre indices of the two coupling beams, ``0 <= l1 < l2``."""

    l1: int
    l2: int

    def __post_init__(self):
        for name in ("l1", "l2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        if not 0 <= self.l1 < self.l2:
            raise ValueError(f"need 0 <= l1 < l2, got l1={self.l1}, l2={self.l2}")

    def delta(self) -> int:
        return int(self.l2 - self.l1)


class HemisphereTag(enum.Enum):
    NORTH = "north"
    SOUTH = "south"

    def theta_range(self):
        if self is HemisphereTag.NORTH:
            return 0.0, math.pi / 2
        return math.pi / 2, math.pi


@dataclass(frozen=True)
class GaugeProfile:
    """Gauge profile for a mode pair, or the switched-off gauge when ``modes`` is None."""

    modes: Optional[LaserModePair]

    @classmethod
    def disabled(cls) -> "GaugeProfile":
        return cls(None)

    @property
    def enabled(self) -> bool:
        return self.modes is not None

    @property
    def delta(self) -> int:
        return self.modes.delta() if self.modes is not None else 0

    @property
    def f0(self) -> float:
        """f(0) = l1; the gauge is fixed by subtracting it on both patches."""
        return float(self.modes.l1) if self.modes is not None else 0.0

    @property
    def chern(self) -> int:
        return self.delta

    # -- z = cos(theta) forms, shared with the latitude solver ----------------

    def shift_z(self, z):
        """f(theta) - f(0) written through z; even in z by construction."""
        z = np.asarray(z, dtype=float)
        if not self.enabled:
            return np.zeros_like(z)
        d = self.delta
        u = (1.0 - z * z) ** d
        return d * u / (1.0 + u)

    def w_z(self, z):
        """r0**2 W written through z (singularity-free form)."""
        z = np.asarray(z, dtype=float)
        if not self.enabled:
            return np.zeros_like(z)
        d = self.delta
        s2 = 1.0 - z * z
        u = s2**d
        return d * d * (1.0 + z * z) * s2 ** (d - 1) / (1.0 + u) ** 2


GAUGE_OFF = GaugeProfile.disabled()

ModesLike = Union[LaserModePair, GaugeProfile]


def as_profile(modes: ModesLike) -> GaugeProfile:
    if isinstance(modes, GaugeProfile):
        return modes
    if isinstance(modes, LaserModePair):
        return GaugeProfile(modes)
    raise TypeError(f"expected LaserModePair or GaugeProfile, got {type(modes).__name__}")


def _angles(theta, lo=0.0, hi=math.pi, lo_open=False):
    arr = np.asarray(theta, dtype=float)
    bad = ~np.isfinite(arr) | (arr > hi) | ((arr <= lo) if lo_open else (arr < lo))
    if np.any(bad):
        first = arr[bad].flat[0] if arr.ndim else float(arr)
        bracket = "(" if lo_open else "["
        raise DomainError(f"theta={first!r} outside {bracket}{lo}, {hi}]")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def f_profile(modes: ModesLike, theta):
    """Gauge profile f(theta) on [0, pi]."""
    prof = as_profile(modes)
    t = _angles(theta)
    if not prof.enabled:
        return _out(np.zeros_like(t))
    l1, l2 = prof.modes.l1, prof.modes.l2
    u = np.sin(t) ** (2 * prof.delta)
    return _out((l1 + l2 * u) / (1.0 + u))


def f_derivative(modes: ModesLike, theta):
    """Exact df/dtheta = cos(theta) 2 D^2 s^(2D-1) / (1 + s^(2D))^2."""
    prof = as_profile(modes)
    t = _angles(theta)
    if not prof.enabled:
        return _out(np.zeros_like(t))
    d = prof.delta
    s = np.sin(t)
    u = s ** (2 * d)
    return _out(np.cos(t) * 2 * d * d * s ** (2 * d - 1) / (1.0 + u) ** 2)


def beta_gamma_from_lasers(modes: LaserModePair, theta):
    """Mixing angle beta(theta), its derivative and the phase slopes of gamma_j.

    On the north patch ``tan(beta) = sin(theta)**D`` and ``gamma_j = -l_j phi``.

    Returns
    -------
    beta, dbeta_dtheta, (slope1, slope2)
    """
    if not isinstance(modes, LaserModePair):
        raise TypeError("beta/gamma need an explicit LaserModePair")
    t = _angles(theta, 0.0, math.pi / 2)
    d = modes.delta()
    s = np.sin(t)
    beta = np.arctan(s**d)
    dbeta = d * s ** (d - 1) * np.cos(t) / (1.0 + s ** (2 * d))
    return _out(beta), _out(dbeta), (-modes.l1, -modes.l2)


def gauge_a_phi(modes: ModesLike, hemisphere: HemisphereTag, theta):
    """Coefficient of dphi in the patch connection A_N or A_S (fixed gauge)."""
    prof = as_profile(modes)
    hemi = HemisphereTag(hemisphere)
    lo, hi = hemi.theta_range()
    t = _angles(theta, lo, hi)
    shift = np.asarray(f_profile(prof, t)) - prof.f0
    return _out(shift if hemi is HemisphereTag.NORTH else -shift)


def equator_jump(modes: ModesLike) -> float:
    """(A_N - A_S) at the equator, in units of dphi."""
    prof = as_profile(modes)
    half = math.pi / 2
    return gauge_a_phi(prof, HemisphereTag.NORTH, half) - gauge_a_phi(prof, HemisphereTag.SOUTH, half)


def scalar_w(modes: ModesLike, theta):
    """r0**2 W(theta) from the closed form D^2 (1 + cos^2) s^(2D-2) / (1 + s^(2D))^2.

    Equal to ``(1 + cos^2)/sin(2 theta) * df/dtheta`` wherever sin(2 theta) != 0 and
    its continuous extension at the poles and the equator.  Symmetric under
    theta -> pi - theta, so the same expression serves both patches.
    """
    prof = as_profile(modes)
    t = _angles(theta)
    if not prof.enabled:
        return _out(np.zeros_like(t))
    d = prof.delta
    s2 = np.sin(t) ** 2
    c2 = np.cos(t) ** 2
    return _out(d * d * (1.0 + c2) * s2 ** (d - 1) / (1.0 + s2**d) ** 2)


def scalar_w_from_definition(modes: LaserModePair, theta):
    """r0**2 W from the mixing angles: cos^2 sin^2 beta |dgamma1 - dgamma2|^2 + |dbeta|^2.

    Uses the round-sphere norms ``|dphi|^2 = 1/(r0 sin theta)^2`` and
    ``|dtheta|^2 = 1/r0^2``, which restricts theta to (0, pi/2].
    """
    t = _angles(theta, 0.0, math.pi / 2, lo_open=True)
    beta, dbeta, (g1, g2) = beta_gamma_from_lasers(modes, t)
    beta = np.asarray(beta)
    dphi_norm2 = 1.0 / np.sin(t) ** 2
    mix = (np.cos(beta) * np.sin(beta)) ** 2
    return _out(mix * (g1 - g2) ** 2 * dphi_norm2 + np.asarray(dbeta) ** 2)


def chern_analytic(modes: ModesLike) -> int:
    """CN = l2 - l1 (0 for the disabled gauge)."""
    return as_profile(modes).chern


def chern_quadrature(modes: ModesLike, n_samples: int = 1000) -> float:
    """CN from integrating the curvature, ``2 * int_0^{pi/2} f'(theta) dtheta``.

    Composite 8-point Gauss-Legendre; ``n_samples`` is the total node count and
    is split into ``max(1, n_samples // 8)`` equal panels.
    """
    if int(n_samples) != n_samples or n_samples < _GL_PANEL_NODES:
        raise ValueError(f"n_samples must be an integer >= {_GL_PANEL_NODES}, got {n_samples!r}")
    prof = as_profile(modes)
    if not prof.enabled:
        return 0.0
    panels = max(1, int(n_samples) // _GL_PANEL_NODES)
    x, w = np.polynomial.legendre.leggauss(_GL_PANEL_NODES)
    edges = np.linspace(0.0, math.pi / 2, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = f_derivative(prof, np.clip(nodes, 0.0, math.pi / 2))
    return float(2.0 * np.sum(half * (vals @ w)))
