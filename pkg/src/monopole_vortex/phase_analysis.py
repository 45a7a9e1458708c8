"""Sector scans, degeneracy classification and the displacement order parameter."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import MonopoleError
from .gauge_field import ModesLike, as_profile
from .latitude_spectrum import (DEGENERACY_RTOL, LatitudeGrid, LatitudeMode, Sector,
                                assemble, eigen_lowest, sector_make)
from .vortex_analysis import SphereWavefunction

log = logging.getLogger(__name__)

__all__ = [
    "ScanRow",
    "SectorScanTable",
    "PhaseReport",
    "default_m_range",
    "sector_scan",
    "classify_phase",
    "order_parameter",
    "TRANSITION_NOTE",
]

TRANSITION_NOTE = (
    "CN is discrete, so the ground energy has no derivative with respect to it; "
    "the even/odd change of phase carries no transition order.")


@dataclass(frozen=True)
class ScanRow:
    sector: Sector
    lambda0: float = math.nan
    gap: float = math.nan
    failed: bool = False
    error: str = ""


@dataclass(frozen=True, eq=False)
class SectorScanTable:
    """Per-sector ground levels sorted by energy (ties by m_N), failed rows last."""

    rows: Tuple[ScanRow, ...]
    winners: Tuple[Sector, ...]
    cn: int
    tol: float
    modes: Optional[Dict[Tuple[int, int], LatitudeMode]] = field(default=None, repr=False)

    def row(self, m_N: int) -> ScanRow:
        for r in self.rows:
            if r.sector.m_N == m_N:
                return r
        raise KeyError(m_N)

    def ground_mode(self, sector: Sector) -> LatitudeMode:
        return self.modes[sector.as_tuple()]


@dataclass(frozen=True)
class PhaseReport:
    cn: int
    phase_label: str
    winning_sectors: Tuple[Tuple[int, int], ...]
    degenerate_pairs: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]
    order_parameter: Tuple[float, float, float]
    order_parameters: Dict[Tuple[int, int], Tuple[float, float, float]]
    note: str = TRANSITION_NOTE


def default_m_range(cn: int) -> Tuple[int, int]:
    """Inclusive m_N range [min(0, CN) - 2, max(0, CN) + 2]."""
    return min(0, cn) - 2, max(0, cn) + 2


def _winners(rows: Sequence[ScanRow], tol: float) -> Tuple[Sector, ...]:
    ok = [r for r in rows if not r.failed]
    if not ok:
        return ()
    best = min(r.lambda0 for r in ok)
    return tuple(r.sector for r in ok if r.lambda0 - best <= tol * max(1.0, abs(best)))


def sector_scan(modes: ModesLike, grid: LatitudeGrid,
                m_range: Optional[Tuple[int, int]] = None,
                tol: float = DEGENERACY_RTOL) -> SectorScanTable:
    """Ground energy and first gap for every m_N in the inclusive ``m_range``."""
    prof = as_profile(modes)
    cn = prof.chern
    lo, hi = default_m_range(cn) if m_range is None else m_range
    if lo > min(0, cn) or hi < max(0, cn):
        raise ValueError(f"m_range [{lo}, {hi}] must contain [0, {cn}]")
    rows, ground = [], {}
    for m_N in range(lo, hi + 1):
        sector = sector_make(cn, m_N)
        try:
            pair = eigen_lowest(assemble(prof, sector, grid), 2)
        except MonopoleError as exc:
            log.warning("sector %s failed: %s", sector.as_tuple(), exc)
            rows.append(ScanRow(sector, failed=True, error=str(exc)))
            continue
        ground[sector.as_tuple()] = pair[0]
        rows.append(ScanRow(sector, pair[0].lam, pair[1].lam - pair[0].lam))
    rows.sort(key=lambda r: (r.failed, r.lambda0 if not r.failed else 0.0, r.sector.m_N))
    winners = _winners(rows, tol)
    if winners and set(winners) != {s.mirror() for s in winners}:
        log.warning("winning set %s is not mirror-closed", [s.as_tuple() for s in winners])
    return SectorScanTable(tuple(rows), winners, cn, tol, ground)


def classify_phase(table: SectorScanTable, tol: Optional[float] = None) -> PhaseReport:
    """Broken iff at least two sectors share the ground level within ``tol``."""
    winners = table.winners if tol is None else _winners(table.rows, tol)
    if not winners:
        raise MonopoleError("no successful rows in the sector scan")
    names = tuple(sorted(s.as_tuple() for s in winners))
    pairs = []
    for s in sorted(winners, key=lambda s: s.m_N):
        partner = s.mirror()
        if s.m_N > partner.m_N and partner in winners:
            pairs.append((partner.as_tuple(), s.as_tuple()))
    label = "broken" if len(winners) >= 2 else "symmetric"
    params = {}
    for s in winners:
        if table.modes and s.as_tuple() in table.modes:
            params[s.as_tuple()] = order_parameter(table.modes[s.as_tuple()])
    first = params.get(names[0], (math.nan,) * 3)
    return PhaseReport(table.cn, label, names, tuple(sorted(pairs)), first, params)


def order_parameter(state: Union[LatitudeMode, SphereWavefunction]) -> Tuple[float, float, float]:
    """<r>/r0 = int (sin cos phi, sin sin phi, cos) |psi|^2 dOmega.

    The azimuthal integral is done in closed form: with north-gauge components
    c_k exp(i m_k phi) Theta_k, the z part keeps pairs with equal m and the
    x + i y part keeps pairs with m_k = m_l + 1.
    """
    if isinstance(state, LatitudeMode):
        return (0.0, 0.0, state.expectation_z())
    comps = state.components()
    grid = comps[0][1].grid
    z = grid.nodes
    h = grid.h
    sin_t = np.sqrt(1.0 - z * z)
    ez = 0.0
    exy = 0j
    for ck, mk in comps:
        for cl, ml in comps:
            prod = mk.theta_values * ml.theta_values
            if mk.sector.m_N == ml.sector.m_N:
                ez += (np.conj(ck) * cl).real * float(np.sum(z * prod) * h)
            if mk.sector.m_N == ml.sector.m_N + 1:
                exy += np.conj(ck) * cl * float(np.sum(sin_t * prod) * h)
    return (float(exy.real), float(exy.imag), float(ez))
