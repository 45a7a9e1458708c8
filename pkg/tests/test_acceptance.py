"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from monopole_vortex import (GAUGE_OFF, LaserModePair, LatitudeGrid, Sector, assemble,
                             bloch_to_vortex, chern_quadrature, eigen_lowest, find_zeros,
                             ground_pair, scalar_w, scalar_w_from_definition, sector_make,
                             sector_state, superpose, total_winding, vortex_to_bloch)
from monopole_vortex.cli import main
from monopole_vortex.latitude_spectrum import eigenvalues_lowest
from monopole_vortex.phase_analysis import classify_phase, order_parameter, sector_scan
from monopole_vortex.vortex_analysis import ratio_is_monotone

# errors below this are treated as converged when judging the refinement ratio
NOISE_FLOOR = 1e-8
MIN_RATIO = 3.5


def report(number, title, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
    assert ok, detail


def wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


@pytest.fixture(scope="module")
def pair():
    return ground_pair(LaserModePair(0, 1), LatitudeGrid(2048))


def test_1_legendre_oracle():
    start = time.perf_counter()
    worst, worst_ratio = 0.0, math.inf
    for m in (0, 1, 2):
        exact = np.array([(m + k) * (m + k + 1) for k in range(5)], dtype=float)
        err = {}
        for n in (1024, 2048):
            op = assemble(GAUGE_OFF, Sector(m, -m, 0), LatitudeGrid(n))
            err[n] = np.abs(eigenvalues_lowest(op, 5) - exact)
        worst = max(worst, err[2048].max())
        resolved = err[2048] > NOISE_FLOOR
        if resolved.any():
            worst_ratio = min(worst_ratio, (err[1024][resolved] / err[2048][resolved]).min())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-3 and worst_ratio >= MIN_RATIO and elapsed < 5
    report(1, "Legendre oracle", ok,
           f"max err {worst:.2e}, min halving ratio {worst_ratio:.2f}, {elapsed:.2f}s")


def test_2_chern_quantization():
    start = time.perf_counter()
    worst = max(abs(chern_quadrature(LaserModePair(a, b), 1000) - (b - a))
                for b in range(1, 7) for a in range(b))
    elapsed = time.perf_counter() - start
    report(2, "Chern quantization", worst <= 1e-9 and elapsed < 1,
           f"max err {worst:.2e}, {elapsed:.3f}s")


def test_3_potential_consistency():
    theta = np.linspace(0, math.pi / 2, 1001)[1:]
    worst = 0.0
    for b in range(1, 7):
        for a in range(b):
            modes = LaserModePair(a, b)
            closed = scalar_w(modes, theta)
            direct = scalar_w_from_definition(modes, theta)
            worst = max(worst, float(np.max(np.abs(closed - direct) / np.abs(closed))))
    report(3, "potential consistency", worst <= 1e-10, f"max rel diff {worst:.2e} over 1000 points")


def test_4_degeneracy_parity():
    start = time.perf_counter()
    grid = LatitudeGrid(2048)
    labels, mirror_gap = {}, 0.0
    for cn in range(4):
        table = sector_scan(GAUGE_OFF if cn == 0 else LaserModePair(0, cn), grid)
        labels[cn] = classify_phase(table).phase_label
        for row in table.rows:
            partner = cn - row.sector.m_N
            try:
                mirror_gap = max(mirror_gap, abs(table.row(partner).lambda0 - row.lambda0))
            except KeyError:
                pass
        if cn == 2:
            gap2 = table.row(2).lambda0 - table.row(1).lambda0
    elapsed = time.perf_counter() - start
    broken = {cn for cn, lab in labels.items() if lab == "broken"}
    ok = broken == {1, 3} and mirror_gap <= 1e-10 and gap2 > 1e-3 and elapsed < 30
    report(4, "degeneracy parity", ok,
           f"broken CN {sorted(broken)}, mirror diff {mirror_gap:.1e}, CN=2 gap {gap2:.4f}, "
           f"{elapsed:.2f}s")


def test_5_chern_theorem(pair):
    start = time.perf_counter()
    grid = LatitudeGrid(1024)
    failures, residual, count = [], 0.0, 0

    def check(state, cn, tag):
        nonlocal residual, count
        records = find_zeros(state, 256)
        residual = max([residual] + [r.winding_residual for r in records])
        total = sum(r.winding for r in records)
        count += 1
        if total != cn:
            failures.append((tag, total))

    for cn in range(4):
        modes = GAUGE_OFF if cn == 0 else LaserModePair(0, cn)
        lo, hi = min(0, cn) - 2, max(0, cn) + 2
        for m_N in range(lo, hi + 1):
            check(sector_state(modes, sector_make(cn, m_N), grid), cn, (cn, m_N))
    rng = np.random.default_rng(11)
    for _ in range(50):
        chi = math.acos(rng.uniform(-1, 1))
        check(superpose(*pair, chi, rng.uniform(0, 2 * math.pi)), 1, ("bloch", chi))
    elapsed = time.perf_counter() - start
    ok = not failures and residual < 0.15 and elapsed < 60
    report(5, "Chern's theorem", ok,
           f"{count} states, failures {failures[:3]}, max residual {residual:.1e}, {elapsed:.1f}s")


def test_6_bloch_vortex_bijection(pair):
    rng = np.random.default_rng(6)
    resolution = 256
    cell = math.pi / resolution
    worst_trip, worst_cells = 0.0, 0.0
    for _ in range(100):
        chi = math.acos(rng.uniform(-1, 1))
        alpha = rng.uniform(0, 2 * math.pi)
        state = superpose(*pair, chi, alpha)
        v = bloch_to_vortex(state)
        back = vortex_to_bloch(pair[0], v.theta, v.phi)
        worst_trip = max(worst_trip, abs(back.chi - chi), abs(wrap(back.alpha - alpha)))
    for _ in range(20):
        state = superpose(*pair, math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        v = bloch_to_vortex(state)
        found = find_zeros(state, resolution)
        gaps = [math.acos(min(1.0, float(np.dot(r.unit_vector(), v.unit_vector())))) for r in found]
        worst_cells = max(worst_cells, min(gaps) / cell if gaps else math.inf)
    monotone = ratio_is_monotone(pair[0])
    ok = worst_trip <= 1e-6 and monotone and worst_cells <= 2
    report(6, "Bloch-vortex bijection", ok,
           f"roundtrip {worst_trip:.1e}, monotone {monotone}, grid agreement {worst_cells:.2e} cells")


def test_7_order_parameter():
    grid = LatitudeGrid(2048)
    even = 0.0
    for cn in (0, 2):
        table = sector_scan(GAUGE_OFF if cn == 0 else LaserModePair(0, cn), grid)
        for s in table.winners:
            even = max(even, float(np.max(np.abs(order_parameter(table.ground_mode(s))))))
    z10 = order_parameter(sector_state(LaserModePair(0, 1), sector_make(1, 1), grid))[2]
    z01 = order_parameter(sector_state(LaserModePair(0, 1), sector_make(1, 0), grid))[2]
    ok = even <= 1e-10 and z10 < 0 and abs(z10 + z01) <= 1e-10
    report(7, "order parameter", ok,
           f"even |<r>| {even:.1e}, <z>(1,0) {z10:.6f}, antisymmetry {abs(z10 + z01):.1e}")


COMMANDS = [
    ["gauge", "--l1", "0", "--l2", "2"],
    ["gauge", "--l1", "0", "--l2", "2", "--format", "json"],
    ["chern", "--l1", "0", "--l2", "3"],
    ["spectrum", "--l1", "0", "--l2", "1", "--mn", "1", "--modes", "2"],
    ["spectrum", "--gauge-off", "--mn", "0", "--modes", "4", "--format", "csv"],
    ["vortex", "--l1", "0", "--l2", "1", "--chi", "1.5708", "--alpha", "3.14159"],
    ["scan", "--l1", "0", "--l2", "3"],
    ["scan", "--l1", "0", "--l2", "2", "--format", "csv"],
]


def test_8_determinism():
    def once(argv):
        out, err = io.StringIO(), io.StringIO()
        return main(argv, stdout=out, stderr=err), out.getvalue().encode()

    differing = [" ".join(a) for a in COMMANDS if once(a) != once(a)]
    cmd = [sys.executable, "-m", "monopole_vortex", *COMMANDS[-2]]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    if runs[0] != runs[1]:
        differing.append("subprocess " + " ".join(COMMANDS[-2]))
    report(8, "CLI determinism", not differing,
           f"{len(COMMANDS)} commands plus a subprocess pair, differing: {differing or 'none'}")
