import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal

from monopole_vortex import (GAUGE_OFF, ConvergenceError, LaserModePair, LatitudeGrid,
                             Sector, SectorMismatchError, assemble, eigen_lowest,
                             f_cap_profile, ground_energy, legendre_reference, sector_make)
from monopole_vortex.latitude_spectrum import eigenvalues_lowest, is_degenerate

# Ground levels with modes (0, CN), frozen from Richardson extrapolation of an
# independent theta-grid finite-volume scheme solved with scipy (n = 8000, 16000).
REFERENCE_GROUND = {
    (1, (1, 0)): 1.07129438,
    (1, (2, -1)): 4.05634146,
    (2, (1, 1)): 2.22200218,
    (2, (2, 0)): 2.44680689,
    (3, (3, 0)): 3.32942414,
    (3, (2, 1)): 4.09651363,
}


def theta_grid_ground(m_N, m_S, delta, n):
    """Independent oracle: finite volumes in theta with weight sin(theta)."""
    h = math.pi / n
    th = (np.arange(n) + 0.5) * h
    th_half = np.arange(n + 1) * h
    s = np.sin(th)
    u = s ** (2 * delta)
    shift = delta * u / (1 + u)
    F = np.where(th <= math.pi / 2, shift - m_N, m_S - shift)
    W = delta**2 * (1 + np.cos(th) ** 2) * s ** (2 * delta - 2) / (1 + u) ** 2
    p = np.sin(th_half)
    p[0] = p[-1] = 0.0
    diag = ((p[:-1] + p[1:]) / h**2 + (F**2 / s**2 + W) * s) / s
    off = -p[1:-1] / h**2 / np.sqrt(s[:-1] * s[1:])
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0][0]


class TestSector:
    @pytest.mark.parametrize("cn,mn,expected", [(1, 1, (1, 0)), (0, 0, (0, 0)), (3, 2, (2, 1))])
    def test_make(self, cn, mn, expected):
        s = sector_make(cn, mn)
        assert (s.m_N, s.m_S, s.cn) == (*expected, cn)

    def test_invariant(self):
        with pytest.raises(SectorMismatchError):
            Sector(1, 1, 1)

    def test_mirror(self):
        assert sector_make(3, 2).mirror() == sector_make(3, 1)


class TestGrid:
    def test_nodes(self):
        g = LatitudeGrid(4)
        np.testing.assert_array_equal(g.nodes, [-0.75, -0.25, 0.25, 0.75])
        np.testing.assert_array_equal(g.half_points, [-1, -0.5, 0, 0.5, 1])

    @pytest.mark.parametrize("n", [8, 1000, 2048])
    def test_exact_mirror_and_no_special_nodes(self, n):
        g = LatitudeGrid(n)
        np.testing.assert_array_equal(g.nodes, -g.nodes[::-1])
        assert not np.any(np.isin(g.nodes, [-1.0, 0.0, 1.0]))

    @pytest.mark.parametrize("n", [3, 7, 2, 0])
    def test_rejects_odd(self, n):
        with pytest.raises(ValueError):
            LatitudeGrid(n)


class TestFCap:
    def test_equator_continuity(self):
        m = LaserModePair(0, 1)
        s = sector_make(1, 1)
        assert f_cap_profile(m, s, 1e-300) == pytest.approx(-0.5)
        assert f_cap_profile(m, s, -1e-300) == pytest.approx(-0.5)
        assert f_cap_profile(m, s, 0.0) == -0.5

    @given(st.integers(0, 3).flatmap(lambda l1: st.integers(l1 + 1, 6).map(lambda l2: (l1, l2))),
           st.integers(-3, 8))
    def test_poles_and_continuity(self, pair, mn):
        m = LaserModePair(*pair)
        s = sector_make(m.delta(), mn)
        assert f_cap_profile(m, s, 1.0) == -s.m_N
        assert f_cap_profile(m, s, -1.0) == pytest.approx(s.m_S, abs=1e-12)
        assert f_cap_profile(m, s, 1e-9) == pytest.approx(f_cap_profile(m, s, -1e-9), abs=1e-12)

    def test_rejects_inconsistent_sector(self):
        with pytest.raises(SectorMismatchError):
            f_cap_profile(LaserModePair(0, 2), sector_make(1, 1), 0.3)


class TestAssemble:
    def test_hand_stencil(self):
        op = assemble(GAUGE_OFF, sector_make(0, 0), LatitudeGrid(4))
        # h = 0.5, p(-0.5) = p(0.5) = 0.75, p(0) = 1, p(+-1) = 0
        np.testing.assert_allclose(op.diagonal, [3.0, 7.0, 7.0, 3.0])
        np.testing.assert_allclose(op.offdiagonal, [-3.0, -4.0, -3.0])

    @pytest.mark.parametrize("pole_fitted", [True, False])
    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_conservation_form(self, m, pole_fitted):
        op = assemble(GAUGE_OFF, sector_make(0, m), LatitudeGrid(64), pole_fitted=pole_fitted)
        dense = op.dense()
        np.testing.assert_array_equal(dense, dense.T)
        assert np.all(op.offdiagonal <= 0)
        assert op.flux[0] == 0.0 and op.flux[-1] == 0.0
        dd, de = op.derivative_part()
        rows = dd.copy()
        rows[:-1] += de
        rows[1:] += de
        np.testing.assert_allclose(rows, 0.0, atol=1e-9 * dd.max())

    @pytest.mark.parametrize("pole_fitted", [True, False])
    @pytest.mark.parametrize("cn,mn", [(1, 1), (2, 2), (3, 2), (3, -1)])
    def test_mirror_sectors_are_reversed(self, cn, mn, pole_fitted):
        m = LaserModePair(0, cn)
        g = LatitudeGrid(128)
        a = assemble(m, sector_make(cn, mn), g, pole_fitted)
        b = assemble(m, sector_make(cn, cn - mn), g, pole_fitted)
        np.testing.assert_array_equal(a.diagonal, b.diagonal[::-1])
        np.testing.assert_array_equal(a.offdiagonal, b.offdiagonal[::-1])

    def test_unfitted_matches_fitted_without_pole_winding(self):
        g = LatitudeGrid(64)
        a = assemble(LaserModePair(1, 3), sector_make(2, 1), g)
        assert a.pole_fitted
        a0 = assemble(GAUGE_OFF, sector_make(0, 0), g)
        b0 = assemble(GAUGE_OFF, sector_make(0, 0), g, pole_fitted=False)
        np.testing.assert_array_equal(a0.diagonal, b0.diagonal)
        np.testing.assert_array_equal(a0.offdiagonal, b0.offdiagonal)


class TestEigen:
    @pytest.mark.parametrize("m,k", [(0, 4), (1, 3), (2, 2)])
    def test_legendre(self, grid2048, m, k):
        modes = eigen_lowest(assemble(GAUGE_OFF, sector_make(0, m), grid2048), k)
        expected = [legendre_reference(m + j, m) for j in range(k)]
        np.testing.assert_allclose([x.lam for x in modes], expected, atol=1e-3)

    def test_matches_dense_solver(self):
        op = assemble(LaserModePair(0, 2), sector_make(2, 0), LatitudeGrid(200))
        evals, evecs = np.linalg.eigh(op.dense())
        modes = eigen_lowest(op, 5)
        np.testing.assert_allclose([x.lam for x in modes], evals[:5], rtol=1e-11, atol=1e-10)
        for j, mode in enumerate(modes):
            v = mode.theta_values * math.sqrt(op.grid.h)
            assert abs(np.dot(v, evecs[:, j])) == pytest.approx(1.0, abs=1e-9)

    def test_normalization_and_sign(self, grid512):
        modes = eigen_lowest(assemble(LaserModePair(1, 4), sector_make(3, 1), grid512), 4)
        for mode in modes:
            assert mode.norm() == pytest.approx(1.0, abs=1e-12)
            v = mode.theta_values
            assert v[np.argmax(np.abs(v))] > 0
        lams = [m.lam for m in modes]
        assert lams == sorted(lams)

    def test_orthogonal(self, grid512):
        modes = eigen_lowest(assemble(LaserModePair(0, 1), sector_make(1, 0), grid512), 6)
        v = np.array([m.theta_values for m in modes]) * math.sqrt(grid512.h)
        np.testing.assert_allclose(v @ v.T, np.eye(6), atol=1e-10)

    def test_deterministic(self, grid512):
        op = assemble(LaserModePair(0, 3), sector_make(3, 2), grid512)
        a, b = eigen_lowest(op, 3), eigen_lowest(op, 3)
        for x, y in zip(a, b):
            assert x.lam == y.lam
            np.testing.assert_array_equal(x.theta_values, y.theta_values)

    def test_k_bounds(self):
        op = assemble(GAUGE_OFF, sector_make(0, 0), LatitudeGrid(8))
        with pytest.raises(ValueError):
            eigen_lowest(op, 0)
        with pytest.raises(ValueError):
            eigen_lowest(op, 9)
        assert len(eigen_lowest(op, 8)) == 8

    def test_convergence_error_carries_diagnostics(self, monkeypatch):
        from monopole_vortex import latitude_spectrum

        monkeypatch.setattr(latitude_spectrum, "_MAX_BISECT", 3)
        op = assemble(GAUGE_OFF, sector_make(0, 0), LatitudeGrid(16))
        with pytest.raises(ConvergenceError) as info:
            eigenvalues_lowest(op, 1)
        assert info.value.diagnostics()["iterations"] == 3

    @pytest.mark.parametrize("cn,sector", sorted(REFERENCE_GROUND))
    def test_reference_ground_levels(self, grid2048, cn, sector):
        lam = ground_energy(LaserModePair(0, cn), sector_make(cn, sector[0]), grid2048)
        assert lam == pytest.approx(REFERENCE_GROUND[(cn, sector)], abs=2e-6)

    def test_oracle_itself(self):
        # the theta-grid oracle reproduces the Legendre spectrum for m = 1
        assert theta_grid_ground(1, -1, 0, 4000) == pytest.approx(2.0, abs=1e-5)


class TestGroundEnergy:
    def test_cn1_mirror_degenerate(self, grid2048):
        m = LaserModePair(0, 1)
        a = ground_energy(m, sector_make(1, 1), grid2048)
        b = ground_energy(m, sector_make(1, 0), grid2048)
        assert abs(a - b) <= 1e-10

    def test_cn2_symmetric_sector_wins(self, grid2048):
        m = LaserModePair(0, 2)
        assert ground_energy(m, sector_make(2, 1), grid2048) < ground_energy(m, sector_make(2, 2), grid2048)

    def test_gauge_off_zero(self):
        assert abs(ground_energy(GAUGE_OFF, sector_make(0, 0), LatitudeGrid(64))) <= 1e-12

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 3).flatmap(lambda l1: st.integers(l1 + 1, l1 + 4).map(lambda l2: (l1, l2))),
           st.integers(-2, 6))
    def test_mirror_spectra(self, pair, mn):
        m = LaserModePair(*pair)
        cn = m.delta()
        g = LatitudeGrid(256)
        a = eigenvalues_lowest(assemble(m, sector_make(cn, mn), g), 6)
        b = eigenvalues_lowest(assemble(m, sector_make(cn, cn - mn), g), 6)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-10)

    @pytest.mark.parametrize("cn,mn", [(0, 0), (1, 1), (1, 0), (2, 1), (2, 2), (3, 3), (3, 2)])
    def test_ground_state_nodeless(self, grid512, cn, mn):
        modes = GAUGE_OFF if cn == 0 else LaserModePair(0, cn)
        mode = eigen_lowest(assemble(modes, sector_make(cn, mn), grid512), 1)[0]
        assert mode.interior_sign_changes() == 0
        assert np.all(mode.theta_values > 0)


class TestLegendreReference:
    @pytest.mark.parametrize("l,m,v", [(0, 0, 0), (1, 1, 2), (3, 2, 12)])
    def test_values(self, l, m, v):
        assert legendre_reference(l, m) == v

    def test_precondition(self):
        with pytest.raises(ValueError):
            legendre_reference(1, 2)


class TestPoleFitting:
    def test_plain_stencil_is_first_order_for_unit_winding(self):
        # why the pole-fitted stencil is the default
        errs = []
        for n in (256, 512):
            op = assemble(GAUGE_OFF, sector_make(0, 1), LatitudeGrid(n), pole_fitted=False)
            errs.append(abs(eigenvalues_lowest(op, 2)[1] - 6.0))
        assert 1.7 < errs[0] / errs[1] < 2.3

    def test_fitted_stencil_is_second_order(self):
        errs = []
        for n in (256, 512):
            op = assemble(GAUGE_OFF, sector_make(0, 1), LatitudeGrid(n))
            errs.append(abs(eigenvalues_lowest(op, 2)[1] - 6.0))
        assert 3.5 < errs[0] / errs[1] < 4.5

    def test_gauge_on_second_order(self):
        m = LaserModePair(0, 1)
        lams = [ground_energy(m, sector_make(1, 1), LatitudeGrid(n)) for n in (256, 512, 1024)]
        ratio = (lams[0] - lams[1]) / (lams[1] - lams[2])
        assert 3.5 < ratio < 4.5


class TestInterpolation:
    def test_reproduces_nodes(self, grid512):
        mode = eigen_lowest(assemble(LaserModePair(0, 1), sector_make(1, 1), grid512), 1)[0]
        np.testing.assert_allclose(mode(grid512.nodes), mode.theta_values, rtol=1e-12, atol=1e-14)

    def test_pole_zero_exact(self, grid512):
        mode = eigen_lowest(assemble(LaserModePair(0, 1), sector_make(1, 1), grid512), 1)[0]
        assert mode(1.0) == 0.0
        assert mode(-1.0) > 0.0

    def test_associated_legendre_shape(self, grid2048):
        # m = 1, l = 1: Theta = sqrt(3/4) sqrt(1 - z^2)
        mode = eigen_lowest(assemble(GAUGE_OFF, sector_make(0, 1), grid2048), 1)[0]
        z = np.linspace(-1, 1, 101)
        np.testing.assert_allclose(mode(z), math.sqrt(0.75) * np.sqrt(1 - z * z), atol=1e-6)
