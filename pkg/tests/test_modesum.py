import math
import warnings

import numpy as np
import pytest

from planetspec import kinematics as K
from planetspec import modesum as M
from planetspec.profile import ConstantSpeed, LayeredProfile
from planetspec.spectrum import blsp

from _oracles import fd_eigenvalues, two_layer_mode_roots

UNIT = [{"rho": 1.0, "mu": 1.0}]


def omegas_at(tab, l):
    sel = tab.l == l
    order = np.argsort(tab.n[sel])
    return tab.omega[sel][order], tab.n[sel][order]


@pytest.fixture(scope="module")
def ball_table(ball):
    return M.wkb_eigenfrequencies(ball, l_max=50, omega_max=200.0)


@pytest.fixture(scope="module")
def annulus_table(annulus):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", M.RootSolveWarning)
        return M.wkb_eigenfrequencies(annulus, l_max=50, omega_max=320.0)


class TestBallTable:
    def test_lowest_radial_overtones_frozen(self, ball_table):
        w0, n0 = omegas_at(ball_table, 0)
        assert list(n0[:5]) == [0, 1, 2, 3, 4]
        np.testing.assert_allclose(
            w0[:5],
            [1.485847, 4.685687, 7.838028, 10.984192, 14.128319], atol=5e-6)
        # quarter-wave shifted spacing: omega_n ~ pi (n + 1/2) for c = 1
        np.testing.assert_allclose(w0[2:5], np.pi * (n0[2:5] + 0.5), rtol=3e-3)

    def test_no_failures_and_contiguous_overtones(self, ball_table):
        assert ball_table.failures == []
        for l in (0, 10, 50):
            _w, n = omegas_at(ball_table, l)
            assert list(n) == list(range(len(n)))

    @pytest.mark.parametrize("l,n0_bound,rest_bound", [
        (0, 0.06, 0.007), (10, 0.01, 5e-4), (50, 0.006, 6e-4)])
    def test_against_finite_difference(self, ball_table, l, n0_bound,
                                       rest_bound):
        wk, _n = omegas_at(ball_table, l)
        fd = fd_eigenvalues(lambda r: np.ones_like(r), l, 0.0, 1.0, 40000,
                            "dirichlet", 22)
        rel = np.abs(wk[:20] - fd[:20]) / fd[:20]
        # the lowest overtone is the hardest case for a leading-order
        # quantization rule; it stays the worst at every l
        assert rel[0] < n0_bound
        assert rel[1:].max() < rest_bound
        assert rel.argmax() == 0

    def test_scaling_c_to_2c_doubles_omega(self, ball, ball_table):
        fast = LayeredProfile(layers=[ConstantSpeed(2.0)],
                              density=[{"rho": 1.0, "mu": 4.0}])
        tab2 = M.wkb_eigenfrequencies(fast, l_max=6, omega_max=100.0)
        for l in range(7):
            a, _ = omegas_at(ball_table, l)
            b, _ = omegas_at(tab2, l)
            k = min(len(a), len(b))
            np.testing.assert_allclose(b[:k], 2 * a[:k], rtol=1e-9)

    def test_high_overtone_spacing_reaches_pi_over_action(self, ball):
        # I(0) = 1 for the c = 1 ball, so the asymptotic spacing is pi
        tab = M.wkb_eigenfrequencies(ball, l_max=0, omega_max=3000.0)
        w, _ = omegas_at(tab, 0)
        assert abs(np.diff(w[-10:]).mean() / math.pi - 1) < 1e-7

    def test_quantization_self_consistency(self, ball, ball_table):
        tab = ball_table
        for row in range(0, len(tab), 997):
            l, n, w = int(tab.l[row]), int(tab.n[row]), float(tab.omega[row])
            p = (l + 0.5) / w
            info = K.turning_radius(ball, p)
            leg = K.leg_integrals(ball, 1, info.radius, 1.0, p)
            assert abs(w * (leg.time - p * leg.alpha) - math.pi * (n + 0.25)) \
                < 1e-8

    def test_weyl_counting_ratio(self, ball):
        tab = M.wkb_eigenfrequencies(ball, l_max=400, omega_max=400.0)
        ratio = tab.count_below(400.0) / tab.count_below(200.0)
        assert ratio == pytest.approx(3.977, abs=2e-3)
        assert ratio == pytest.approx(4.0, rel=0.02)

    def test_density_required(self):
        bare = LayeredProfile(layers=[ConstantSpeed(1.0)])
        with pytest.raises(ValueError):
            M.wkb_eigenfrequencies(bare, 2, 10.0)


class TestAnnulusTable:
    def test_radial_overtones_near_interval_harmonics(self, annulus_table):
        # width 1/2, free at both ends: omega_n -> 2 pi n, no rigid mode
        w0, n0 = omegas_at(annulus_table, 0)
        assert list(n0[:4]) == [1, 2, 3, 4]
        np.testing.assert_allclose(w0[:4], 2 * np.pi * n0[:4], rtol=7e-3)

    def test_regime_transition_gaps_recorded(self, annulus_table):
        gaps = [(n, l) for n, l, msg in annulus_table.failures
                if "regime-transition gap" in msg]
        assert gaps[:4] == [(1, 5), (2, 9), (3, 14), (4, 18)]

    def test_against_finite_difference(self, annulus_table):
        w0, _ = omegas_at(annulus_table, 0)
        fd = fd_eigenvalues(lambda r: np.ones_like(r), 0, 0.5, 1.0, 40000,
                            "neumann", 25)
        fd = fd[fd > 1e-6]   # drop the rigid mode the table never carries
        rel0 = np.abs(w0[:20] - fd[:20]) / fd[:20]
        assert rel0.max() < 7e-3

        wk, nn = omegas_at(annulus_table, 10)
        fd10 = fd_eigenvalues(lambda r: np.ones_like(r), 10, 0.5, 1.0, 40000,
                              "neumann", 25)
        nn = np.asarray(nn)
        keep = nn < 20
        rel10 = np.abs(wk[keep] - fd10[nn[keep]]) / fd10[nn[keep]]
        assert rel10.max() < 0.04

    def test_warns_when_levels_unplaced(self, annulus):
        with pytest.warns(M.RootSolveWarning):
            M.wkb_eigenfrequencies(annulus, l_max=10, omega_max=100.0)


class TestTwoLayerTrapped:
    def test_tir_modes_against_bessel_matching(self):
        prof = LayeredProfile(
            layers=[ConstantSpeed(1.0), ConstantSpeed(2.0)], interfaces=[0.5],
            density=[{"rho": 1.0, "mu": 1.0}, {"rho": 0.25, "mu": 1.0}])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", M.RootSolveWarning)
            tab = M.wkb_eigenfrequencies(prof, l_max=30, omega_max=120.0)
        checked = 0
        worst = 0.0
        for row in range(len(tab)):
            l, w = int(tab.l[row]), float(tab.omega[row])
            p = (l + 0.5) / w
            if not (0.26 < p < 0.49) or w < 15 or checked >= 12:
                continue
            roots = two_layer_mode_roots(l, w * 0.97, w * 1.03, n_grid=61)
            if roots.size == 0:
                continue
            worst = max(worst, abs(roots[np.abs(roots - w).argmin()] - w) / w)
            checked += 1
        assert checked >= 10
        assert worst < 0.015


class TestModeTable:
    def test_validation(self):
        with pytest.raises(ValueError, match="parallel"):
            M.ModeTable(np.array([0, 1]), np.array([0]), np.array([1.0]))
        with pytest.raises(ValueError, match=">= 0"):
            M.ModeTable(np.array([-1]), np.array([0]), np.array([1.0]))
        with pytest.raises(ValueError, match="omega_max"):
            M.ModeTable(np.array([0]), np.array([0]), np.array([11.0]),
                        omega_max=10.0)
        with pytest.raises(ValueError, match="increase"):
            M.ModeTable(np.array([0, 1]), np.array([0, 0]),
                        np.array([2.0, 2.0]))

    def test_csv_roundtrip_byte_stable(self, ball_table, tmp_path):
        p1, p2 = tmp_path / "m.csv", tmp_path / "m2.csv"
        ball_table.to_csv(p1)
        assert p1.read_text().splitlines()[0] == M.MODE_CSV_HEADER
        back = M.ModeTable.from_csv(p1, profile_hash=ball_table.profile_hash)
        assert np.array_equal(back.omega, ball_table.omega)
        assert np.array_equal(back.n, ball_table.n)
        back.to_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_from_csv_rejects_wrong_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n0,0,1.0\n")
        with pytest.raises(ValueError):
            M.ModeTable.from_csv(bad)

    def test_fingerprint_stable_and_discriminating(self, ball, annulus):
        again = LayeredProfile(layers=[ConstantSpeed(1.0)],
                               density=[{"rho": 1.0, "mu": 1.0}])
        assert M.profile_fingerprint(ball) == M.profile_fingerprint(again)
        assert M.profile_fingerprint(ball) != M.profile_fingerprint(annulus)


class TestTraceSeries:
    def test_single_mode_closed_form(self):
        one = M.ModeTable(np.array([0]), np.array([0]), np.array([5.0]),
                          omega_max=10, l_max=0)
        t = np.linspace(0.0, 2.0, 401)
        tr = M.trace_series(one, t, sigma=0.05)
        exact = np.cos(5.0 * t) * math.exp(-0.5 * (0.05 * 5.0) ** 2)
        assert np.abs(tr.values - exact).max() < 1e-14

    def test_multiplicity_weight_and_linearity(self):
        two = M.ModeTable(np.array([0, 0]), np.array([0, 3]),
                          np.array([5.0, 7.0]), omega_max=10, l_max=3)
        t = np.linspace(0.0, 2.0, 401)
        tr = M.trace_series(two, t, sigma=0.05)
        exact = (np.cos(5.0 * t) * math.exp(-0.5 * 0.25 ** 2)
                 + 7 * np.cos(7.0 * t) * math.exp(-0.5 * 0.35 ** 2))
        assert np.abs(tr.values - exact).max() < 1e-13

    def test_chunking_invariance(self, ball_table):
        t = np.linspace(3.5, 4.5, 301)
        a = M.trace_series(ball_table, t, 0.01)
        b = M.trace_series(ball_table, t, 0.01, mode_chunk=97, t_chunk=31)
        # chunk size may only reorder the summation, never change terms
        scale = np.abs(a.values).max()
        np.testing.assert_allclose(b.values, a.values, atol=1e-10 * scale)

    def test_sigma_validation(self, ball_table):
        with pytest.raises(ValueError):
            M.trace_series(ball_table, np.linspace(0, 1, 10), 0.0)

    def test_trace_csv_roundtrip(self, ball_table, tmp_path):
        t = np.linspace(3.5, 4.5, 64)
        tr = M.trace_series(ball_table, t, 0.02)
        p1, p2 = tmp_path / "t.csv", tmp_path / "t2.csv"
        tr.to_csv(p1)
        assert p1.read_text().splitlines()[0] == M.TRACE_CSV_HEADER
        back = M.SmoothedTrace.from_csv(p1, sigma=tr.sigma)
        back.to_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestDetectPeaks:
    @pytest.fixture()
    def synthetic(self):
        t = np.linspace(0.0, 10.0, 20001)
        z = np.zeros_like(t)
        for T, A in [(3.0, 1.0), (6.5, 0.7), (9.0, 0.4)]:
            z += A * np.exp(-0.5 * ((t - T) / 0.02) ** 2)
        return M.SmoothedTrace(t, z, sigma=0.02)

    def test_known_peaks_matched(self, synthetic):
        rep = M.detect_peaks(synthetic, [3.0, 6.5, 9.0], window=0.1)
        for m in rep.matches:
            assert m.covered and m.matched
            assert abs(m.offset) < 1e-3
        assert [round(q, 1) for _t, q in rep.top(2)] == [1.0, 0.7]

    def test_uncovered_candidate_flagged(self, synthetic):
        rep = M.detect_peaks(synthetic, [12.0], window=0.1)
        assert not rep.matches[0].covered
        assert not rep.matches[0].matched

    def test_absent_peak_unmatched(self, synthetic):
        rep = M.detect_peaks(synthetic, [5.0], window=0.05)
        assert rep.matches[0].covered and not rep.matches[0].matched

    def test_window_validation(self, synthetic):
        with pytest.raises(ValueError):
            M.detect_peaks(synthetic, [3.0], window=0.0)


class TestEndToEndPeaks:
    def test_short_spectrum_appears_in_smoothed_trace(self, ball):
        tab = M.wkb_eigenfrequencies(ball, l_max=600, omega_max=600.0)
        sigma = 3e-3
        t = np.arange(3.4, 6.05, sigma / 4)
        tr = M.trace_series(tab, t, sigma)
        cands = [e.length for e in blsp(ball, 6.0) if 3.4 < e.length < 6.0]
        rep = M.detect_peaks(tr, cands, window=2 * sigma)
        for m in rep.matches:
            assert m.covered and m.matched
            assert abs(m.offset) <= 2 * sigma
        # every prominent peak sits on a predicted length
        for tt, _q in rep.top(3):
            assert min(abs(tt - c) for c in cands) <= 2 * sigma
