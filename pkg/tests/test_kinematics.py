import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetspec import kinematics as K
from planetspec.profile import ConstantSpeed, LayeredProfile, LogSpeed

from _oracles import (
    chord_alpha,
    chord_time,
    log_alpha_diving,
    log_alpha_reflecting,
)


class TestBetaAndTurning:
    def test_beta_ball(self, ball):
        assert K.beta(ball, 1.0, 0.6) == pytest.approx(0.8, abs=1e-15)
        ev = K.beta(ball, 0.5, 0.6)
        assert isinstance(ev, K.Evanescent)
        assert ev.magnitude == pytest.approx(math.sqrt(0.36 - 0.25) / 0.5)

    def test_ball_turning_radius_is_p(self, ball):
        for p in (0.1, 0.5, 0.937):
            info = K.turning_radius(ball, p)
            assert info.kind == "smooth"
            assert info.radius == pytest.approx(p, abs=1e-14)

    def test_log_turning_radius_closed_form(self, log_profile):
        a, b = 2.0, 0.5
        p = 1.38
        info = K.turning_radius(log_profile, p)
        assert info.radius == pytest.approx(math.exp((p * p - a) / b), rel=1e-13)

    def test_center_and_range_validation(self, ball):
        assert K.turning_radius(ball, 0.0).kind == "center"
        with pytest.raises(ValueError):
            K.turning_radius(ball, 1.5)

    def test_two_layer_tir(self, glide_profile):
        # between underside and upperside slowness at r = 0.6: reflects
        info = K.turning_radius(glide_profile, 0.55)
        assert info.kind == "interface" and info.layer == 1
        assert info.tag == "TotalInternalReflection"
        # below underside slowness: transmits and turns smoothly inside
        info2 = K.turning_radius(glide_profile, 0.40)
        assert info2.kind == "smooth" and info2.layer == 2

    def test_classify_regimes(self, glide_profile):
        rep = K.classify_regimes(glide_profile, 0.55)
        assert rep.verdicts == ["TotalInternalReflection"]


class TestLegIntegrals:
    def test_chord_closed_form(self, ball):
        for p in (0.05, 0.3, 0.86):
            leg = K.leg_integrals(ball, 1, p, 1.0, p)
            assert leg.turning
            assert leg.alpha == pytest.approx(chord_alpha(p), abs=1e-11)
            assert leg.time == pytest.approx(chord_time(p), abs=1e-11)

    def test_radial_leg(self, ball):
        leg = K.leg_integrals(ball, 1, 0.0, 1.0, 0.0)
        assert leg.alpha == 0.0
        assert leg.time == pytest.approx(1.0, abs=1e-13)

    def test_log_diving_closed_form(self, log_profile):
        a, b = 2.0, 0.5
        for p in (1.35, 1.40):
            rstar = math.exp((p * p - a) / b)
            leg = K.leg_integrals(log_profile, 1, rstar, 1.0, p)
            assert leg.alpha == pytest.approx(log_alpha_diving(a, b, p),
                                              rel=1e-10)

    def test_log_reflecting_closed_form(self, log_profile):
        a, b = 2.0, 0.5
        r_lo = 0.4
        xi_floor = a + b * math.log(r_lo)
        p = 1.1
        leg = K.leg_integrals(log_profile, 1, r_lo, 1.0, p)
        assert not leg.turning
        assert leg.alpha == pytest.approx(
            log_alpha_reflecting(a, b, p, xi_floor), rel=1e-10)

    def test_additivity_in_radius(self, log_profile):
        p, mid = 1.0, 0.55
        whole = K.leg_integrals(log_profile, 1, 0.3, 1.0, p)
        lower = K.leg_integrals(log_profile, 1, 0.3, mid, p)
        upper = K.leg_integrals(log_profile, 1, mid, 1.0, p)
        assert whole.alpha == pytest.approx(lower.alpha + upper.alpha, abs=1e-11)
        assert whole.time == pytest.approx(lower.time + upper.time, abs=1e-11)

    def test_evanescent_interval_rejected(self, ball):
        with pytest.raises(K.EvanescentIntervalError):
            K.leg_integrals(ball, 1, 0.2, 1.0, 0.5)

    def test_time_exceeds_p_alpha(self, ball):
        # radial phase time - p*alpha is positive for every leg
        for p in (0.2, 0.5, 0.9):
            leg = K.leg_integrals(ball, 1, p, 1.0, p)
            assert leg.time - p * leg.alpha > 0

    @given(p=st.floats(0.02, 0.95))
    @settings(max_examples=40, deadline=None)
    def test_chord_alpha_decreases_in_p(self, ball, p):
        leg = K.leg_integrals(ball, 1, p, 1.0, p)
        leg2 = K.leg_integrals(ball, 1, p + 0.01, 1.0, p + 0.01)
        assert leg2.alpha < leg.alpha


class TestAlphaDerivative:
    def test_ball_closed_form(self, ball):
        # alpha = arccos(p): d(2*alpha)/dp = -2/sqrt(1-p^2)
        for p in (0.2, 0.6, 0.9):
            da = 2 * K.leg_alpha_derivative(ball, 1, p, 1.0, p)
            assert da == pytest.approx(-2.0 / math.sqrt(1 - p * p), rel=1e-9)

    def test_log_unique_zero_at_half_a(self, log_profile):
        a, b = 2.0, 0.5
        p0 = math.sqrt(a / 2)
        rstar = math.exp((p0 * p0 - a) / b)
        da = 2 * K.leg_alpha_derivative(log_profile, 1, rstar, 1.0, p0)
        assert abs(da) < 1e-10
        for p in (p0 - 0.05, p0 + 0.05):
            rs = math.exp((p * p - a) / b)
            assert abs(2 * K.leg_alpha_derivative(log_profile, 1, rs, 1.0, p)) > 1e-3

    def test_matches_finite_difference(self, log_profile):
        p, h = 1.2, 1e-5
        r_lo = 0.45

        def alpha(pp):
            return K.leg_integrals(log_profile, 1, r_lo, 1.0, pp).alpha

        fd = (alpha(p + h) - alpha(p - h)) / (2 * h)
        da = K.leg_alpha_derivative(log_profile, 1, r_lo, 1.0, p)
        assert da == pytest.approx(fd, rel=1e-6)


class TestBasicRayGeometry:
    def test_hexagon(self, ball):
        p = math.cos(math.pi / 6)
        alpha, T = K.basic_ray_geometry(ball, 1, p, 6)
        assert alpha == pytest.approx(2 * math.pi, abs=1e-10)
        assert T == pytest.approx(6.0, abs=1e-10)

    def test_radial(self, ball):
        alpha, T = K.basic_ray_geometry(ball, 1, 0.0, 2)
        assert alpha == 0.0
        assert T == pytest.approx(4.0, abs=1e-12)


class TestVectorizedScans:
    def test_turning_scans_match_leg_integrals(self, ball):
        ps = np.linspace(0.1, 0.95, 24)
        rstars = ps.copy()
        a_scan = K.alpha_scan_turning(ball.layers[0], ps, rstars, 1.0)
        t_scan = K.phase_scan_turning(ball.layers[0], ps, rstars, 1.0)
        for i, p in enumerate(ps):
            leg = K.leg_integrals(ball, 1, p, 1.0, p)
            assert a_scan[i] == pytest.approx(leg.alpha, abs=5e-11)
            # radial phase = time - p * alpha
            assert t_scan[i] == pytest.approx(leg.time - p * leg.alpha, abs=5e-11)

    def test_reflecting_scans_match(self, annulus):
        ps = np.linspace(0.05, 0.45, 16)
        a_scan = K.alpha_scan_reflecting(annulus.layers[0], ps, 0.5, 1.0)
        t_scan = K.phase_scan_reflecting(annulus.layers[0], ps, 0.5, 1.0)
        for i, p in enumerate(ps):
            leg = K.leg_integrals(annulus, 1, 0.5, 1.0, p)
            assert a_scan[i] == pytest.approx(leg.alpha, abs=1e-12)
            assert t_scan[i] == pytest.approx(leg.time - p * leg.alpha, abs=1e-12)

    def test_dalpha_scans_match_derivative(self, log_profile):
        ps = np.array([1.15, 1.25, 1.35])
        rstars = np.exp((ps ** 2 - 2.0) / 0.5)
        scan = K.dalpha_scan_turning(log_profile.layers[0], ps, rstars, 1.0)
        for i, p in enumerate(ps):
            exact = K.leg_alpha_derivative(log_profile, 1, rstars[i], 1.0, p)
            assert scan[i] == pytest.approx(exact, rel=1e-8)

    def test_turning_radius_scan(self, ball):
        ps = np.linspace(0.1, 0.9, 9)
        rs = K.turning_radius_scan(ball.layers[0], ps, 0.0, 1.0)
        np.testing.assert_allclose(rs, ps, atol=1e-13)


class TestTracePath:
    def test_hexagon_path(self, ball):
        p = math.cos(math.pi / 6)
        path = K.trace_path(ball, (1.0, 0.0), p,
                            itinerary=["reflect"] * 5)
        assert len(path.legs) == 6
        assert path.alpha_total == pytest.approx(2 * math.pi, abs=1e-9)
        assert path.time_total == pytest.approx(6.0, abs=1e-9)
        # continuity of the polyline across legs
        for l1, l2 in zip(path.legs, path.legs[1:]):
            assert l1.r[-1] == pytest.approx(l2.r[0], abs=1e-12)
            assert l1.theta[-1] == pytest.approx(l2.theta[0], abs=1e-12)

    def test_radial_diameter(self, ball):
        path = K.trace_path(ball, (1.0, 0.0), 0.0, itinerary=["reflect"])
        assert path.alpha_total == 0.0
        assert path.time_total == pytest.approx(4.0, abs=1e-10)

    def test_two_layer_transmission_consistency(self, glide_profile):
        p = 0.35
        path = K.trace_path(glide_profile, (1.0, 0.0), p,
                            itinerary=["transmit", "transmit"])
        legs = 0.0
        up = K.leg_integrals(glide_profile, 1, 0.6, 1.0, p)
        info = K.turning_radius(glide_profile, p)
        dn = K.leg_integrals(glide_profile, 2, info.radius, 0.6, p)
        expect_alpha = 2 * (up.alpha + dn.alpha)
        assert path.alpha_total == pytest.approx(expect_alpha, abs=1e-9)

    def test_inconsistent_decision_raises(self, ball):
        with pytest.raises((K.ItineraryError, ValueError)):
            K.trace_path(ball, (1.0, 0.0), 0.5, itinerary=["transmit"])

    def test_json_and_csv_render(self, ball):
        path = K.trace_path(ball, (1.0, 0.0), 0.5, itinerary=[])
        doc = path.to_json()
        assert doc["legs"][0]["kind"] == "chord"
        csv = path.to_csv()
        assert csv.splitlines()[0] == "leg,layer,kind,r,theta"
