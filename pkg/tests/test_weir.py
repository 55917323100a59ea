import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from pooledsteps.exceptions import DomainError, DryStateError
from pooledsteps.riemann import NONE
from pooledsteps.swe import State, is_subsonic, lax_curve
from pooledsteps.weir import (
    LEFT_LABELS,
    RIGHT_LABELS,
    FlowDirection,
    RegionLabel,
    WeirGeometry,
    classify,
    connect_curve,
    construct_traces,
    coupling_residual,
    flow_direction,
    gamma_flux,
    gamma_intersection,
    phi,
    solve_weir_riemann,
)

G = 9.81
W = WeirGeometry(1.5, 1.5)
W_DROP = WeirGeometry(1.5, 1.0)
C = 0.6 * math.sqrt(G)
Q_CRIT = C * 0.5**1.5


def subsonic():
    return st.builds(lambda h, r: State(h, r * math.sqrt(G * h)), st.floats(0.2, 4.0), st.floats(-0.9, 0.9))


class TestGeometry:
    def test_default_coefficient(self):
        assert W.C == pytest.approx(1.879255171603899, rel=1e-15)

    def test_invalid(self):
        with pytest.raises(DomainError):
            WeirGeometry(-1.0, 1.0)
        with pytest.raises(DomainError):
            WeirGeometry(1.0, 1.0, c_tilde=1.5)


class TestResidual:
    def test_below_crest_at_rest(self):
        assert coupling_residual(State(1.0, 0.0), State(1.2, 0.0), W) == (0.0, 0.0)

    def test_critical_overflow(self):
        left = State.from_conservative(2.0, Q_CRIT)
        right = State.from_conservative(0.5, Q_CRIT)
        r1, r2 = coupling_residual(left, right, W)
        assert abs(r1) < 1e-15 and abs(r2) < 1e-15

    def test_no_velocity(self):
        r1, _ = coupling_residual(State(2.0, 0.0), State(0.5, 0.0), W)
        assert r1 == pytest.approx(-0.6644170377105031, rel=1e-14)

    def test_dry(self):
        with pytest.raises(DryStateError):
            coupling_residual(State(0.0, 0.0), State(1.0, 0.0), W)


class TestClassify:
    def test_sigma_l(self):
        assert classify(State(1.0, -0.1), "left", W) is RegionLabel.SIGMA_L

    def test_a_minus(self):
        assert classify(State(2.0, 0.1), "left", W) is RegionLabel.A_MINUS
        assert classify(State(2.0, 0.05), "left", W) is RegionLabel.A_MINUS

    def test_gamma_u(self):
        assert classify(State.from_conservative(2.0, Q_CRIT), "left", W) is RegionLabel.GAMMA_U

    def test_omega_u(self):
        assert classify(State(2.0, 0.5), "left", W) is RegionLabel.OMEGA_U

    def test_b_minus(self):
        assert classify(State(2.0, -0.1), "left", W) is RegionLabel.B_MINUS
        assert classify(State(2.0, 0.0), "left", W) is RegionLabel.B_MINUS

    def test_rest_below_crest_on_curve(self):
        assert classify(State(1.0, 0.0), "left", W) is RegionLabel.GAMMA_U
        assert classify(State(1.0, 0.0), "right", W) is RegionLabel.GAMMA_L

    def test_right_side(self):
        assert classify(State(1.0, 0.1), "right", W) is RegionLabel.SIGMA_U
        assert classify(State(2.0, 0.1), "right", W) is RegionLabel.A_PLUS
        assert classify(State(2.0, -0.1), "right", W) is RegionLabel.B_PLUS
        assert classify(State(2.0, -0.5), "right", W) is RegionLabel.OMEGA_L
        assert classify(State.from_conservative(2.0, -Q_CRIT), "right", W) is RegionLabel.GAMMA_L

    def test_labels(self):
        assert str(RegionLabel.SIGMA_L) == "Sigma_l"
        assert str(RegionLabel.OMEGA_U) == "Omega_u"

    def test_bad_side(self):
        with pytest.raises(DomainError):
            classify(State(1.0, 0.0), "up", W)

    def test_partition_grid(self):
        # direct evaluation of the set inequalities on a dense subsonic grid
        for h in np.linspace(0.1, 4.0, 60):
            c = math.sqrt(G * h)
            for v in np.linspace(-0.99 * c, 0.99 * c, 61):
                s = State(h, v)
                q = h * v
                crit = C * max(h - 1.5, 0.0) ** 1.5
                on = abs(q - crit) <= 1e-9 * max(1.0, C * h**1.5)
                expect = (
                    RegionLabel.GAMMA_U if on else
                    RegionLabel.OMEGA_U if q > crit else
                    RegionLabel.A_MINUS if q > 0 else
                    RegionLabel.B_MINUS if h > 1.5 else
                    RegionLabel.SIGMA_L
                )
                got = classify(s, "left", W)
                assert got is expect and got in LEFT_LABELS
                assert classify(s, "right", W) in RIGHT_LABELS


class TestGammaAndPhi:
    def test_gamma_flux(self):
        assert gamma_flux(1.0, 1.5, W) == 0.0
        assert gamma_flux(2.0, 1.5, W) == pytest.approx(0.6644170377105031, rel=1e-14)
        assert gamma_flux(2.5, 1.5, W) == pytest.approx(C, rel=1e-14)

    def test_gamma_curves_subsonic(self):
        for h in np.linspace(1.5001, 50.0, 500):
            q = gamma_flux(h, 1.5, W)
            assert is_subsonic(State.from_conservative(h, q), G)
            assert is_subsonic(State.from_conservative(h, -q), G)

    def test_phi_rest(self):
        out = phi(State(2.0, 0.0), W_DROP)
        assert out.h == pytest.approx(1.5, abs=1e-15) and out.v == 0.0

    def test_phi_a_minus(self):
        out = phi(State.from_conservative(2.0, 0.3), W_DROP)
        assert out.h == pytest.approx(1.5 - (0.3 / C) ** (2 / 3), rel=1e-14)
        assert out.h == pytest.approx(1.2057225389, rel=1e-10)
        assert out.q == pytest.approx(0.3, rel=1e-14)

    def test_phi_sigma_l(self):
        out = phi(State(1.0, -0.5), W_DROP)
        assert out.h == pytest.approx((0.5 / C) ** (2 / 3) + 1.0, rel=1e-14)
        assert out.h == pytest.approx(1.4136720389, rel=1e-10)
        assert out.q == pytest.approx(-0.5, rel=1e-14)
        assert classify(out, "right", W_DROP) is RegionLabel.GAMMA_L

    def test_phi_rejects_overflow_states(self):
        with pytest.raises(DomainError):
            phi(State(2.0, 0.5), W)
        with pytest.raises(DomainError):
            phi(State.from_conservative(2.0, Q_CRIT), W)

    @given(st.floats(1.5001, 4.0), st.floats(-0.9, 0.999))
    def test_phi_round_trip(self, h, frac):
        crit = gamma_flux(h, W_DROP.H_minus, W_DROP)
        q = frac * crit if frac > 0 else frac * math.sqrt(G * h) * h
        s = State.from_conservative(h, q)
        label = classify(s, "left", W_DROP)
        assume(label in (RegionLabel.A_MINUS, RegionLabel.B_MINUS))
        out = phi(s, W_DROP)
        r1, r2 = coupling_residual(s, out, W_DROP)
        assert abs(r1) <= 1e-10 and abs(r2) <= 1e-10
        expect = RegionLabel.A_PLUS if label is RegionLabel.A_MINUS else RegionLabel.B_PLUS
        assert classify(out, "right", W_DROP) is expect


class TestConnectCurve:
    left = State(3.0, 0.0)

    def star(self):
        s = gamma_intersection(self.left, W)
        return s.h, s.v

    def test_endpoint(self):
        hs, vs = self.star()
        d, q = connect_curve(hs, self.left, W, hs, vs)
        assert d == pytest.approx(W.H_plus) and q == pytest.approx(hs * vs)

    def test_linear_branch(self):
        hs, vs = self.star()
        d, q = connect_curve(hs / 2, self.left, W, hs, vs)
        assert d == pytest.approx(W.H_plus / 2) and q == hs * vs

    def test_continuity(self):
        hs, vs = self.star()
        d, q = connect_curve(hs * (1 + 1e-10), self.left, W, hs, vs)
        assert d == pytest.approx(W.H_plus, abs=1e-8) and q == pytest.approx(hs * vs, abs=1e-8)

    def test_star_on_both_curves(self):
        hs, vs = self.star()
        assert lax_curve(1, "forward", hs, self.left, G) == pytest.approx(vs, abs=1e-14)
        assert hs * vs == pytest.approx(gamma_flux(hs, 1.5, W), abs=1e-12)


class TestFlowDirection:
    def test_none(self):
        assert flow_direction(State(1.0, 0.0), State(1.0, 0.0), W) is FlowDirection.NONE

    def test_left_to_right(self):
        assert flow_direction(State(2.0, 0.0), State(0.5, 0.0), W) is FlowDirection.LEFT_TO_RIGHT

    def test_right_to_left(self):
        assert flow_direction(State(1.6, 0.0), State(1.9, 0.0), W) is FlowDirection.RIGHT_TO_LEFT


class TestWeirRiemann:
    def test_steady_pair(self):
        left = State.from_conservative(2.0, Q_CRIT)
        right = State.from_conservative(0.5, Q_CRIT)
        sol = solve_weir_riemann(left, right, W)
        assert sol.traces.left_trace.h == pytest.approx(2.0, rel=1e-12)
        assert sol.traces.right_trace.h == pytest.approx(0.5, rel=1e-12)
        assert sol.traces.mass_flux == pytest.approx(Q_CRIT, rel=1e-12)
        assert sol.left_wave.kind == NONE and sol.right_wave.kind == NONE

    def test_rest_below_crest(self):
        sol = solve_weir_riemann(State(1.0, 0.0), State(0.8, 0.0), W)
        assert sol.traces.mass_flux == 0.0
        assert sol.traces.left_trace.h == pytest.approx(1.0, rel=1e-12)
        assert sol.traces.right_trace.h == pytest.approx(0.8, rel=1e-12)
        assert sol.traces.left_trace.v == 0.0 and sol.traces.right_trace.v == 0.0

    def test_dam_over_weir_matches_oracle(self):
        sol = solve_weir_riemann(State(3.0, 0.0), State(0.5, 0.0), W)
        a, va, b, vb, q = oracles.weir_traces(3.0, 0.0, 0.5, 0.0, 1.5, 1.5, C)
        assert sol.traces.mass_flux > 0
        assert sol.traces.left_trace.h == pytest.approx(float(a), rel=1e-10)
        assert sol.traces.right_trace.h == pytest.approx(float(b), rel=1e-10)
        assert sol.traces.mass_flux == pytest.approx(float(q), rel=1e-10)

    def test_right_to_left(self):
        sol = solve_weir_riemann(State(1.0, 0.0), State(2.5, 0.0), W)
        assert sol.traces.mass_flux < 0
        r1, r2 = coupling_residual(sol.traces.left_trace, sol.traces.right_trace, W)
        assert abs(r1) < 1e-10 and abs(r2) < 1e-10

    def test_rejects_supersonic(self):
        with pytest.raises(DomainError):
            solve_weir_riemann(State(0.25, 2.0), State(1.0, 0.0), W)

    def test_sampling(self):
        left, right = State(3.0, 0.0), State(0.5, 0.0)
        sol = solve_weir_riemann(left, right, W)
        assert sol.sample(-1e6) == left
        assert sol.sample(1e6) == right
        assert sol.sample(0.0) == sol.traces.right_trace
        assert sol.sample(-1e-12) == sol.traces.left_trace

    @given(subsonic(), subsonic(), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
    def test_invariants(self, left, right, Hm, Hp):
        w = WeirGeometry(Hm, Hp)
        sol = solve_weir_riemann(left, right, w)
        tr = sol.traces
        r1, r2 = coupling_residual(tr.left_trace, tr.right_trace, w)
        scale = max(1.0, abs(tr.mass_flux))
        assert abs(r1) <= 1e-10 * scale and abs(r2) <= 1e-10 * scale
        assert sol.left_wave.speed_range[1] <= 1e-12
        assert sol.right_wave.speed_range[0] >= -1e-12
        if flow_direction(left, right, w) is FlowDirection.NONE and left.v == 0 and right.v == 0:
            assert abs(tr.left_trace.v) < 1e-10 and abs(tr.right_trace.v) < 1e-10

    @given(subsonic(), subsonic())
    def test_continuity(self, left, right):
        base = solve_weir_riemann(left, right, W).traces
        eps = 1e-7
        pert = solve_weir_riemann(State(left.h + eps, left.v - eps), State(right.h - eps, right.v + eps), W).traces
        assert abs(pert.left_trace.h - base.left_trace.h) < 1e3 * eps
        assert abs(pert.right_trace.h - base.right_trace.h) < 1e3 * eps
        assert abs(pert.mass_flux - base.mass_flux) < 1e3 * eps

    def test_against_nested_bisection_oracle(self):
        rng = np.random.default_rng(3)
        n = 300
        hl, vl = oracles.random_subsonic(rng, n)
        hr, vr = oracles.random_subsonic(rng, n)
        Hm = rng.uniform(0.5, 3.0, n)
        Hp = rng.uniform(0.5, 3.0, n)
        a, _, b, _, q = oracles.weir_traces(hl, vl, hr, vr, Hm, Hp, C)
        for i in range(n):
            tr = construct_traces(State(hl[i], vl[i]), State(hr[i], vr[i]), WeirGeometry(Hm[i], Hp[i]))
            assert tr.left_trace.h == pytest.approx(a[i], rel=1e-8)
            assert tr.right_trace.h == pytest.approx(b[i], rel=1e-8)
            assert tr.mass_flux == pytest.approx(q[i], rel=1e-8, abs=1e-10)
