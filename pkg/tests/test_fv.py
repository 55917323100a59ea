import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pooledsteps import _kernels
from pooledsteps.exceptions import DomainError, PositivityError
from pooledsteps.fv import (
    BoundarySignal,
    CanalGrid,
    boundary_flux,
    cfl_dt,
    interior_step,
    weir_interface_traces,
)
from pooledsteps.riemann import godunov_flux
from pooledsteps.swe import State, flux
from pooledsteps.weir import WeirGeometry, construct_traces, coupling_residual, gamma_intersection

G = 9.81
W = WeirGeometry(1.5, 1.5)
Q_CRIT = W.C * 0.5**1.5


def subsonic():
    return st.builds(lambda h, r: State(h, r * math.sqrt(G * h)), st.floats(0.2, 4.0), st.floats(-0.9, 0.9))


class TestGrid:
    def test_validation(self):
        with pytest.raises(DomainError):
            CanalGrid(1.0, [1.0], [0.0])
        with pytest.raises(DomainError):
            CanalGrid(1.0, [1.0, 0.0], [0.0, 0.0])
        with pytest.raises(DomainError):
            CanalGrid(0.0, [1.0, 1.0], [0.0, 0.0])

    def test_geometry(self):
        g = CanalGrid.uniform(2.0, 4, State(1.0, 0.5))
        assert g.dx == 0.5
        np.testing.assert_allclose(g.x, [0.25, 0.75, 1.25, 1.75])
        assert g.volume() == 2.0
        np.testing.assert_array_equal(g.v, 0.5)


class TestCfl:
    def test_still_water(self):
        g = CanalGrid.uniform(1.0, 100, State(1.0, 0.0))
        assert cfl_dt(g, G, 0.9) == pytest.approx(0.002873478855663454, rel=1e-14)

    def test_unit(self):
        g = CanalGrid.uniform(2.0, 2, State(1.0, 0.0))
        assert cfl_dt(g, 1.0, 0.5) == 0.5

    def test_linear_in_dx(self):
        a = CanalGrid.uniform(1.0, 100, State(1.3, 0.2))
        b = CanalGrid.uniform(2.0, 100, State(1.3, 0.2))
        assert cfl_dt(b, G) == pytest.approx(2 * cfl_dt(a, G), rel=1e-15)

    def test_bad_cfl(self):
        g = CanalGrid.uniform(1.0, 10, State(1.0, 0.0))
        for c in (0.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                cfl_dt(g, G, c)


class TestInteriorStep:
    def test_constant_state(self):
        s = State(1.2, 0.3)
        g = CanalGrid.uniform(1.0, 50, s)
        f = flux(s, G)
        out = interior_step(g, cfl_dt(g, G), f, f, G)
        np.testing.assert_array_equal(out.h, g.h)
        np.testing.assert_array_equal(out.q, g.q)

    def test_kernel_fluxes_match_python(self):
        rng = np.random.default_rng(0)
        h = rng.uniform(0.5, 2.0, 40)
        q = h * rng.uniform(-0.5, 0.5, 40) * np.sqrt(G * h)
        fm = np.zeros(41)
        fp = np.zeros(41)
        assert _kernels.interior_fluxes(h, q, G, fm, fp) == -1
        for i in range(1, 40):
            m, p = godunov_flux(State.from_conservative(h[i - 1], q[i - 1]), State.from_conservative(h[i], q[i]), G)
            assert fm[i] == pytest.approx(m, rel=1e-12, abs=1e-14)
            assert fp[i] == pytest.approx(p, rel=1e-12)

    @given(st.lists(st.floats(0.5, 3.0), min_size=4, max_size=40), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
    def test_conservation(self, depths, m_in, m_out):
        h = np.array(depths)
        g = CanalGrid(1.0, h, np.zeros_like(h))
        dt = 0.1 * cfl_dt(g, G)
        out = interior_step(g, dt, (m_in, 0.5 * G * h[0] ** 2), (m_out, 0.5 * G * h[-1] ** 2), G)
        change = out.volume() - g.volume()
        assert change == pytest.approx(dt * (m_in - m_out), rel=1e-12, abs=1e-14 * g.volume())

    def test_positivity_error(self):
        g = CanalGrid.uniform(1.0, 4, State(0.01, 0.0))
        with pytest.raises(PositivityError) as info:
            interior_step(g, 1.0, (0.0, 0.0), (10.0, 0.0), G)
        assert info.value.cell == 3

    def test_dam_break_converges(self):
        from pooledsteps.riemann import sample, solve

        fan = solve(State(2.0, 0.0), State(1.0, 0.0), G)
        errs = []
        for n in (100, 200, 400):
            x = (np.arange(n) + 0.5) / n * 2 - 1
            h = np.where(x < 0, 2.0, 1.0)
            g = CanalGrid(2.0, h, np.zeros(n))
            t = 0.0
            left, right = flux(State(2.0, 0.0), G), flux(State(1.0, 0.0), G)
            while t < 0.1 - 1e-15:
                dt = min(cfl_dt(g, G), 0.1 - t)
                g = interior_step(g, dt, left, right, G)
                t += dt
            exact = np.array([sample(fan, xi / 0.1, G).h for xi in x])
            errs.append(np.sum(np.abs(g.h - exact)) * g.dx)
        assert errs[0] > errs[1] > errs[2]
        assert math.log2(errs[1] / errs[2]) > 0.5


class TestWeirTraces:
    def test_rest_below_crest(self):
        tr = weir_interface_traces(State(1.0, 0.0), State(1.2, 0.0), W)
        assert tr.mass_flux == 0.0
        assert tr.left_trace == State(1.0, 0.0) and tr.right_trace == State(1.2, 0.0)

    def test_steady_pair(self):
        left = State.from_conservative(2.0, Q_CRIT)
        right = State.from_conservative(0.5, Q_CRIT)
        tr = weir_interface_traces(left, right, W)
        assert tr.left_trace.h == pytest.approx(2.0, rel=1e-12)
        assert tr.right_trace.h == pytest.approx(0.5, rel=1e-12)

    def test_dam_over_weir(self):
        left, right = State(3.0, 0.0), State(0.5, 0.0)
        a = weir_interface_traces(left, right, W)
        b = construct_traces(left, right, W)
        assert a.left_trace.h == pytest.approx(b.left_trace.h, rel=1e-9)
        assert a.right_trace.h == pytest.approx(b.right_trace.h, rel=1e-9)
        assert a.mass_flux == pytest.approx(b.mass_flux, rel=1e-9)

    @given(subsonic(), subsonic(), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
    def test_newton_matches_construction(self, left, right, Hm, Hp):
        w = WeirGeometry(Hm, Hp)
        a = weir_interface_traces(left, right, w)
        b = construct_traces(left, right, w)
        assert a.left_trace.h == pytest.approx(b.left_trace.h, rel=1e-9)
        assert a.right_trace.h == pytest.approx(b.right_trace.h, rel=1e-9)
        assert a.mass_flux == pytest.approx(b.mass_flux, rel=1e-9, abs=1e-10)
        r1, r2 = coupling_residual(a.left_trace, a.right_trace, w)
        assert max(abs(r1), abs(r2)) <= 1e-10 * max(1.0, abs(a.mass_flux))

    @given(subsonic(), st.floats(0.3, 3.0))
    def test_gamma_kernel_matches_python(self, s, H):
        w = WeirGeometry(H, H)
        ref = gamma_intersection(s, w)
        assert _kernels.gamma_intersection(s.h, s.v, H, w.C, G) == pytest.approx(ref.h, rel=1e-12)


class TestBoundaryFlux:
    def test_free_outflow(self):
        m, p = boundary_flux(BoundarySignal.free_outflow(), State(1.0, 0.0), 0.0, "right", G)
        assert (m, p) == (0.0, 0.5 * G)

    def test_prescribed_consistency(self):
        s = State(1.3, 0.2)
        sig = BoundarySignal.prescribed([(0.0, s)])
        assert boundary_flux(sig, s, 0.0, "left", G) == flux(s, G)
        assert boundary_flux(sig, s, 0.0, "right", G) == flux(s, G)

    def test_inflow_wave(self):
        sig = BoundarySignal.prescribed([(0.0, State.from_conservative(3.0, 5.0)), (20.0, State(1.5, 0.0))])
        m, _ = boundary_flux(sig, State(1.5, 0.0), 0.0, "left", G)
        assert m > 0
        assert sig.target(19.9).h == 3.0 and sig.target(20.0).h == 1.5

    def test_supersonic_target(self):
        sig = BoundarySignal.prescribed([(0.0, State(0.25, 2.0))])
        with pytest.raises(DomainError):
            boundary_flux(sig, State(1.0, 0.0), 0.0, "left", G)

    def test_wall(self):
        m, p = boundary_flux(BoundarySignal.wall(), State(1.0, 0.0), 0.0, "right", G)
        assert m == 0.0 and p == pytest.approx(0.5 * G, rel=1e-14)
        m, p = boundary_flux(BoundarySignal.wall(), State(1.0, 0.5), 0.0, "right", G)
        assert m == 0.0 and p > 0.5 * G

    def test_outflow_weir(self):
        sig = BoundarySignal.over_weir(W)
        assert boundary_flux(sig, State(1.2, 0.0), 0.0, "right", G)[0] == 0.0
        m, _ = boundary_flux(sig, State(2.0, 0.0), 0.0, "right", G)
        assert m > 0
        ml, _ = boundary_flux(sig, State(2.0, 0.0), 0.0, "left", G)
        assert ml == pytest.approx(-m, rel=1e-14)

    def test_schedule_validation(self):
        with pytest.raises(DomainError):
            BoundarySignal.prescribed([(1.0, State(1.0, 0.0)), (1.0, State(1.0, 0.0))])
        with pytest.raises(DomainError):
            BoundarySignal("siphon")
