import numpy as np
import pytest

from allencahn import Grid1D, cubic, rescale_profile, solve_standing_wave, tabulated
from allencahn.numerics import zero_field
from allencahn.spde import SimConfig, simulate, stability_dt
from allencahn.standing_wave import ode_residual_sup


class TestCubicWave:
    def test_pinned_center(self, fine_profile):
        i0 = fine_profile.grid.n_nodes // 2
        assert fine_profile.m.values[i0] == pytest.approx(0.0, abs=1e-12)

    def test_closed_form(self, fine_profile):
        target = np.tanh(fine_profile.grid.x / np.sqrt(2))
        assert np.max(np.abs(fine_profile.m.values - target)) < 1e-12

    def test_residual(self, cubic_reaction, fine_profile):
        assert ode_residual_sup(fine_profile, cubic_reaction, order=4) < 1e-8
        assert ode_residual_sup(fine_profile, cubic_reaction, order=2) < 10 * fine_profile.grid.dx**2

    def test_energy(self, fine_profile):
        assert fine_profile.grad_norm_sq == pytest.approx(2 * np.sqrt(2) / 3, abs=1e-6)

    def test_both_paths_agree(self, cubic_reaction, fine_profile):
        quad = solve_standing_wave(cubic_reaction, fine_profile.grid, method="quadrature")
        assert np.max(np.abs(quad.m.values - fine_profile.m.values)) < 1e-6
        assert quad.grad_norm_sq == pytest.approx(fine_profile.grad_norm_sq, abs=1e-6)

    def test_oddness_quadrature_path(self, cubic_reaction):
        p = solve_standing_wave(cubic_reaction, Grid1D(8.0, 4000), method="quadrature")
        assert np.max(np.abs(p.m.values + p.m.values[::-1])) < 1e-8

    def test_boundary_saturation(self, fine_profile):
        L = fine_profile.grid.half_width
        assert abs(fine_profile.m.values[-1] - 1.0) < np.exp(-L)
        assert abs(fine_profile.m.values[0] + 1.0) < np.exp(-L)


class TestRescale:
    def test_identity(self, fine_profile):
        f = rescale_profile(fine_profile, 1.0, 0.0)
        assert np.max(np.abs(f.values - fine_profile.m.values)) < 1e-12

    def test_center_value(self, fine_profile):
        g = Grid1D(6.0, 1200)
        f = rescale_profile(fine_profile, 0.01, 0.0, g)
        assert f.values[g.n_nodes // 2] == pytest.approx(0.0, abs=1e-10)

    def test_translated_zero_crossing(self, fine_profile):
        g = Grid1D(6.0, 1200)
        f = rescale_profile(fine_profile, 0.01, 0.5, g)
        i = int(np.argmin(np.abs(f.values)))
        assert abs(g.x[i] - 0.5) <= g.dx

    def test_equilibrium_of_the_pde(self, cubic_reaction, fine_profile):
        eps = 0.01
        g = Grid1D(6.0, 960)
        u0 = rescale_profile(fine_profile, eps, 0.0, g)
        dt = stability_dt(eps, cubic_reaction)
        cfg = SimConfig(eps=eps, reaction=cubic_reaction, grid=g, dt=dt, t_end=1000 * dt,
                        initial=u0, record_times=[1000 * dt])
        traj = simulate(cfg)
        drift = np.max(np.abs(traj.fields[-1].values - u0.values))
        assert drift <= 10 * (g.dx**2 + dt)


class TestGeneralPath:
    def test_unbalanced_well_rejected(self):
        u = np.linspace(-1.6, 1.6, 2001)
        r = tabulated(u, u - u**3 + 0.05)
        with pytest.raises(ValueError, match="balanced"):
            solve_standing_wave(r, Grid1D(8.0, 1000))

    def test_tabulated_balanced_close_to_cubic(self, cubic_reaction):
        u = np.linspace(-1.6, 1.6, 4001)
        r = tabulated(u, u - u**3)
        g = Grid1D(8.0, 4000)
        p = solve_standing_wave(r, g)
        assert np.max(np.abs(p.m.values - np.tanh(g.x / np.sqrt(2)))) < 1e-5
