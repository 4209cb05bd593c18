import numpy as np
import pytest

from allencahn import Grid1D, RngStream, cubic, grid_for_eps, rescale_profile
from allencahn.numerics import Field, constant_field, l2_norm
from allencahn.spde import (
    NoiseSpec,
    SimConfig,
    default_bump,
    make_initial_data,
    simulate,
    stability_dt,
    step,
    sup_norm_monitor,
)


class TestBump:
    def test_peak(self):
        assert float(default_bump(1.0)(0.0)) == pytest.approx(1.0)

    def test_flat_contact_at_support_edge(self):
        b = default_bump(1.0)
        assert float(b(1.0)) == 0.0 and float(b(-1.0)) == 0.0
        for h in (1e-2, 1e-3, 1e-4):
            assert abs(b(1.0) - b(1.0 - h)) / h < 1e-3 or h > 1e-3

    def test_direct_value(self):
        assert float(default_bump(2.0)(0.5)) == pytest.approx(2 * np.exp(1 - 4 / 3), rel=1e-12)

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            default_bump(-1.0)


class TestStep:
    def test_zero_dt_identity(self, cubic_reaction):
        g = Grid1D(4.0, 64)
        u = Field(g, np.tanh(g.x))
        cfg = SimConfig(eps=0.1, reaction=cubic_reaction, grid=g, dt=0.0, t_end=0.0, initial=u)
        out = step(u, cfg)
        assert np.array_equal(out.values, u.values)

    def test_equilibrium_residual(self, cubic_reaction, fine_profile):
        eps = 0.01
        g = grid_for_eps(eps)
        u = rescale_profile(fine_profile, eps, 0.0, g)
        dt = stability_dt(eps, cubic_reaction)
        cfg = SimConfig(eps=eps, reaction=cubic_reaction, grid=g, dt=dt, t_end=dt, initial=u)
        out = step(u, cfg)
        assert np.max(np.abs(out.values - u.values)) <= 10 * (g.dx**2 + dt)

    def test_heat_mode_decay(self):
        # reaction off, homogeneous Dirichlet: sin(pi x / L) is an exact eigenmode
        g = Grid1D(4.0, 512)
        u = Field(g, np.sin(np.pi * g.x / 4.0))
        dt = 0.01
        cfg = SimConfig(eps=1.0, reaction=None, grid=g, dt=dt, t_end=dt, initial=u, bc=(0.0, 0.0))
        out = step(u, cfg)
        lam_h = (2.0 - 2.0 * np.cos(np.pi * g.dx / 4.0)) / g.dx**2
        ratio = l2_norm(out) / l2_norm(u)
        assert ratio == pytest.approx(1.0 / (1.0 + dt * lam_h), abs=1e-12)
        assert ratio == pytest.approx(np.exp(-lam_h * dt), abs=1e-3)


class TestSimulate:
    def _cfg(self, cubic_reaction, noise=None, seed=0, u0=None, record=(0.05, 0.1)):
        eps = 0.05
        g = grid_for_eps(eps)
        bc = None
        if u0 is None:
            u0 = constant_field(g, 1.0)
            bc = (1.0, 1.0)
        return SimConfig(eps=eps, reaction=cubic_reaction, grid=g,
                         dt=stability_dt(eps, cubic_reaction), t_end=0.1, initial=u0,
                         noise=noise, record_times=record, seed=RngStream(seed), bc=bc)

    def test_zero_amplitude_equals_deterministic(self, cubic_reaction):
        eps = 0.05
        g = grid_for_eps(eps)
        silent = NoiseSpec(gamma=1.0, amplitude=Field(g, np.zeros(g.n_nodes)))
        t1 = simulate(self._cfg(cubic_reaction, noise=silent, seed=5))
        t2 = simulate(self._cfg(cubic_reaction, noise=None))
        for a, b in zip(t1.fields, t2.fields):
            assert np.array_equal(a.values, b.values)

    def test_seed_reproducibility(self, cubic_reaction):
        eps = 0.05
        g = grid_for_eps(eps)
        noise = NoiseSpec.from_bump(default_bump(0.5), g, gamma=1.0)
        t1 = simulate(self._cfg(cubic_reaction, noise=noise, seed=7))
        t2 = simulate(self._cfg(cubic_reaction, noise=noise, seed=7))
        for a, b in zip(t1.fields, t2.fields):
            assert np.array_equal(a.values, b.values)

    def test_stable_equilibrium(self, cubic_reaction):
        traj = simulate(self._cfg(cubic_reaction))
        for f in traj.fields:
            assert np.max(np.abs(f.values - 1.0)) < 1e-12

    def test_dt_rule_enforced(self, cubic_reaction):
        eps = 0.05
        g = grid_for_eps(eps)
        cfg = SimConfig(eps=eps, reaction=cubic_reaction, grid=g, dt=eps, t_end=0.1,
                        initial=constant_field(g, 1.0))
        with pytest.raises(ValueError, match="dt"):
            simulate(cfg)


class TestOddSymmetry:
    def test_reflected_negated_noise(self, cubic_reaction, fine_profile):
        # u[dW~](t, x) = -u[dW](t, -x) for even a, antisymmetric u0
        eps = 0.05
        g = grid_for_eps(eps)
        u0 = rescale_profile(fine_profile, eps, 0.0, g)
        noise = NoiseSpec.from_bump(default_bump(0.5), g, gamma=1.0)
        dt = stability_dt(eps, cubic_reaction)
        cfg = SimConfig(eps=eps, reaction=cubic_reaction, grid=g, dt=dt, t_end=0.0,
                        initial=u0, noise=noise)
        gen = RngStream(3).generator()
        u = u0.copy()
        v = u0.copy()
        scale = np.sqrt(dt / g.dx)
        for _ in range(50):
            z = scale * gen.standard_normal(g.n_nodes)
            u = step(u, cfg, Field(g, z))
            v = step(v, cfg, Field(g, -z[::-1]))
        assert np.max(np.abs(v.values + u.values[::-1])) < 1e-10


class TestInitialData:
    def test_general_unique_zero(self):
        eps = 0.01
        g = grid_for_eps(eps)
        u = make_initial_data("general", {"xi0": 0.1}, g, eps)
        s = np.sign(u.values)
        assert np.count_nonzero(s[:-1] != s[1:]) == 1
        i = int(np.nonzero(s[:-1] != s[1:])[0][0])
        assert abs(g.x[i] - 0.1) <= 2 * g.dx

    def test_general_tails_bound(self):
        eps, kappa, mu = 0.01, 1.2, 1.0
        g = grid_for_eps(eps)
        u = make_initial_data("general", {"xi0": 0.0, "kappa": kappa}, g, eps)
        right = g.x >= 1.0
        envelope = eps**kappa * min(mu / 4, 1) * np.exp(-np.sqrt(mu) * g.x[right] / 2)
        assert np.all(np.abs(u.values[right] - 1.0) <= envelope * (1 + 1e-9))

    def test_general_clearance(self):
        eps = 0.01
        g = grid_for_eps(eps)
        u = make_initial_data("general", {"xi0": 0.0}, g, eps)
        clear = np.abs(g.x) >= np.sqrt(eps)
        assert np.min(np.abs(u.values[clear])) >= np.sqrt(eps)

    @staticmethod
    def _post_generation_base(r, profile, eps):
        # evolve a compliant datum to the generation time; the super/sub blends
        # apply to this restarted (already sharp) field
        g = grid_for_eps(eps)
        u0 = make_initial_data("general", {"xi0": 0.0}, g, eps)
        dt = stability_dt(eps, r)
        t_gen = 0.5 * eps * abs(np.log(eps))
        traj = simulate(SimConfig(eps=eps, reaction=r, grid=g, dt=dt, t_end=t_gen,
                                  initial=u0, record_times=[t_gen]))
        return traj.fields[-1]

    def test_super_dominates(self, cubic_reaction, fine_profile):
        eps = 0.01
        g = grid_for_eps(eps)
        base = self._post_generation_base(cubic_reaction, fine_profile, eps)
        up = make_initial_data("super-initial",
                               {"base": base, "profile": fine_profile, "xi0": 0.0}, g, eps)
        assert np.all(up.values >= base.values - 1e-12)

    def test_sub_dominated(self, cubic_reaction, fine_profile):
        eps = 0.01
        g = grid_for_eps(eps)
        base = self._post_generation_base(cubic_reaction, fine_profile, eps)
        lo = make_initial_data("sub-initial",
                               {"base": base, "profile": fine_profile, "xi0": 0.0}, g, eps)
        assert np.all(lo.values <= base.values + 1e-12)

    def test_super_rejects_incompatible_base(self, fine_profile):
        # a wide raw datum cannot be dominated by a sharp manifold blend
        eps = 0.01
        g = grid_for_eps(eps)
        base = make_initial_data("general", {"xi0": 0.0}, g, eps)
        with pytest.raises(ValueError, match="dominate"):
            make_initial_data("super-initial",
                              {"base": base, "profile": fine_profile, "xi0": 0.0}, g, eps)

    def test_manifold_perturbed_compliant(self, fine_profile):
        eps = 0.02
        g = grid_for_eps(eps)
        u = make_initial_data("manifold-perturbed", {"profile": fine_profile}, g, eps)
        s = np.sign(u.values)
        s[s == 0] = 1  # the exact zero at the crossing counts once
        assert np.count_nonzero(s[:-1] != s[1:]) == 1

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            make_initial_data("nope", {}, Grid1D(6.0, 64), 0.01)


class TestMonitor:
    def test_violation_at_first_record(self, cubic_reaction):
        g = Grid1D(6.0, 64)
        cfg = SimConfig(eps=0.1, reaction=cubic_reaction, grid=g, dt=1e-2, t_end=0.0,
                        initial=constant_field(g, 3.0))
        from allencahn.spde import Trajectory

        traj = Trajectory(config=cfg)
        traj.record(0.01, constant_field(g, 3.0))
        assert sup_norm_monitor(traj, 2.0) == 0.01

    def test_bounded_run_has_none(self, cubic_reaction):
        eps = 0.05
        g = grid_for_eps(eps)
        u0 = make_initial_data("general", {"xi0": 0.0}, g, eps)
        dt = stability_dt(eps, cubic_reaction)
        traj = simulate(SimConfig(eps=eps, reaction=cubic_reaction, grid=g, dt=dt,
                                  t_end=0.2, initial=u0,
                                  record_times=np.linspace(0, 0.2, 11)))
        assert sup_norm_monitor(traj, 2.0) is None
