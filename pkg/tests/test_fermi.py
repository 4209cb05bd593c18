import numpy as np
import pytest

from allencahn import Grid1D, cubic, grid_for_eps, rescale_profile
from allencahn.fermi import (
    PathRecord,
    ProjectionError,
    _ManifoldGeometry,
    dist_to_manifold,
    interface_path,
    project,
)
from allencahn.numerics import Field, constant_field, l2_norm
from allencahn.spde import SimConfig, Trajectory, make_initial_data, simulate, stability_dt


EPS = 0.01


@pytest.fixture(scope="module")
def grid():
    return grid_for_eps(EPS)


class TestProject:
    def test_exact_member(self, fine_profile, grid):
        u = rescale_profile(fine_profile, EPS, 0.3, grid)
        dec = project(u, fine_profile, EPS)
        assert abs(dec.eta - 0.3) <= grid.dx
        assert dec.distance <= 10 * grid.dx**2

    def test_orthogonal_perturbation_keeps_minimizer(self, fine_profile, grid):
        u = rescale_profile(fine_profile, EPS, 0.0, grid)
        # even bump: orthogonal to the odd translation mode at eta = 0
        pert = 0.01 * np.exp(-((grid.x) ** 2) / 0.02)
        u = Field(grid, u.values + pert)
        dec = project(u, fine_profile, EPS)
        assert abs(dec.eta) <= grid.dx
        # brute-force scan oracle
        geo = _ManifoldGeometry(fine_profile, grid, EPS)
        etas = np.linspace(-0.5, 0.5, 2001)
        brute = etas[np.argmin([geo.sq_distance(u.values, e) for e in etas])]
        assert abs(dec.eta - brute) <= 1e-3

    def test_degenerate_input_raises(self, fine_profile, grid):
        with pytest.raises(ProjectionError):
            project(constant_field(grid, 0.0), fine_profile, EPS)

    def test_true_minimum(self, fine_profile, grid):
        u = make_initial_data("general", {"xi0": 0.1}, grid, EPS)
        dec = project(u, fine_profile, EPS)
        geo = _ManifoldGeometry(fine_profile, grid, EPS)
        g0 = geo.sq_distance(u.values, dec.eta)
        assert g0 <= geo.sq_distance(u.values, dec.eta + grid.dx)
        assert g0 <= geo.sq_distance(u.values, dec.eta - grid.dx)

    def test_translation_equivariance(self, fine_profile, grid):
        u = make_initial_data("general", {"xi0": 0.0}, grid, EPS)
        k = 8
        shifted = np.concatenate([np.full(k, -1.0), u.values[:-k]])
        eta0 = project(u, fine_profile, EPS).eta
        eta1 = project(Field(grid, shifted), fine_profile, EPS).eta
        assert abs(eta1 - (eta0 + k * grid.dx)) <= grid.dx

    def test_remainder_consistency(self, fine_profile, grid):
        u = make_initial_data("general", {"xi0": 0.0}, grid, EPS)
        dec = project(u, fine_profile, EPS)
        assert dec.distance == pytest.approx(l2_norm(dec.remainder), rel=1e-12)
        assert dec.h1_of_remainder >= dec.distance


class TestDistance:
    def test_member(self, fine_profile, grid):
        u = rescale_profile(fine_profile, EPS, -0.2, grid)
        assert dist_to_manifold(u, fine_profile, EPS) <= 10 * grid.dx**2

    def test_bump_upper_bound(self, fine_profile, grid):
        bump = 0.05 * np.exp(-((grid.x - 2.0) ** 2) / 0.1)
        u = Field(grid, rescale_profile(fine_profile, EPS, 0.0, grid).values + bump)
        d = dist_to_manifold(u, fine_profile, EPS)
        assert d <= l2_norm(Field(grid, bump)) + 1e-12

    def test_matches_brute_force(self, fine_profile, grid):
        u = Field(grid, np.tanh(grid.x / 0.5))
        d = dist_to_manifold(u, fine_profile, EPS)
        geo = _ManifoldGeometry(fine_profile, grid, EPS)
        # 10^4 candidates packed densely around the symmetric minimizer
        etas = np.linspace(-0.05, 0.05, 10_000)
        brute = np.sqrt(min(geo.sq_distance(u.values, e) for e in etas))
        assert abs(d - brute) <= 1e-8


class TestInterfacePath:
    def _traj(self, cubic_reaction, fields, dt=1e-3):
        g = fields[0].grid
        cfg = SimConfig(eps=EPS, reaction=cubic_reaction, grid=g, dt=dt,
                        t_end=dt * len(fields), initial=fields[0])
        traj = Trajectory(config=cfg)
        for i, f in enumerate(fields):
            traj.record((i + 1) * dt, f)
        return traj

    def test_constant_member_path(self, cubic_reaction, fine_profile, grid):
        u = rescale_profile(fine_profile, EPS, 0.2, grid)
        traj = self._traj(cubic_reaction, [u, u, u])
        rec = interface_path(traj, fine_profile, EPS, gamma=1.0)
        assert np.all(rec.valid)
        assert np.max(np.abs(rec.positions - 0.2)) <= grid.dx
        assert np.allclose(rec.times, np.array([1, 2, 3]) * 1e-3 * EPS**2.5)

    def test_zero_noise_equilibrium_path(self, cubic_reaction, fine_profile, grid):
        u0 = rescale_profile(fine_profile, EPS, 0.0, grid)
        dt = stability_dt(EPS, cubic_reaction)
        traj = simulate(SimConfig(eps=EPS, reaction=cubic_reaction, grid=grid, dt=dt,
                                  t_end=0.05, initial=u0,
                                  record_times=np.linspace(dt, 0.05, 5)))
        rec = interface_path(traj, fine_profile, EPS)
        assert np.all(rec.valid)
        assert np.max(np.abs(rec.positions)) <= grid.dx

    def test_invalid_slices_flagged(self, cubic_reaction, fine_profile, grid):
        u = rescale_profile(fine_profile, EPS, 0.0, grid)
        flat = constant_field(grid, 0.0)
        traj = self._traj(cubic_reaction, [u, flat, u])
        rec = interface_path(traj, fine_profile, EPS)
        assert rec.valid.tolist() == [True, False, True]
        assert np.isnan(rec.positions[1])

    def test_monotone_times_required(self):
        with pytest.raises(ValueError):
            PathRecord(times=np.array([0.1, 0.1]), positions=np.zeros(2),
                       valid=np.ones(2, bool))
