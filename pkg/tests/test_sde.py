import numpy as np
import pytest

from allencahn import Grid1D, RngStream, cubic, solve_standing_wave, tabulated
from allencahn.numerics import Field
from allencahn.sde import (
    SdeCoefficients,
    SymmetryError,
    build_linearized_operator,
    compute_alpha1,
    compute_alpha2,
    euler_maruyama,
)
from allencahn.spde import default_bump
from allencahn.standing_wave import StandingWaveProfile


@pytest.fixture(scope="module")
def operator(cubic_reaction, coeff_profile):
    return build_linearized_operator(coeff_profile, cubic_reaction, n_modes=256)


class TestOperator:
    def test_translation_zero_mode(self, operator, coeff_profile):
        dx = coeff_profile.grid.dx
        assert abs(operator.eigenvalues[0]) <= 10 * dx**2
        gm = coeff_profile.grad_m.values[1:-1]
        phi0 = operator.modes[:, 0]
        cos = np.dot(phi0, gm) / np.sqrt(np.dot(phi0, phi0) * np.dot(gm, gm))
        assert cos >= 1 - 1e-4

    def test_second_bound_state(self, operator):
        assert operator.eigenvalues[1] == pytest.approx(1.5, rel=0.02)

    def test_orthonormality(self, operator):
        dx = operator.grid.dx
        gram = operator.modes[:, :32].T @ operator.modes[:, :32] * dx
        assert np.max(np.abs(gram - np.eye(32))) <= 1e-8

    def test_pure_laplacian_spectrum(self):
        # zero potential: Dirichlet Laplacian eigenvalues (k pi / 2L)^2
        L, n = 6.0, 2400
        g = Grid1D(L, n)
        u = np.linspace(-2, 2, 101)
        zero_reaction = tabulated(u, np.zeros_like(u))
        m = Field(g, np.tanh(g.x))
        profile = StandingWaveProfile(g, m, Field(g, 1 - np.tanh(g.x) ** 2), 1.0)
        op = build_linearized_operator(profile, zero_reaction, n_modes=8)
        for k in range(1, 6):
            target = (k * np.pi / (2 * L)) ** 2
            assert op.eigenvalues[k - 1] == pytest.approx(target, rel=0.01)


class TestAlpha1:
    def test_value(self, fine_profile):
        assert compute_alpha1(fine_profile) == pytest.approx((2 * np.sqrt(2) / 3) ** -0.5, abs=1e-6)

    def test_stretch_scaling(self, fine_profile):
        # m(x/c) multiplies the gradient energy by 1/c
        c = 2.0
        g = fine_profile.grid
        stretched = StandingWaveProfile(
            g,
            Field(g, fine_profile.eval_m(g.x / c)),
            Field(g, fine_profile.eval_grad(g.x / c) / c),
            fine_profile.grad_norm_sq / c,
        )
        assert compute_alpha1(stretched) == pytest.approx(
            np.sqrt(c) * compute_alpha1(fine_profile), rel=1e-12
        )

    def test_degenerate_profile_rejected(self):
        g = Grid1D(2.0, 32)
        flat = StandingWaveProfile(g, Field(g, np.zeros(33)), Field(g, np.zeros(33)), 0.0)
        with pytest.raises(ValueError):
            compute_alpha1(flat)


class TestAlpha2:
    def test_zero_mode_weight_vanishes(self, operator, coeff_profile, cubic_reaction):
        from allencahn.sde import _spectral_tail

        _, g00 = _spectral_tail(operator, coeff_profile, cubic_reaction, 64, 2e-3)
        assert abs(g00) <= 1e-6

    def test_linear_reaction_gives_zero(self, operator, coeff_profile):
        u = np.linspace(-2, 2, 101)
        linear = tabulated(u, u.copy())
        coeffs = compute_alpha2(operator, coeff_profile, linear)
        assert coeffs.alpha2 == 0.0

    def test_truncation_monotone(self, operator, coeff_profile, cubic_reaction):
        vals = [compute_alpha2(operator, coeff_profile, cubic_reaction, n_modes=k).alpha2
                for k in (64, 128, 256)]
        d1 = abs(vals[1] - vals[0])
        d2 = abs(vals[2] - vals[1])
        assert d2 < d1

    def test_error_estimate_brackets_final_change(self, operator, coeff_profile, cubic_reaction):
        c128 = compute_alpha2(operator, coeff_profile, cubic_reaction, n_modes=128)
        c256 = compute_alpha2(operator, coeff_profile, cubic_reaction, n_modes=256)
        assert abs(c256.alpha2 - c128.alpha2) <= c128.alpha2_error_estimate + 1e-12


class TestEulerMaruyama:
    def test_frozen_without_amplitude(self):
        coeffs = SdeCoefficients(1.0, 2.0, 0.0)
        zero = default_bump(0.0)
        _, xi = euler_maruyama(coeffs, zero, 0.3, 0.5, 1e-3, 8, RngStream(1))
        assert np.all(xi == 0.3)

    def test_constant_amplitude_variance(self):
        class Flat:
            def __call__(self, x):
                return np.full_like(np.asarray(x, float), 0.7)

            def deriv(self, x):
                return np.zeros_like(np.asarray(x, float))

        coeffs = SdeCoefficients(1.03, 2.5, 0.0)
        _, xi = euler_maruyama(coeffs, Flat(), 0.0, 1.0, 1e-3, 10_000,
                               RngStream(7), record_stride=1000)
        target = (1.03 * 0.7) ** 2
        assert xi[:, -1].var() == pytest.approx(target, rel=0.05)

    def test_weak_order_mean(self):
        class Flat:
            def __call__(self, x):
                return np.full_like(np.asarray(x, float), 0.7)

            def deriv(self, x):
                return np.zeros_like(np.asarray(x, float))

        coeffs = SdeCoefficients(1.0, 0.0, 0.0)
        _, xi = euler_maruyama(coeffs, Flat(), 0.2, 1.0, 1e-3, 10_000,
                               RngStream(9), record_stride=1000)
        se = 0.7 / np.sqrt(10_000)
        assert abs(xi[:, -1].mean() - 0.2) <= 3 * se

    def test_frozen_outside_support(self):
        coeffs = SdeCoefficients(1.0, 2.0, 0.0)
        _, xi = euler_maruyama(coeffs, default_bump(1.0), 1.5, 0.5, 1e-3, 4, RngStream(2))
        assert np.all(xi == 1.5)

    def test_symmetric_law_at_center(self, operator, coeff_profile, cubic_reaction):
        coeffs = compute_alpha2(operator, coeff_profile, cubic_reaction)
        _, xi = euler_maruyama(coeffs, default_bump(0.5), 0.0, 0.5, 1e-3, 4000,
                               RngStream(3), record_stride=500)
        final = xi[:, -1]
        skew = np.mean(final**3) / np.mean(final**2) ** 1.5
        se = np.sqrt(6.0 / final.size)
        assert abs(skew) <= 3 * se

    def test_reproducible(self):
        coeffs = SdeCoefficients(1.0, 1.0, 0.0)
        b = default_bump(0.5)
        _, a = euler_maruyama(coeffs, b, 0.0, 0.2, 1e-3, 16, RngStream(5))
        _, b2 = euler_maruyama(coeffs, b, 0.0, 0.2, 1e-3, 16, RngStream(5))
        assert np.array_equal(a, b2)
