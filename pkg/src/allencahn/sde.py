"""Limit interface SDE: coefficients from the linearized operator, and simulation.

The interface position obeys d xi = alpha1 a(xi) dB + alpha2 a(xi) a'(xi) dt with
alpha1 = 1/||grad m|| and alpha2 a weighted time integral of the squared heat
kernel of L = -Delta - f'(m).  The production path expands the kernel in the
eigenbasis of the tridiagonal discretization of L and integrates time
analytically; an independent Crank-Nicolson evolution of the kernel serves as a
cross-check.  Both paths complete the short-time t^{-1/2} mass below a cutoff
t0 with its closed-form leading term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .numerics import Field, Grid1D, RngStream
from .reaction import Reaction
from .standing_wave import StandingWaveProfile, solve_standing_wave


class SymmetryError(RuntimeError):
    """The zero-mode weight G00 fails to vanish (asymmetric discretization)."""


@dataclass
class LinearizedOperator:
    """Lowest eigenpairs of -Delta - f'(m) with Dirichlet truncation.

    Eigenfunctions are columns of `modes`, orthonormal in the dx-weighted inner
    product; node set excludes the boundary (where they vanish).
    """

    grid: Grid1D
    potential: Field
    eigenvalues: np.ndarray
    modes: np.ndarray

    @property
    def x_interior(self) -> np.ndarray:
        return self.grid.x[1:-1]


def build_linearized_operator(
    p: StandingWaveProfile, r: Reaction, n_modes: int = 256
) -> LinearizedOperator:
    """Eigendecomposition of the symmetric tridiagonal discretization of L.

    Only the lowest n_modes pairs are computed; the quadratic-kernel time
    integrals they feed are damped exponentially in the eigenvalue, so the
    spectral tail beyond them is negligible for the coefficient quadrature.
    """
    g = p.grid
    dx = g.dx
    pot = -np.asarray(r.deriv(p.m.values))
    diag = 2.0 / dx**2 + pot[1:-1]
    off = np.full(diag.size - 1, -1.0 / dx**2)
    n_modes = min(n_modes, diag.size)
    lam, vec = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_modes - 1))
    vec = vec / np.sqrt(dx)  # LAPACK unit vectors -> dx-weighted orthonormal
    center = diag.size // 2
    signs = np.where(vec[center, :] < 0, -1.0, 1.0)
    vec = vec * signs
    if lam[0] < -100.0 * dx**2:
        raise ValueError(f"ground eigenvalue {lam[0]:.3e} below -100 dx^2: inconsistent scheme")
    return LinearizedOperator(
        grid=g, potential=Field(g, pot), eigenvalues=lam, modes=vec
    )


@dataclass
class SdeCoefficients:
    alpha1: float
    alpha2: float
    alpha2_error_estimate: float

    def __post_init__(self) -> None:
        if not self.alpha1 > 0:
            raise ValueError("alpha1 must be positive")


def compute_alpha1(p: StandingWaveProfile) -> float:
    """alpha1 = 1 / ||grad m||_{L2}."""
    if not p.grad_norm_sq > 0:
        raise ValueError("profile has no gradient energy")
    return 1.0 / np.sqrt(p.grad_norm_sq)


def _short_time_mass(p: StandingWaveProfile, r: Reaction, t0: float) -> float:
    """int_0^{t0} of the kernel integrand: sqrt(t0/(2 pi)) * int x g(x) dx + O(t0^{3/2}).

    g = f''(m) grad m; the squared kernel concentrates on x = y with diagonal
    mass (8 pi t)^{-1/2}, so the leading short-time weight is int x g(x) dx.
    """
    x = p.grid.x
    w = np.full(x.size, p.grid.dx)
    w[0] *= 0.5
    w[-1] *= 0.5
    g = np.asarray(r.second_deriv(p.m.values)) * p.grad_m.values
    j = float(np.dot(w, x * g))
    return np.sqrt(t0 / (2.0 * np.pi)) * j


def _spectral_tail(op: LinearizedOperator, p: StandingWaveProfile, r: Reaction,
                   n_modes: int, t0: float) -> tuple[float, float]:
    """Sum over mode pairs of X_jk G_jk e^{-(l_j+l_k) t0} / (l_j + l_k), minus (0,0)."""
    dx = op.grid.dx
    lam = op.eigenvalues[:n_modes]
    phi = op.modes[:, :n_modes]
    x = op.x_interior
    m_vals = p.m.values[1:-1]
    g_vals = np.asarray(r.second_deriv(m_vals)) * p.grad_m.values[1:-1]
    X = (phi * x[:, None]).T @ phi * dx
    G = (phi * g_vals[:, None]).T @ phi * dx
    g00 = float(G[0, 0])
    if abs(g00) > 1e-4:
        raise SymmetryError(f"zero-mode weight G00 = {g00:.3e}; discretization asymmetric")
    denom = lam[:, None] + lam[None, :]
    bad = [tuple(map(int, b)) for b in np.argwhere(denom <= dx**2) if tuple(b) != (0, 0)]
    if bad:
        raise ValueError(f"near-singular eigenvalue pairs beyond (0,0): {bad[:4]}")
    terms = X * G * np.exp(-denom * t0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = terms / denom
    terms[0, 0] = 0.0  # removed: G00 vanishes by odd symmetry
    return float(terms.sum()), g00


def compute_alpha2(
    op: LinearizedOperator,
    p: StandingWaveProfile,
    r: Reaction,
    n_modes: int | None = None,
    t0: float = 2e-3,
) -> SdeCoefficients:
    """Spectral evaluation of the drift coefficient alpha2.

    The (0,0) pair is excluded: its time integral diverges but its spatial
    weight G00 = int phi0^2 f''(m) grad m vanishes by odd symmetry, which is
    checked.  The error estimate is the change when halving the mode count.
    """
    if n_modes is None:
        n_modes = op.eigenvalues.size
    n_modes = min(n_modes, op.eigenvalues.size)
    full, _ = _spectral_tail(op, p, r, n_modes, t0)
    half, _ = _spectral_tail(op, p, r, max(n_modes // 2, 2), t0)
    short = _short_time_mass(p, r, t0)
    alpha2 = -(short + full) / p.grad_norm_sq
    alpha2_half = -(short + half) / p.grad_norm_sq
    return SdeCoefficients(
        alpha1=compute_alpha1(p),
        alpha2=alpha2,
        alpha2_error_estimate=abs(alpha2 - alpha2_half),
    )


def alpha2_time_stepping_oracle(
    r: Reaction,
    half_width: float = 12.0,
    n_cells: int = 1000,
    dt_max: float = 4e-3,
    t_max: float = 7.0,
    t0: float = 2e-3,
    ramp: float = 0.1,
) -> float:
    """Independent alpha2 estimate: Crank-Nicolson evolution of the full kernel.

    Mollified lattice deltas (columns of the identity) evolve under du/dt = -L u.
    The step size grows geometrically as dt ~ ramp * t so that lambda dt stays
    moderate for whichever modes are still alive, which keeps the trapezoidal
    rule on the t^{-1/2}-like integrand I(t) = sum_ij x_i E(t)_ij^2 g_j accurate.
    A fitted exponential covers the tail beyond t_max and the closed-form
    short-time term covers [0, t0).
    """
    g = Grid1D(half_width, n_cells)
    p = solve_standing_wave(r, g)
    dx = g.dx
    pot = -np.asarray(r.deriv(p.m.values))[1:-1]
    n = pot.size
    x = g.x[1:-1]
    gw = np.asarray(r.second_deriv(p.m.values[1:-1])) * p.grad_m.values[1:-1]
    lam_max = 4.0 / dx**2 + float(np.max(pot))
    dt_min = min(0.4 / lam_max, t0 / 10.0)

    def bands(dt: float):
        impl = np.zeros((3, n))
        impl[1, :] = 1.0 + 0.5 * dt * (2.0 / dx**2 + pot)
        impl[0, 1:] = -0.5 * dt / dx**2
        impl[2, :-1] = -0.5 * dt / dx**2
        expl = np.zeros((3, n))
        expl[1, :] = 1.0 - 0.5 * dt * (2.0 / dx**2 + pot)
        expl[0, 1:] = 0.5 * dt / dx**2
        expl[2, :-1] = 0.5 * dt / dx**2
        return impl, expl

    def cn_step(E: np.ndarray, impl: np.ndarray, expl: np.ndarray) -> np.ndarray:
        rhs = expl[1, :][:, None] * E
        rhs[:-1] += expl[0, 1:][:, None] * E[1:]
        rhs[1:] += expl[2, :-1][:, None] * E[:-1]
        return solve_banded((1, 1), impl, rhs)

    def integrand(E: np.ndarray) -> float:
        return float(x @ (E * E) @ gw)

    E = np.eye(n)
    t = 0.0
    times: list[float] = []
    vals: list[float] = []
    cached_dt = None
    cached = None
    while t < t_max - 1e-12:
        dt = max(dt_min, ramp * t)
        dt = min(dt, dt_max, t_max - t)
        if t < t0 and t + dt > t0:
            dt = t0 - t  # land exactly on the handover point
        if cached_dt is None or abs(dt - cached_dt) > 1e-15:
            cached = bands(dt)
            cached_dt = dt
        E = cn_step(E, *cached)
        t += dt
        if t >= t0 - 1e-12:
            times.append(t)
            vals.append(integrand(E))

    times_arr = np.array(times)
    vals_arr = np.array(vals)
    integral = float(np.trapezoid(vals_arr, times_arr))
    window = times_arr > t_max - 2.0
    rate = None
    if np.count_nonzero(window) > 10 and np.all(np.abs(vals_arr[window]) > 0):
        coeffs = np.polyfit(times_arr[window], np.log(np.abs(vals_arr[window])), 1)
        rate = -coeffs[0]
    if rate and rate > 0:
        integral += vals_arr[-1] / rate
    short = _short_time_mass(p, r, t0)
    return -(short + integral) / p.grad_norm_sq


def euler_maruyama(
    coeffs: SdeCoefficients,
    a,
    xi0: float,
    T: float,
    dt: float,
    n_paths: int,
    seed: RngStream,
    record_stride: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Euler-Maruyama paths of d xi = alpha1 a(xi) dB + alpha2 a(xi) a'(xi) dt.

    Per-path noise streams are split from `seed`; returns (times, positions)
    with positions of shape (n_paths, n_times) recorded every record_stride
    steps (t = 0 included).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(T / dt))
    rec = np.arange(0, n_steps + 1, record_stride)
    if rec[-1] != n_steps:
        rec = np.append(rec, n_steps)
    times = rec * dt
    xi = np.full(n_paths, float(xi0))
    out = np.empty((n_paths, rec.size))
    out[:, 0] = xi
    noise = np.empty((n_paths, n_steps))
    for i in range(n_paths):
        gen = seed.child(i).generator()
        noise[i, :] = gen.standard_normal(n_steps)
    root_dt = np.sqrt(dt)
    col = 1
    for k in range(1, n_steps + 1):
        av = a(xi)
        xi = xi + coeffs.alpha1 * av * root_dt * noise[:, k - 1] \
            + coeffs.alpha2 * av * a.deriv(xi) * dt
        if col < rec.size and k == rec[col]:
            out[:, col] = xi
            col += 1
    return times, out
