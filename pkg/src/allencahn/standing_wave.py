"""Standing wave profiles of bistable reactions and their energy norm.

The monotone connection m between the stable zeros solves m'' + f(m) = 0 with
m(0) = 0 and m(+-inf) = a_(+-).  The balanced cubic admits the closed form
m(x) = tanh(x/sqrt(2)); the general construction goes through the first
integral (m')^2 / 2 = W(m), W(s) = int_s^{a_+} f, which reduces the boundary
value problem to a monotone quadrature x(m) = int ds / sqrt(2 W(s)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .numerics import Field, Grid1D, inner, l2_norm
from .reaction import Reaction, constants


@dataclass
class StandingWaveProfile:
    grid: Grid1D
    m: Field
    grad_m: Field
    grad_norm_sq: float
    a_minus: float = -1.0
    a_plus: float = 1.0

    @cached_property
    def _m_spline(self) -> CubicSpline:
        return CubicSpline(self.grid.x, self.m.values)

    @cached_property
    def _grad_spline(self) -> CubicSpline:
        return CubicSpline(self.grid.x, self.grad_m.values)

    def eval_m(self, points: np.ndarray) -> np.ndarray:
        """Cubic interpolation of m, clamped to the stable levels outside the table."""
        pts = np.asarray(points, dtype=float)
        lo, hi = self.grid.x[0], self.grid.x[-1]
        out = self._m_spline(np.clip(pts, lo, hi))
        return np.where(pts < lo, self.a_minus, np.where(pts > hi, self.a_plus, out))

    def eval_grad(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        lo, hi = self.grid.x[0], self.grid.x[-1]
        out = self._grad_spline(np.clip(pts, lo, hi))
        return np.where((pts < lo) | (pts > hi), 0.0, out)


def solve_standing_wave(r: Reaction, g: Grid1D, method: str = "auto") -> StandingWaveProfile:
    """Tabulate the standing wave of r on g.

    method 'auto' uses the closed form for the builtin cubic and the
    first-integral quadrature otherwise; 'quadrature' forces the general path
    (useful as a cross-check against the closed form).
    """
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and r.kind == "builtin-cubic":
        x = g.x
        m = np.tanh(x / np.sqrt(2.0))
        dm = (1.0 - m**2) / np.sqrt(2.0)
        mf, gf = Field(g, m), Field(g, dm)
        return StandingWaveProfile(g, mf, gf, inner(gf, gf), a_minus=-1.0, a_plus=1.0)
    return _solve_by_first_integral(r, g)


def _well_potential(r: Reaction, n: int = 40001):
    """W(s) = int_s^{a_+} f on a dense grid, accumulated from a_+ for tail accuracy."""
    s_asc = np.linspace(r.a_minus, r.a_plus, n)
    f_cum = cumulative_simpson(r(s_asc), x=s_asc, initial=0.0)
    w_asc = f_cum[-1] - f_cum
    scale = float(np.max(w_asc))
    if abs(w_asc[0]) > 1e-8 * scale:
        raise ValueError(
            f"well is not balanced: W(a_-) = {w_asc[0]:.3e}; no standing connection exists"
        )
    interior = w_asc[1:-1]
    if np.any(interior <= 0):
        raise ValueError("W(s) <= 0 inside (a_-, a_+): well is not balanced")
    return CubicSpline(s_asc, w_asc, bc_type=((1, -float(r(r.a_minus))), (1, -float(r(r.a_plus)))))


_GAUSS5_NODES = np.array(
    [-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683, 0.906179845938664]
)
_GAUSS5_WEIGHTS = np.array(
    [0.236926885056189, 0.478628670499366, 0.568888888888889, 0.478628670499366, 0.236926885056189]
)


def _cumulative_gauss(mgrid: np.ndarray, integrand) -> np.ndarray:
    """Cumulative integral over the segments of mgrid by 5-point Gauss-Legendre."""
    a, b = mgrid[:-1], mgrid[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GAUSS5_NODES[None, :]
    seg = (integrand(pts) * _GAUSS5_WEIGHTS[None, :]).sum(axis=1) * half
    return np.concatenate([[0.0], np.cumsum(seg)])


def _solve_by_first_integral(r: Reaction, g: Grid1D, h_tail: float = 1e-4) -> StandingWaveProfile:
    w_spline = _well_potential(r)
    p_plus = -float(r.deriv(r.a_plus))
    p_minus = -float(r.deriv(r.a_minus))
    if p_plus <= 0 or p_minus <= 0:
        raise ValueError("outer zeros must be stable for a connecting wave")
    m0 = 0.5 * (r.a_minus + r.a_plus)
    span_r = r.a_plus - m0
    span_l = m0 - r.a_minus
    tail_r = h_tail * span_r
    tail_l = h_tail * span_l
    # parameter grids graded geometrically into the flat tails
    right = r.a_plus - np.geomspace(span_r, tail_r, 6000)
    left = r.a_minus + np.geomspace(span_l, tail_l, 6000)[::-1]
    mgrid = np.unique(np.concatenate([left, [m0], right]))

    integrand = lambda s: 1.0 / np.sqrt(2.0 * np.maximum(w_spline(s), 1e-300))
    x_from_start = _cumulative_gauss(mgrid, integrand)
    i0 = int(np.searchsorted(mgrid, m0))
    xgrid = x_from_start - x_from_start[i0]

    x_edge_r, m_edge_r = xgrid[-1], mgrid[-1]
    x_edge_l, m_edge_l = xgrid[0], mgrid[0]
    inv = CubicSpline(xgrid, mgrid)

    x = g.x
    m = np.empty_like(x)
    core = (x >= x_edge_l) & (x <= x_edge_r)
    m[core] = inv(x[core])
    hi = x > x_edge_r
    m[hi] = r.a_plus - (r.a_plus - m_edge_r) * np.exp(-np.sqrt(p_plus) * (x[hi] - x_edge_r))
    lo = x < x_edge_l
    m[lo] = r.a_minus + (m_edge_l - r.a_minus) * np.exp(np.sqrt(p_minus) * (x[lo] - x_edge_l))

    dm = np.empty_like(x)
    dm[core] = np.sqrt(2.0 * np.maximum(w_spline(m[core]), 0.0))
    dm[hi] = np.sqrt(p_plus) * (r.a_plus - m[hi])
    dm[lo] = np.sqrt(p_minus) * (m[lo] - r.a_minus)

    mf, gf = Field(g, m), Field(g, dm)
    return StandingWaveProfile(g, mf, gf, inner(gf, gf), a_minus=r.a_minus, a_plus=r.a_plus)


def rescale_profile(
    p: StandingWaveProfile, eps: float, eta: float, grid: Grid1D | None = None
) -> Field:
    """The manifold member m(eps^{-1/2} (x - eta)) sampled on grid (default: p.grid)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    grid = grid or p.grid
    return Field(grid, p.eval_m((grid.x - eta) / np.sqrt(eps)))


def ode_residual_sup(p: StandingWaveProfile, r: Reaction, order: int = 2) -> float:
    """Sup of |Delta_h m + f(m)| on interior nodes; order 2 or 4 stencil."""
    v = p.m.values
    dx2 = p.grid.dx**2
    if order == 2:
        lap = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dx2
        res = lap + np.asarray(r(v[1:-1]))
    elif order == 4:
        lap = (-v[4:] + 16.0 * v[3:-1] - 30.0 * v[2:-2] + 16.0 * v[1:-3] - v[:-4]) / (12.0 * dx2)
        res = lap + np.asarray(r(v[2:-2]))
    else:
        raise ValueError("order must be 2 or 4")
    return float(np.max(np.abs(res)))
