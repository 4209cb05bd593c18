"""Projection onto the manifold of translated standing waves (Fermi coordinates).

A field u near M^eps = {m(eps^{-1/2}(x - eta))} decomposes as u = m_{eps,eta} + s
with eta the unique L2-closest translate and s the remainder.  The projection is
found by a coarse scan of the squared distance over eta followed by a root solve
of the orthogonality condition <u - m_{eps,eta}, grad m_{eps,eta}> = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .numerics import Field, Grid1D, h1_norm, inner, l2_norm
from .spde import Trajectory
from .standing_wave import StandingWaveProfile


class ProjectionError(RuntimeError):
    """Raised when the closest-translate problem has no clear unique solution."""


@dataclass
class FermiDecomposition:
    eta: float
    distance: float
    remainder: Field
    h1_of_remainder: float


@dataclass
class PathRecord:
    """Interface positions over rescaled time, with per-slice validity flags."""

    times: np.ndarray
    positions: np.ndarray
    valid: np.ndarray
    distances: np.ndarray = field(default=None)
    h1_remainders: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("path times must be strictly increasing")


class _ManifoldGeometry:
    """Cached evaluations of m_{eps,eta} and its gradient on a fixed grid."""

    def __init__(self, profile: StandingWaveProfile, grid: Grid1D, eps: float):
        self.profile = profile
        self.grid = grid
        self.eps = eps
        self.root_eps = np.sqrt(eps)
        self.weights = np.full(grid.n_nodes, grid.dx)
        self.weights[0] *= 0.5
        self.weights[-1] *= 0.5

    def member(self, eta: float) -> np.ndarray:
        return self.profile.eval_m((self.grid.x - eta) / self.root_eps)

    def member_grad(self, eta: float) -> np.ndarray:
        return self.profile.eval_grad((self.grid.x - eta) / self.root_eps) / self.root_eps

    def sq_distance(self, u: np.ndarray, eta: float) -> float:
        d = u - self.member(eta)
        return float(np.dot(self.weights, d * d))

    def orthogonality(self, u: np.ndarray, eta: float) -> float:
        d = u - self.member(eta)
        return float(np.dot(self.weights, d * self.member_grad(eta)))


def _coarse_scan(geo: _ManifoldGeometry, u: np.ndarray, window: tuple[float, float] | None):
    margin = 2.0 * geo.root_eps
    lo = geo.grid.x[0] + margin
    hi = geo.grid.x[-1] - margin
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    stride = geo.root_eps / 4.0
    etas = np.arange(lo, hi + stride, stride)
    g = np.array([geo.sq_distance(u, e) for e in etas])
    return etas, g


def _local_minima(g: np.ndarray) -> np.ndarray:
    idx = np.nonzero((g[1:-1] <= g[:-2]) & (g[1:-1] <= g[2:]))[0] + 1
    return idx


def project(
    u: Field,
    p: StandingWaveProfile,
    eps: float,
    window: tuple[float, float] | None = None,
) -> FermiDecomposition:
    """Closest-translate decomposition u = m_{eps,eta} + s.

    Fails when the coarse scan sees two separated local minima within 1% of each
    other (outside the tubular neighborhood uniqueness is not guaranteed).
    """
    geo = _ManifoldGeometry(p, u.grid, eps)
    etas, g = _coarse_scan(geo, u.values, window)
    minima = _local_minima(g)
    if minima.size == 0:
        raise ProjectionError("no interior minimum in the scan window")
    order = minima[np.argsort(g[minima])]
    best = int(order[0])
    separation = max(3, int(0.1 * len(etas)))
    for other in order[1:]:
        if abs(int(other) - best) >= separation:
            rel = (g[other] - g[best]) / max(g[best], 1e-300)
            if rel < 0.01:
                raise ProjectionError(
                    f"two local minima within 1%: eta ~ {etas[best]:.4f} and {etas[other]:.4f}"
                )
            break
    eta = _refine(geo, u.values, etas, best)
    member = geo.member(eta)
    remainder = Field(u.grid, u.values - member)
    dec = FermiDecomposition(
        eta=eta,
        distance=l2_norm(remainder),
        remainder=remainder,
        h1_of_remainder=h1_norm(remainder),
    )
    grad_norm = np.sqrt(float(np.dot(geo.weights, geo.member_grad(eta) ** 2)))
    if abs(geo.orthogonality(u.values, eta)) > 1e-6 * grad_norm:
        raise ProjectionError("orthogonality residual too large at the minimizer")
    return dec


def _refine(geo: _ManifoldGeometry, u: np.ndarray, etas: np.ndarray, best: int) -> float:
    stride = etas[1] - etas[0] if len(etas) > 1 else geo.root_eps / 4.0
    lo = etas[max(best - 1, 0)]
    hi = etas[min(best + 1, len(etas) - 1)]
    f = lambda e: geo.orthogonality(u, e)
    flo, fhi = f(lo), f(hi)
    tries = 0
    while flo * fhi > 0 and tries < 6:
        lo -= stride
        hi += stride
        flo, fhi = f(lo), f(hi)
        tries += 1
    if flo * fhi > 0:
        return float(etas[best])
    return float(brentq(f, lo, hi, xtol=1e-13))


def dist_to_manifold(
    u: Field,
    p: StandingWaveProfile,
    eps: float,
    window: tuple[float, float] | None = None,
) -> float:
    """min_eta ||u - m_{eps,eta}||_{L2}; no uniqueness requirement."""
    geo = _ManifoldGeometry(p, u.grid, eps)
    etas, g = _coarse_scan(geo, u.values, window)
    best = int(np.argmin(g))
    eta = _refine(geo, u.values, etas, best)
    d = geo.sq_distance(u.values, eta)
    return float(np.sqrt(min(d, g[best])))


def interface_path(
    traj: Trajectory,
    p: StandingWaveProfile,
    eps: float,
    gamma: float = 0.0,
) -> PathRecord:
    """Interface positions of the recorded fields in rescaled time eps^{2 gamma + 1/2} t.

    Slices where the projection fails (outside the tubular neighborhood) are
    flagged invalid, never interpolated.  The scan warm-starts near the previous
    valid position.
    """
    scale = eps ** (2.0 * gamma + 0.5)
    times = np.asarray(traj.times, dtype=float) * scale
    n = len(times)
    positions = np.full(n, np.nan)
    valid = np.zeros(n, dtype=bool)
    distances = np.full(n, np.nan)
    h1s = np.full(n, np.nan)
    prev_eta = None
    for i, f in enumerate(traj.fields):
        window = None
        if prev_eta is not None:
            window = (prev_eta - 0.75, prev_eta + 0.75)
        try:
            dec = project(f, p, eps, window=window)
        except ProjectionError:
            if window is not None:
                try:
                    dec = project(f, p, eps)
                except ProjectionError:
                    continue
            else:
                continue
        positions[i] = dec.eta
        distances[i] = dec.distance
        h1s[i] = dec.h1_of_remainder
        valid[i] = True
        prev_eta = dec.eta
    return PathRecord(times=times, positions=positions, valid=valid,
                      distances=distances, h1_remainders=h1s)
