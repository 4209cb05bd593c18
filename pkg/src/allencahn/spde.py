"""Semi-implicit time stepping for the stochastic Allen-Cahn equation.

One step solves (I - dt Delta_h) u_{n+1} = u_n + (dt/eps) f(u_n) + eps^gamma a . dW
with Dirichlet values at the domain ends (the truncation of u(t, +-inf) = +-1).
Diffusion is implicit (a tridiagonal solve), so the stiff reaction dictates the
step size: dt <= eps / (10 c_f).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .numerics import Field, Grid1D, RngStream, sup_norm, zero_field
from .reaction import Reaction, constants
from .standing_wave import StandingWaveProfile, rescale_profile


class SolverError(RuntimeError):
    """Raised when a step produces non-finite values (instability)."""


@dataclass(frozen=True)
class Bump:
    """Compactly supported smooth amplitude A exp(1 + 1/(x^2-1)) on (-1, 1)."""

    amplitude: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        core = np.abs(x) < 1.0
        out[core] = self.amplitude * np.exp(1.0 + 1.0 / (x[core] ** 2 - 1.0))
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        core = np.abs(x) < 1.0
        xc = x[core]
        out[core] = self(xc) * (-2.0 * xc / (xc**2 - 1.0) ** 2)
        return out


def default_bump(amplitude: float = 1.0) -> Bump:
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    return Bump(amplitude)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise term eps^gamma a(x) dW with smooth a supported in [-1, 1]."""

    gamma: float
    amplitude: Field
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        x = self.amplitude.grid.x
        outside = np.abs(x) > 1.0
        if np.any(np.abs(self.amplitude.values[outside]) > 0):
            raise ValueError("amplitude must vanish outside [-1, 1]")

    @classmethod
    def from_bump(cls, bump: Bump, grid: Grid1D, gamma: float, enabled: bool = True) -> "NoiseSpec":
        if grid.half_width < 3.0:
            raise ValueError("grids carrying noise need half_width >= 3")
        return cls(gamma=gamma, amplitude=Field(grid, bump(grid.x)), enabled=enabled)


@dataclass
class SimConfig:
    eps: float
    reaction: Reaction | None
    grid: Grid1D
    dt: float
    t_end: float
    initial: Field
    noise: NoiseSpec | None = None
    record_times: Sequence[float] = ()
    seed: RngStream = RngStream(0)
    bc: tuple[float, float] | None = None

    def boundary(self) -> tuple[float, float]:
        if self.bc is not None:
            return self.bc
        if self.reaction is not None:
            return (self.reaction.a_minus, self.reaction.a_plus)
        return (0.0, 0.0)

    def validate(self) -> None:
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.dt <= 0 or self.t_end < 0:
            raise ValueError("dt must be positive and t_end nonnegative")
        if self.reaction is not None:
            c_f = constants(self.reaction).c_f
            if self.dt > self.eps / (10.0 * c_f) * (1.0 + 1e-12):
                raise ValueError(
                    f"dt={self.dt} violates the reaction-resolution rule dt <= eps/(10 c_f) = "
                    f"{self.eps / (10.0 * c_f):.3e}"
                )
        if self.noise is not None and self.noise.enabled and self.grid.half_width < 3.0:
            raise ValueError("noisy runs need half_width >= 3")
        if self.initial.grid != self.grid:
            raise ValueError("initial data lives on a different grid")


def stability_dt(eps: float, r: Reaction) -> float:
    """The documented step-size rule dt = eps / (10 c_f)."""
    return eps / (10.0 * constants(r).c_f)


@dataclass
class Trajectory:
    config: SimConfig
    times: list[float] = field(default_factory=list)
    fields: list[Field] = field(default_factory=list)

    def record(self, t: float, u: Field) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("recorded times must be strictly increasing")
        self.times.append(t)
        self.fields.append(u.copy())


@lru_cache(maxsize=32)
def _diffusion_bands(n_cells: int, half_width: float, dt: float) -> np.ndarray:
    """Banded form of (I - dt Delta_h) on the interior nodes."""
    dx = 2.0 * half_width / n_cells
    n_int = n_cells - 1
    mu = dt / dx**2
    ab = np.zeros((3, n_int))
    ab[0, 1:] = -mu
    ab[1, :] = 1.0 + 2.0 * mu
    ab[2, :-1] = -mu
    return ab


def step(u: Field, cfg: SimConfig, dW: Field | None = None) -> Field:
    """One semi-implicit step; dW must carry this step's dt (None in deterministic mode)."""
    if cfg.dt == 0.0:
        return u.copy()
    rhs = u.values.copy()
    if cfg.reaction is not None:
        rhs += (cfg.dt / cfg.eps) * np.asarray(cfg.reaction(u.values))
    if cfg.noise is not None and cfg.noise.enabled and dW is not None:
        rhs += cfg.eps**cfg.noise.gamma * cfg.noise.amplitude.values * dW.values
    lo, hi = cfg.boundary()
    g = cfg.grid
    mu = cfg.dt / g.dx**2
    interior = rhs[1:-1]
    interior[0] += mu * lo
    interior[-1] += mu * hi
    ab = _diffusion_bands(g.n_cells, g.half_width, cfg.dt)
    out = np.empty_like(rhs)
    out[1:-1] = solve_banded((1, 1), ab, interior)
    out[0], out[-1] = lo, hi
    if not np.all(np.isfinite(out)):
        raise SolverError("non-finite state after step; try a smaller dt")
    return Field(g, out)


def simulate(cfg: SimConfig) -> Trajectory:
    """Iterate the stepper to t_end, one seeded noise increment per step.

    Fields are recorded at the steps nearest the requested record times
    (including t = 0 when requested); identical seeds give identical output.
    """
    cfg.validate()
    n_steps = int(round(cfg.t_end / cfg.dt))
    record_steps = sorted({min(n_steps, int(round(t / cfg.dt))) for t in cfg.record_times})
    traj = Trajectory(config=cfg)
    u = cfg.initial.copy()
    if record_steps and record_steps[0] == 0:
        traj.record(0.0, u)
        record_steps = record_steps[1:]
    noisy = cfg.noise is not None and cfg.noise.enabled
    gen = cfg.seed.generator() if noisy else None
    scale = np.sqrt(cfg.dt / cfg.grid.dx) if noisy else 0.0
    next_rec = iter(record_steps)
    target = next(next_rec, None)
    for k in range(1, n_steps + 1):
        dW = Field(cfg.grid, scale * gen.standard_normal(cfg.grid.n_nodes)) if noisy else None
        try:
            u = step(u, cfg, dW)
        except SolverError as err:
            raise SolverError(f"{err} (at t = {k * cfg.dt:.6g})") from err
        if target is not None and k == target:
            traj.record(k * cfg.dt, u)
            target = next(next_rec, None)
    return traj


def sup_norm_monitor(traj: Trajectory, bound: float) -> float | None:
    """Earliest recorded time with sup |u| > bound, or None."""
    for t, f in zip(traj.times, traj.fields):
        if sup_norm(f) > bound:
            return t
    return None


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def _plateau_cutoff(x: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """C^2 even cutoff: 1 on [-inner, inner], 0 outside [-outer, outer]."""
    ax = np.abs(np.asarray(x, dtype=float))
    t = np.clip((ax - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - t**3 * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep01(t: np.ndarray) -> np.ndarray:
    return t**3 * (10.0 + t * (-15.0 + 6.0 * t))


def _transition_core(x: np.ndarray, xi0: float, width: float = 1.0) -> np.ndarray:
    """C^2 monotone transition from -1 at xi0-(width+xi0) to +1 at xi0+(width-xi0).

    Two quintic Hermite halves share a positive slope at the (exact) zero xi0 and
    meet the constant levels with zero slope and curvature, keeping first and
    second derivatives within a fixed budget on both sides.
    """
    w_l, w_r = width + xi0, width - xi0
    s0 = 2.0 * 1.875 / (w_l + w_r)  # shared center slope; sides stay monotone
    u = np.where(x <= xi0, -1.0, 1.0)

    def half(tau, level, sigma):
        # quintic on [0,1] from (level, 0, 0) to (0, sigma, 0)
        a3 = -10.0 * level - 4.0 * sigma
        a4 = 15.0 * level + 7.0 * sigma
        a5 = -6.0 * level - 3.0 * sigma
        return level + tau**3 * (a3 + tau * (a4 + tau * a5))

    left = (x > xi0 - w_l) & (x <= xi0)
    u[left] = half((x[left] - (xi0 - w_l)) / w_l, -1.0, s0 * w_l)
    right = (x > xi0) & (x < xi0 + w_r)
    u[right] = -half((xi0 + w_r - x[right]) / w_r, -1.0, s0 * w_r)
    return u


def make_initial_data(kind: str, params: dict, grid: Grid1D, eps: float) -> Field:
    """Initial profiles: on-manifold, smoothed step, tail-compliant general data,
    and the super/sub variants blended onto the manifold.

    general: unique zero at xi0, slope clearance ~ sqrt(eps) around it, and
    exponential tails |u0 -+ 1| <= eps^kappa C_mu exp(-sqrt(mu)|x|/2) beyond |x| = 1.

    super/sub: blend of the base field into the shifted manifold profile
    m_{eps, xi0 -+ C eps^beta_bar} +- C' eps^kappa through a cutoff that is 1 on
    [-2, 2] and 0 outside [-3, 3]; the result must dominate (be dominated by)
    the base field at every node.
    """
    x = grid.x
    if kind == "profile-on-manifold":
        return rescale_profile(params["profile"], eps, params.get("eta", 0.0), grid)

    if kind == "smoothed-step":
        xi0 = params.get("xi0", 0.0)
        width = params.get("width", 0.5)
        return Field(grid, np.tanh((x - xi0) / width))

    if kind == "general":
        xi0 = params.get("xi0", 0.0)
        kappa = params.get("kappa", 1.2)
        mu = params.get("mu", 1.0)
        tail_frac = params.get("tail_frac", 1.0)
        width = params.get("width", 1.0)
        if not 0 < width <= 1.0:
            raise ValueError("width must lie in (0, 1]")
        if abs(xi0) > 0.4 * width:
            raise ValueError("general data supports |xi0| <= 0.4 width")
        u = _transition_core(x, xi0, width)
        if tail_frac > 0.0:
            c_mu = min(mu / 4.0, 1.0)
            amp = 0.5 * tail_frac * eps**kappa * c_mu
            w_l, w_r = width + xi0, width - xi0
            fade_r = _smoothstep01(np.clip((x - xi0) / w_r, 0.0, 1.0))
            fade_l = _smoothstep01(np.clip((xi0 - x) / w_l, 0.0, 1.0))
            u = u - amp * fade_r * np.exp(-np.sqrt(mu) * x / 2.0)
            u = u + amp * fade_l * np.exp(np.sqrt(mu) * x / 2.0)
        field = Field(grid, u)
        _check_general(field, xi0, eps, kappa, mu)
        return field

    if kind == "manifold-perturbed":
        profile: StandingWaveProfile = params["profile"]
        eta = params.get("eta", 0.0)
        delta_exp = params.get("delta_exp", 0.3)
        amp = params.get("amp", 1.0)
        kappa = params.get("kappa", 1.2)
        mu = params.get("mu", 1.0)
        base = rescale_profile(profile, eps, eta, grid).values
        annulus = (1.0 - _plateau_cutoff(x - eta, 0.15, 0.35)) * _plateau_cutoff(x - eta, 0.5, 1.0)
        shape = np.cos(2.0 * (x - eta)) * annulus
        field = Field(grid, base + amp * eps**delta_exp * shape)
        _check_general(field, eta, eps, kappa, mu)
        return field

    if kind in ("super-initial", "sub-initial"):
        base: Field = params["base"]
        profile: StandingWaveProfile = params["profile"]
        xi0 = params.get("xi0", 0.0)
        c_shift = params.get("C", 1.0)
        c_lift = params.get("Cp", 2.0)
        beta_bar = params.get("beta_bar", 0.4)
        kappa = params.get("kappa", 1.2)
        if grid.half_width < 3.0:
            raise ValueError("super/sub data need half_width >= 3")
        sgn = 1.0 if kind == "super-initial" else -1.0
        eta = xi0 - sgn * c_shift * eps**beta_bar
        manifold = rescale_profile(profile, eps, eta, grid).values + sgn * c_lift * eps**kappa
        chi2 = _plateau_cutoff(x, 2.0, 3.0)
        u = (1.0 - chi2) * base.values + chi2 * manifold
        gap = sgn * (u - base.values)
        if np.min(gap) < -1e-12:
            raise ValueError(
                f"{kind} fails to {'dominate' if sgn > 0 else 'stay below'} the base: "
                f"worst gap {np.min(gap):.3e}"
            )
        return Field(grid, u)

    raise ValueError(f"unknown initial-data kind {kind!r}")


def _check_general(f: Field, xi0: float, eps: float, kappa: float, mu: float) -> None:
    x = f.grid.x
    v = f.values
    sgn = np.sign(v)
    sgn[sgn == 0] = 1
    flips = np.count_nonzero(sgn[:-1] != sgn[1:])
    if flips != 1:
        raise ValueError(f"general data must change sign exactly once, found {flips} changes")
    i = int(np.nonzero(sgn[:-1] != sgn[1:])[0][0])
    if abs(x[i] - xi0) > 2.0 * f.grid.dx:
        raise ValueError("sign change is not at xi0")
    clear = np.abs(x - xi0) >= np.sqrt(eps)
    if np.min(np.abs(v[clear])) < np.sqrt(eps):
        raise ValueError("slope clearance |u0| >= sqrt(eps) fails")
    c_mu = min(mu / 4.0, 1.0)
    right = x >= 1.0
    bound = eps**kappa * c_mu * np.exp(-np.sqrt(mu) * x[right] / 2.0)
    if np.any(np.abs(v[right] - 1.0) > bound * (1.0 + 1e-9)):
        raise ValueError("right tail violates the exponential envelope")
    left = x <= -1.0
    bound = eps**kappa * c_mu * np.exp(np.sqrt(mu) * x[left] / 2.0)
    if np.any(np.abs(v[left] + 1.0) > bound * (1.0 + 1e-9)):
        raise ValueError("left tail violates the exponential envelope")
