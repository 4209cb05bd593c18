"""Deterministic interface generation machinery.

The reaction ODE dY/dtau = f(Y) drives explicit super/sub solutions
w_+-(t, x) = Y(t/eps, u0(x) +- eps h(x) (e^{mu t / eps} - 1)) built around a
positive barrier h = phi + eps^kappa psi.  Threshold times of the flow give the
C |log eps| rates behind the generation estimate, and trajectory scans estimate
the first time a solution enters an eps-power neighborhood of the standing-wave
manifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .fermi import dist_to_manifold
from .numerics import Field, Grid1D, gradient, second_difference
from .reaction import Reaction, constants
from .spde import Trajectory
from .standing_wave import StandingWaveProfile


class FlowEscapeError(RuntimeError):
    """The ODE flow left the amplitude window of the analysis."""


class BarrierError(ValueError):
    """The assembled barrier violates one of its defining conditions."""


@dataclass(frozen=True)
class OdeFlow:
    reaction: Reaction
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    c0: float = 1.0


def _integrate(flow: OdeFlow, tau: float, xi: np.ndarray, t_eval=None):
    """Augmented integration of (Y, int f'(Y), int Y_xi f''(Y)) from Y(0) = xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = xi.size
    r = flow.reaction

    def rhs(_t, state):
        y = state[:n]
        i = state[n : 2 * n]
        dy = np.asarray(r(y))
        di = np.asarray(r.deriv(y))
        da = np.exp(i) * np.asarray(r.second_deriv(y))
        return np.concatenate([dy, di, da])

    y0 = np.concatenate([xi, np.zeros(n), np.zeros(n)])
    sol = solve_ivp(
        rhs,
        (0.0, tau),
        y0,
        method="RK45",
        rtol=flow.rtol,
        atol=flow.atol,
        max_step=flow.max_step,
        t_eval=t_eval,
    )
    if not sol.success:
        raise RuntimeError(f"flow integration failed: {sol.message}")
    return sol


def flow_Y(flow: OdeFlow, tau: float, xi):
    """Y(tau, xi); scalar autonomous, so order in xi is preserved."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(np.abs(xi_arr) > 2.0 * flow.c0 + 1e-12):
        raise FlowEscapeError("initial state outside [-2 c0, 2 c0]")
    if tau == 0.0:
        return xi_arr if np.ndim(xi) else float(xi_arr[0])
    sol = _integrate(flow, tau, xi_arr)
    y = sol.y[: xi_arr.size, -1]
    if np.any(np.abs(y) > 2.0 * flow.c0 + 1.0):
        raise FlowEscapeError("flow escaped the analysis window")
    return y if np.ndim(xi) else float(y[0])


def flow_Y_xi(flow: OdeFlow, tau: float, xi):
    """Y_xi(tau, xi) = exp(int_0^tau f'(Y)); strictly positive."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if tau == 0.0:
        out = np.ones_like(xi_arr)
        return out if np.ndim(xi) else 1.0
    sol = _integrate(flow, tau, xi_arr)
    n = xi_arr.size
    out = np.exp(sol.y[n : 2 * n, -1])
    return out if np.ndim(xi) else float(out[0])


def flow_A(flow: OdeFlow, tau: float, xi):
    """A(tau, xi) = Y_xixi / Y_xi = int_0^tau Y_xi f''(Y)."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if tau == 0.0:
        out = np.zeros_like(xi_arr)
        return out if np.ndim(xi) else 0.0
    sol = _integrate(flow, tau, xi_arr)
    n = xi_arr.size
    out = sol.y[2 * n :, -1]
    return out if np.ndim(xi) else float(out[0])


def ode_threshold_times(
    flow: OdeFlow,
    eps: float,
    alpha: float = 0.75,
    kappa: float = 1.5,
    eta_a: float = 0.1,
    eta_b: float = 0.3,
    n_scan: int = 25,
    tau_max_factor: float = 3.0,
) -> dict:
    """Empirical C-constants of the flow's threshold times, divided by |log eps|.

    (a) escape of a_0 + eps^alpha to a_+ - eta_a, predicted rate alpha/mu;
    (b) relaxation of a_+ - eta_b to within eps^kappa of a_+, predicted kappa/p;
    (c) worst first entry into the eps^kappa ball of a_+ over a scan of
        [a_0 + eps^alpha, 2 c0].
    """
    r = flow.reaction
    cons = constants(r)
    log_eps = abs(np.log(eps))
    tau_max = tau_max_factor * log_eps
    a0, ap = r.a_zero, r.a_plus

    taus = np.linspace(0.0, tau_max, 1201)
    scan = np.unique(
        np.concatenate(
            [
                [a0 + eps**alpha, ap - eta_a, ap - eta_b],
                np.linspace(a0 + eps**alpha, 2.0 * flow.c0, n_scan),
            ]
        )
    )
    sol = _integrate(flow, tau_max, scan, t_eval=taus)
    Y = sol.y[: scan.size, :]

    def first_hit(dist: np.ndarray, thr: float) -> float:
        """First lattice crossing of the decreasing distance below thr, interpolated."""
        hit = np.nonzero(dist <= thr)[0]
        if hit.size == 0:
            return np.inf
        k = int(hit[0])
        if k == 0:
            return 0.0
        d0, d1 = dist[k - 1], dist[k]
        frac = (d0 - thr) / (d0 - d1) if d0 > d1 else 1.0
        return float(taus[k - 1] + frac * (taus[k] - taus[k - 1]))

    i_a = int(np.nonzero(np.isclose(scan, a0 + eps**alpha))[0][0])
    i_b = int(np.nonzero(np.isclose(scan, ap - eta_b))[0][0])
    tau_a = first_hit((ap - eta_a) - Y[i_a], 0.0)
    tau_b = first_hit((ap - eps**kappa) - Y[i_b], 0.0)
    tau_c = 0.0
    for row in Y:
        tau_c = max(tau_c, first_hit(np.abs(row - ap), eps**kappa))

    return {
        "C_a": tau_a / log_eps,
        "C_b": tau_b / log_eps,
        "C_c_worst": tau_c / log_eps,
        "predicted_a": alpha / cons.mu,
        "predicted_b": kappa / cons.p,
        "log_eps": log_eps,
    }


# ---------------------------------------------------------------------------
# barrier construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierParams:
    eps: float
    kappa: float = 1.2
    kappa_bar: float = 0.6
    beta: float = 0.2
    K: float = 3.0
    c0: float = 1.0
    mu: float = 1.0
    c1: float = 0.5
    c_max: float = 200.0
    floor_margin: float = 1.05

    def validate(self) -> None:
        if not 0 < self.beta < (1.0 - self.c1 * self.mu) / 2.0:
            raise BarrierError(
                f"beta must lie in (0, (1 - c1 mu)/2) = (0, {(1 - self.c1 * self.mu) / 2:.3f})"
            )
        if self.K <= 1.0:
            raise BarrierError("K must exceed 1")
        if not 0 < self.kappa_bar < self.kappa:
            raise BarrierError("need 0 < kappa_bar < kappa")
        if not 0 < self.c1 < 1.0 / self.mu:
            raise BarrierError("need 0 < c1 < 1/mu")

    @property
    def a_max(self) -> float:
        """sup of eps (e^{mu t/eps} - 1) over t in [0, c1 eps |log eps|]."""
        return self.eps ** (1.0 - self.c1 * self.mu) - self.eps


def _smoothstep_int1(t):
    return 2.5 * t**4 - 3.0 * t**5 + t**6


def _phi_pieces(p: BarrierParams):
    """Right-half phi as (value, d1, d2) callables of |x|; even extension elsewhere.

    Outside-in: exponential tail beyond K with rate eps^{-beta}; a boundary-layer
    ramp of width eps^{2 beta} killing the second derivative; a log-space quintic
    bridge down from the interior plateau (log-space keeps |phi'|/phi bounded, so
    the growth conditions survive a tall plateau); constant on [0, 1].
    """
    lam = p.eps ** (-p.beta)
    w_r = p.eps ** (2.0 * p.beta)
    x_l = p.K - w_r
    floor = (4.0 * p.c0**2 + p.c0) / p.mu

    # ramp exit values at the inner junction x_l (tau = 1)
    s_l = -(lam + w_r * lam**2 * 0.5)  # phi'(x_l); int_0^1 (1 - S) = 1/2
    v_l = 1.0 + w_r * (lam + w_r * lam**2 * (0.5 - 1.0 / 7.0))
    target = max(floor * p.floor_margin, v_l * 1.5)

    from .reaction import _quintic_hermite  # shared Hermite helper

    dlog = s_l / v_l
    log_bridge = _quintic_hermite(
        1.0, x_l, (np.log(target), 0.0, 0.0), (np.log(v_l), dlog, -dlog * dlog)
    )

    def phi(ax):
        ax = np.asarray(ax, dtype=float)
        val = np.empty_like(ax)
        d1 = np.empty_like(ax)
        d2 = np.empty_like(ax)
        tail = ax >= p.K
        ramp = (ax < p.K) & (ax >= x_l)
        brid = (ax < x_l) & (ax > 1.0)
        core = ax <= 1.0
        if np.any(tail):
            e = np.exp(-lam * (ax[tail] - p.K))
            val[tail], d1[tail], d2[tail] = e, -lam * e, lam**2 * e
        if np.any(ramp):
            tau = (p.K - ax[ramp]) / w_r
            ss = tau**3 * (10.0 + tau * (-15.0 + 6.0 * tau))
            i1 = tau - _smoothstep_int1(tau)
            i2 = 0.5 * tau**2 - (0.5 * tau**5 - 0.5 * tau**6 + tau**7 / 7.0)
            val[ramp] = 1.0 + w_r * (lam * tau + w_r * lam**2 * i2)
            d1[ramp] = -(lam + w_r * lam**2 * i1)
            d2[ramp] = lam**2 * (1.0 - ss)
        if np.any(brid):
            lv, l1, l2 = log_bridge(ax[brid])
            e = np.exp(lv)
            val[brid], d1[brid], d2[brid] = e, e * l1, e * (l2 + l1 * l1)
        if np.any(core):
            val[core], d1[core], d2[core] = target, 0.0, 0.0
        return val, d1, d2

    return phi


def _psi_pieces(p: BarrierParams):
    """Right-half psi: exponential tail beyond 1, symmetric quartic inside."""
    rmu = np.sqrt(p.mu)
    A = np.exp(-rmu / 2.0)
    a = A * (p.mu / 4.0 + rmu / 2.0) / 8.0
    b = (-(rmu / 2.0) * A - 4.0 * a) / 2.0
    c = A - a - b

    def psi(ax):
        ax = np.asarray(ax, dtype=float)
        val = np.empty_like(ax)
        d1 = np.empty_like(ax)
        d2 = np.empty_like(ax)
        tail = ax >= 1.0
        if np.any(tail):
            e = np.exp(-rmu * ax[tail] / 2.0)
            val[tail], d1[tail], d2[tail] = e, -(rmu / 2.0) * e, (p.mu / 4.0) * e
        core = ~tail
        if np.any(core):
            xc = ax[core]
            val[core] = a * xc**4 + b * xc**2 + c
            d1[core] = 4.0 * a * xc**3 + 2.0 * b * xc
            d2[core] = 12.0 * a * xc**2 + 2.0 * b
        return val, d1, d2

    return psi


@dataclass
class BarrierFunction:
    grid: Grid1D
    h: Field
    phi: Field
    psi_scaled: Field
    h_d1: np.ndarray
    h_d2: np.ndarray
    params: BarrierParams


def build_barrier(params: BarrierParams, grid: Grid1D) -> BarrierFunction:
    """Assemble h = phi + eps^kappa psi on the grid and self-check it.

    Construction failures (h <= 0, worst-case envelope violating the growth
    conditions against the c0 derivative budget, unbounded tail constants, or a
    non-vanishing smallness product along eps -> 0) raise BarrierError.
    """
    params.validate()
    phi_fn = _phi_pieces(params)
    psi_fn = _psi_pieces(params)
    x = grid.x
    ax = np.abs(x)
    sgn = np.sign(x)
    pv, pd1, pd2 = phi_fn(ax)
    qv, qd1, qd2 = psi_fn(ax)
    ek = params.eps**params.kappa
    h = pv + ek * qv
    h1 = sgn * (pd1 + ek * qd1)
    h2 = pd2 + ek * qd2
    bar = BarrierFunction(
        grid=grid,
        h=Field(grid, h),
        phi=Field(grid, pv),
        psi_scaled=Field(grid, ek * qv),
        h_d1=h1,
        h_d2=h2,
        params=params,
    )
    report = _budget_report(bar)
    failed = [name for name, entry in report.items() if not entry["passed"]]
    if failed:
        raise BarrierError(f"barrier self-check failed: {failed}; report: {report}")
    return bar


def _budget_envelopes(params: BarrierParams, x: np.ndarray):
    """Worst-case |u0'| and |u0''| envelopes for compliant data of amplitude c0."""
    rmu = np.sqrt(params.mu)
    c_mu = min(params.mu / 4.0, 1.0)
    tail = params.eps**params.kappa * c_mu * np.exp(-rmu * np.abs(x) / 2.0)
    inside = np.abs(x) <= 1.0
    b1 = np.where(inside, params.c0, tail)
    b2 = np.where(inside, params.c0, tail)
    return b1, b2


def _barrier_conditions(
    h: np.ndarray,
    h1: np.ndarray,
    h2: np.ndarray,
    u1: np.ndarray,
    u2: np.ndarray,
    params: BarrierParams,
    slack: float = 0.0,
) -> tuple[float, float]:
    """Worst margins of the two growth conditions over the time window."""
    worst_i = np.inf
    worst_ii = np.inf
    for a in np.linspace(0.0, params.a_max, 7):
        quad = (u1 + a * h1) ** 2
        worst_i = min(worst_i, float(np.min(params.mu * h - quad)))
        worst_ii = min(worst_ii, float(np.min(params.mu * h - quad - (u2 + a * h2) - slack)))
    return worst_i, worst_ii


def _tail_constant(h: np.ndarray, x: np.ndarray, params: BarrierParams, side: int) -> float:
    """Minimal C making the tail condition hold on side * x >= K."""
    rmu = np.sqrt(params.mu)
    c_mu = min(params.mu / 4.0, 1.0)
    mask = side * x >= params.K
    if not np.any(mask):
        return np.nan
    grow = np.exp(rmu * side * x[mask] / 2.0)
    return float(c_mu + np.max(h[mask] * params.a_max * grow) / params.eps**params.kappa)


def _budget_report(bar: BarrierFunction) -> dict:
    p = bar.params
    x = bar.grid.x
    h, h1, h2 = bar.h.values, bar.h_d1, bar.h_d2
    b1, b2 = _budget_envelopes(p, x)
    slack = p.eps**p.kappa_bar * (np.abs(x) <= 1.0)
    # budget signs are unknown, so take the adversarial combination
    worst_i, worst_ii = _barrier_conditions(h, np.abs(h1), np.abs(h2), b1, b2, p, slack=slack)
    report = {
        "positive": {"passed": bool(np.all(h > 0)), "min_h": float(np.min(h))},
        "growth_i": {"passed": worst_i >= 0, "worst_margin": worst_i},
        "growth_ii": {"passed": worst_ii >= 0, "worst_margin": worst_ii},
    }
    c_r = _tail_constant(h, x, p, +1)
    c_l = _tail_constant(h, x, p, -1)
    report["tail_constants"] = {
        "passed": bool(np.nanmax([c_r, c_l]) <= p.c_max),
        "C_right": c_r,
        "C_left": c_l,
    }
    products = []
    for e in (p.eps, p.eps / 10.0, p.eps / 100.0):
        q = BarrierParams(**{**p.__dict__, "eps": e})
        pv, _, _ = _phi_pieces(q)(np.abs(x))
        qv, _, _ = _psi_pieces(q)(np.abs(x))
        products.append(q.a_max * float(np.max(pv + e**q.kappa * qv)))
    report["smallness_product"] = {
        "passed": products[0] > products[1] > products[2],
        "values": products,
    }
    return report


def verify_barrier(bar: BarrierFunction, u0: Field, c1: float, eps: float) -> dict:
    """Check the five barrier conditions against concrete initial data.

    Conditions (i)-(ii) use the tabulated first/second differences of u0 over a
    time sample of [0, c1 eps |log eps|]; (iii)-(iv) report the minimal tail
    constants; (v) reports the smallness product along a decreasing eps sequence.
    """
    p = bar.params
    if abs(c1 - p.c1) > 1e-12 or abs(eps - p.eps) > 1e-15:
        p = BarrierParams(**{**p.__dict__, "c1": c1, "eps": eps})
        p.validate()
    u1 = gradient(u0).values
    u2 = second_difference(u0).values
    worst_i, worst_ii = _barrier_conditions(bar.h.values, bar.h_d1, bar.h_d2, u1, u2, p)
    report = _budget_report(bar)
    report["growth_i"] = {"passed": worst_i >= 0, "worst_margin": worst_i}
    report["growth_ii"] = {"passed": worst_ii >= 0, "worst_margin": worst_ii}
    return report


def super_sub_solutions(
    flow: OdeFlow, bar: BarrierFunction, u0: Field, eps: float, t: float
) -> tuple[Field, Field]:
    """w_-(t, .) and w_+(t, .) by pointwise flow evaluation."""
    mu = bar.params.mu
    a_t = eps * (np.exp(mu * t / eps) - 1.0)
    xi_plus = u0.values + a_t * bar.h.values
    xi_minus = u0.values - a_t * bar.h.values
    if np.max(np.abs(xi_plus)) > 2.0 * flow.c0 or np.max(np.abs(xi_minus)) > 2.0 * flow.c0:
        raise FlowEscapeError("barrier push leaves the flow window [-2 c0, 2 c0]")
    tau = t / eps
    n = u0.grid.n_nodes
    both = np.concatenate([xi_minus, xi_plus])
    y = flow_Y(flow, tau, both) if tau > 0 else both
    return Field(u0.grid, y[:n]), Field(u0.grid, y[n:])


def first_generation_time(
    traj: Trajectory, p: StandingWaveProfile, eps: float, threshold: float | None = None
) -> float | None:
    """Earliest recorded time with dist(u, M^eps) <= threshold (default eps^1.05)."""
    if threshold is None:
        threshold = eps**1.05
    if threshold <= 0:
        return None
    for t, f in zip(traj.times, traj.fields):
        if dist_to_manifold(f, p, eps) <= threshold:
            return t
    return None


def fit_generation_scaling(pairs) -> dict:
    """Least squares of t* against eps |log eps| through the origin."""
    pairs = [(e, t) for e, t in pairs]
    if len({e for e, _ in pairs}) < 3:
        raise ValueError("need at least 3 distinct eps values")
    x = np.array([e * abs(np.log(e)) for e, _ in pairs])
    y = np.array([t for _, t in pairs])
    c_hat = float(np.dot(x, y) / np.dot(x, x))
    resid = y - c_hat * x
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return {"C_hat": c_hat, "r_squared": r2}
