"""Bistable reaction terms, their shifted dominating variants, and derived constants.

A reaction f has three zeros a_- < a_0 < a_+ with f'(a_+-) = -p < 0 at the stable
zeros and f'(a_0) = mu > 0 at the unstable one.  The builtin default is the
balanced cubic f(u) = u - u^3.  The shifted variants f_+^delta (resp. f_-^delta)
dominate the sliding supremum sup_{|v|<=delta} f(u+v) from above (resp. the
infimum from below) while pinning shifted zero locations exactly; they are built
as smooth C^2 envelopes of the sliding extremum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq


class BistabilityError(ValueError):
    """Raised when a reaction spec lacks the required bistable structure."""


@dataclass(frozen=True)
class Reaction:
    """A C^2 scalar reaction with tabulated zeros and amplitude window [-2 c0, 2 c0]."""

    kind: str
    a_minus: float
    a_zero: float
    a_plus: float
    c0: float
    _f: Callable[[np.ndarray], np.ndarray]
    _df: Callable[[np.ndarray], np.ndarray]
    _d2f: Callable[[np.ndarray], np.ndarray]

    def __call__(self, u):
        return self._f(np.asarray(u, dtype=float))

    def deriv(self, u):
        return self._df(np.asarray(u, dtype=float))

    def second_deriv(self, u):
        return self._d2f(np.asarray(u, dtype=float))


def eval_f(r: Reaction, u):
    """Evaluate the reaction; total on finite input."""
    return r(u)


def cubic(c0: float = 1.0) -> Reaction:
    """The balanced cubic u - u^3 with zeros -1, 0, +1."""
    return Reaction(
        kind="builtin-cubic",
        a_minus=-1.0,
        a_zero=0.0,
        a_plus=1.0,
        c0=c0,
        _f=lambda u: u - u**3,
        _df=lambda u: 1.0 - 3.0 * u**2,
        _d2f=lambda u: -6.0 * u,
    )


def tabulated(u_samples, f_samples, c0: float = 1.0) -> Reaction:
    """Cubic-spline reaction from samples; derivatives come from the spline."""
    u_samples = np.asarray(u_samples, dtype=float)
    f_samples = np.asarray(f_samples, dtype=float)
    spline = CubicSpline(u_samples, f_samples)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    roots = [
        float(z)
        for z in spline.roots(extrapolate=False)
        if -2.0 * c0 <= z <= 2.0 * c0 and np.isreal(z)
    ]
    roots = sorted(set(np.round(roots, 12)))
    if len(roots) == 3:
        am, a0, ap = roots
    elif len(roots) == 1:
        am = a0 = ap = roots[0]
    else:
        am = roots[0] if roots else np.nan
        ap = roots[-1] if roots else np.nan
        a0 = roots[len(roots) // 2] if roots else np.nan
    return Reaction("tabulated", am, a0, ap, c0, spline, d1, d2)


@dataclass(frozen=True)
class ReactionConstants:
    p: float
    mu: float
    c_f: float


def constants(r: Reaction, n_samples: int = 4001) -> ReactionConstants:
    """Decay rate p = -f'(a_+), instability rate mu = f'(a_0), and c_f = sup f'.

    The supremum of f' is taken over [-2 c0, 2 c0] by dense sampling refined at
    interior maxima via local quadratic fits.
    """
    p = -float(r.deriv(r.a_plus))
    p_minus = -float(r.deriv(r.a_minus))
    mu = float(r.deriv(r.a_zero))
    if not np.isfinite(p) or p <= 0 or p_minus <= 0:
        raise BistabilityError(f"stable zeros need negative slope, got f'(a_+)={-p}")
    if not np.isfinite(mu) or mu <= 0:
        raise BistabilityError(f"unstable zero needs positive slope, got f'(a_0)={mu}")
    u = np.linspace(-2.0 * r.c0, 2.0 * r.c0, n_samples)
    du = r.deriv(u)
    c_f = float(np.max(du))
    k = int(np.argmax(du))
    if 0 < k < n_samples - 1:
        # quadratic refinement around the sampled maximum
        y0, y1, y2 = du[k - 1], du[k], du[k + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom < 0:
            c_f = float(y1 - (y2 - y0) ** 2 / (8.0 * denom))
    return ReactionConstants(p=min(p, p_minus), mu=mu, c_f=c_f)


# ---------------------------------------------------------------------------
# shifted reactions: smooth envelopes of the sliding extremum
# ---------------------------------------------------------------------------


def _smoothstep(t):
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d1(t):
    return 30.0 * t * t * (1.0 - t) ** 2


def _smoothstep_d2(t):
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


def _smax(a, da, d2a, b, db, d2b, beta):
    """Smooth maximum (a+b+sqrt((a-b)^2+beta^2))/2 with first two derivatives."""
    d = a - b
    root = np.sqrt(d * d + beta * beta)
    val = 0.5 * (a + b + root)
    ddu = da - db
    r1 = d * ddu / root
    v1 = 0.5 * (da + db + r1)
    r2 = (ddu * ddu + d * (d2a - d2b)) / root - (d * ddu) ** 2 / root**3
    v2 = 0.5 * (d2a + d2b + r2)
    return val, v1, v2


def _quintic_hermite(xa, xb, left, right):
    """Quintic matching (value, d1, d2) at both ends; returns (val, d1, d2) callables' data."""
    h = xb - xa
    v0, s0, c0 = left
    v1, s1, c1 = right
    # coefficients in tau = (x - xa)/h of p(tau) = sum a_k tau^k
    a0 = v0
    a1 = s0 * h
    a2 = 0.5 * c0 * h * h
    d = v1 - (a0 + a1 + a2)
    e = s1 * h - (a1 + 2 * a2)
    f = c1 * h * h - 2 * a2
    a3 = 10 * d - 4 * e + 0.5 * f
    a4 = -15 * d + 7 * e - f
    a5 = 6 * d - 3 * e + 0.5 * f
    coeffs = np.array([a0, a1, a2, a3, a4, a5])

    def ev(x):
        tau = (np.asarray(x, dtype=float) - xa) / h
        val = np.polynomial.polynomial.polyval(tau, coeffs)
        dcoef = coeffs[1:] * np.arange(1, 6)
        d1 = np.polynomial.polynomial.polyval(tau, dcoef) / h
        d2coef = dcoef[1:] * np.arange(1, 5)
        d2 = np.polynomial.polynomial.polyval(tau, d2coef) / (h * h)
        return val, d1, d2

    return ev


class _PlusEnvelope:
    """C^2 envelope dominating sup_{|v|<=delta} f(u+v) with pinned shifted zeros.

    Piecewise: the two shifted branches f(u -+ delta) where one of them is the
    sliding supremum, a smooth-max blend across the branch crossing near the
    interior minimum of f, and a quintic cap (lifted if needed) across the
    plateau where the window straddles the interior maximum.
    """

    def __init__(self, base: Reaction, delta: float):
        self.base = base
        self.delta = float(delta)
        f, df, d2f = base, base.deriv, base.second_deriv
        lo, hi = base.a_minus - 0.5, base.a_plus + 0.5
        # interior critical points of f between the outer zeros
        us = np.linspace(lo + 1e-9, hi - 1e-9, 20001)
        dus = df(us)
        flips = np.nonzero(np.sign(dus[:-1]) != np.sign(dus[1:]))[0]
        crit = [brentq(df, us[i], us[i + 1]) for i in flips]
        crit = [c for c in crit if base.a_minus < c < base.a_plus]
        if len(crit) != 2:
            raise BistabilityError(
                f"shifted construction needs exactly one interior min and max of f, found {len(crit)}"
            )
        u_min, u_max = sorted(crit)
        if d2f(u_min) <= 0 or d2f(u_max) >= 0:
            raise BistabilityError("interior critical points are not a (min, max) pair")
        d = self.delta
        # branch crossing near the interior minimum
        g = lambda u: f(u + d) - f(u - d)
        self.c1 = brentq(g, u_min - 2.0 * d, u_min + 2.0 * d)
        self.w = 2.0 * d
        self.u_max = u_max
        self.f_max = float(f(u_max))
        self.xa = u_max - 3.0 * d
        self.xb = u_max + 3.0 * d
        if not (base.a_minus + d < self.c1 - self.w < self.c1 + self.w < base.a_zero - d):
            raise ValueError(f"delta={d} too large: corner window collides with zeros")
        if not (base.a_zero - d < self.xa < self.xb < base.a_plus + d):
            raise ValueError(f"delta={d} too large: plateau window collides with zeros")
        self.beta = max(d * d * abs(float(d2f(u_min))), 1e-14)
        bp = _branch_triplet(base, +d)
        bm = _branch_triplet(base, -d)
        cap = _quintic_hermite(self.xa, self.xb, _at(bp, self.xa), _at(bm, self.xb))
        # lift the cap until it clears the exact sliding supremum on the window
        probe = np.linspace(self.xa, self.xb, 801)
        sup = self._sliding_sup(probe)
        deficit = float(np.max(sup - cap(probe)[0]))
        self.lift = max(deficit, 0.0) * 1.05 + 1e-12
        self._bp, self._bm, self._cap = bp, bm, cap

    def _sliding_sup(self, u):
        u = np.asarray(u, dtype=float)
        d = self.delta
        s = np.maximum(self.base(u + d), self.base(u - d))
        straddle = np.abs(u - self.u_max) <= d
        s[straddle] = np.maximum(s[straddle], self.f_max)
        return s

    def _cap_lifted(self, x):
        v, d1, d2 = self._cap(x)
        h = self.xb - self.xa
        tau = (np.asarray(x, dtype=float) - self.xa) / h
        b = 64.0 * tau**3 * (1.0 - tau) ** 3
        b1 = 64.0 * 3.0 * tau**2 * (1.0 - tau) ** 2 * (1.0 - 2.0 * tau) / h
        b2 = 64.0 * 6.0 * tau * (1.0 - tau) * (1.0 - 5.0 * tau + 5.0 * tau**2) / (h * h)
        return v + self.lift * b, d1 + self.lift * b1, d2 + self.lift * b2

    def eval(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        val = np.empty_like(u)
        d1 = np.empty_like(u)
        d2 = np.empty_like(u)
        c1, w, xa, xb = self.c1, self.w, self.xa, self.xb
        regions = [
            (u <= c1 - w, lambda x: _at(self._bm, x)),
            ((u > c1 - w) & (u < c1 + w), self._corner),
            ((u >= c1 + w) & (u <= xa), lambda x: _at(self._bp, x)),
            ((u > xa) & (u < xb), self._cap_lifted),
            (u >= xb, lambda x: _at(self._bm, x)),
        ]
        for mask, fn in regions:
            if np.any(mask):
                v, g1, g2 = fn(u[mask])
                val[mask], d1[mask], d2[mask] = v, g1, g2
        return val, d1, d2

    def _corner(self, x):
        x = np.asarray(x, dtype=float)
        a, da, d2a = _at(self._bm, x)
        b, db, d2b = _at(self._bp, x)
        sv, s1, s2 = _smax(a, da, d2a, b, db, d2b, self.beta)
        c1, w = self.c1, self.w
        half = 0.5 * w
        val = np.array(sv)
        d1 = np.array(s1)
        d2 = np.array(s2)
        left = x < c1 - half
        right = x > c1 + half
        if np.any(left):
            t = (x[left] - (c1 - w)) / half
            val[left], d1[left], d2[left] = _blend(
                (a[left], da[left], d2a[left]),
                (sv[left], s1[left], s2[left]),
                t,
                half,
            )
        if np.any(right):
            t = (x[right] - (c1 + half)) / half
            val[right], d1[right], d2[right] = _blend(
                (sv[right], s1[right], s2[right]),
                (b[right], db[right], d2b[right]),
                t,
                half,
            )
        return val, d1, d2


def _branch_triplet(base: Reaction, shift: float):
    return (
        lambda u: base(u + shift),
        lambda u: base.deriv(u + shift),
        lambda u: base.second_deriv(u + shift),
    )


def _at(branch, x):
    f, df, d2f = branch
    return f(x), df(x), d2f(x)


def _blend(F, G, t, width):
    sig = _smoothstep(t)
    s1 = _smoothstep_d1(t) / width
    s2 = _smoothstep_d2(t) / (width * width)
    v = (1.0 - sig) * F[0] + sig * G[0]
    d1 = (1.0 - sig) * F[1] + sig * G[1] + s1 * (G[0] - F[0])
    d2 = (1.0 - sig) * F[2] + sig * G[2] + 2.0 * s1 * (G[1] - F[1]) + s2 * (G[0] - F[0])
    return v, d1, d2


def shifted_reaction(
    r: Reaction, delta: float, sign: int, n_check: int = 10_000, n_window: int = 81
) -> Reaction:
    """Dominating reaction with zeros shifted by delta; sign +1 shifts up, -1 down.

    The '+' variant satisfies f_+ >= sup_{|v|<=delta} f(u+v) on [-2 c0, 2 c0] and
    has zeros (a_- + delta, a_0 - delta, a_+ + delta); the '-' variant is the
    mirror image.  Domination is verified on an n_check-point grid; failure at
    any sample raises.
    """
    if delta < 0 or delta >= (r.a_plus - r.a_zero) / 2.0:
        raise ValueError(f"delta must lie in [0, (a_+ - a_0)/2), got {delta}")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if delta == 0.0:
        return r

    if sign == +1:
        env = _PlusEnvelope(r, delta)
        f3 = env.eval
        zeros = (r.a_minus + delta, r.a_zero - delta, r.a_plus + delta)
    else:
        mirrored = Reaction(
            kind=r.kind,
            a_minus=-r.a_plus,
            a_zero=-r.a_zero,
            a_plus=-r.a_minus,
            c0=r.c0,
            _f=lambda u: -r(-u),
            _df=lambda u: r.deriv(-u),
            _d2f=lambda u: -r.second_deriv(-u),
        )
        env = _PlusEnvelope(mirrored, delta)

        def f3(u):
            v, d1, d2 = env.eval(-np.asarray(u, dtype=float))
            return -v, d1, -d2

        zeros = (r.a_minus - delta, r.a_zero + delta, r.a_plus - delta)

    def _shaped(idx):
        def fn(u):
            out = f3(u)[idx]
            return float(out[0]) if np.ndim(u) == 0 else out

        return fn

    shifted = Reaction(
        kind=f"shifted({r.kind}, delta={delta}, sign={'+' if sign > 0 else '-'})",
        a_minus=zeros[0],
        a_zero=zeros[1],
        a_plus=zeros[2],
        c0=r.c0,
        _f=_shaped(0),
        _df=_shaped(1),
        _d2f=_shaped(2),
    )

    u = np.linspace(-2.0 * r.c0, 2.0 * r.c0, n_check)
    v = np.linspace(-delta, delta, n_window)
    window_extreme = r(u[:, None] + v[None, :])
    target = window_extreme.max(axis=1) if sign > 0 else window_extreme.min(axis=1)
    gap = sign * (shifted(u) - target)
    worst = float(np.min(gap))
    if worst < -1e-12:
        raise ValueError(f"domination check failed: worst margin {worst:.3e}")
    return shifted


# ---------------------------------------------------------------------------
# structural validation
# ---------------------------------------------------------------------------


@dataclass
class ConditionReport:
    checks: dict
    constants: ReactionConstants | None

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())


def validate_conditions(r: Reaction, n_samples: int = 20001) -> ConditionReport:
    """Check the bistability conditions by dense sampling on [-2 c0, 2 c0].

    Reported checks: exactly three zeros with no extra sign change, slope signs
    at the zeros, polynomial growth and bounded derivative on the window (with
    estimated constants), oddness (expected for the cubic only), and the linear
    domination f(u) <= -p (u - a_+) for u >= a_+ and its mirror.
    """
    u = np.linspace(-2.0 * r.c0, 2.0 * r.c0, n_samples)
    fu = r(u)
    checks: dict = {}

    sgn = np.sign(fu)
    sgn[sgn == 0] = 1
    n_flips = int(np.count_nonzero(sgn[:-1] != sgn[1:]))
    zeros_ok = (
        n_flips == 3
        and np.isfinite([r.a_minus, r.a_zero, r.a_plus]).all()
        and r.a_minus < r.a_zero < r.a_plus
    )
    checks["three_zeros"] = {"passed": bool(zeros_ok), "sign_changes": n_flips}

    try:
        consts = constants(r)
        slope_ok = True
    except BistabilityError:
        consts = None
        slope_ok = False
    checks["slope_signs"] = {
        "passed": slope_ok,
        "p": consts.p if consts else None,
        "mu": consts.mu if consts else None,
    }

    growth_c = float(np.max(np.abs(fu) / (1.0 + np.abs(u) ** 3)))
    checks["growth_bound"] = {"passed": np.isfinite(growth_c), "C_q3": growth_c}

    c_est = float(np.max(r.deriv(u)))
    checks["derivative_bound"] = {"passed": np.isfinite(c_est), "c": c_est}

    odd_defect = float(np.max(np.abs(r(u) + r(-u))))
    checks["oddness"] = {"passed": odd_defect <= 1e-10, "defect": odd_defect}

    if zeros_ok and consts is not None:
        right = u[u >= r.a_plus]
        left = u[u <= r.a_minus]
        dom_r = float(np.max(r(right) + consts.p * (right - r.a_plus))) if right.size else 0.0
        dom_l = float(np.min(r(left) + consts.p * (left - r.a_minus))) if left.size else 0.0
        checks["linear_domination"] = {
            "passed": dom_r <= 1e-9 and dom_l >= -1e-9,
            "worst_right": dom_r,
            "worst_left": dom_l,
        }
    else:
        checks["linear_domination"] = {"passed": False, "reason": "no bistable zeros"}

    return ConditionReport(checks=checks, constants=consts)
