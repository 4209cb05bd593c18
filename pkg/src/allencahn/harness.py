"""Experiment orchestration: configs, Monte Carlo ensembles, and comparisons.

Experiments are reproducible functions of (config, seed): path-level work is
split across a process pool with per-path noise streams, so the output is
independent of the chunking.  Each experiment writes CSV artifacts plus one
summary.json carrying per-criterion verdicts.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.linalg import solve_banded
from scipy.stats import ks_2samp

from . import io as artifacts
from .fermi import PathRecord, ProjectionError, project
from .numerics import Field, Grid1D, RngStream, grid_for_eps
from .reaction import Reaction, constants, cubic, shifted_reaction, tabulated
from .sde import (
    build_linearized_operator,
    compute_alpha1,
    compute_alpha2,
    euler_maruyama,
)
from .spde import (
    Bump,
    NoiseSpec,
    SimConfig,
    default_bump,
    make_initial_data,
    simulate,
    stability_dt,
)
from .standing_wave import StandingWaveProfile, solve_standing_wave
from .generation import (
    BarrierParams,
    OdeFlow,
    build_barrier,
    first_generation_time,
    fit_generation_scaling,
    super_sub_solutions,
    verify_barrier,
)


class ConfigError(ValueError):
    pass


EXPERIMENT_KINDS = (
    "coefficients",
    "generation-scaling",
    "sandwich-check",
    "spde-vs-sde",
    "noise-audit",
)


def reaction_to_spec(r: Reaction) -> dict:
    if r.kind == "builtin-cubic":
        return {"kind": "builtin-cubic", "c0": r.c0}
    if r.kind.startswith("shifted"):
        raise ConfigError("serialize shifted reactions by (base, delta, sign) in config")
    raise ConfigError(f"reaction {r.kind} has no config form; use builtin or tabulated")


def reaction_from_spec(spec: dict) -> Reaction:
    kind = spec.get("kind", "builtin-cubic")
    if kind == "builtin-cubic":
        return cubic(c0=spec.get("c0", 1.0))
    if kind == "tabulated":
        return tabulated(spec["u"], spec["f"], c0=spec.get("c0", 1.0))
    if kind == "shifted":
        base = reaction_from_spec(spec["base"])
        return shifted_reaction(base, spec["delta"], spec["sign"])
    raise ConfigError(f"unknown reaction kind {kind!r}")


@dataclass
class ExperimentConfig:
    kind: str
    eps_list: list[float] = field(default_factory=lambda: [0.02])
    gamma: float = 1.0
    half_width: float = 6.0
    cells_per_layer: int = 16
    dt: float | None = None  # None -> stability rule eps/(10 c_f)
    n_paths: int = 100
    seed: int = 20240801
    kappa_prime: float = 1.05
    h1_kappa: float = 0.75
    delta: float = 0.1
    t_end_rescaled: float = 0.5
    record_stride_rescaled: float = 0.02
    amplitude: float = 0.5
    xi0: float = 0.0
    threads: int = 2
    out_dir: str = "out"
    reaction: dict = field(default_factory=lambda: {"kind": "builtin-cubic"})
    data: dict = field(default_factory=dict)
    c1_list: list[float] = field(default_factory=lambda: [0.3, 0.5, 0.7])
    ks_threshold: float = 0.01
    ks_pass_fraction: float = 0.95

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def validate(self) -> None:
        problems = []
        if self.kind not in EXPERIMENT_KINDS:
            problems.append(f"unknown experiment kind {self.kind!r}")
        if not self.eps_list:
            problems.append("eps_list must be nonempty")
        if any(e <= 0 for e in self.eps_list):
            problems.append("eps values must be positive")
        if self.gamma < 0:
            problems.append("gamma must be nonnegative")
        if self.n_paths < 1:
            problems.append("n_paths must be >= 1")
        if self.kind in ("spde-vs-sde", "noise-audit") and self.half_width < 3.0:
            problems.append("noisy experiments need half_width >= 3")
        if self.threads < 1:
            problems.append("threads must be >= 1")
        if problems:
            raise ConfigError("; ".join(problems))

    def grid(self, eps: float) -> Grid1D:
        return grid_for_eps(eps, self.half_width, self.cells_per_layer)

    def step_size(self, eps: float, r: Reaction) -> float:
        return self.dt if self.dt is not None else stability_dt(eps, r)


# ---------------------------------------------------------------------------
# batched SPDE ensembles (process-pool workers)
# ---------------------------------------------------------------------------


def _spde_batch(job: dict) -> dict:
    """Run a contiguous block of noise paths of one SPDE ensemble.

    All paths in the block advance together (path-major fused kernel for the
    builtin cubic, banded LAPACK otherwise); each path draws from its own
    counter-based stream keyed by its global index, so results do not depend on
    how paths are distributed over workers.
    """
    from ._kernels import HAVE_NUMBA, cubic_steps_block, thomas_factors

    r = reaction_from_spec(job["reaction"])
    grid = Grid1D(job["half_width"], job["n_cells"])
    eps, gamma, dt = job["eps"], job["gamma"], job["dt"]
    profile = solve_standing_wave(r, Grid1D(job["profile_half_width"], job["profile_n_cells"]))
    u0 = make_initial_data(job["data_kind"], {**job["data_params"], "profile": profile}, grid, eps)
    a_vals = Bump(job["amplitude"])(grid.x)

    n = grid.n_nodes
    ni = n - 2
    dx = grid.dx
    lo_bc, hi_bc = r.a_minus, r.a_plus
    mu_c = dt / dx**2
    dt_eps = dt / eps
    paths = range(job["path_lo"], job["path_hi"])
    P = len(paths)
    gens = [RngStream(job["seed"], p).generator() for p in paths]
    noise_fac = eps**gamma * a_vals[1:-1] * np.sqrt(dt / dx)
    record_steps = job["record_steps"]
    rec_set = {s: i for i, s in enumerate(record_steps)}
    n_slices = len(record_steps)
    positions = np.full((P, n_slices), np.nan)
    valid = np.zeros((P, n_slices), dtype=bool)
    dist = np.full((P, n_slices), np.nan)
    h1 = np.full((P, n_slices), np.nan)
    failed = np.zeros(P, dtype=bool)
    slices = np.empty((n_slices, P, ni))

    U = np.tile(u0.values[1:-1], (P, 1))
    n_steps = job["n_steps"]
    if 0 in rec_set:
        slices[rec_set[0]] = U
    use_kernel = HAVE_NUMBA and r.kind == "builtin-cubic"
    Z = np.empty((P, 16, n))
    if use_kernel:
        cw, inv = thomas_factors(ni, mu_c)
        scratch = np.empty((P, ni))
    else:
        ab = np.zeros((3, ni))
        ab[0, 1:] = -mu_c
        ab[1, :] = 1.0 + 2.0 * mu_c
        ab[2, :-1] = -mu_c

    # record steps between which we advance in blocks of <= 16
    k = 0
    while k < n_steps:
        next_rec = min((s for s in record_steps if s > k), default=n_steps)
        b = min(16, n_steps - k, next_rec - k)
        for i, g in enumerate(gens):
            g.standard_normal(out=Z[i, :b, :])
        if use_kernel:
            cubic_steps_block(U, Z[:, :b, :], noise_fac, dt_eps, mu_c, lo_bc, hi_bc,
                              cw, inv, scratch)
            k += b
        else:
            for j in range(b):
                k += 1
                rhs = U + (dt / eps) * np.asarray(r(U)) + noise_fac[None, :] * Z[:, j, 1:-1]
                rhs[:, 0] += mu_c * lo_bc
                rhs[:, -1] += mu_c * hi_bc
                U = solve_banded((1, 1), ab, rhs.T).T
        if not np.all(np.isfinite(U)):
            bad = ~np.all(np.isfinite(U), axis=1)
            failed |= bad
            U[bad, :] = 0.0
        if k in rec_set:
            slices[rec_set[k]] = U

    # interface extraction per recorded slice
    full = np.empty(n)
    full[0], full[-1] = lo_bc, hi_bc
    for p in range(P):
        if failed[p]:
            continue
        prev = job["data_params"].get("eta", job["data_params"].get("xi0", 0.0))
        for s in range(n_slices):
            full[1:-1] = slices[s][p]
            f = Field(grid, full.copy())
            window = (prev - 0.75, prev + 0.75)
            try:
                dec = project(f, profile, eps, window=window)
            except ProjectionError:
                try:
                    dec = project(f, profile, eps)
                except ProjectionError:
                    continue
            positions[p, s] = dec.eta
            dist[p, s] = dec.distance
            h1[p, s] = dec.h1_of_remainder
            valid[p, s] = True
            prev = dec.eta
    return {
        "positions": positions,
        "valid": valid,
        "dist": dist,
        "h1": h1,
        "failed": failed,
    }


def run_spde_ensemble(
    cfg: ExperimentConfig,
    eps: float,
    data_kind: str,
    data_params: dict,
    profile: StandingWaveProfile,
    record_times_rescaled: np.ndarray,
) -> dict:
    """SPDE ensemble in original time with recording on the rescaled lattice."""
    r = reaction_from_spec(cfg.reaction)
    grid = cfg.grid(eps)
    dt = cfg.step_size(eps, r)
    time_scale = eps ** (-2.0 * cfg.gamma - 0.5)
    record_steps = sorted({int(round(t * time_scale / dt)) for t in record_times_rescaled})
    n_steps = max(record_steps) if record_steps else 0
    base = {
        "reaction": cfg.reaction,
        "half_width": cfg.half_width,
        "n_cells": grid.n_cells,
        "profile_half_width": profile.grid.half_width,
        "profile_n_cells": profile.grid.n_cells,
        "eps": eps,
        "gamma": cfg.gamma,
        "dt": dt,
        "amplitude": cfg.amplitude,
        "seed": cfg.seed,
        "data_kind": data_kind,
        "data_params": data_params,
        "record_steps": record_steps,
        "n_steps": n_steps,
    }
    chunks = _chunk(cfg.n_paths, cfg.threads)
    jobs = [{**base, "path_lo": lo, "path_hi": hi} for lo, hi in chunks]
    if cfg.threads == 1 or len(jobs) == 1:
        results = [_spde_batch(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_spde_batch, jobs))
    out = {
        key: np.concatenate([res[key] for res in results], axis=0)
        for key in ("positions", "valid", "dist", "h1")
    }
    out["failed"] = np.concatenate([res["failed"] for res in results])
    out["times_rescaled"] = np.asarray(record_times_rescaled, dtype=float)
    out["actual_times"] = np.array(record_steps) * dt
    return out


def _chunk(n: int, workers: int) -> list[tuple[int, int]]:
    sizes = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]
    edges = np.concatenate([[0], np.cumsum(sizes)])
    return [(int(edges[i]), int(edges[i + 1])) for i in range(workers) if sizes[i] > 0]


def ensemble_to_path_records(ens: dict) -> list[PathRecord]:
    records = []
    for p in range(ens["positions"].shape[0]):
        records.append(
            PathRecord(
                times=ens["times_rescaled"],
                positions=ens["positions"][p],
                valid=ens["valid"][p],
                distances=ens["dist"][p],
                h1_remainders=ens["h1"][p],
            )
        )
    return records


def sde_path_records(times: np.ndarray, positions: np.ndarray) -> list[PathRecord]:
    return [
        PathRecord(
            times=times,
            positions=positions[p],
            valid=np.ones(times.size, dtype=bool),
        )
        for p in range(positions.shape[0])
    ]


# ---------------------------------------------------------------------------
# law comparison
# ---------------------------------------------------------------------------


@dataclass
class EnsembleStats:
    times: np.ndarray
    rows: list[dict]
    ks_threshold: float
    required_fraction: float
    fraction_above: float
    verdict: bool

    def variance_ratio_range(self, t_min: float = 0.0) -> tuple[float, float]:
        ratios = [
            row["var_a"] / row["var_b"]
            for row in self.rows
            if row["t_rescaled"] >= t_min and row["var_b"] > 0
        ]
        return (min(ratios), max(ratios)) if ratios else (np.nan, np.nan)


def compare_path_laws(
    spde_paths: list[PathRecord],
    sde_paths: list[PathRecord],
    ks_threshold: float = 0.01,
    required_fraction: float = 0.95,
    min_samples: int = 50,
) -> EnsembleStats:
    """Per-slice two-sample KS comparison on a common rescaled-time lattice.

    Slices need at least min_samples valid points on both sides to count; the
    overall verdict is whether the fraction of counted slices with p-value
    above ks_threshold reaches required_fraction.
    """
    if len(spde_paths) < 2 or len(sde_paths) < 2:
        raise ValueError("need at least 2 paths per ensemble")
    ta = spde_paths[0].times
    tb = sde_paths[0].times
    if ta.size != tb.size or np.max(np.abs(ta - tb)) > 1e-9:
        raise ValueError("ensembles are recorded on different rescaled-time lattices")
    rows = []
    n_pass = 0
    n_counted = 0
    for s, t in enumerate(ta):
        a = np.array([p.positions[s] for p in spde_paths if p.valid[s]])
        b = np.array([p.positions[s] for p in sde_paths if p.valid[s]])
        row = {
            "t_rescaled": float(t),
            "n_a": a.size,
            "n_b": b.size,
            "mean_a": float(a.mean()) if a.size else np.nan,
            "mean_b": float(b.mean()) if b.size else np.nan,
            "var_a": float(a.var(ddof=1)) if a.size > 1 else np.nan,
            "var_b": float(b.var(ddof=1)) if b.size > 1 else np.nan,
            "ks_stat": np.nan,
            "p_value": np.nan,
        }
        if a.size >= min_samples and b.size >= min_samples:
            if np.ptp(a) == 0 and np.ptp(b) == 0 and a[0] == b[0]:
                row["ks_stat"], row["p_value"] = 0.0, 1.0
            else:
                res = ks_2samp(a, b)
                row["ks_stat"], row["p_value"] = float(res.statistic), float(res.pvalue)
            n_counted += 1
            if row["p_value"] > ks_threshold:
                n_pass += 1
        rows.append(row)
    fraction = n_pass / n_counted if n_counted else 0.0
    return EnsembleStats(
        times=ta,
        rows=rows,
        ks_threshold=ks_threshold,
        required_fraction=required_fraction,
        fraction_above=fraction,
        verdict=fraction >= required_fraction,
    )


# ---------------------------------------------------------------------------
# noise audit (reaction-free stochastic heat equation)
# ---------------------------------------------------------------------------


def _heat_sup_batch(job: dict) -> np.ndarray:
    grid = Grid1D(job["half_width"], job["n_cells"])
    eps, gamma, dt = job["eps"], job["gamma"], job["dt"]
    n = grid.n_nodes
    dx = grid.dx
    mu_c = dt / dx**2
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = -mu_c
    ab[1, :] = 1.0 + 2.0 * mu_c
    ab[2, :-1] = -mu_c
    a_vals = Bump(job["amplitude"])(grid.x)
    noise_fac = eps**gamma * a_vals[1:-1] * np.sqrt(dt / dx)
    paths = range(job["path_lo"], job["path_hi"])
    gens = [RngStream(job["seed"], p).generator() for p in paths]
    P = len(paths)
    U = np.zeros((n - 2, P))
    sup = np.zeros(P)
    n_steps = job["n_steps"]
    block = 32
    k = 0
    while k < n_steps:
        b = min(block, n_steps - k)
        Z = np.stack([g.standard_normal((b, n)) for g in gens], axis=-1)
        for j in range(b):
            k += 1
            rhs = U + noise_fac[:, None] * Z[j, 1:-1, :]
            U = solve_banded((1, 1), ab, rhs)
            np.maximum(sup, np.max(np.abs(U), axis=0), out=sup)
    return sup


def noise_audit(cfg: ExperimentConfig, t_end: float = 1.0, dt: float = 1e-3) -> dict:
    """Sup norms of the reaction-free stochastic heat solution per path and eps.

    The audited law is eps-independent after eps^gamma normalization, so the
    normalized quantiles should be stable across the eps list; a fixed dt is
    used since there is no stiff reaction to resolve.
    """
    cfg.validate()
    qlevels = [0.1, 0.25, 0.5, 0.75, 0.9]
    report: dict = {"eps": {}, "quantile_levels": qlevels}
    for eps in cfg.eps_list:
        grid = cfg.grid(eps)
        job = {
            "half_width": cfg.half_width,
            "n_cells": grid.n_cells,
            "eps": eps,
            "gamma": cfg.gamma,
            "dt": dt,
            "amplitude": cfg.amplitude,
            "seed": cfg.seed,
            "n_steps": int(round(t_end / dt)),
        }
        chunks = _chunk(cfg.n_paths, cfg.threads)
        jobs = [{**job, "path_lo": lo, "path_hi": hi} for lo, hi in chunks]
        if cfg.threads == 1 or len(jobs) == 1:
            sups = np.concatenate([_heat_sup_batch(j) for j in jobs])
        else:
            with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
                sups = np.concatenate(list(pool.map(_heat_sup_batch, jobs)))
        normalized = sups / eps**cfg.gamma
        report["eps"][str(eps)] = {
            "sup_raw_mean": float(sups.mean()),
            "normalized_quantiles": [float(q) for q in np.quantile(normalized, qlevels)],
        }
    quants = np.array([report["eps"][str(e)]["normalized_quantiles"] for e in cfg.eps_list])
    hi, lo = np.max(quants, axis=0), np.min(quants, axis=0)
    spread = np.where(hi > lo, hi / np.where(lo > 0, lo, np.inf) - 1.0, 0.0)
    report["max_quantile_spread"] = float(np.max(spread))
    report["stable_within_20pct"] = bool(np.max(spread) <= 0.20)
    return report


# ---------------------------------------------------------------------------
# shared-noise comparison pairs
# ---------------------------------------------------------------------------


def ordered_pairs_worst_violation(
    cfg: ExperimentConfig,
    eps: float,
    pair_data: list[tuple[Field, Field]],
    t_end: float,
    n_records: int = 8,
) -> np.ndarray:
    """Evolve ordered initial pairs under shared noise; per-pair worst gap.

    Both members of a pair consume the same noise increments; the returned
    violation is min over recorded times and nodes of (upper - lower), which
    stays >= -O(dx^2 + dt) when the discrete comparison principle holds.
    """
    r = reaction_from_spec(cfg.reaction)
    grid = cfg.grid(eps)
    dt = cfg.step_size(eps, r)
    n = grid.n_nodes
    dx = grid.dx
    mu_c = dt / dx**2
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = -mu_c
    ab[1, :] = 1.0 + 2.0 * mu_c
    ab[2, :-1] = -mu_c
    a_vals = Bump(cfg.amplitude)(grid.x)
    noise_fac = eps**cfg.gamma * a_vals[1:-1] * np.sqrt(dt / dx)
    P = len(pair_data)
    lo = np.stack([p[0].values[1:-1] for p in pair_data], axis=1)
    hi = np.stack([p[1].values[1:-1] for p in pair_data], axis=1)
    gens = [RngStream(cfg.seed, p).generator() for p in range(P)]
    n_steps = int(round(t_end / dt))
    check = {int(round(k)) for k in np.linspace(1, n_steps, n_records)}
    worst = np.zeros(P)
    for k in range(1, n_steps + 1):
        Z = np.stack([g.standard_normal(n) for g in gens], axis=-1)
        for U in (lo, hi):
            rhs = U + (dt / eps) * np.asarray(r(U)) + noise_fac[:, None] * Z[1:-1, :]
            rhs[0, :] += mu_c * r.a_minus
            rhs[-1, :] += mu_c * r.a_plus
            U[:] = solve_banded((1, 1), ab, rhs)
        if k in check:
            np.minimum(worst, np.min(hi - lo, axis=0), out=worst)
    return worst


# ---------------------------------------------------------------------------
# experiment driver
# ---------------------------------------------------------------------------


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute one experiment kind and write its artifact directory."""
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner = {
        "coefficients": _run_coefficients,
        "generation-scaling": _run_generation_scaling,
        "sandwich-check": _run_sandwich,
        "spde-vs-sde": _run_spde_vs_sde,
        "noise-audit": _run_noise_audit,
    }[cfg.kind]
    summary = runner(cfg, out)
    summary["kind"] = cfg.kind
    summary["config"] = asdict(cfg)
    artifacts.write_summary(out / "summary.json", summary)
    return out


def _profile_for(cfg: ExperimentConfig, fine: bool = False) -> StandingWaveProfile:
    r = reaction_from_spec(cfg.reaction)
    grid = Grid1D(12.0, 4800 if fine else 24000)
    return solve_standing_wave(r, grid)


def _run_coefficients(cfg: ExperimentConfig, out: Path) -> dict:
    r = reaction_from_spec(cfg.reaction)
    grid = Grid1D(12.0, 4800)
    profile = solve_standing_wave(r, grid)
    op = build_linearized_operator(profile, r, n_modes=256)
    coeffs = compute_alpha2(op, profile, r)
    trunc = {str(k): compute_alpha2(op, profile, r, n_modes=k).alpha2 for k in (64, 128, 256)}
    profile_small = solve_standing_wave(r, Grid1D(10.0, 4000))
    artifacts.write_profile_csv(out / "profile.csv", profile)
    payload = {
        "alpha1": coeffs.alpha1,
        "alpha2": coeffs.alpha2,
        "error_estimate": coeffs.alpha2_error_estimate,
        "grid_meta": grid.meta(),
        "alpha2_by_modes": trunc,
        "domain_sensitivity_alpha1": abs(compute_alpha1(profile) - compute_alpha1(profile_small)),
        "eigenvalues_head": [float(v) for v in op.eigenvalues[:6]],
    }
    with open(out / "coefficients.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"criteria": {"alpha1_positive": coeffs.alpha1 > 0}, **payload}


def _run_generation_scaling(cfg: ExperimentConfig, out: Path) -> dict:
    r = reaction_from_spec(cfg.reaction)
    profile = _profile_for(cfg)
    pairs = []
    kappa_prime = cfg.data.get("threshold_exponent", 1.3)
    for eps in cfg.eps_list:
        grid = cfg.grid(eps)
        params = {"profile": profile, **{k: v for k, v in cfg.data.items() if k != "kind"}}
        params.pop("threshold_exponent", None)
        kind = cfg.data.get("kind", "manifold-perturbed")
        u0 = make_initial_data(kind, params, grid, eps)
        dt = cfg.step_size(eps, r)
        horizon = 2.0 * eps * abs(np.log(eps))
        record = np.arange(0.0, horizon + dt, dt)
        traj = simulate(
            SimConfig(eps=eps, reaction=r, grid=grid, dt=dt, t_end=horizon,
                      initial=u0, record_times=record)
        )
        t_star = first_generation_time(traj, profile, eps, threshold=eps**kappa_prime)
        if t_star is None:
            raise RuntimeError(f"no generation time found at eps={eps}")
        pairs.append((eps, t_star))
    fit = fit_generation_scaling(pairs)
    artifacts.write_scaling_csv(out / "generation_scaling.csv", pairs,
                                meta={"threshold_exponent": kappa_prime, "fit": fit})
    return {
        "pairs": [[e, t] for e, t in pairs],
        "fit": fit,
        "criteria": {"r_squared_ge_0.95": fit["r_squared"] >= 0.95},
    }


def _run_sandwich(cfg: ExperimentConfig, out: Path) -> dict:
    r = reaction_from_spec(cfg.reaction)
    profile = _profile_for(cfg)
    variants = cfg.data.get("variants") or [
        {"xi0": 0.0, "kappa": 1.2, "tail_frac": 1.0},
        {"xi0": 0.1, "kappa": 1.2, "tail_frac": 1.0},
        {"xi0": -0.1, "kappa": 1.2, "tail_frac": 1.0},
        {"xi0": 0.0, "kappa": 1.35, "tail_frac": 0.5},
        {"xi0": 0.2, "kappa": 1.1, "tail_frac": 0.3},
    ]
    from .numerics import gradient, second_difference

    results = []
    for eps in cfg.eps_list:
        grid = cfg.grid(eps)
        dt = cfg.step_size(eps, r)
        tol = 10.0 * (grid.dx**2 + dt)
        for c1 in cfg.c1_list:
            for var in variants:
                u0 = make_initial_data("general", dict(var), grid, eps)
                need = float(
                    np.max(np.abs(gradient(u0).values)) ** 2
                    + np.max(np.abs(second_difference(u0).values))
                )
                c0_bar = max(1.0, (-1.0 + np.sqrt(1.0 + 16.0 * need * 1.3)) / 8.0)
                bar = build_barrier(BarrierParams(eps=eps, c0=c0_bar, c1=c1), grid)
                ver = verify_barrier(bar, u0, c1, eps)
                t_gen = c1 * eps * abs(np.log(eps))
                record = np.linspace(0.0, t_gen, 7)
                traj = simulate(SimConfig(eps=eps, reaction=r, grid=grid, dt=dt,
                                          t_end=t_gen, initial=u0, record_times=record))
                reach = np.max(np.abs(u0.values) + bar.params.a_max * bar.h.values)
                flow = OdeFlow(r, c0=max(1.0, 0.51 * reach))
                worst = np.inf
                for t, f in zip(traj.times, traj.fields):
                    w_lo, w_hi = super_sub_solutions(flow, bar, u0, eps, t)
                    worst = min(worst, float(np.min(f.values - w_lo.values)),
                                float(np.min(w_hi.values - f.values)))
                results.append({
                    "eps": eps,
                    "c1": c1,
                    "variant": var,
                    "worst_margin": worst,
                    "tolerance": tol,
                    "holds": worst >= -tol,
                    "barrier_ok": all(v["passed"] for v in ver.values()),
                })
    all_hold = all(res["holds"] and res["barrier_ok"] for res in results)
    return {"results": results, "criteria": {"sandwich_holds_everywhere": all_hold}}


def _run_spde_vs_sde(cfg: ExperimentConfig, out: Path) -> dict:
    r = reaction_from_spec(cfg.reaction)
    profile = _profile_for(cfg, fine=True)
    op = build_linearized_operator(profile, r, n_modes=256)
    coeffs = compute_alpha2(op, profile, r)
    bump = default_bump(cfg.amplitude)
    stride = cfg.record_stride_rescaled
    lattice = np.round(np.arange(stride, cfg.t_end_rescaled + stride / 2, stride), 12)
    per_eps = {}
    for eps in cfg.eps_list:
        ens = run_spde_ensemble(
            cfg, eps, "profile-on-manifold", {"eta": cfg.xi0}, profile, lattice
        )
        failed = int(ens["failed"].sum())
        if failed > 0.05 * cfg.n_paths:
            raise RuntimeError(f"{failed}/{cfg.n_paths} paths failed mechanically")
        em_dt = stride / 100.0
        times_sde, xi = euler_maruyama(
            coeffs, bump, cfg.xi0, cfg.t_end_rescaled, em_dt,
            cfg.n_paths, RngStream(cfg.seed + 1), record_stride=100,
        )
        sde_recs = sde_path_records(times_sde[1:], xi[:, 1:])
        spde_recs = ensemble_to_path_records(ens)
        stats = compare_path_laws(
            spde_recs, sde_recs,
            ks_threshold=cfg.ks_threshold,
            required_fraction=cfg.ks_pass_fraction,
        )
        tag = str(eps).replace(".", "p")
        artifacts.write_paths_csv(out / f"spde_paths_eps{tag}.csv",
                                  ens["times_rescaled"], ens["positions"],
                                  meta={"eps": eps, "source": "spde"})
        artifacts.write_paths_csv(out / f"sde_paths_eps{tag}.csv", times_sde[1:], xi[:, 1:],
                                  meta={"eps": eps, "source": "sde"})
        artifacts.write_slices_csv(out / f"compare_slices_eps{tag}.csv", stats.rows,
                                   meta={"eps": eps})
        sample_rows = []
        for s, t in enumerate(stats.times):
            for rec in spde_recs:
                if rec.valid[s]:
                    sample_rows.append((t, "spde", rec.positions[s]))
            for rec in sde_recs:
                sample_rows.append((t, "sde", rec.positions[s]))
        artifacts.write_samples_csv(out / f"compare_samples_eps{tag}.csv", sample_rows,
                                    meta={"eps": eps})
        vr = stats.variance_ratio_range(t_min=0.1)
        per_eps[str(eps)] = {
            "fraction_above_threshold": stats.fraction_above,
            "ks_verdict": stats.verdict,
            "variance_ratio_range": list(vr),
            "variance_within_15pct": bool(max(abs(vr[0] - 1), abs(vr[1] - 1)) <= 0.15),
            "paths_failed": failed,
            "paths_completed": cfg.n_paths - failed,
            "alpha1": coeffs.alpha1,
            "alpha2": coeffs.alpha2,
        }
    ok = all(v["ks_verdict"] and v["variance_within_15pct"] for v in per_eps.values())
    return {"per_eps": per_eps, "criteria": {"law_comparison_passes": ok}}


def _run_noise_audit(cfg: ExperimentConfig, out: Path) -> dict:
    report = noise_audit(cfg)
    return {"report": report, "criteria": {"stable_within_20pct": report["stable_within_20pct"]}}
