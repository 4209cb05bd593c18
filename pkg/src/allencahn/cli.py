"""Command-line entry points for the simulation harness."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as artifacts
from .harness import ConfigError, ExperimentConfig, reaction_from_spec, run_experiment
from .numerics import Grid1D, RngStream
from .sde import build_linearized_operator, compute_alpha2, euler_maruyama
from .spde import SimConfig, default_bump, make_initial_data, simulate, stability_dt
from .standing_wave import solve_standing_wave
from .fermi import interface_path


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--seed", type=int, help="root seed (overrides config)")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--threads", type=int, help="worker processes")


def _load(args, kind: str) -> ExperimentConfig:
    overrides = {
        "seed": args.seed,
        "out_dir": str(args.out) if args.out else None,
        "threads": args.threads,
    }
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, **overrides)
        cfg.kind = kind
    else:
        cfg = ExperimentConfig(kind=kind, **{k: v for k, v in overrides.items() if v is not None})
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="allencahn",
                                     description="stochastic Allen-Cahn interface laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standing-wave", help="tabulate the standing wave profile")
    _common(p)
    p.add_argument("--half-width", type=float, default=12.0)
    p.add_argument("--n-cells", type=int, default=24000)

    for name, kind in (
        ("coeffs", "coefficients"),
        ("generation", "generation-scaling"),
        ("sandwich", "sandwich-check"),
        ("compare", "spde-vs-sde"),
        ("noise-audit", "noise-audit"),
    ):
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        _common(p)

    p = sub.add_parser("simulate-spde", help="noisy trajectories with interface extraction")
    _common(p)
    p.add_argument("--eps", type=float, default=0.02)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--n-paths", type=int, default=1)
    p.add_argument("--t-end-rescaled", type=float, default=0.25)

    p = sub.add_parser("simulate-sde", help="Euler-Maruyama interface paths")
    _common(p)
    p.add_argument("--n-paths", type=int, default=100)
    p.add_argument("--t-end", type=float, default=0.5)
    p.add_argument("--dt", type=float, default=2e-4)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "standing-wave":
        cfg = _load(args, "coefficients")
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        r = reaction_from_spec(cfg.reaction)
        profile = solve_standing_wave(r, Grid1D(args.half_width, args.n_cells))
        artifacts.write_profile_csv(out / "profile.csv", profile)
        artifacts.write_summary(out / "summary.json", {
            "kind": "standing-wave",
            "grad_norm_sq": profile.grad_norm_sq,
            "grid_meta": profile.grid.meta(),
        })
        print(f"wrote {out / 'profile.csv'}")
        return 0

    if cmd in ("coeffs", "generation", "sandwich", "compare", "noise-audit"):
        kind = {
            "coeffs": "coefficients",
            "generation": "generation-scaling",
            "sandwich": "sandwich-check",
            "compare": "spde-vs-sde",
            "noise-audit": "noise-audit",
        }[cmd]
        cfg = _load(args, kind)
        out = run_experiment(cfg)
        print(f"experiment {kind} complete: {out / 'summary.json'}")
        return 0

    if cmd == "simulate-spde":
        cfg = _load(args, "spde-vs-sde")
        cfg.eps_list = [args.eps]
        cfg.gamma = args.gamma
        cfg.n_paths = args.n_paths
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        r = reaction_from_spec(cfg.reaction)
        profile = solve_standing_wave(r, Grid1D(12.0, 4800))
        eps = args.eps
        grid = cfg.grid(eps)
        dt = cfg.step_size(eps, r)
        scale = eps ** (-2.0 * cfg.gamma - 0.5)
        horizon = args.t_end_rescaled * scale
        record = np.linspace(0.0, horizon, 26)
        bump = default_bump(cfg.amplitude)
        for pid in range(args.n_paths):
            from .spde import NoiseSpec

            noise = NoiseSpec.from_bump(bump, grid, cfg.gamma)
            u0 = make_initial_data("profile-on-manifold", {"profile": profile, "eta": cfg.xi0},
                                   grid, eps)
            traj = simulate(SimConfig(eps=eps, reaction=r, grid=grid, dt=dt, t_end=horizon,
                                      initial=u0, noise=noise, record_times=record,
                                      seed=RngStream(cfg.seed, pid)))
            rec = interface_path(traj, profile, eps, cfg.gamma)
            tag = f"eps{str(eps).replace('.', 'p')}_path{pid:04d}"
            artifacts.write_trajectory_csv(out / f"trajectory_{tag}.csv", traj,
                                           meta={"eps": eps, "gamma": cfg.gamma, "path": pid})
            artifacts.write_path_record_csv(out / f"interface_{tag}.csv", rec,
                                            meta={"eps": eps, "gamma": cfg.gamma, "path": pid})
            with open(out / f"trajectory_{tag}.json", "w") as fh:
                json.dump({"eps": eps, "gamma": cfg.gamma, "seed": cfg.seed, "path": pid,
                           "dt": dt, "grid": grid.meta()}, fh, indent=2, sort_keys=True)
                fh.write("\n")
        print(f"wrote {args.n_paths} trajectories to {out}")
        return 0

    if cmd == "simulate-sde":
        cfg = _load(args, "spde-vs-sde")
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        r = reaction_from_spec(cfg.reaction)
        profile = solve_standing_wave(r, Grid1D(12.0, 4800))
        op = build_linearized_operator(profile, r, n_modes=256)
        coeffs = compute_alpha2(op, profile, r)
        bump = default_bump(cfg.amplitude)
        times, xi = euler_maruyama(coeffs, bump, cfg.xi0, args.t_end, args.dt,
                                   args.n_paths, RngStream(cfg.seed))
        artifacts.write_paths_csv(out / "sde_paths.csv", times, xi,
                                  meta={"alpha1": coeffs.alpha1, "alpha2": coeffs.alpha2})
        print(f"wrote {out / 'sde_paths.csv'}")
        return 0

    raise ConfigError(f"unhandled command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
