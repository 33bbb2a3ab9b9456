"""Command-line orchestration: simulation, sweeps, phase diagram, tools.

Subcommands: simulate, sweep, phase, couple, bounds, perc. Common flags:
--config (flat `key = value` file, `#` comments; CLI flags override),
--seed (env CONTAGION_SEED as fallback), --out-dir, --threads,
--format {csv,json}. Every invocation writes manifest.json with the
resolved configuration, seed scheme, and throughput stats; outputs are
bitwise reproducible for a fixed seed at any thread count (the manifest
itself carries wall-clock timings and is excluded from that contract).

Exit codes: 0 success, 2 configuration error, 3 unresolved search,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Optional

from . import __version__
from .bounds import BoundParameters, maximal_load_offspring_mc, offspring_bound
from .coupling import CoupledConfig, coupled_run, survival_curve, survival_curve_csv
from .engine import EngineConfig, InitialLoadDistribution, run
from .lattice import Norm, TorusLattice
from .percolation import (
    Adjacency,
    RegionTrialConfig,
    estimate_openness,
    spanning_fraction,
    supercriticality_check,
    threshold_estimate,
)
from .search import (
    SearchConfig,
    estimate_gamma_c,
    estimate_lambda_c_inf,
    survival_trial_block,
)
from .seeds import SEED_SCHEME, stream

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNRESOLVED = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _parse_gamma(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    return value


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def read_config_file(path: str) -> dict[str, str]:
    """Flat UTF-8 `key = value` format; `#` starts a comment."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Precedence: CLI flag > config file entry > built-in default."""
    file_values = read_config_file(args.config) if args.config else {}
    resolved = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = cli_value
        elif key in file_values:
            raw = file_values[key]
            if isinstance(default, bool):
                resolved[key] = raw.lower() in ("1", "true", "yes")
            elif isinstance(default, int):
                resolved[key] = int(raw)
            elif isinstance(default, float):
                resolved[key] = _parse_gamma(raw)
            elif isinstance(default, list):
                resolved[key] = _parse_float_list(raw)
            else:
                resolved[key] = raw
        else:
            resolved[key] = default
    unknown = set(file_values) - set(defaults) - {"seed", "out_dir", "threads", "format"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for common in ("seed", "out_dir", "threads", "format"):
        cli_value = getattr(args, common, None)
        if cli_value is not None:
            resolved[common] = cli_value
        elif common in file_values:
            resolved[common] = (
                int(file_values[common]) if common in ("seed", "threads") else file_values[common]
            )
    resolved.setdefault("threads", 1)
    resolved.setdefault("format", "csv")
    resolved.setdefault("out_dir", "out")
    if "seed" not in resolved or resolved["seed"] is None:
        env = os.environ.get("CONTAGION_SEED")
        resolved["seed"] = int(env) if env else 0
    return resolved


class OutputDir:
    def __init__(self, path: str):
        self.path = Path(path)
        try:
            self.path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IOError(f"cannot create output directory {path}: {exc}") from exc
        self.written: list[str] = []

    def write(self, name: str, content: str) -> None:
        try:
            (self.path / name).write_text(content, encoding="utf-8")
        except OSError as exc:
            raise IOError(f"cannot write {name}: {exc}") from exc
        self.written.append(name)


def write_manifest(
    out: OutputDir,
    command: str,
    params: dict,
    started: float,
    events_total: int,
    argv: Optional[list[str]] = None,
) -> None:
    wall = time.time() - started
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "argv": sys.argv[1:] if argv is None else list(argv),
        "config": {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in params.items()},
        "master_seed": params.get("seed", 0),
        "seed_scheme": SEED_SCHEME,
        "wall_time_s": wall,
        "events_total": events_total,
        "events_per_second": events_total / wall if wall > 0 else 0.0,
        "outputs": list(out.written),
    }
    try:
        (out.path / "manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IOError(f"cannot write manifest: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

SIMULATE_DEFAULTS = dict(
    d=2, L=30, k=1, lam=1.0, gamma=math.inf, m=1, mode="standard",
    K=100_000, record_trajectory=False,
)


def cmd_simulate(args) -> int:
    params = _resolve(args, SIMULATE_DEFAULTS)
    started = time.time()
    config = EngineConfig(
        lattice=TorusLattice(params["d"], params["L"]),
        lam=params["lam"],
        gamma=params["gamma"],
        k=params["k"],
        m_dist=InitialLoadDistribution.point_mass(params["m"]),
        mode=params["mode"],
        max_events=params["K"],
        seed=params["seed"],
        record_trajectory=params["record_trajectory"],
    )
    result = run(config, rng=stream(params["seed"], 0))
    out = OutputDir(params["out_dir"])
    out.write("result.json", result.to_json() + "\n")
    if params["record_trajectory"]:
        out.write("trajectory.csv", result.trajectory_csv())
    write_manifest(out, "simulate", params, started, result.events_executed, argv=getattr(args, "_argv", None))
    return EXIT_OK


SWEEP_DEFAULTS = dict(
    L=30, K=100_000, S=30, k=1, m=1, mode="standard",
    lam_grid=[1.5, 1.25, 1.0, 0.9, 0.8, 0.7], gamma=math.inf,
)


def cmd_sweep(args) -> int:
    params = _resolve(args, SWEEP_DEFAULTS)
    started = time.time()
    search = SearchConfig(
        L=params["L"], K=params["K"], S=params["S"], k=params["k"], m=params["m"],
        mode=params["mode"], threads=params["threads"], master_seed=params["seed"],
    )
    events = 0
    lines = ["lambda,survived,sims_used"]
    rows = []
    for i, lam in enumerate(params["lam_grid"]):
        block = survival_trial_block(lam, params["gamma"], search, block_key=(2, i))
        events += block.events_total
        lines.append(f"{lam!r},{str(block.survived).lower()},{block.sims_used}")
        rows.append({"lambda": lam, "survived": block.survived, "sims_used": block.sims_used})
    out = OutputDir(params["out_dir"])
    out.write("lambda_search.csv", "\n".join(lines) + "\n")
    if params["format"] == "json":
        out.write("lambda_search.json", json.dumps(rows, indent=2) + "\n")
    write_manifest(out, "sweep", params, started, events, argv=getattr(args, "_argv", None))
    return EXIT_OK


PHASE_DEFAULTS = dict(
    L=30, K=100_000, S=30, k=1, m=1, mode="standard",
    lambda_init=1.5, lambda_step=0.01,
    gamma_init=10.0, gamma_factor=0.9, gamma_floor=1e-4,
    lambda_grid=[],  # empty: offsets above the lambda_c_inf estimate
    lambda_offsets=[0.05, 0.15, 0.25, 0.4, 0.6],
)


def cmd_phase(args) -> int:
    params = _resolve(args, PHASE_DEFAULTS)
    started = time.time()
    search = SearchConfig(
        L=params["L"], K=params["K"], S=params["S"], k=params["k"], m=params["m"],
        mode=params["mode"], threads=params["threads"], master_seed=params["seed"],
        lambda_init=params["lambda_init"], lambda_step=params["lambda_step"],
        gamma_init=params["gamma_init"], gamma_factor=params["gamma_factor"],
        gamma_floor=params["gamma_floor"],
    )
    lam_result = estimate_lambda_c_inf(search)
    out = OutputDir(params["out_dir"])
    out.write("lambda_search.csv", lam_result.trace_csv())
    events = lam_result.events_total
    if not lam_result.resolved:
        write_manifest(out, "phase", params, started, events, argv=getattr(args, "_argv", None))
        print("lambda search unresolved: no survival down to lambda_step", file=sys.stderr)
        return EXIT_UNRESOLVED
    grid = params["lambda_grid"] or [
        round(lam_result.lambda_c_hat + off, 10) for off in params["lambda_offsets"]
    ]
    boundary = estimate_gamma_c(grid, search, lambda_c_inf_hat=lam_result.lambda_c_hat)
    events += boundary.events_total
    out.write("phase_boundary.csv", boundary.boundary_csv())
    out.write(
        "phase_estimate.json",
        json.dumps(
            {
                "lambda_c_inf_hat": lam_result.lambda_c_hat,
                "points": [
                    {
                        "lambda": pt.lam,
                        "gamma_c_hat": pt.gamma_c_hat,
                        "resolved": pt.resolved,
                        "degenerate": pt.degenerate,
                        "trials_used": pt.trials_used,
                    }
                    for pt in boundary.points
                ],
            },
            indent=2,
        )
        + "\n",
    )
    write_manifest(out, "phase", params, started, events, argv=getattr(args, "_argv", None))
    if not all(pt.resolved for pt in boundary.points):
        print("some gamma boundary points unresolved", file=sys.stderr)
        return EXIT_UNRESOLVED
    return EXIT_OK


COUPLE_DEFAULTS = dict(
    d=2, L=12, k=1, m=1, mode="standard", K=10_000,
    kind="gamma_pair", lam0=1.0, lam1=1.0, gamma0=0.5, gamma1=1.5,
    curve_replicas=0, curve_t_max=20.0, curve_points=50,
)


def cmd_couple(args) -> int:
    params = _resolve(args, COUPLE_DEFAULTS)
    started = time.time()
    lattice = TorusLattice(params["d"], params["L"])
    config = CoupledConfig(
        lattice=lattice,
        pair_kind=params["kind"],
        lam0=params["lam0"],
        lam1=params["lam1"],
        gamma0=params["gamma0"],
        gamma1=params["gamma1"],
        k=params["k"],
        m_dist=InitialLoadDistribution.point_mass(params["m"]),
        mode=params["mode"],
        max_events=params["K"],
        shared_seed=params["seed"],
    )
    report = coupled_run(config)
    out = OutputDir(params["out_dir"])
    out.write("domination_report.json", json.dumps(report.to_json_dict(), indent=2) + "\n")
    events = report.events_checked
    if params["curve_replicas"] > 0:
        engine_cfg = EngineConfig(
            lattice=lattice,
            lam=params["lam0"],
            gamma=params["gamma0"],
            k=params["k"],
            m_dist=InitialLoadDistribution.point_mass(params["m"]),
            mode=params["mode"],
            max_events=params["K"],
            seed=params["seed"],
        )
        n_pts = params["curve_points"]
        grid = [params["curve_t_max"] * i / (n_pts - 1) for i in range(n_pts)]
        curve = survival_curve(engine_cfg, grid, params["curve_replicas"])
        out.write("survival_curve.csv", survival_curve_csv(curve))
    write_manifest(out, "couple", params, started, events, argv=getattr(args, "_argv", None))
    return EXIT_OK


BOUNDS_DEFAULTS = dict(
    d=2, k=1, m_bar=1, lam=1.0, gamma=1.0,
    lam_grid=[],  # optional sweep
    mc_trials=0,  # optional Monte Carlo cross-check of the bound
)


def cmd_bounds(args) -> int:
    params = _resolve(args, BOUNDS_DEFAULTS)
    started = time.time()
    point = offspring_bound(
        BoundParameters(params["d"], params["k"], params["m_bar"], params["lam"], params["gamma"])
    )
    payload = point.to_dict()
    if params["mc_trials"] > 0:
        est = maximal_load_offspring_mc(point.params, params["mc_trials"], stream(params["seed"], 0))
        payload["mc_offspring_mean"] = est.mean
        payload["mc_offspring_se"] = est.se
    out = OutputDir(params["out_dir"])
    out.write("bounds.json", json.dumps(payload, indent=2) + "\n")
    grid = params["lam_grid"] or [params["lam"]]
    lines = ["lambda,gamma,v_k,p_part_star,p_site_star,offspring_bound,subcritical"]
    for lam in grid:
        r = offspring_bound(
            BoundParameters(params["d"], params["k"], params["m_bar"], lam, params["gamma"])
        )
        gamma_txt = "inf" if math.isinf(params["gamma"]) else repr(params["gamma"])
        lines.append(
            f"{lam!r},{gamma_txt},{r.v_k},{r.p_part_star!r},{r.p_site_star!r},"
            f"{r.offspring_bound!r},{str(r.subcritical).lower()}"
        )
    out.write("bounds_sweep.csv", "\n".join(lines) + "\n")
    write_manifest(out, "bounds", params, started, params["mc_trials"], argv=getattr(args, "_argv", None))
    return EXIT_OK


PERC_DEFAULTS = dict(
    k=1, lam=1.0, p_m_ge_1=1.0, trials=2000,
    gamma_grid=[1.0, 0.1, 0.01, 0.001, 0.0001],
    n=128, adjacency="four", realizations=500,
    p_grid=[0.45, 0.5, 0.55, 0.57, 0.59, 0.61, 0.63, 0.65, 0.7],
    check=False,  # also run the end-to-end supercriticality verdict scan
)


def cmd_perc(args) -> int:
    params = _resolve(args, PERC_DEFAULTS)
    started = time.time()
    adjacency = Adjacency(params["adjacency"])
    out = OutputDir(params["out_dir"])

    lines = ["lambda,gamma,k,trials,p_tilde,ci,p_open"]
    for i, gamma in enumerate(params["gamma_grid"]):
        est = estimate_openness(
            RegionTrialConfig(k=params["k"], lam=params["lam"], gamma=gamma),
            params["trials"],
            params["p_m_ge_1"],
            stream(params["seed"], 0, i),
        )
        lines.append(
            f"{params['lam']!r},{gamma!r},{params['k']},{est.trials},"
            f"{est.p_tilde!r},{est.ci_halfwidth!r},{est.p_open!r}"
        )
    out.write("openness_sweep.csv", "\n".join(lines) + "\n")

    lines = ["n,adjacency,p,spanning_fraction"]
    for i, p in enumerate(params["p_grid"]):
        frac = spanning_fraction(
            params["n"], p, adjacency, params["realizations"], stream(params["seed"], 1, i)
        )
        lines.append(f"{params['n']},{adjacency.value},{p!r},{frac!r}")
    out.write("perc_sweep.csv", "\n".join(lines) + "\n")

    if params["check"]:
        th = threshold_estimate(
            params["n"], adjacency, params["realizations"], stream(params["seed"], 2)
        )
        verdicts = []
        for i, gamma in enumerate(params["gamma_grid"]):
            v = supercriticality_check(
                params["lam"], gamma, params["k"], params["p_m_ge_1"],
                params["trials"], params["n"], adjacency,
                stream(params["seed"], 3, i), threshold=th,
            )
            verdicts.append({"gamma": gamma, **v.to_dict()})
        out.write("supercriticality.json", json.dumps(verdicts, indent=2) + "\n")
    write_manifest(out, "perc", params, started, 0, argv=getattr(args, "_argv", None))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contagion",
        description="Spatial SIS epidemic with site contamination: simulator and analysis tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, help="master seed (env CONTAGION_SEED fallback)")
        p.add_argument("--out-dir", dest="out_dir", help="output directory (default: out)")
        p.add_argument("--threads", type=int, help="replica parallelism (default: 1)")
        p.add_argument("--format", choices=("csv", "json"), help="extra JSON mirrors of CSVs")

    p = sub.add_parser("simulate", help="one engine run")
    common(p)
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--gamma", type=_parse_gamma)
    p.add_argument("--m", type=int)
    p.add_argument("--mode", choices=("standard", "site_only"))
    p.add_argument("--K", type=int)
    p.add_argument("--record-trajectory", dest="record_trajectory", action="store_const", const=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="survival trial blocks over a lambda grid")
    common(p)
    p.add_argument("--L", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--S", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mode", choices=("standard", "site_only"))
    p.add_argument("--gamma", type=_parse_gamma)
    p.add_argument("--lam-grid", dest="lam_grid", type=_parse_float_list)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase", help="phase-diagram estimation protocol")
    common(p)
    p.add_argument("--L", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--S", type=int)
    p.add_argument("--lambda-init", dest="lambda_init", type=float)
    p.add_argument("--lambda-step", dest="lambda_step", type=float)
    p.add_argument("--gamma-init", dest="gamma_init", type=float)
    p.add_argument("--gamma-factor", dest="gamma_factor", type=float)
    p.add_argument("--gamma-floor", dest="gamma_floor", type=float)
    p.add_argument("--lambda-grid", dest="lambda_grid", type=_parse_float_list)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("couple", help="coupled pair run with domination checks")
    common(p)
    p.add_argument("--kind", choices=("gamma_pair", "lambda_pair"))
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--lam0", type=float)
    p.add_argument("--lam1", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--curve-replicas", dest="curve_replicas", type=int)
    p.add_argument("--curve-t-max", dest="curve_t_max", type=float)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("bounds", help="branching-process subcriticality bound")
    common(p)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m-bar", dest="m_bar", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--gamma", type=_parse_gamma)
    p.add_argument("--lam-grid", dest="lam_grid", type=_parse_float_list)
    p.add_argument("--mc-trials", dest="mc_trials", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("perc", help="region openness and percolation comparison")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--p-m-ge-1", dest="p_m_ge_1", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--gamma-grid", dest="gamma_grid", type=_parse_float_list)
    p.add_argument("--n", type=int)
    p.add_argument("--adjacency", choices=("four", "eight"))
    p.add_argument("--realizations", type=int)
    p.add_argument("--p-grid", dest="p_grid", type=_parse_float_list)
    p.add_argument("--check", action="store_const", const=True)
    p.set_defaults(func=cmd_perc)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
