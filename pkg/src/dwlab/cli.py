"""Command-line front end: argument/config resolution, suite dispatch,
reproducible seeding, and run-directory emission.

Every run writes one directory containing manifest.json (resolved config
echo plus timestamps), the data files, and summary.json (config echo,
version, wall clock, seed). Numeric CSV cells use shortest round-trip
formatting, so a rerun with the same resolved config and seed produces
byte-identical data files for any worker count.

Exit codes: 0 success; 2 usage or validation error; 3 a suite-internal
property was violated (an identity exceeded its tolerance or a pathwise
inequality failed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .asymptotics import det_gamma_audit, summary
from .errors import DwlabError
from .mdp_lab import (
    STATISTICS,
    SUITES,
    THRESHOLD_MODES,
    ExperimentConfig,
    rows_to_csv,
    run_suite,
)
from .model import (
    NOISE_FAMILIES,
    ModelParams,
    NoiseSpec,
    format_float,
    read_trajectory_csv,
    simulate,
    write_trajectory_csv,
)
from .statistics import ledger

SUITE_COMMANDS = tuple(SUITES)
VERSION_STRING = f"v{__version__}"


def _comma_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip() != "")


def _comma_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip() != "")


def _comma_strs(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip() != "")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=float, default=None, help="slope parameter, |theta| < 1")
    p.add_argument("--rho", type=float, default=None, help="noise serial correlation, |rho| < 1")
    p.add_argument("--sigma2", type=float, default=None, help="innovation variance (> 0)")
    p.add_argument("--x0", type=float, default=None, help="initial value x[0]")
    p.add_argument("--eps0", type=float, default=None, help="initial noise value eps[0]")
    p.add_argument("--noise", type=str, default=None, choices=NOISE_FAMILIES,
                   help="innovation family")
    p.add_argument("--beta", type=float, default=None,
                   help="symmetric Weibull shape exponent, 0 < beta < 1")
    p.add_argument("--nu", type=float, default=None,
                   help="Student degrees of freedom, nu > 2")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: DWLAB_SEED env var, else 0)")
    p.add_argument("--out", type=str, default=None, help="output run directory")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file; flags override its keys")


def _add_suite_flags(p: argparse.ArgumentParser) -> None:
    _add_model_flags(p)
    _add_run_flags(p)
    p.add_argument("--n-grid", type=_comma_ints, default=None, dest="n_grid",
                   help="comma-separated strictly increasing path lengths")
    p.add_argument("--alpha", type=float, default=None,
                   help="speed exponent, b_n = n^alpha with 0 < alpha < 1/2")
    p.add_argument("--x", type=_comma_floats, default=None, dest="thresholds",
                   help="comma-separated thresholds (see --threshold-mode)")
    p.add_argument("--threshold-mode", type=str, default=None,
                   choices=THRESHOLD_MODES, dest="threshold_mode",
                   help="sigma_multiple: x = c*sigma_stat/b_n per n; absolute: raw x")
    p.add_argument("--statistics", type=_comma_strs, default=None,
                   help=f"comma-separated subset of {','.join(STATISTICS)}")
    p.add_argument("--reps", type=int, default=None, dest="replications",
                   help="replications per grid point (>= 100)")
    p.add_argument("--delta", type=float, default=None,
                   help="convergence-suite deviation half-width")
    p.add_argument("--burn-in", action="store_true", default=None, dest="burn_in",
                   help="discard a stationarity burn-in prefix per path")
    p.add_argument("--workers", type=int, default=None, help="worker process count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dwlab",
        description="Simulation and inference laboratory for the stable "
                    "AR(1) process driven by AR(1) noise.")
    parser.add_argument("--version", action="version", version=VERSION_STRING)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one trajectory and export it")
    _add_model_flags(p)
    _add_run_flags(p)
    p.add_argument("--n", type=int, default=1000, help="path length (>= 2)")

    p = sub.add_parser("estimate", help="compute the full ledger of an exported trajectory")
    p.add_argument("--input", type=str, required=True, help="trajectory CSV path")
    _add_model_flags(p)
    _add_run_flags(p)

    p = sub.add_parser("summary", help="closed-form limits and variances for one parameter point")
    _add_model_flags(p)
    _add_run_flags(p)

    for name, blurb in (
        ("clt", "sample CLT moments against the limiting variances"),
        ("deviations", "tail probabilities and deviation slopes"),
        ("convergence", "exponential-convergence deviation frequencies"),
        ("identities", "exact-identity audit on random trajectories"),
        ("inequalities", "pathwise inequality audit on random paths"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_suite_flags(p)

    p = sub.add_parser("report", help="print the summary of an existing run directory")
    p.add_argument("run_dir", type=str, help="directory written by a previous run")
    return parser


def _default_seed() -> int:
    env = os.environ.get("DWLAB_SEED", "")
    return int(env) if env.strip() else 0


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DwlabError(f"config file must hold a JSON object, got {type(data).__name__}")
    return data


def resolve_config(args: argparse.Namespace, suite: str) -> ExperimentConfig:
    """Merge defaults, config-file keys, and flags (highest precedence)."""
    raw = _load_config_file(getattr(args, "config", None))
    raw["suite"] = suite
    params = dict(raw.get("params", {}))
    noise = dict(raw.get("noise", {}))
    for key in ("theta", "rho", "x0", "eps0"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if args.sigma2 is not None:
        params["sigma2"] = args.sigma2
        noise["sigma2"] = args.sigma2
    if args.noise is not None:
        noise["family"] = args.noise
    for key in ("beta", "nu"):
        value = getattr(args, key, None)
        if value is not None:
            noise[key] = value
    raw["params"] = params
    if noise:
        raw["noise"] = noise
    for key in ("n_grid", "alpha", "thresholds", "threshold_mode", "statistics",
                "replications", "delta", "burn_in", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    if args.seed is not None:
        raw["master_seed"] = args.seed
    elif "master_seed" not in raw:
        raw["master_seed"] = _default_seed()
    return ExperimentConfig.from_dict(raw)


def _resolve_model(args: argparse.Namespace) -> tuple[ModelParams, NoiseSpec, dict]:
    """Model-only resolution for simulate/estimate/summary."""
    cfg = resolve_config(args, suite="clt")
    return cfg.params, cfg.noise, {"master_seed": cfg.master_seed}


def _run_dir(args: argparse.Namespace, command: str, seed: int) -> str:
    out = getattr(args, "out", None)
    if out is None:
        out = os.path.join("dwlab_runs", f"{command}_seed{seed}")
    os.makedirs(out, exist_ok=True)
    return out


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_run_metadata(out_dir: str, config_echo: dict, started_at: str,
                        output_paths: list[str], wall_clock: float,
                        master_seed: int) -> None:
    manifest = {
        "config_echo": config_echo,
        "artifact_version": VERSION_STRING,
        "started_at": started_at,
        "finished_at": _utc_now(),
        "output_paths": output_paths,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    run_summary = {
        "config": config_echo,
        "version": VERSION_STRING,
        "wall_clock_seconds": wall_clock,
        "master_seed": master_seed,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(run_summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_simulate(args) -> int:
    params, noise, meta = _resolve_model(args)
    seed = meta["master_seed"]
    n = args.n
    started = _utc_now()
    t0 = time.perf_counter()
    traj = simulate(params, noise, n, seed)
    out_dir = _run_dir(args, "simulate", seed)
    csv_path = os.path.join(out_dir, "trajectory.csv")
    write_trajectory_csv(traj, csv_path)
    echo = {
        "command": "simulate",
        "params": {"theta": params.theta, "rho": params.rho,
                   "sigma2": params.sigma2, "x0": params.x0, "eps0": params.eps0},
        "noise": {"family": noise.family, "sigma2": noise.sigma2,
                  "beta": noise.beta, "nu": noise.nu},
        "n": n,
        "master_seed": seed,
    }
    _write_run_metadata(out_dir, echo, started, ["trajectory.csv"],
                        time.perf_counter() - t0, seed)
    led = ledger(traj, params)
    print(f"simulated n={n} theta={params.theta} rho={params.rho} "
          f"noise={noise.family} seed={seed}")
    print(f"  S_n/n={led.S_n / n:.6f}  theta_hat={led.theta_hat:.6f}  "
          f"rho_hat={led.rho_hat:.6f}  dw={led.dw:.6f}")
    print(f"  wrote {csv_path}")
    return 0


def _cmd_estimate(args) -> int:
    params, _, meta = _resolve_model(args)
    seed = meta["master_seed"]
    started = _utc_now()
    t0 = time.perf_counter()
    traj = read_trajectory_csv(args.input)
    use_params = params if args.theta is not None and args.rho is not None else None
    led = ledger(traj, use_params)
    out_dir = _run_dir(args, "estimate", seed)
    with open(os.path.join(out_dir, "ledger.json"), "w") as fh:
        fh.write(led.to_json())
        fh.write("\n")
    rows_to_csv([led], os.path.join(out_dir, "ledger.csv"))
    echo = {"command": "estimate", "input": os.path.abspath(args.input),
            "params_given": use_params is not None, "master_seed": seed}
    _write_run_metadata(out_dir, echo, started, ["ledger.json", "ledger.csv"],
                        time.perf_counter() - t0, seed)
    print(f"ledger of {args.input} (n={led.n})")
    print(f"  theta_hat={format_float(led.theta_hat)}")
    print(f"  rho_hat={format_float(led.rho_hat)}")
    print(f"  dw={format_float(led.dw)}  f_n={format_float(led.f_n)}")
    print(f"  wrote {out_dir}/ledger.json")
    return 0


def _cmd_summary(args) -> int:
    params, _, meta = _resolve_model(args)
    seed = meta["master_seed"]
    started = _utc_now()
    t0 = time.perf_counter()
    s = summary(params)
    direct, shortcut = det_gamma_audit(s)
    out_dir = _run_dir(args, "summary", seed)
    with open(os.path.join(out_dir, "asymptotics.json"), "w") as fh:
        fh.write(s.to_json())
        fh.write("\n")
    echo = {"command": "summary",
            "params": {"theta": params.theta, "rho": params.rho,
                       "sigma2": params.sigma2, "x0": params.x0,
                       "eps0": params.eps0},
            "master_seed": seed}
    _write_run_metadata(out_dir, echo, started, ["asymptotics.json"],
                        time.perf_counter() - t0, seed)
    print(f"asymptotics at theta={params.theta} rho={params.rho} sigma2={params.sigma2}")
    print(f"  theta_star   = {s.theta_star:.7f}")
    print(f"  rho_star     = {s.rho_star:.7f}")
    print(f"  d_star       = {s.d_star:.7f}")
    print(f"  sigma2_theta = {s.sigma2_theta:.7f}")
    print(f"  sigma2_rho   = {s.sigma2_rho:.7f}")
    print(f"  sigma2_d     = {s.sigma2_d:.7f}")
    print(f"  ell          = {s.ell:.7f}   ell1 = {s.ell1:.7f}   ell2 = {s.ell2:.7f}")
    print(f"  t_limit      = {s.t_limit:.7f}   j_limit = {s.j_limit:.7f}")
    print(f"  det(gamma)   = {direct:.7f} direct; shortcut formula gives {shortcut:.7f}")
    print(f"  wrote {out_dir}/asymptotics.json")
    return 0


def _suite_failures(suite: str, rows) -> list[str]:
    if suite == "identities":
        return [r.check for r in rows if r.passed is False]
    if suite == "inequalities":
        return [r.inequality for r in rows if not r.passed]
    return []


def _print_suite_summary(suite: str, rows) -> None:
    if suite == "clt":
        for r in rows:
            print(f"  n={r.n}: var ratios theta {r.var_theta / r.target_var_theta:.3f} "
                  f"rho {r.var_rho / r.target_var_rho:.3f} "
                  f"dw {r.var_dw / r.target_var_dw:.3f}; "
                  f"cov {r.cov_theta_rho:+.4f} (target {r.target_cov_theta_rho:+.4f})")
    elif suite == "deviations":
        for r in rows:
            flag = " FLAGGED(<10 events)" if r.flagged else ""
            rn = "inf" if math.isinf(r.r_n) else f"{r.r_n:.5f}"
            print(f"  {r.statistic} n={r.n} x={r.x:.5f}: p_hat={r.p_hat:.6f} "
                  f"[{r.ci_low:.6f},{r.ci_high:.6f}] r_n={rn} "
                  f"r/rate={r.ratio_rate:.4f} r/gauss={r.ratio_gauss:.4f}{flag}")
    elif suite == "convergence":
        for r in rows:
            print(f"  {r.functional:9s} n={r.n}: freq={r.freq:.5f} "
                  f"decay={'inf' if math.isinf(r.decay) else f'{r.decay:.4f}'}")
    elif suite == "identities":
        for r in rows:
            status = "report-only" if r.passed is None else ("ok" if r.passed else "VIOLATED")
            print(f"  {r.check:24s} max={r.max_residual:.3e} [{status}]")
    elif suite == "inequalities":
        for r in rows:
            print(f"  {r.inequality:14s} violations={r.violations}/{r.paths} "
                  f"[{'ok' if r.passed else 'VIOLATED'}]")


def _cmd_suite(args, suite: str) -> int:
    cfg = resolve_config(args, suite)
    started = _utc_now()
    t0 = time.perf_counter()
    rows = run_suite(cfg)
    out_dir = _run_dir(args, suite, cfg.master_seed)
    csv_path = os.path.join(out_dir, f"{suite}.csv")
    rows_to_csv(rows, csv_path)
    _write_run_metadata(out_dir, cfg.to_dict(), started, [f"{suite}.csv"],
                        time.perf_counter() - t0, cfg.master_seed)
    print(f"{suite} suite: {len(rows)} rows, seed={cfg.master_seed}, "
          f"workers={cfg.workers}")
    _print_suite_summary(suite, rows)
    print(f"  wrote {csv_path}")
    failures = _suite_failures(suite, rows)
    if failures:
        print(f"  PROPERTY VIOLATIONS: {', '.join(failures)}")
        return 3
    return 0


def _cmd_report(args) -> int:
    manifest_path = os.path.join(args.run_dir, "manifest.json")
    if not os.path.isfile(manifest_path):
        print(f"no manifest.json under {args.run_dir}", file=sys.stderr)
        return 2
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    echo = manifest.get("config_echo", {})
    print(f"run {args.run_dir}")
    print(f"  version={manifest.get('artifact_version')} "
          f"started={manifest.get('started_at')} finished={manifest.get('finished_at')}")
    suite = echo.get("suite", echo.get("command", "?"))
    seed = echo.get("master_seed", "?")
    print(f"  kind={suite} seed={seed}")
    for name in manifest.get("output_paths", []):
        path = os.path.join(args.run_dir, name)
        if not os.path.isfile(path):
            print(f"  {name}: MISSING")
            continue
        size = os.path.getsize(path)
        print(f"  {name}: {size} bytes")
        if name.endswith(".csv"):
            with open(path) as fh:
                lines = fh.read().splitlines()
            print(f"    {len(lines) - 1} data rows; columns: {lines[0]}")
            for line in lines[1:6]:
                print(f"    {line}")
            if len(lines) > 6:
                print(f"    ... ({len(lines) - 6} more)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "summary":
            return _cmd_summary(args)
        if args.command == "report":
            return _cmd_report(args)
        return _cmd_suite(args, args.command)
    except DwlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
