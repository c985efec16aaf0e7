"""Command-line entry point: ``adhocnet {sweep,collapse,metrics,replay}``.

Settings are resolved as built-in defaults < preset < YAML config file <
command-line flags.  The worker count comes from ``--workers`` or the
``ADHOCNET_WORKERS`` environment variable and never affects the output.
"""

from __future__ import annotations

import argparse
import glob
import hashlib
import json
import math
import os
import sys
import time
from importlib import metadata

import yaml

from . import io as aio
from .analysis import (check_knn_linearity, empirical_crossing, find_beta, fit_logistic,
                       fit_report, rescaled_abscissa)
from .ensemble import ExperimentPlan, run_connectivity_sweep, run_metrics
from .errors import AdhocNetError, ConfigError, InfeasibleError, InvalidPlanError
from .netmetrics import cutoff_degree, pooled_distribution

TARGET_SIGMA_C = {2: 0.37, 3: 0.21, 4: 0.13, 5: 0.09, 6: 0.065}
_TARGET_POINTS = [[z, s] for z, s in TARGET_SIGMA_C.items()]

DEFAULTS = {
    "preset": None,
    "L": 100,
    "z_list": [2, 3, 4, 5, 6],
    "sigma_grid": "auto",
    "realizations": 100,
    "warmup_steps": None,
    "seed": 2008,
    "mode": "independent",
    "trajectory_stride": 1,
    "coarse_realizations": 20,
    "points_per_decade": 40,
    "out_dir": "adhocnet-out",
    "fit_window": [0.1, 0.95],
    "beta_interval": [-1.5, 0.0],
    "beta_step": 0.01,
    "collapse_variable": "log",
    "eta_threshold": 0.9995,
    "epsilon": 1e-3,
    "targets": "auto",
    "kc_sweep_z": 4,
    "kc_sweep_sigmas": [0.13, 0.16, 0.2, 0.25, 0.3, 0.4],
}

_FULL_SCALE = {"L": 200, "realizations": 300}
PRESETS = {
    "paper-fig2": dict(_FULL_SCALE),
    "paper-fig3": dict(_FULL_SCALE),
    "paper-fig4": dict(_FULL_SCALE, targets=_TARGET_POINTS),
    "paper-fig5": dict(_FULL_SCALE, targets=_TARGET_POINTS),
    "paper-fig6": dict(_FULL_SCALE, targets=_TARGET_POINTS),
    "desk": {"L": 100, "realizations": 100, "targets": _TARGET_POINTS},
}

# keys excluded from the config hash: they do not change any data
_UNHASHED = ("out_dir",)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check(key, value):
    """Return an error string for an invalid value, else None."""
    if key == "preset":
        if value is not None and value not in PRESETS:
            return f"unknown preset {value!r} (choose from {', '.join(sorted(PRESETS))})"
    elif key in ("L", "realizations", "trajectory_stride", "coarse_realizations",
                 "points_per_decade", "kc_sweep_z"):
        if not _is_int(value) or value < 1:
            return f"{key} must be a positive integer"
    elif key == "seed":
        if not _is_int(value) or value < 0:
            return "seed must be a non-negative integer"
    elif key == "warmup_steps":
        if value is not None and (not _is_int(value) or value < 0):
            return "warmup_steps must be a non-negative integer or null"
    elif key == "z_list":
        if not isinstance(value, list) or not value or not all(_is_int(z) and z >= 1 for z in value):
            return "z_list must be a non-empty list of positive integers"
    elif key == "sigma_grid":
        if value == "auto":
            return None
        if not isinstance(value, list) or not value:
            return "sigma_grid must be 'auto' or a non-empty list of occupancies"
        if not all(_is_num(s) and 0 < s <= 1 for s in value):
            return "sigma_grid values must lie in (0, 1]"
        if any(b <= a for a, b in zip(value, value[1:])):
            return "sigma_grid must be strictly increasing"
    elif key == "mode":
        if value not in ("independent", "trajectory"):
            return "mode must be 'independent' or 'trajectory'"
    elif key == "out_dir":
        if not isinstance(value, str) or not value:
            return "out_dir must be a path"
    elif key in ("fit_window", "beta_interval"):
        if (not isinstance(value, list) or len(value) != 2 or not all(map(_is_num, value))
                or value[0] >= value[1]):
            return f"{key} must be an increasing pair of numbers"
    elif key == "beta_step":
        if not _is_num(value) or value <= 0:
            return "beta_step must be positive"
    elif key == "collapse_variable":
        if value not in ("log", "shift"):
            return "collapse_variable must be 'log' or 'shift'"
    elif key == "eta_threshold":
        if not _is_num(value) or not 0 <= value <= 1:
            return "eta_threshold must lie in [0, 1]"
    elif key == "epsilon":
        if not _is_num(value) or not 0 < value < 1:
            return "epsilon must lie in (0, 1)"
    elif key == "targets":
        if value == "auto":
            return None
        if (not isinstance(value, list) or not value
                or not all(isinstance(t, list) and len(t) == 2 and _is_int(t[0]) and t[0] >= 1
                           and _is_num(t[1]) and 0 < t[1] <= 1 for t in value)):
            return "targets must be 'auto' or a list of [z, sigma] pairs"
    elif key == "kc_sweep_sigmas":
        if not isinstance(value, list) or not all(_is_num(s) and 0 < s <= 1 for s in value):
            return "kc_sweep_sigmas must be a list of occupancies"
    return None


def load_config_file(path) -> tuple[dict, dict]:
    """Parse a YAML mapping; returns ``(values, line_of_key)``."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ConfigError(f"{path}: {exc.problem}", mark.line + 1 if mark else None) from None
    if data is None:
        return {}, {}
    if not isinstance(data, dict) or not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{path}: top level must be a mapping", 1)
    lines = {k.value: k.start_mark.line + 1 for k, _ in node.value}
    return data, lines


def resolve_config(file_values=None, file_lines=None, overrides=None, preset=None) -> dict:
    """Merge defaults, preset, file and overrides and validate the result."""
    file_values = file_values or {}
    file_lines = file_lines or {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    for key in file_values:
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}", file_lines.get(key))
    for key in overrides:
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}")
    preset = preset or overrides.get("preset") or file_values.get("preset")
    conf = dict(DEFAULTS)
    if preset is not None:
        err = _check("preset", preset)
        if err:
            raise ConfigError(err, file_lines.get("preset"))
        conf.update(PRESETS[preset])
        conf["preset"] = preset
    conf.update(file_values)
    conf.update(overrides)
    conf["preset"] = preset
    for key, value in conf.items():
        err = _check(key, value)
        if err:
            line = file_lines.get(key) if key not in overrides else None
            raise ConfigError(err, line)
    try:
        plan_from_config(conf)
    except InvalidPlanError as exc:
        line = file_lines.get("L") if "L" not in overrides else None
        raise ConfigError(str(exc), line) from None
    return conf


def plan_from_config(conf: dict) -> ExperimentPlan:
    grid = None if conf["sigma_grid"] == "auto" else tuple(conf["sigma_grid"])
    z_list = list(conf["z_list"])
    if isinstance(conf.get("targets"), list):
        z_list += [t[0] for t in conf["targets"]]
    return ExperimentPlan(
        L=conf["L"], z_list=tuple(dict.fromkeys(z_list)), sigma_grid=grid,
        realizations=conf["realizations"], warmup_steps=conf["warmup_steps"],
        seed=conf["seed"], mode=conf["mode"], trajectory_stride=conf["trajectory_stride"],
        coarse_realizations=conf["coarse_realizations"],
        points_per_decade=conf["points_per_decade"],
    )


def config_hash(conf: dict) -> str:
    data = {k: v for k, v in conf.items() if k not in _UNHASHED}
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _header(command, conf):
    return {"adhocnet": command, "config_sha256": config_hash(conf), "seed": conf["seed"]}


def _sweep_plan(conf):
    plan = plan_from_config(conf)
    return ExperimentPlan(**{**plan.to_dict(), "z_list": tuple(conf["z_list"]),
                             "sigma_grid": plan.sigma_grid})


def _curve_path(out, z):
    return os.path.join(out, f"curve_z{z}.csv")


_PLOT_CURVES = '''"""Connectivity curves with logistic fits (generated)."""
import csv, glob
import matplotlib.pyplot as plt

for path in sorted(glob.glob("curve_z*.csv")):
    rows = list(csv.DictReader(l for l in open(path) if not l.startswith("#")))
    s = [float(r["sigma"]) for r in rows]
    plt.errorbar(s, [float(r["eta_mean"]) for r in rows],
                 [float(r["eta_stderr"]) for r in rows], fmt="o", ms=3, label=path[6:-4])
    plt.plot(s, [float(r["eta_model"]) if r["eta_model"] else float("nan") for r in rows], "-")
plt.xlabel("occupancy sigma"); plt.ylabel("eta"); plt.legend(); plt.savefig("curves.png", dpi=150)
'''

_PLOT_COLLAPSE = '''"""Scaling collapse at the fitted exponent (generated)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(l for l in open("collapse.csv") if not l.startswith("#")))
for z in sorted({r["z"] for r in rows}, key=int):
    pts = [r for r in rows if r["z"] == z]
    plt.plot([float(r["x"]) for r in pts], [float(r["eta_mean"]) for r in pts], "o-", ms=3,
             label=f"z={z}")
plt.xlabel("collapse coordinate"); plt.ylabel("eta"); plt.legend(); plt.savefig("collapse.png", dpi=150)
'''

_PLOT_METRICS = '''"""Degree distribution, C(k) and k_nn(k) (generated)."""
import csv, glob
import matplotlib.pyplot as plt

fig, ax = plt.subplots(1, 3, figsize=(13, 4))
for path in sorted(glob.glob("metrics_z*.csv")):
    rows = list(csv.DictReader(l for l in open(path) if not l.startswith("#")))
    k = [int(r["k"]) for r in rows]
    val = lambda c: [float(r[c]) if r[c] else float("nan") for r in rows]
    ax[0].semilogy(k, val("p_k"), "o-", ms=3, label=path[8:-4])
    ax[1].plot(k, val("C_k"), "o-", ms=3)
    ax[2].plot(k, val("knn_k"), "o-", ms=3)
for a, name in zip(ax, ["p(k)", "C(k)", "k_nn(k)"]):
    a.set_xlabel("k"); a.set_ylabel(name)
ax[0].legend(fontsize=7); fig.tight_layout(); fig.savefig("metrics.png", dpi=150)
'''


def _write_script(out, name, text):
    with open(os.path.join(out, name), "w") as fh:
        fh.write(text)


def cmd_sweep(conf: dict, workers: int | None = None) -> list:
    out = aio.ensure_dir(conf["out_dir"])
    curves = run_connectivity_sweep(_sweep_plan(conf), workers=workers)
    fits, errors = [], {}
    for c in curves:
        try:
            fits.append(fit_logistic(c, eta_window=tuple(conf["fit_window"])))
        except AdhocNetError as exc:
            errors[str(c.z)] = str(exc)
    models = {f.z: f.predict for f in fits}
    header = _header("sweep", conf)
    for c in curves:
        aio.write_curves_csv(_curve_path(out, c.z), [c], header, model=models)
    report = fit_report(fits, curves=curves)
    if errors:
        report["errors"] = errors
    aio.write_json(os.path.join(out, "fit_report.json"), report)
    _write_script(out, "plot_curves.py", _PLOT_CURVES)
    return curves


def _load_or_sweep(conf, workers):
    out = conf["out_dir"]
    want = config_hash(conf)
    curves = []
    for z in conf["z_list"]:
        path = _curve_path(out, z)
        if not os.path.exists(path):
            break
        header, _ = aio.read_csv(path)
        if header.get("config_sha256") != want:
            break
        curves.extend(aio.read_curves_csv(path))
    else:
        return curves
    return cmd_sweep(conf, workers)


def cmd_collapse(conf: dict, workers: int | None = None):
    out = aio.ensure_dir(conf["out_dir"])
    curves = _load_or_sweep(conf, workers)
    variable = conf["collapse_variable"]
    result = find_beta(curves, interval=tuple(conf["beta_interval"]), step=conf["beta_step"],
                       variable=variable)
    header = _header("collapse", conf)
    rows = []
    for c in curves:
        x = rescaled_abscissa(c.sigma, c.z, result.beta, variable)
        rows += [[c.z, p.sigma, xi, p.eta_mean, p.eta_stderr] for p, xi in zip(c.points, x)]
    aio.write_csv(os.path.join(out, "collapse.csv"),
                  ("z", "sigma", "x", "eta_mean", "eta_stderr"), rows, header)
    aio.write_csv(os.path.join(out, "beta_profile.csv"), ("beta", "objective"),
                  [[b, v if math.isfinite(v) else None]
                   for b, v in zip(result.grid, result.profile)], header)
    aio.write_json(os.path.join(out, "beta_report.json"), {
        "beta": result.beta, "residual": result.residual, "reference_z": result.reference_z,
        "variable": variable, "interval": conf["beta_interval"], "step": conf["beta_step"],
    })
    _write_script(out, "plot_collapse.py", _PLOT_COLLAPSE)
    return result


def auto_targets(conf, curves) -> list[list]:
    """Occupancy where half the realizations are fully connected, per range.

    Rounded up to a whole node count on the lattice; falls back to the
    largest swept occupancy if the curve never gets there.
    """
    N = conf["L"] ** 2
    targets = []
    for c in curves:
        s = empirical_crossing(c, 0.5, "p_global")
        if not math.isfinite(s):
            s = float(c.sigma[-1])
        targets.append([c.z, math.ceil(round(s * N, 9)) / N])
    return targets


def _sigma_tag(s):
    return f"{s:.6g}"


def cmd_metrics(conf: dict, workers: int | None = None) -> dict:
    out = aio.ensure_dir(conf["out_dir"])
    plan = plan_from_config(conf)
    targets = conf["targets"]
    if targets == "auto":
        targets = auto_targets(conf, _load_or_sweep(conf, workers))
    header = _header("metrics", conf)
    report = {"targets": {}, "infeasible": {}}
    pooled = []
    for z, sigma in targets:
        tag = f"z{z}_sigma{_sigma_tag(sigma)}"
        try:
            table = run_metrics(plan, sigma, z, conf["eta_threshold"], conf["epsilon"], workers)
        except InfeasibleError as exc:
            report["infeasible"][tag] = {"message": str(exc),
                                         "acceptance_rate": exc.acceptance_rate}
            print(f"adhocnet: {exc}", file=sys.stderr)
            continue
        aio.write_metrics_csv(os.path.join(out, f"metrics_{tag}.csv"), table, header)
        plateau, spread = table.clustering_plateau(4, table.k_c)
        entry = {"z": z, "sigma": sigma, "k_c": table.k_c, "mean_degree": table.mean_degree,
                 "mean_degree_law": 3 * z * (z + 1) * sigma,
                 "acceptance_rate": table.acceptance_rate,
                 "C_plateau": plateau, "C_plateau_spread": spread}
        try:
            b, slope, r2 = check_knn_linearity(table)
            entry.update(knn_intercept=b, knn_slope=slope, knn_r_squared=r2)
        except AdhocNetError as exc:
            entry["knn_error"] = str(exc)
        report["targets"][tag] = entry
        pooled.append(table)
    if pooled:
        report["pooled_k_c"] = cutoff_degree(pooled_distribution(pooled), conf["epsilon"])
    kc_rows = []
    zk = conf["kc_sweep_z"]
    for sigma in conf["kc_sweep_sigmas"]:
        try:
            t = run_metrics(plan_from_config({**conf, "z_list": [zk]}), sigma, zk,
                            conf["eta_threshold"], conf["epsilon"], workers)
            kc_rows.append([sigma, t.k_c, t.mean_degree, t.acceptance_rate])
        except InfeasibleError as exc:
            kc_rows.append([sigma, None, None, exc.acceptance_rate])
    if conf["kc_sweep_sigmas"]:
        aio.write_csv(os.path.join(out, f"kc_sweep_z{zk}.csv"),
                      ("sigma", "k_c", "mean_degree", "acceptance_rate"), kc_rows, header)
    aio.write_json(os.path.join(out, "knn_report.json"), report)
    _write_script(out, "plot_metrics.py", _PLOT_METRICS)
    return report


COMMANDS = {"sweep": cmd_sweep, "collapse": cmd_collapse, "metrics": cmd_metrics}


def run_command(command: str, conf: dict, workers: int | None = None):
    t0 = time.perf_counter()
    result = COMMANDS[command](conf, workers)
    aio.write_json(os.path.join(conf["out_dir"], f"manifest_{command}.json"), {
        "command": command,
        "config": conf,
        "config_sha256": config_hash(conf),
        "seed": conf["seed"],
        "version": _version(),
        "wall_time_s": time.perf_counter() - t0,
        "files": sorted(os.path.basename(p) for p in glob.glob(os.path.join(conf["out_dir"], "*"))),
    })
    return result


def _parse_target(text):
    z, _, s = text.partition(":")
    try:
        return [int(z), float(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"target must look like Z:SIGMA, got {text!r}")


def _parse_set(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"--set expects KEY=VALUE, got {text!r}")
    return key, yaml.safe_load(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adhocnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [("sweep", "connectivity curves and logistic fits"),
                            ("collapse", "scaling collapse and exponent"),
                            ("metrics", "degree, clustering and k_nn tables")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--out", dest="out_dir")
        p.add_argument("--L", type=int)
        p.add_argument("--z", dest="z_list", type=int, nargs="+")
        p.add_argument("--sigma", dest="sigma_grid", type=float, nargs="+")
        p.add_argument("--realizations", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--warmup-steps", dest="warmup_steps", type=int)
        p.add_argument("--mode", choices=["independent", "trajectory"])
        p.add_argument("--eta-threshold", dest="eta_threshold", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--target", dest="targets", type=_parse_target, action="append",
                       help="Z:SIGMA operating point (metrics); repeatable")
        p.add_argument("--set", dest="extra", type=_parse_set, action="append", default=[],
                       metavar="KEY=VALUE", help="override any config key")
        p.add_argument("--workers", type=int, help="worker processes (default $ADHOCNET_WORKERS)")
    p = sub.add_parser("replay", help="re-run a command from a saved manifest")
    p.add_argument("manifest")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--workers", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            with open(args.manifest) as fh:
                manifest = json.load(fh)
            conf = resolve_config(manifest["config"], overrides={"out_dir": args.out_dir})
            run_command(manifest["command"], conf, args.workers)
            return 0
        file_values, file_lines = ({}, {})
        if args.config:
            file_values, file_lines = load_config_file(args.config)
        overrides = {k: getattr(args, k) for k in (
            "out_dir", "L", "z_list", "realizations", "seed", "warmup_steps", "mode",
            "eta_threshold", "epsilon", "targets")}
        if args.sigma_grid is not None:
            overrides["sigma_grid"] = args.sigma_grid
        overrides.update(dict(args.extra))
        conf = resolve_config(file_values, file_lines, overrides, preset=args.preset)
        result = run_command(args.command, conf, args.workers)
    except ConfigError as exc:
        where = f"{args.config}: " if getattr(args, "config", None) else ""
        print(f"adhocnet: invalid config: {where}{exc}", file=sys.stderr)
        return 2
    except AdhocNetError as exc:
        print(f"adhocnet: {exc}", file=sys.stderr)
        return 1
    if args.command == "metrics" and result.get("infeasible"):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
