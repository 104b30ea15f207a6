"""Command-line entry point: ``radeuler {run,picard,sweep,check}``."""

import argparse
from concurrent.futures import ProcessPoolExecutor
import os
from pathlib import Path
import sys

from .config import ConfigError, parse_config, to_ini

OUTPUT_ROOT_ENV = "RADEULER_OUTPUT_ROOT"

# flag -> config key
FLAG_KEYS = {
    "n": "grid.n",
    "t_final": "time.t_final",
    "cfl": "time.cfl",
    "output_every": "time.output_every",
    "integrator": "time.integrator",
    "mode": "model.mode",
    "closure": "model.closure",
    "nu": "model.nu",
    "epsilon": "initial.epsilon",
    "profile": "initial.profile",
    "flatness_order": "initial.flatness_order",
    "a": "geometry.a",
    "b": "geometry.b",
    "cv": "gas.cv",
    "A": "gas.A",
    "T": "picard.T",
    "k_max": "picard.k_max",
    "tol": "picard.tol",
}


def output_root():
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "radeuler-runs"))


def _add_config_flags(p, picard=False):
    p.add_argument("--config", help="sectioned key = value file")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override any config key (repeatable)")
    p.add_argument("--n", help="number of mass cells")
    p.add_argument("--t-final", dest="t_final")
    p.add_argument("--cfl")
    p.add_argument("--output-every", dest="output_every")
    p.add_argument("--integrator", choices=("ssprk3", "ssprk2"))
    p.add_argument("--closure", choices=("sbp", "central2"))
    p.add_argument("--nu")
    p.add_argument("--epsilon")
    p.add_argument("--profile")
    p.add_argument("--flatness-order", dest="flatness_order")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--cv")
    p.add_argument("--A")
    if picard:
        p.add_argument("--T", help="Picard horizon")
        p.add_argument("--k-max", dest="k_max")
        p.add_argument("--tol")
    else:
        p.add_argument("--mode", choices=("nonlinear", "linearized", "picard", "radiation-off"))
    p.add_argument("--output", help="output directory (default: $%s/<run name>)" % OUTPUT_ROOT_ENV)
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")


def _overrides(args, forced=None):
    out = {}
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = value
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    out.update(forced or {})
    return out


def run_name(cfg):
    return f"{cfg.mode}-n{cfg.n}-eps{cfg.epsilon:g}"


def _resolve_dir(cfg, explicit):
    if explicit:
        return Path(explicit)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return output_root() / run_name(cfg)


def execute(cfg, out_dir, figures=True, base_dir=None):
    """Run one config and write its outputs; returns ``(trajectory, files)``."""
    from .driver import run
    from .output import write_outputs

    traj = run(cfg, base_dir)
    files = write_outputs(traj, out_dir, figures=figures)
    return traj, files


def _print_run(traj, files, out_dir):
    print(f"status = {traj.status}")
    if traj.failure:
        print(f"failure = {traj.failure}")
    print(f"mode = {traj.config.mode}")
    print(f"records = {len(traj.states)}")
    print(f"wall_time_s = {traj.wall_time:.3f}")
    if traj.report is not None and traj.report.records:
        print(f"measured_C0 = {traj.report.measured_c0()[-1]:.6g}")
    if traj.picard is not None:
        for k, delta in enumerate(traj.picard.deltas, start=1):
            print(f"delta_{k} = {delta:.6e}")
        for k, g in traj.picard.ratios:
            print(f"gamma_{k} = {g:.6f}")
    print(f"output = {out_dir}")
    for name, path in files.items():
        print(f"  {name}: {path}")


def cmd_run(args, forced=None):
    cfg = parse_config(args.config, _overrides(args, forced))
    out_dir = _resolve_dir(cfg, args.output)
    base = Path(args.config).parent if args.config else None
    traj, files = execute(cfg, out_dir, not args.no_figures, base)
    _print_run(traj, files, out_dir)
    return 1 if traj.failed else 0


def cmd_picard(args):
    return cmd_run(args, {"model.mode": "picard"})


def _sweep_job(job):
    ini, out_dir, figures = job
    cfg = parse_config(text=ini)
    traj, _ = execute(cfg, out_dir, figures)
    return str(out_dir), traj.status, traj.wall_time


def cmd_sweep(args):
    base = _overrides(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values needs at least one value")
    root = Path(args.output) if args.output else output_root() / f"sweep-{args.param.replace('.', '-')}"
    jobs = []
    for value in values:
        cfg = parse_config(args.config, {**base, args.param: value})
        jobs.append((to_ini(cfg), root / f"{args.param}={value}", not args.no_figures))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(job) for job in jobs]
    print("directory,status,wall_time_s")
    for out_dir, status, wall in results:
        print(f"{out_dir},{status},{wall:.3f}")
    return 0 if all(status != "failed" for _, status, _ in results) else 1


def cmd_check(args):
    from .acceptance import run_all

    which = [int(k) for k in args.only.split(",")] if args.only else None
    results = run_all(which)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="radeuler", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="integrate one configuration and write outputs")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("picard", help="Picard iteration of the linearized system")
    _add_config_flags(p, picard=True)
    p.set_defaults(func=cmd_picard)
    p = sub.add_parser("sweep", help="run one parameter over several values")
    _add_config_flags(p)
    p.add_argument("--param", required=True, help="config key to vary, e.g. initial.epsilon")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("check", help="run the acceptance suite and print a report")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
