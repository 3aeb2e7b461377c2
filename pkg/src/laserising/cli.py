"""``laserising`` command line.

Every subcommand writes ``config.resolved`` (the configuration with all
defaults applied) and ``manifest.json`` into ``--out`` next to its data, so
that a run can be repeated from its output directory alone.

Exit codes: 0 success, 2 configuration error, 3 numerical abort,
4 oracle infeasible.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig
from .dynamics import IntegrationError, initial_state, integrate, trial_rng
from .experiments import (EnsembleAbortError, coupling_phase_sweep, run_ensemble,
                          spec_to_dict, sweep_coupling_ratio, sweep_table_csv)
from .files import ProblemFileError
from .ising import MAX_ORACLE_SITES, OracleInfeasibleError, brute_force_ground_state
from .locking import frequency_ramp, locking_bandwidth, locking_curve
from .standing_wave import sweep_path_length

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ORACLE = 4


def _err(msg: str) -> None:
    print(f"laserising: {msg}", file=sys.stderr)


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        cfg.set(key, value)
    if args.seed is not None:
        cfg.set("seed", str(args.seed), where="--seed")
    if getattr(args, "problem", None):
        cfg.set("problem_file", str(Path(args.problem).resolve()), where="--problem")
    return cfg


class _Output:
    """Collects the files of one run and finishes with the manifest."""

    def __init__(self, out: Path, command: str, cfg: RunConfig):
        self.dir = out
        self.command = command
        self.cfg = cfg
        self.files: dict[str, str] = {}
        out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        with open(path, "w", newline="") as fh:
            fh.write(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()
        return path

    def finish(self, status: str = "ok", extra: dict | None = None) -> None:
        self.write("config.resolved", self.cfg.dump())
        doc = {
            "artifact_version": __version__,
            "command": self.command,
            "status": status,
            "master_seed": self.cfg.get("seed"),
            "config": self.cfg.resolved(),
            "files": dict(sorted(self.files.items())),
        }
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        (self.dir / "manifest.json").write_text(text)


def _summary_text(data, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    rows = data if isinstance(data, list) else [data]
    buf = io.StringIO()
    keys = list(rows[0].keys())
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue()


# -- subcommands --------------------------------------------------------------

def cmd_simulate(args, cfg: RunConfig) -> int:
    out = _Output(Path(args.out), "simulate", cfg)
    spec = cfg.experiment_spec()
    m = spec.problem.site_count
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)][:args.max_pairs]
    try:
        traj = integrate(initial_state(spec.params, m), spec.duration, spec.dt,
                         spec.sample_interval, spec.params, spec.problem, spec.noise,
                         pairs=pairs, rng=trial_rng(spec.master_seed, args.trial))
    except IntegrationError as exc:
        _err(str(exc))
        if exc.trajectory is not None:
            out.write("trajectory.csv", exc.trajectory.to_csv())
        out.finish("numerical_abort")
        return EXIT_NUMERICAL
    out.write("trajectory.csv", traj.to_csv())
    out.finish(extra={"trial": args.trial})
    return EXIT_OK


def cmd_solve(args, cfg: RunConfig) -> int:
    out = _Output(Path(args.out), "solve", cfg)
    spec = cfg.experiment_spec()
    status = "ok"
    code = EXIT_OK
    try:
        result = run_ensemble(spec, workers=cfg.get("workers"),
                              keep_trajectories=args.trajectories)
    except EnsembleAbortError as exc:
        _err(str(exc))
        result, status, code = exc.result, "numerical_abort", EXIT_NUMERICAL
    out.write("trials.csv", result.summary_csv())
    summary = result.summary()
    out.write(f"summary.{args.format}", _summary_text(summary, args.format))
    if args.trajectories:
        for t in result.trials:
            if t.trajectory is not None:
                out.write(f"trajectory_{t.index:05d}.csv", t.trajectory.to_csv())
    out.finish(status, {"spec": spec_to_dict(spec)})

    sf = summary["success_fraction"]
    print(f"trials: {summary['trials']} (aborted {summary['aborted']})")
    print(f"success_fraction: {'n/a' if sf is None else f'{sf:.4f}'}")
    print(f"regime: {summary['regime']} {summary['regime_counts']}")
    print(f"mean_plateau_dphi_rad: {summary['mean_plateau_dphi']:.6f}")
    if summary["oracle_minimum"] is not None:
        print(f"oracle_minimum: {summary['oracle_minimum']!r}")
    return code


def cmd_oracle(args, cfg: RunConfig) -> int:
    problem = cfg.problem()
    if problem.site_count > MAX_ORACLE_SITES:
        _err(f"exact enumeration is limited to M <= {MAX_ORACLE_SITES}, "
             f"got M = {problem.site_count}")
        return EXIT_ORACLE
    gs = brute_force_ground_state(problem)
    lines = [f"minimum_energy {gs.minimum_energy!r}",
             f"degeneracy {len(gs.configurations)}"]
    lines += [" ".join(f"{s:+d}" for s in c) for c in gs.configurations]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    out = _Output(Path(args.out), "oracle", cfg)
    out.write("oracle.txt", text)
    out.finish()
    return EXIT_OK


def cmd_lockcurve(args, cfg: RunConfig) -> int:
    p = cfg.locking_params()
    sweep = frequency_ramp(cfg.get("lock_excursion_hz"), cfg.get("lock_points"))
    curve = locking_curve(sweep, p, cfg.get("lock_visibility"))
    out = _Output(Path(args.out), "lockcurve", cfg)
    out.write("lockcurve.csv", curve.to_csv())
    out.finish(extra={"locking_bandwidth_hz": locking_bandwidth(p)})
    print(f"locking_bandwidth_hz: {locking_bandwidth(p):.9g}")
    print(f"locked_fraction: {curve.locked_fraction():.6f}")
    return EXIT_OK


def cmd_standingwave(args, cfg: RunConfig) -> int:
    start, stop, steps, mirror = cfg.standing_wave_range()
    curve = sweep_path_length(start, stop, steps, cfg.geometry(), mirror)
    out = _Output(Path(args.out), "standingwave", cfg)
    out.write("standingwave.csv", curve.to_csv())
    out.finish()
    print(f"peak_to_peak_hz: {curve.peak_to_peak():.9g}")
    print(f"cycles: {len(curve.resets())}")
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    spec = cfg.experiment_spec()
    axis = spec.sweep_axis
    if axis == "none":
        raise ConfigError("sweep needs sweep_axis (eta, zeta, coupling_phase or path_length)")
    workers = cfg.get("workers")
    if axis in ("eta", "zeta"):
        rows = sweep_coupling_ratio(spec, workers=workers)
        records = [{"value": r.value, "regime": r.regime,
                    "success_fraction": r.success_fraction, "mean_dphi": r.mean_dphi,
                    **r.regime_counts, "unbounded_phase": r.unbounded_phase} for r in rows]
    else:
        rows = coupling_phase_sweep(spec, geometry=cfg.geometry(), workers=workers)
        records = [{"theta_rad": r.theta, "path_length_m": r.path_length,
                    "loop_count": r.loop_count, "j_eff": r.coupling,
                    "predicted_order": r.predicted_order, "measured_order": r.measured_order,
                    "antiferro_fraction": r.antiferro_fraction} for r in rows]
    out = _Output(Path(args.out), "sweep", cfg)
    out.write("sweep." + args.format,
              sweep_table_csv(rows) if args.format == "csv" else _summary_text(records, "json"))
    out.finish(extra={"spec": spec_to_dict(spec)})
    for rec in records:
        print(" ".join(f"{k}={v}" for k, v in rec.items()))
    return EXIT_OK


COMMANDS = {
    "simulate": (cmd_simulate, "integrate one trial and write its trajectory"),
    "solve": (cmd_solve, "run a seeded ensemble and report its success rate"),
    "oracle": (cmd_oracle, "print the exact ground states of a problem"),
    "lockcurve": (cmd_lockcurve, "tabulate the injection-locking curve"),
    "standingwave": (cmd_standingwave, "tabulate the standing-wave sawtooth"),
    "sweep": (cmd_sweep, "regime or order table along a parameter axis"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--out", default="laserising-out", metavar="DIR",
                        help="output directory (default: %(default)s)")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="format of summary outputs")

    parser = argparse.ArgumentParser(prog="laserising",
                                     description="Injection-locked laser Ising machine.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "simulate":
            p.add_argument("--trial", type=int, default=0, help="trial index within the seed")
            p.add_argument("--max-pairs", type=int, default=64,
                           help="relative-phase columns to write (default: %(default)s)")
        if name == "solve":
            p.add_argument("--trajectories", action="store_true",
                           help="also write every trial's trajectory")
        if name == "oracle":
            p.add_argument("problem", nargs="?", help="problem file (overrides problem_file)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        cfg = _load_config(args)
        return handler(args, cfg)
    except (ConfigError, ProblemFileError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except OracleInfeasibleError as exc:
        _err(str(exc))
        return EXIT_ORACLE
    except IntegrationError as exc:
        _err(str(exc))
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        _err(f"invalid configuration: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
