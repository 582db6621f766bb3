"""Command-line entry point.

Subcommands run one experiment each from a flat key=value config file
and write ``report.json`` plus ``tables/*.csv`` (and, for the solver
commands, ``fields/*.tnls``) into the output directory.

Exit codes: 0 success, 1 validation error (bad flags, missing or
malformed config), 2 numerical abort (solver blow-up guard).  Failed
tolerance checks are recorded in the report, not in the exit code.
"""

import argparse
import os
import sys

import numpy as np

from .. import fieldio
from .._threads import set_workers
from ..evolution import BLOWUP_FACTOR, IVP, BlowUpError, energy, mass, solve
from ..fields import Lattice, TorusField
from ..spectral import forward_transform
from .config import ConfigError, ExperimentConfig
from .experiments import (
    _profile_from_config,
    _random_band_data,
    _rng,
    run_conservation,
    run_euclidean_comparison,
    run_extinction,
    run_hflf,
    run_orthogonality,
    run_strichartz,
    run_trilinear,
)
from .reports import ExperimentReport

__all__ = ["main"]

_EXPERIMENTS = {
    "extinction": run_extinction,
    "euclid-compare": run_euclidean_comparison,
    "conservation": run_conservation,
    "strichartz": run_strichartz,
    "trilinear": run_trilinear,
    "orthogonality": run_orthogonality,
    "hflf": run_hflf,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tnls", description="spectral laboratory experiment harness"
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in (*_EXPERIMENTS, "solve", "field-io"):
        p = sub.add_parser(name, help=f"run the {name} task")
        p.add_argument("--config", required=True, help="path to a key=value config file")
        p.add_argument("--out", default=None, help="output directory (default from config)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="FFT worker threads")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config value (repeatable)",
        )
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    cfg.apply_overrides(args.override)
    if args.seed is not None:
        cfg.values["seed"] = str(args.seed)
    return cfg


def _initial_data(cfg: ExperimentConfig, lattice: Lattice) -> TorusField:
    source = cfg.get_str("data", "profile")
    if source == "profile":
        from ..profiles import rescale_to_torus

        phi = _profile_from_config(cfg)
        return rescale_to_torus(phi, cfg.get_float("n", 1.0), lattice)
    if source == "random":
        return _random_band_data(lattice, cfg.get_int("band", 4), _rng(cfg))
    raise ConfigError(f"unknown data source {source!r} (want profile or random)")


def _run_solve(cfg: ExperimentConfig, outdir: str) -> ExperimentReport:
    rep = ExperimentReport("solve", cfg.echo())
    lattice = Lattice(cfg.get_int("m"))
    data = _initial_data(cfg, lattice)
    rho = cfg.get_float("rho", 1.0)
    ivp = IVP(
        data,
        rho,
        (0.0, cfg.get_float("t_end")),
        cfg.get_float("dt"),
        cfg.get_str("dealias", "zero_pad_3x"),
        sample_stride=cfg.get_int("sample_stride", 1),
    )
    traj = solve(ivp, blowup_factor=cfg.get_float("blowup_factor", BLOWUP_FACTOR))
    fieldio.write_trajectory(os.path.join(outdir, "fields"), traj)
    m0, e0 = mass(traj.fields[0]), energy(traj.fields[0], rho)
    rows = [
        (float(t), mass(f), energy(f, rho))
        for t, f in zip(traj.times, traj.fields)
    ]
    rep.add_table("conserved", ["t", "mass", "energy"], rows)
    rep.add_check(
        "mass_drift",
        abs(rows[-1][1] - m0) / m0 < 1e-12,
        f"relative drift {abs(rows[-1][1] - m0) / m0:.3g}",
    )
    rep.metadata["energy_initial"] = e0
    rep.note(f"wrote {len(traj)} snapshots under fields/")
    return rep


def _run_field_io(cfg: ExperimentConfig, outdir: str) -> ExperimentReport:
    """Write the configured initial data to disk, read it back, verify."""
    rep = ExperimentReport("field_io", cfg.echo())
    lattice = Lattice(cfg.get_int("m"))
    data = _initial_data(cfg, lattice)
    path = os.path.join(outdir, "fields", "initial.tnls")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fieldio.write_snapshot(path, data)
    back = fieldio.read_snapshot(path)
    exact = bool(np.array_equal(back.values, data.values)) and back.lattice == lattice
    rep.add_check("roundtrip_exact", exact, path)
    rep.add_table(
        "snapshot",
        ["path", "M", "l2_norm"],
        [(os.path.relpath(path, outdir), lattice.M,
          float(np.sqrt(np.sum(np.abs(forward_transform(data).coeffs) ** 2))))],
    )
    return rep


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract wants 1
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = _load_config(args)
        if args.threads is not None:
            set_workers(args.threads)
        outdir = args.out or cfg.get_str("out_dir", "out")
        if args.command == "solve":
            rep = _run_solve(cfg, outdir)
        elif args.command == "field-io":
            rep = _run_field_io(cfg, outdir)
        else:
            rep = _EXPERIMENTS[args.command](cfg)
        rep.write(outdir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BlowUpError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2
    line = "pass" if rep.passed else ("no checks" if not rep.checks else "FAIL")
    print(f"{args.command}: {line}; report in {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
