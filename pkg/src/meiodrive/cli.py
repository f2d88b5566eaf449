"""Command-line entry point: run experiments from key=value config files."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from meiodrive import acceptance, bounds, io, meanfield
from meiodrive.config import (ConfigError, ExperimentConfig, GENOTYPE_NAMES,
                              emit_config, parse_config)
from meiodrive.engine import initial_condition, run_until
from meiodrive.genes import DominationViolation, GeneLatticeState, run_coupled
from meiodrive.meanfield import MeanFieldState, integrate
from meiodrive.model import Genotype
from meiodrive.rng import stream_seed

EXIT_OK = 0
EXIT_CRITERION = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class CriterionFailure(Exception):
    """A verification-style check failed; maps to exit code 1."""


def _load_config(args, command: str) -> ExperimentConfig:
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}")
    else:
        cfg = ExperimentConfig()
    cfg.command = command
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    return cfg


def _build_initial(cfg: ExperimentConfig, replicate: int):
    return initial_condition(
        cfg.init, cfg.lattice(), cfg.seed, cfg.rates(),
        genotype=GENOTYPE_NAMES[cfg.init_genotype], p=cfg.init_p,
        cube_halfwidth=cfg.init_halfwidth,
        fill=GENOTYPE_NAMES[cfg.init_fill], rng_index=replicate)


def cmd_simulate(args) -> int:
    cfg = _load_config(args, "simulate")
    for rep in range(cfg.replicates):
        state = _build_initial(cfg, rep)
        frames = []

        def keep(st):
            frames.append(st.geno.copy())

        series = run_until(state, cfg.t_end,
                           sample_interval=cfg.sample_interval,
                           on_sample=keep if cfg.snapshots else None)
        io.write_series(series, os.path.join(cfg.out, f"series_{rep}.csv"))
        if cfg.snapshots:
            if cfg.d == 1:
                io.write_spacetime(frames,
                                   os.path.join(cfg.out, f"spacetime_{rep}.pgm"))
            else:
                io.write_snapshot(state,
                                  os.path.join(cfg.out, f"final_{rep}.pgm"))
        print(f"replicate {rep}: t={state.t:g}, "
              f"{len(series)} samples, frozen={state.frozen}")
    return EXIT_OK


def _format_report(report) -> str:
    lines = [f"regime: {report.regime}"]
    for fp in report.fixed_points:
        u = fp.state
        eig = ", ".join(f"{e:g}" for e in fp.eigenvalues)
        lines.append(f"{fp.kind}: ({u.u_aa:g}, {u.u_ab:g}, {u.u_bb:g}) "
                     f"eigenvalues [{eig}] "
                     f"{'stable' if fp.stable else 'unstable'}")
    return "\n".join(lines) + "\n"


def cmd_meanfield(args) -> int:
    cfg = _load_config(args, "meanfield")
    traj = integrate(MeanFieldState(cfg.u_aa, cfg.u_ab, cfg.u_bb),
                     cfg.rates(), cfg.t_end, step=cfg.step)
    from meiodrive.engine import ObservableSeries
    series = ObservableSeries(["u_aa", "u_ab", "u_bb"])
    for t, u in zip(traj.times, traj.states):
        series.append(t, list(u))
    io.write_series(series, os.path.join(cfg.out, "meanfield.csv"))
    report = meanfield.stability_report(cfg.rates())
    text = _format_report(report)
    io.write_text(text, os.path.join(cfg.out, "fixed_points.txt"))
    print(text, end="")
    return EXIT_OK


def cmd_phase_sweep(args) -> int:
    cfg = _load_config(args, "phase-sweep")
    vals = np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_steps)
    grid = meanfield.phase_sweep(vals, vals, cfg.phi_ab, cfg.phi_ba)
    lines = ["phi_aa," + ",".join(f"{v:.12g}" for v in vals)]
    for v, row in zip(vals, grid):
        lines.append(f"{v:.12g}," + ",".join(row))
    io.write_text("\n".join(lines) + "\n",
                  os.path.join(cfg.out, "regimes.csv"))
    print(f"wrote {cfg.grid_steps}x{cfg.grid_steps} regime grid")
    return EXIT_OK


def cmd_coupled(args) -> int:
    cfg = _load_config(args, "coupled")
    lattice = cfg.lattice()
    geno0 = _build_initial(cfg, 0).geno
    xi0 = GeneLatticeState.from_genotypes(lattice, geno0)
    zeta0 = xi0.copy()
    try:
        run = run_coupled(lattice, cfg.rates(), xi0, zeta0, cfg.t_end,
                          stream_seed(cfg.seed, 1))
    except DominationViolation as e:
        print(f"domination check FAILED: {e}")
        return EXIT_CRITERION
    print(f"domination held across {run.n_events} arrows up to t={cfg.t_end:g}")
    return EXIT_OK


def cmd_walk(args) -> int:
    cfg = _load_config(args, "walk")
    params = bounds.InvasionWalkParams.from_rates(cfg.phi_aa, cfg.phi_bb,
                                                  cfg.d)
    emp, closed = bounds.invasion_walk(params, cfg.walk_k, cfg.walk_n,
                                       cfg.seed)
    print(f"r={params.r:.6g} c={params.c:.6g} K={cfg.walk_k}")
    print(f"closed form {closed:.6g}, Monte Carlo {emp:.6g} "
          f"({cfg.walk_n} walks)")
    return EXIT_OK


def cmd_verify(args) -> int:
    indices = args.only
    results = []
    for i, fn in enumerate(acceptance.ALL, start=1):
        if indices and i not in indices:
            continue
        res = fn()
        results.append(res)
        print(res.line(), flush=True)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_CRITERION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meiodrive",
        description="Stochastic lattice simulator and analysis tools for a "
                    "two-allele population model with biased inheritance.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("simulate", cmd_simulate, "run the lattice process"),
        ("meanfield", cmd_meanfield, "integrate the nonspatial ODE system"),
        ("phase-sweep", cmd_phase_sweep, "map dynamical regimes over a grid"),
        ("coupled", cmd_coupled, "run the coupled pair construction"),
        ("walk", cmd_walk, "invasion random-walk hitting probability"),
        ("verify", cmd_verify, "run the built-in verification suite"),
    ]
    for name, fn, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", default=None)
        p.add_argument("--seed", metavar="U64", type=int, default=None)
        p.add_argument("--out", metavar="DIR", default=None)
        p.add_argument("--threads", metavar="N", type=int, default=1,
                       help="maximum worker threads (replicates are "
                            "independent)")
        if name == "verify":
            p.add_argument("--only", metavar="N", type=int, nargs="*",
                           help="run only the listed criteria")
        p.set_defaults(func=fn)
    return parser


def entry(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CriterionFailure as e:
        print(f"check failed: {e}", file=sys.stderr)
        return EXIT_CRITERION
    except Exception as e:  # runtime failures map to a distinct exit code
        print(f"{args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(entry())


if __name__ == "__main__":
    main()
